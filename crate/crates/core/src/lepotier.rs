//! Finite-depth approximation of the Le Potier curve.
//!
//! Each exceptional bundle `E` contributes a V-shaped piece `e^l E^+ e^r`
//! hanging below `Δ_{1/2}`. Between consecutive generated pieces the true
//! curve is made of deeper pieces and arcs of `Δ_{1/2}`; there it lies between
//! `Δ_{1/2}` and `Δ_{1/2 + b}` where `b = 1/(2·rk²)` for the median bundle of
//! the two neighbours, the shallowest omitted notch.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Result;
use crate::exceptional::{
    median, tree, DyadicLabel, ExceptionalBundle, FivePoints,
};
use crate::plane::{compare_delta, orientation, Orientation, PlanePoint};
use crate::rat::{int, rat, Rat};
use crate::surd::Surd;

#[derive(Clone, Debug)]
pub struct CurvePiece {
    pub owner: ExceptionalBundle,
    pub five: Arc<FivePoints>,
}

impl CurvePiece {
    pub fn left_seg(&self) -> (&PlanePoint, &PlanePoint) {
        (&self.five.el_curve, &self.five.e_plus)
    }

    pub fn right_seg(&self) -> (&PlanePoint, &PlanePoint) {
        (&self.five.e_plus, &self.five.er_curve)
    }

    pub fn s_min(&self) -> &Surd {
        &self.five.el_curve.s
    }

    pub fn s_max(&self) -> &Surd {
        &self.five.er_curve.s
    }

    pub fn covers(&self, s: &Surd) -> bool {
        self.s_min() <= s && s <= self.s_max()
    }

    /// Segment `[E, E^+]` contains `p`.
    pub fn on_vertical_segment(&self, p: &PlanePoint) -> bool {
        on_vertical_segment(&self.owner, &self.five, p)
    }
}

fn on_vertical_segment(owner: &ExceptionalBundle, five: &FivePoints, p: &PlanePoint) -> bool {
    let e = owner.point();
    p.s == e.s && five.e_plus.q <= p.q && p.q <= e.q
}

/// The stretch strictly between two consecutive pieces.
#[derive(Clone, Debug)]
pub struct Gap {
    pub left: ExceptionalBundle,
    pub right: ExceptionalBundle,
    /// `1/(2·rk²)` of the median of `left` and `right`.
    pub bound: Rat,
}

#[derive(Clone, Debug)]
pub struct LPApprox {
    pub depth: u32,
    pub window: (Rat, Rat),
    pub pieces: Vec<CurvePiece>,
    pub gaps: Vec<Gap>,
    /// Largest notch depth any omitted bundle can have inside the covered range.
    pub gap_bound: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeoClassification {
    AboveCurve,
    BelowCurve,
    OnSegmentEEplus(ExceptionalBundle),
    UncertainNearCurve(Rat),
}

impl GeoClassification {
    pub fn is_above(&self) -> bool {
        matches!(self, GeoClassification::AboveCurve)
    }
}

/// Where a value of `s` falls relative to the pieces.
pub(crate) enum Slot<'a> {
    Piece(&'a CurvePiece),
    Gap(&'a Gap),
    Outside,
}

impl LPApprox {
    /// One piece for every bundle of level at most `depth` with slope in `window`.
    pub fn build(window: (Rat, Rat), depth: u32) -> LPApprox {
        let t = tree();
        let (lo, hi) = (&window.0, &window.1);
        let pieces: Vec<CurvePiece> = t
            .generate_window(lo, hi, depth)
            .into_iter()
            .filter(|e| {
                let s = e.slope();
                &s >= lo && &s <= hi
            })
            .map(|owner| CurvePiece {
                five: t.five_points(&owner),
                owner,
            })
            .collect();
        let gaps: Vec<Gap> = pieces
            .windows(2)
            .map(|w| {
                let m = median(&w[0].owner, &w[1].owner)
                    .unwrap_or_else(|e| panic!("internal invariant breach: {e}"));
                let r = m.rank();
                Gap {
                    left: w[0].owner.clone(),
                    right: w[1].owner.clone(),
                    bound: Rat::one() / (int(2) * r * r),
                }
            })
            .collect();
        let gap_bound = gaps
            .iter()
            .map(|g| g.bound.clone())
            .max()
            .unwrap_or_else(Rat::zero);
        LPApprox {
            depth,
            window,
            pieces,
            gaps,
            gap_bound,
        }
    }

    pub(crate) fn slot(&self, s: &Surd) -> Slot<'_> {
        let idx = self.pieces.partition_point(|pc| pc.s_min() <= s);
        if idx == 0 {
            return Slot::Outside;
        }
        let pc = &self.pieces[idx - 1];
        if s <= pc.s_max() {
            return Slot::Piece(pc);
        }
        if idx < self.pieces.len() {
            Slot::Gap(&self.gaps[idx - 1])
        } else {
            Slot::Outside
        }
    }

    /// Piece whose `s`-range contains `s`.
    pub fn covering_piece(&self, s: &Surd) -> Option<&CurvePiece> {
        match self.slot(s) {
            Slot::Piece(pc) => Some(pc),
            _ => None,
        }
    }

    /// Classifies `p` against the approximation. `AboveCurve` is only
    /// reported when it holds for the true curve.
    pub fn classify(&self, p: &PlanePoint) -> GeoClassification {
        use GeoClassification::*;
        if compare_delta(p, &Rat::zero()) == Ordering::Less {
            return AboveCurve;
        }
        if compare_delta(p, &Rat::one()) == Ordering::Greater {
            return BelowCurve;
        }
        match self.slot(&p.s) {
            Slot::Piece(pc) => {
                if pc.on_vertical_segment(p) {
                    return OnSegmentEEplus(pc.owner.clone());
                }
                let line = if p.s <= pc.five.e_plus.s {
                    &pc.five.left_line
                } else {
                    &pc.five.right_line
                };
                match orientation(p, line) {
                    Orientation::Above => AboveCurve,
                    _ => BelowCurve,
                }
            }
            Slot::Gap(gap) => {
                let half = rat(1, 2);
                match compare_delta(p, &half) {
                    Ordering::Less => match omitted_segment_owner(gap, p) {
                        Some(e) => OnSegmentEEplus(e),
                        None => AboveCurve,
                    },
                    _ => {
                        if compare_delta(p, &(&half + &gap.bound)) == Ordering::Greater {
                            BelowCurve
                        } else {
                            UncertainNearCurve(gap.bound.clone())
                        }
                    }
                }
            }
            Slot::Outside => UncertainNearCurve(rat(1, 2)),
        }
    }

    /// CSV rows `owner_label, s(e^l), s(E^+), q(E^+), s(e^r)` as 30-digit
    /// decimals followed by the exact `(a,b,d)` forms.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let row_err = |e: csv::Error| crate::error::Error::Unsupported(e.to_string());
        w.write_record([
            "owner_label",
            "s_el",
            "s_eplus",
            "q_eplus",
            "s_er",
            "s_el_exact",
            "s_eplus_exact",
            "q_eplus_exact",
            "s_er_exact",
        ])
        .map_err(row_err)?;
        for pc in &self.pieces {
            let f = &pc.five;
            let vals = [&f.el_curve.s, &f.e_plus.s, &f.e_plus.q, &f.er_curve.s];
            let mut row = vec![pc.owner.label.to_string()];
            row.extend(vals.iter().map(|x| x.to_decimal(30)));
            row.extend(vals.iter().map(|x| x.exact_triple()));
            w.write_record(&row).map_err(row_err)?;
        }
        let bytes = w.into_inner().map_err(|e| crate::error::Error::Unsupported(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("ascii"))
    }
}

/// Searches the subtree between the gap's neighbours for a bundle `E` with
/// `p ∈ [E, E^+]`. Only bundles with `Δ(E) ≤ Δ(p)` can qualify, which bounds
/// the rank by `rk² ≤ 1/(1 − 2Δ(p))`.
fn omitted_segment_owner(gap: &Gap, p: &PlanePoint) -> Option<ExceptionalBundle> {
    let s = p.s.as_rational()?;
    let delta = crate::plane::delta_value(p);
    let delta = delta.as_rational()?;
    let slack = Rat::one() - int(2) * delta;
    if !slack.is_positive() {
        return None;
    }
    let max_rank_sq = Rat::one() / slack;
    let t = tree();
    let (mut a, mut b) = (gap.left.clone(), gap.right.clone());
    loop {
        let m = median(&a, &b).ok()?;
        let r = m.rank();
        if r * r > max_rank_sq {
            return None;
        }
        let sm = m.slope();
        match s.cmp(&sm) {
            Ordering::Equal => {
                let five = t.five_points(&m);
                return on_vertical_segment(&m, &five, p).then_some(m);
            }
            Ordering::Less => b = m,
            Ordering::Greater => a = m,
        }
    }
}

/// Label-keyed lookup used by callers that hold a bundle and want its piece.
pub fn piece_for(approx: &LPApprox, label: DyadicLabel) -> Option<&CurvePiece> {
    approx.pieces.iter().find(|pc| pc.owner.label == label)
}

type ApproxMemo = RwLock<HashMap<(i64, u32), Arc<LPApprox>>>;

static LOCAL: OnceLock<ApproxMemo> = OnceLock::new();

/// A shared approximation whose window comfortably covers abscissa `s`.
pub fn approx_around(s: &Surd, depth: u32) -> Arc<LPApprox> {
    let n = s.floor().to_i64().expect("abscissa fits i64");
    let map = LOCAL.get_or_init(Default::default);
    if let Some(a) = map.read().unwrap().get(&(n, depth)) {
        return a.clone();
    }
    let a = Arc::new(LPApprox::build((int(n - 2), int(n + 3)), depth));
    map.write()
        .unwrap()
        .entry((n, depth))
        .or_insert(a)
        .clone()
}

/// Classifies `p` at `depth` against a window chosen around it.
pub fn classify(p: &PlanePoint, depth: u32) -> GeoClassification {
    approx_around(&p.s, depth).classify(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane::{delta_value, on_segment};
    use crate::rat::parse_rat;

    fn pt(s: &str, q: &str) -> PlanePoint {
        PlanePoint::rational(parse_rat(s).unwrap(), parse_rat(q).unwrap())
    }

    #[test]
    fn depth_zero_pieces() {
        let a = LPApprox::build((int(-1), int(1)), 0);
        let labels: Vec<_> = a.pieces.iter().map(|p| p.owner.label.to_string()).collect();
        assert_eq!(labels, ["-1", "0", "1"]);
        let o = &a.pieces[1];
        let root5 = Surd::new(int(0), rat(1, 2), 5.into());
        assert_eq!(o.s_min(), &(&Surd::rational(rat(-3, 2)) + &root5));
        assert_eq!(o.s_max(), &(&Surd::rational(rat(3, 2)) - &root5));
        assert_eq!(a.gap_bound, rat(1, 8));
        // Neighbouring line-bundle pieces do not overlap.
        for w in a.pieces.windows(2) {
            assert!(w[0].s_max() < w[1].s_min());
        }
    }

    #[test]
    fn depth_one_pieces_and_bound() {
        let a = LPApprox::build((int(0), int(1)), 1);
        let half = a.pieces.iter().find(|p| p.owner.rank() == &int(2)).unwrap();
        assert_eq!(half.five.e_plus, pt("1/2", "-1/2"));
        assert_eq!(a.gap_bound, rat(1, 50));
    }

    #[test]
    fn classification_examples() {
        let a = LPApprox::build((int(-1), int(1)), 0);
        assert_eq!(a.classify(&pt("0", "1")), GeoClassification::AboveCurve);
        assert_eq!(
            a.classify(&pt("0", "-1/2")),
            GeoClassification::OnSegmentEEplus(crate::exceptional::line_bundle(0))
        );
        assert_eq!(a.classify(&pt("0.01", "-0.9")), GeoClassification::AboveCurve);
        assert_eq!(a.classify(&pt("0", "-1")), GeoClassification::OnSegmentEEplus(crate::exceptional::line_bundle(0)));
        assert_eq!(a.classify(&pt("0", "-2")), GeoClassification::BelowCurve);
        // In the gap between O and O(1), just below Δ_{1/2}.
        let s = rat(45, 100);
        let q = &s * &s / int(2) - rat(1, 2) - rat(1, 1000);
        let p = PlanePoint::rational(s, q);
        assert!(matches!(a.classify(&p), GeoClassification::UncertainNearCurve(b) if b == rat(1, 8)));
    }

    #[test]
    fn omitted_segment_found_by_descent() {
        // E(1/2) has point (1/2, -1/4); its segment reaches q = -1/2.
        let a = LPApprox::build((int(-1), int(1)), 0);
        let p = pt("1/2", "-3/10");
        assert_eq!(compare_delta(&p, &rat(1, 2)), Ordering::Less);
        match a.classify(&p) {
            GeoClassification::OnSegmentEEplus(e) => assert_eq!(e.rank(), &int(2)),
            other => panic!("{other:?}"),
        }
        // E(3/4) = (5, 3, -3/2), point (3/5, -3/10), two levels down.
        let p = pt("3/5", "-3/10");
        match a.classify(&p) {
            GeoClassification::OnSegmentEEplus(e) => assert_eq!(e.rank(), &int(5)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn segments_stay_in_band() {
        let a = LPApprox::build((int(0), int(1)), 3);
        for pc in &a.pieces {
            let r = pc.owner.rank();
            let top = rat(1, 2) + Rat::one() / (int(2) * r * r);
            assert_eq!(delta_value(&pc.five.e_plus).as_rational(), Some(&top));
            assert!(on_segment(&pc.five.el_curve, &pc.five.e_plus, &pc.five.e_l));
            assert!(pc.s_min() < &pc.five.e_plus.s && &pc.five.e_plus.s < pc.s_max());
        }
        for w in a.pieces.windows(2) {
            assert!(w[0].s_max() < w[1].s_min());
        }
    }

    #[test]
    fn csv_export() {
        let a = LPApprox::build((int(-1), int(1)), 0);
        let text = a.to_csv().unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("owner_label,s_el,"));
        let o = lines.nth(1).unwrap();
        assert!(o.starts_with("0,-0.381966011250105151795413165634,0.000000000000000000000000000000,-1.000000000000000000000000000000,0.381966011250105151795413165634,"), "{o}");
        assert!(o.contains("\"(-3/2,1/2,5)\""));
    }
}

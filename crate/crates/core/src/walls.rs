//! Walls `W_{Fσ}`: the part of the line through `σ` and `ch(F)` lying above
//! the Le Potier curve, their `−3` twists, and phase brackets on `Δ_{<0}`.

use std::cmp::Ordering;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lepotier::{GeoClassification, LPApprox};
use crate::numk::{twist, CharVector};
use crate::plane::{
    compare_delta, intersect_line_parabola, intersect_lines, line_through_char, twist_point, Line,
    Parabola, PlanePoint,
};
use crate::rat::{int, Rat};
use crate::stability::{unit_phase, GeometricSC};
use crate::surd::Surd;

/// What stops a wall at one of its ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EndKind {
    /// A segment `e^l E^+` or `E^+ e^r` of a generated piece.
    Curve,
    /// `Δ_{1/2}` inside a gap; the true end is at most the gap bound lower.
    Parabola,
    /// A vertical segment `[E, E^+]`.
    Segment,
    /// The edge of the approximation window; the true wall continues.
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct Wall {
    pub line: Line,
    /// Endpoints ordered along the line (by `s`, or by `q` when vertical).
    pub clipped: (PlanePoint, PlanePoint),
    pub ends: (EndKind, EndKind),
    pub owner_char: CharVector,
    pub base: GeometricSC,
    pub depth: u32,
}

impl Wall {
    /// Horizontal extent `s(end) − s(start)` in floating point.
    pub fn s_extent(&self) -> f64 {
        self.clipped.1.s.to_f64() - self.clipped.0.s.to_f64()
    }

    /// Exact horizontal extent when both ends share a quadratic field.
    pub fn s_extent_exact(&self) -> Option<Surd> {
        let (a, b) = (&self.clipped.0.s, &self.clipped.1.s);
        a.same_field(b).then(|| b - a)
    }
}

fn param(line: &Line, p: &PlanePoint) -> Surd {
    if line.is_vertical() {
        p.q.clone()
    } else {
        p.s.clone()
    }
}

/// Candidate points where the line can leave the region above the curve.
fn breakpoints(line: &Line, approx: &LPApprox) -> Vec<(PlanePoint, EndKind)> {
    let mut out = Vec::new();
    for pc in &approx.pieces {
        let f = &pc.five;
        let segs = [
            (&f.left_line, &f.el_curve.s, &f.e_plus.s),
            (&f.right_line, &f.e_plus.s, &f.er_curve.s),
        ];
        for (seg_line, lo, hi) in segs {
            if let Some(x) = intersect_lines(line, seg_line) {
                if lo <= &x.s && &x.s <= hi {
                    out.push((x, EndKind::Curve));
                }
            }
        }
        let e = pc.owner.point();
        if line.is_vertical() {
            if line.contains(&e) {
                out.push((e, EndKind::Segment));
            }
        } else {
            let q = line.q_at(&e.s).expect("nonvertical");
            if f.e_plus.q <= q && q <= e.q {
                out.push((PlanePoint::new(e.s.clone(), q), EndKind::Segment));
            }
        }
    }
    for x in intersect_line_parabola(line, &Parabola::delta_half()) {
        out.push((x, EndKind::Parabola));
    }
    out
}

/// The limits of the approximation along the line, as points.
fn window_limits(line: &Line, approx: &LPApprox, sigma: &PlanePoint) -> (PlanePoint, PlanePoint) {
    if line.is_vertical() {
        let (lo, hi) = &approx.window;
        let reach = lo * lo + hi * hi + int(1);
        let top = PlanePoint::new(sigma.s.clone(), &sigma.q + &reach);
        let bottom = PlanePoint::new(sigma.s.clone(), &sigma.q - &reach);
        return (bottom, top);
    }
    let (Some(first), Some(last)) = (approx.pieces.first(), approx.pieces.last()) else {
        return (sigma.clone(), sigma.clone());
    };
    let at = |s: &Surd| PlanePoint::new(s.clone(), line.q_at(s).expect("nonvertical"));
    (at(first.s_min()), at(last.s_max()))
}

/// The wall of `v` through `σ`, clipped to the connected part of the line
/// above the depth-`m` curve that contains `σ`.
pub fn wall(sigma: &GeometricSC, v: &CharVector, approx: &LPApprox) -> Result<Wall> {
    let base = sigma.point();
    let line = line_through_char(&base, v)?;
    if !approx.classify(&base).is_above() {
        return Err(Error::NotGeometric(sigma.s.to_string(), sigma.q.to_string()));
    }
    let t0 = param(&line, &base);
    let mut pts = breakpoints(&line, approx);
    pts.sort_by_key(|a| param(&line, &a.0));
    let stops = |p: &PlanePoint| !matches!(approx.classify(p), GeoClassification::AboveCurve);
    let (lo_limit, hi_limit) = window_limits(&line, approx, &base);

    let hi = pts
        .iter()
        .filter(|(p, _)| param(&line, p) > t0)
        .find(|(p, _)| stops(p))
        .cloned();
    let lo = pts
        .iter()
        .rev()
        .filter(|(p, _)| param(&line, p) < t0)
        .find(|(p, _)| stops(p))
        .cloned();
    let within = |p: &PlanePoint, limit: &PlanePoint, upper: bool| {
        let c = param(&line, p).cmp(&param(&line, limit));
        if upper {
            c != Ordering::Greater
        } else {
            c != Ordering::Less
        }
    };
    let hi = match hi {
        Some((p, k)) if within(&p, &hi_limit, true) => (p, k),
        _ => (hi_limit, EndKind::Unbounded),
    };
    let lo = match lo {
        Some((p, k)) if within(&p, &lo_limit, false) => (p, k),
        _ => (lo_limit, EndKind::Unbounded),
    };
    Ok(Wall {
        line,
        clipped: (lo.0, hi.0),
        ends: (lo.1, hi.1),
        owner_char: v.clone(),
        base: sigma.clone(),
        depth: approx.depth,
    })
}

/// Image of a wall under `(s, q) ↦ (s − 3, q − 3s + 9/2)`.
pub fn wall_twist(w: &Wall) -> Wall {
    let base = twist_point(&w.base.point());
    let (s, q) = base.as_rational().expect("rational base");
    Wall {
        line: w.line.twisted(),
        clipped: (twist_point(&w.clipped.0), twist_point(&w.clipped.1)),
        ends: w.ends,
        owner_char: twist(&w.owner_char, -3),
        base: GeometricSC::unchecked(s, q),
        depth: w.depth,
    }
}

/// `Z_Q` of the point `(1, s, q)` of the plane.
pub fn charge_at(sigma: &GeometricSC, p: &PlanePoint) -> Complex64 {
    let re = &Surd::rational(sigma.q.clone()) - &p.q;
    let im = &p.s - &Surd::rational(sigma.s.clone());
    Complex64::new(re.to_f64(), im.to_f64())
}

/// Endpoints `C, D` of the chord `L_{vP} ∩ Δ_0`, sorted by `s`.
pub fn chord(p: &GeometricSC, v: &CharVector) -> Result<(PlanePoint, PlanePoint)> {
    let line = line_through_char(&p.point(), v)?;
    let pts = intersect_line_parabola(&line, &Parabola::delta0());
    match pts.len() {
        0 => Err(Error::NoIntersection),
        1 => Ok((pts[0].clone(), pts[0].clone())),
        _ => Ok((pts[0].clone(), pts[1].clone())),
    }
}

/// Phase bracket at `Q` for objects destabilized along the chord through `P`.
///
/// The phase at `C` is taken in `(0, 1]`; the phase at `D` is its continuation
/// along the chord, so every chord point has a phase between the two.
pub fn bayer_bracket(p: &GeometricSC, q: &GeometricSC, v: &CharVector) -> Result<(f64, f64)> {
    for x in [p, q] {
        if compare_delta(&x.point(), &Rat::zero()) != Ordering::Less {
            return Err(Error::InvalidParams(format!(
                "({}, {}) is not inside Δ_0",
                x.s, x.q
            )));
        }
    }
    let (c, d) = chord(p, v)?;
    let zc = charge_at(q, &c);
    let zd = charge_at(q, &d);
    if zc.norm() == 0.0 || zd.norm() == 0.0 {
        return Err(Error::ZeroCharge);
    }
    let phi_c = unit_phase(zc);
    let phi_d = phi_c + (zd / zc).arg() / std::f64::consts::PI;
    Ok(if phi_c <= phi_d {
        (phi_c, phi_d)
    } else {
        (phi_d, phi_c)
    })
}

/// Phase at `Q` of a chord point, continued from `C` like [`bayer_bracket`].
pub fn chord_phase(q: &GeometricSC, c: &PlanePoint, x: &PlanePoint) -> f64 {
    let zc = charge_at(q, c);
    unit_phase(zc) + (charge_at(q, x) / zc).arg() / std::f64::consts::PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane::{delta_value, orientation, Orientation};
    use crate::rat::{parse_rat, rat};

    fn sc(s: &str, q: &str) -> GeometricSC {
        GeometricSC::unchecked(parse_rat(s).unwrap(), parse_rat(q).unwrap())
    }

    #[test]
    fn line_of_rank_one_class_meets_half_parabola() {
        // σ = (1, −1/2), v = O: the line q = −s/2 meets Δ_{1/2} at (−1 ± √5)/2.
        // That base point is O(1)^+, on the curve itself, so no wall is built.
        let sigma = sc("1", "-1/2");
        let line = line_through_char(&sigma.point(), &CharVector::structure_sheaf()).unwrap();
        assert_eq!(line.slope(), Some(rat(-1, 2)));
        let hits = intersect_line_parabola(&line, &Parabola::delta_half());
        let root5 = Surd::new(int(0), rat(1, 2), 5.into());
        assert_eq!(hits[0].s, &Surd::rational(rat(-1, 2)) - &root5);
        assert_eq!(hits[1].s, &Surd::rational(rat(-1, 2)) + &root5);
        let approx = LPApprox::build((int(-2), int(3)), 0);
        assert!(matches!(
            wall(&sigma, &CharVector::structure_sheaf(), &approx),
            Err(Error::NotGeometric(..))
        ));
    }

    #[test]
    fn horizontal_wall_between_segments() {
        // q = 0 through σ = (1/2, 0) and O runs from O itself to the segment of O(1).
        let approx = LPApprox::build((int(-2), int(3)), 0);
        let w = wall(&sc("1/2", "0"), &CharVector::structure_sheaf(), &approx).unwrap();
        assert_eq!(w.clipped.0, PlanePoint::rational(int(0), int(0)));
        assert_eq!(w.clipped.1, PlanePoint::rational(int(1), int(0)));
        assert_eq!(w.ends, (EndKind::Segment, EndKind::Segment));
        assert_eq!(w.s_extent_exact(), Some(Surd::rational(int(1))));
    }

    #[test]
    fn vertical_wall_stops_at_segment() {
        let approx = LPApprox::build((int(-2), int(2)), 1);
        let v = CharVector::new(int(1), int(0), int(-5));
        let w = wall(&sc("0", "1"), &v, &approx).unwrap();
        assert!(w.line.is_vertical());
        assert_eq!(w.clipped.0, PlanePoint::rational(int(0), int(0)));
        assert_eq!(w.ends, (EndKind::Segment, EndKind::Unbounded));
    }

    #[test]
    fn endpoints_lie_on_curve_pieces() {
        let approx = LPApprox::build((int(-2), int(2)), 2);
        let w = wall(&sc("0.3", "0.2"), &CharVector::from_ints(2, 1, -1), &approx).unwrap();
        for (p, k) in [(&w.clipped.0, w.ends.0), (&w.clipped.1, w.ends.1)] {
            match k {
                EndKind::Curve => {
                    let pc = approx.covering_piece(&p.s).unwrap();
                    let on = orientation(p, &pc.five.left_line) == Orientation::On
                        || orientation(p, &pc.five.right_line) == Orientation::On;
                    assert!(on);
                }
                EndKind::Parabola => assert_eq!(delta_value(p), Surd::rational(rat(1, 2))),
                _ => {}
            }
        }
    }

    #[test]
    fn twisted_wall_matches_twisted_line() {
        let approx = LPApprox::build((int(-2), int(3)), 1);
        let sigma = sc("1/2", "0");
        let v = CharVector::structure_sheaf();
        let w = wall(&sigma, &v, &approx).unwrap();
        let t = wall_twist(&w);
        let expected = line_through_char(&twist_point(&sigma.point()), &twist(&v, -3)).unwrap();
        assert_eq!(t.line, expected);
        assert!((t.s_extent() - w.s_extent()).abs() < 1e-12);
        assert_eq!(delta_value(&t.clipped.0), delta_value(&w.clipped.0));
    }

    #[test]
    fn bracket_example() {
        let (lo, hi) = bayer_bracket(&sc("0", "1"), &sc("0", "2"), &CharVector::line_bundle(1)).unwrap();
        assert!((lo - 0.5).abs() < 1e-12);
        let d = 1f64.atan2(1.5) / std::f64::consts::PI;
        assert!((hi - (1.0 + d)).abs() < 1e-12, "{hi}");
        // Midpoint of the chord C = (−2, 2), D = (1, 1/2).
        let q = sc("0", "2");
        let c = PlanePoint::rational(int(-2), int(2));
        let mid = PlanePoint::rational(rat(-1, 2), rat(5, 4));
        let phi = chord_phase(&q, &c, &mid);
        assert!(lo <= phi && phi <= hi);
        // Tangency gives a degenerate bracket.
        let (a, b) = bayer_bracket(&sc("0", "1"), &q, &CharVector::structure_sheaf()).unwrap();
        assert_eq!(a, b);
    }
}

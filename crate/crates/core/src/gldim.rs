//! The global dimension function on geometric and algebraic stability
//! conditions.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exceptional::{hom_data, left_mutation_class, right_mutation_class, ExceptionalTriple};
use crate::lepotier::{classify, GeoClassification};
use crate::numk::twist;
use crate::rat::{to_f64, Rat};
use crate::stability::{
    find_region, in_parabola_interior, on_leg_wall, phase_in_unit, theta_report, AlgebraicSC,
    GeometricSC, MZTag, ThetaTag, PHASE_TOLERANCE,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GldimCase {
    ParabolaInterior,
    GeometricCore,
    GeometricLeftLeg,
    GeometricRightLeg,
    AlgebraicPure,
    AlgebraicLeftLeg,
    AlgebraicRightLeg,
    Boundary,
    Uncertain,
}

/// Value of `gldim`, which case produced it, and the pair of objects whose
/// Hom realises the supremum. `value` is NaN exactly when `case` is
/// `Uncertain`.
#[derive(Clone, Debug, PartialEq)]
pub struct GldimResult {
    pub value: f64,
    pub case: GldimCase,
    pub witness: String,
}

impl GldimResult {
    fn new(value: f64, case: GldimCase, witness: impl Into<String>) -> Self {
        GldimResult {
            value,
            case,
            witness: witness.into(),
        }
    }

    fn skyscraper(case: GldimCase) -> Self {
        GldimResult::new(2.0, case, "O_x -> O_x[2]")
    }

    pub fn uncertain() -> Self {
        GldimResult::new(f64::NAN, GldimCase::Uncertain, "")
    }
}

impl fmt::Display for GldimResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} {:?}", self.value, self.case)?;
        if !self.witness.is_empty() {
            write!(f, " {}", self.witness)?;
        }
        Ok(())
    }
}

fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

pub fn gldim_geometric(sigma: &GeometricSC, depth: u32) -> Result<GldimResult> {
    let p = sigma.point();
    if in_parabola_interior(&p) {
        return Ok(GldimResult::skyscraper(GldimCase::ParabolaInterior));
    }
    match classify(&p, depth) {
        GeoClassification::AboveCurve => {}
        GeoClassification::UncertainNearCurve(_) => return Ok(GldimResult::uncertain()),
        _ => return Err(Error::NotGeometric(sigma.s.to_string(), sigma.q.to_string())),
    }
    let (tag, triple) = find_region(&p, depth)?;
    match tag {
        MZTag::Core => Ok(GldimResult::skyscraper(GldimCase::GeometricCore)),
        MZTag::LeftLeg(e) => {
            let t = triple.expect("leg comes with its triple");
            if on_leg_wall(&p, &t, true) {
                return Ok(GldimResult::skyscraper(GldimCase::Boundary));
            }
            // L_E E(3) has phase in (φ(E) − 1, φ(E)].
            let l = left_mutation_class(&e.ch, &twist(&e.ch, 3));
            let gap = phase_in_unit(sigma, &e.ch)? - phase_in_unit(sigma, &l)?;
            Ok(GldimResult::new(
                2.0 + frac(gap),
                GldimCase::GeometricLeftLeg,
                format!("L_{e} {e}(3) -> {e}[2]"),
            ))
        }
        MZTag::RightLeg(e) => {
            let t = triple.expect("leg comes with its triple");
            if on_leg_wall(&p, &t, false) {
                return Ok(GldimResult::skyscraper(GldimCase::Boundary));
            }
            // R_E E(−3) has phase in [φ(E), φ(E) + 1).
            let r = right_mutation_class(&twist(&e.ch, -3), &e.ch);
            let gap = phase_in_unit(sigma, &r)? - phase_in_unit(sigma, &e.ch)?;
            Ok(GldimResult::new(
                2.0 + frac(gap),
                GldimCase::GeometricRightLeg,
                format!("{e} -> R_{e} {e}(-3)[2]"),
            ))
        }
        MZTag::Outside | MZTag::Uncertain => Ok(GldimResult::uncertain()),
    }
}

pub fn gldim_algebraic(sigma: &AlgebraicSC) -> Result<GldimResult> {
    let report = theta_report(sigma, PHASE_TOLERANCE)?;
    let [p1, _, p3] = sigma.phi;
    let t = &sigma.triple;
    let (e1, e3) = (&t.e1, &t.e3);
    Ok(match report.tag {
        ThetaTag::Pure => GldimResult::new(p3 - p1, GldimCase::AlgebraicPure, format!("{e1} -> {e3}")),
        ThetaTag::LeftLeg => GldimResult::new(
            p3 - report.phi_left + 2.0,
            GldimCase::AlgebraicLeftLeg,
            format!("L_{e3} {e3}(3) -> {e3}[2]"),
        ),
        ThetaTag::RightLeg => GldimResult::new(
            report.phi_right + 2.0 - p1,
            GldimCase::AlgebraicRightLeg,
            format!("{e1} -> R_{e1} {e1}(-3)[2]"),
        ),
        ThetaTag::GeometricCore => GldimResult::skyscraper(GldimCase::GeometricCore),
        ThetaTag::BoundaryLeft | ThetaTag::BoundaryRight => {
            GldimResult::skyscraper(GldimCase::Boundary)
        }
    })
}

fn to_f(x: &num_bigint::BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// `h = hom12 − hom23/hom13` and its dual `h^∨ = hom23 − hom12/hom13`.
fn h_pair(t: &ExceptionalTriple) -> (f64, f64) {
    let d = hom_data(t);
    let h_dual = Rat::from_integer(d.hom23.clone()) - Rat::new(d.hom12.clone(), d.hom13.clone());
    (to_f64(&d.h), to_f64(&h_dual))
}

/// `φ(L_{E3} E3(3)) = φ2 + 1 + θ_L` with
/// `θ_L = (1/π)·atan2(sin α, cos α + (m2/m1)·h)` and `α = (φ1 + 1 − φ2)π`.
pub fn phase_left_mutation_closed(t: &ExceptionalTriple, m1: f64, m2: f64, phi1: f64, phi2: f64) -> f64 {
    let (h, _) = h_pair(t);
    let alpha = (phi1 + 1.0 - phi2) * PI;
    let theta = alpha.sin().atan2(alpha.cos() + (m2 / m1) * h) / PI;
    phi2 + 1.0 + theta
}

/// The same phase read off the resolution
/// `[L_{E3} E3(3)] = hom13·[E1] + r·[E2[1]]`, branch in `(φ2, φ2 + 2]`.
pub fn phase_left_mutation_character(
    t: &ExceptionalTriple,
    m1: f64,
    m2: f64,
    phi1: f64,
    phi2: f64,
) -> f64 {
    let d = hom_data(t);
    let z = Complex64::from_polar(to_f(&d.hom13) * m1, PI * phi1)
        + Complex64::from_polar(to_f(&d.r) * m2, PI * (phi2 + 1.0));
    lift_into(z.arg() / PI, phi2)
}

/// `φ(R_{E1} E1(−3)) = φ2 − 1 − θ_R` with
/// `θ_R = (1/π)·atan2(sin α', cos α' + (m2/m3)·h^∨)` and `α' = (φ2 + 1 − φ3)π`.
pub fn phase_right_mutation_closed(t: &ExceptionalTriple, m2: f64, m3: f64, phi2: f64, phi3: f64) -> f64 {
    let (_, h_dual) = h_pair(t);
    let alpha = (phi2 + 1.0 - phi3) * PI;
    let theta = alpha.sin().atan2(alpha.cos() + (m2 / m3) * h_dual) / PI;
    phi2 - 1.0 - theta
}

/// The same phase from `[R_{E1} E1(−3)] = hom13·[E3] + r'·[E2[−1]]` with
/// `r' = hom13·hom23 − hom12`, branch in `(φ2 − 2, φ2]`.
pub fn phase_right_mutation_character(
    t: &ExceptionalTriple,
    m2: f64,
    m3: f64,
    phi2: f64,
    phi3: f64,
) -> f64 {
    let d = hom_data(t);
    let r_dual = &d.hom13 * &d.hom23 - &d.hom12;
    let z = Complex64::from_polar(to_f(&d.hom13) * m3, PI * phi3)
        + Complex64::from_polar(to_f(&r_dual) * m2, PI * (phi2 - 1.0));
    lift_into(z.arg() / PI, phi2 - 2.0)
}

/// Adds an even integer to `a` so that it lands in `(lo, lo + 2]`.
fn lift_into(a: f64, lo: f64) -> f64 {
    let k = ((lo + 2.0 - a) / 2.0).floor();
    a + 2.0 * k
}

/// One cell of a scan.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub s: Rat,
    pub q: Rat,
    /// `None` when the point is not above the curve.
    pub result: Option<GldimResult>,
}

/// `n` evenly spaced exact values from `lo` to `hi`.
pub fn linspace(lo: &Rat, hi: &Rat, n: usize) -> Vec<Rat> {
    if n <= 1 {
        return vec![lo.clone()];
    }
    let step = (hi - lo) / Rat::from_integer((n - 1).into());
    (0..n)
        .map(|i| lo + &step * Rat::from_integer(i.into()))
        .collect()
}

/// Evaluates `gldim` on a grid, row-major with `q` outer and `s` inner.
///
/// With `jobs > 1` rows are evaluated on a private thread pool; the output
/// is identical to the serial one.
pub fn scan_grid(
    s_range: (&Rat, &Rat),
    q_range: (&Rat, &Rat),
    resolution: (usize, usize),
    depth: u32,
    jobs: usize,
) -> Result<Vec<ScanRow>> {
    let ss = linspace(s_range.0, s_range.1, resolution.0);
    let qs = linspace(q_range.0, q_range.1, resolution.1);
    let eval_row = |q: &Rat| -> Result<Vec<ScanRow>> {
        ss.iter()
            .map(|s| {
                let sigma = GeometricSC::unchecked(s.clone(), q.clone());
                let result = match gldim_geometric(&sigma, depth) {
                    Ok(r) => Some(r),
                    Err(Error::NotGeometric(..)) => None,
                    Err(e) => return Err(e),
                };
                Ok(ScanRow {
                    s: s.clone(),
                    q: q.clone(),
                    result,
                })
            })
            .collect()
    };
    let rows: Vec<Result<Vec<ScanRow>>> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Unsupported(e.to_string()))?;
        pool.install(|| qs.par_iter().map(eval_row).collect())
    } else {
        qs.iter().map(eval_row).collect()
    };
    let mut out = Vec::with_capacity(ss.len() * qs.len());
    for row in rows {
        out.extend(row?);
    }
    Ok(out)
}

/// Formats with 17 significant digits.
pub fn sig17(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    format!("{x:.16e}")
}

pub fn scan_to_csv(rows: &[ScanRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["s", "q", "gldim", "case", "witness"])
        .expect("in-memory write");
    for row in rows {
        let (value, case, witness) = match &row.result {
            Some(r) => (sig17(r.value), format!("{:?}", r.case), r.witness.clone()),
            None => (sig17(f64::NAN), "NotGeometric".to_string(), String::new()),
        };
        w.write_record([
            sig17(to_f64(&row.s)),
            sig17(to_f64(&row.q)),
            value,
            case,
            witness,
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exceptional::{make_triple, DyadicLabel, TripleShape};
    use crate::rat::{int, parse_rat};

    fn standard() -> ExceptionalTriple {
        make_triple(DyadicLabel::integer(0), TripleShape::Consecutive).unwrap()
    }

    fn geo(s: &str, q: &str) -> GeometricSC {
        GeometricSC::unchecked(parse_rat(s).unwrap(), parse_rat(q).unwrap())
    }

    #[test]
    fn geometric_examples() {
        let r = gldim_geometric(&geo("0", "1"), 3).unwrap();
        assert_eq!((r.value, r.case), (2.0, GldimCase::ParabolaInterior));
        assert_eq!(r.to_string(), "2.0 ParabolaInterior O_x -> O_x[2]");
        let right = gldim_geometric(&geo("0.01", "-0.9"), 3).unwrap();
        assert_eq!(right.case, GldimCase::GeometricRightLeg);
        assert!(right.value > 2.0 && right.value < 3.0, "{}", right.value);
        let left = gldim_geometric(&geo("-0.01", "-0.9"), 3).unwrap();
        assert_eq!(left.case, GldimCase::GeometricLeftLeg);
        assert!((left.value - right.value).abs() < 1e-12);
        assert!(gldim_geometric(&geo("0", "-2"), 3).is_err());
    }

    #[test]
    fn algebraic_examples() {
        let t = standard();
        let eval = |phi| gldim_algebraic(&AlgebraicSC::new(t.clone(), [1.0; 3], phi).unwrap()).unwrap();
        let r = eval([0.0, 1.2, 2.5]);
        assert_eq!((r.value, r.case), (2.5, GldimCase::AlgebraicPure));
        let r = eval([0.0, 0.5, 2.2]);
        assert_eq!(r.case, GldimCase::AlgebraicLeftLeg);
        let theta = (1.0f64 / 2.5).atan() / PI;
        assert!((theta - 0.12112).abs() < 1e-5);
        assert!((r.value - (2.2 - (1.5 + theta) + 2.0)).abs() < 1e-12);
        assert!((r.value - 2.57888).abs() < 1e-5);
        assert_eq!(eval([0.0, 0.5, 1.4]).case, GldimCase::GeometricCore);
    }

    #[test]
    fn two_routes_agree_on_examples() {
        let t = standard();
        let closed = phase_left_mutation_closed(&t, 1.0, 1.0, 0.0, 0.5);
        let character = phase_left_mutation_character(&t, 1.0, 1.0, 0.0, 0.5);
        assert!((closed - 1.62112).abs() < 1e-5);
        assert!((closed - character).abs() < 1e-12);
        let closed = phase_right_mutation_closed(&t, 1.0, 1.0, 0.5, 1.4);
        let character = phase_right_mutation_character(&t, 1.0, 1.0, 0.5, 1.4);
        assert!((closed - character).abs() < 1e-12);
        // Near φ2 = φ1 + 1 the left phase tends to φ1 + 2.
        let p = phase_left_mutation_closed(&t, 1.0, 1.0, 0.0, 1.0 - 1e-12);
        assert!((p - 2.0).abs() < 1e-9);
    }

    #[test]
    fn left_leg_tends_to_two_at_the_wall() {
        let t = standard();
        let wall = phase_left_mutation_closed(&t, 1.0, 1.0, 0.0, 0.5);
        let r = gldim_algebraic(&AlgebraicSC::new(t, [1.0; 3], [0.0, 0.5, wall + 1e-6]).unwrap())
            .unwrap();
        assert_eq!(r.case, GldimCase::AlgebraicLeftLeg);
        assert!(r.value - 2.0 < 1e-5);
    }

    #[test]
    fn scan_small_grid() {
        let rows = scan_grid(
            (&parse_rat("-0.1").unwrap(), &parse_rat("0.1").unwrap()),
            (&parse_rat("0.5").unwrap(), &parse_rat("1.5").unwrap()),
            (3, 3),
            2,
            1,
        )
        .unwrap();
        assert_eq!(rows.len(), 9);
        assert!(rows.iter().all(|r| r.result.as_ref().unwrap().value == 2.0));
        assert_eq!(rows[1].s, int(0));
        assert_eq!(rows[1].q, parse_rat("0.5").unwrap());
        let csv = scan_to_csv(&rows);
        assert!(csv.starts_with("s,q,gldim,case,witness\n"));
        assert!(csv.contains("2.0000000000000000e0,ParabolaInterior"));
    }

    #[test]
    fn lift_branches() {
        assert_eq!(lift_into(-0.5, 0.5), 1.5);
        assert_eq!(lift_into(0.9, 0.5), 0.9);
        assert_eq!(lift_into(0.5, 0.5), 2.5);
    }
}

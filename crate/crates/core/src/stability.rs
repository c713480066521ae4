//! Stability conditions: geometric ones given by a point `(s, q)`, algebraic
//! ones glued from an exceptional triple, and the region taxonomy of both.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exceptional::{
    five_points, make_triple, DyadicLabel, ExceptionalBundle, ExceptionalTriple, TripleShape,
};
use crate::gldim::{phase_left_mutation_closed, phase_right_mutation_closed};
use crate::lepotier::{classify, GeoClassification};
use crate::numk::CharVector;
use crate::plane::{
    compare_delta, orientation, point_in_polygon, Line, Orientation, PlanePoint, PolygonLocation,
};
use crate::rat::{int, to_f64, Rat};

/// Default tolerance for comparing phases.
pub const PHASE_TOLERANCE: f64 = 1e-9;

/// The geometric stability condition `σ_{s,q}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GeometricSC {
    pub s: Rat,
    pub q: Rat,
}

impl GeometricSC {
    /// Validates that `(s, q)` is above the curve at the given depth.
    pub fn new(s: Rat, q: Rat, depth: u32) -> Result<GeometricSC> {
        let sc = GeometricSC { s, q };
        match classify(&sc.point(), depth) {
            GeoClassification::AboveCurve => Ok(sc),
            _ => Err(Error::NotGeometric(sc.s.to_string(), sc.q.to_string())),
        }
    }

    /// No validation; callers promise the point is geometric.
    pub fn unchecked(s: Rat, q: Rat) -> GeometricSC {
        GeometricSC { s, q }
    }

    pub fn point(&self) -> PlanePoint {
        PlanePoint::rational(self.s.clone(), self.q.clone())
    }
}

/// `Z_{s,q}(v) = (−ch2 + q·ch0) + i(ch1 − s·ch0)` as exact real and imaginary parts.
pub fn central_charge(sigma: &GeometricSC, v: &CharVector) -> (Rat, Rat) {
    (
        -&v.ch2 + &sigma.q * &v.ch0,
        &v.ch1 - &sigma.s * &v.ch0,
    )
}

/// `arg(z)/π` lifted into `(0, 1]`.
pub fn unit_phase(z: Complex64) -> f64 {
    let phi = z.im.atan2(z.re) / PI;
    if phi <= 0.0 {
        phi + 1.0
    } else {
        phi
    }
}

/// Phase in `(0, 1]` of the class `v` (or of `−v`, whichever lies in the heart).
pub fn phase_in_unit(sigma: &GeometricSC, v: &CharVector) -> Result<f64> {
    let (re, im) = central_charge(sigma, v);
    if re.is_zero() && im.is_zero() {
        return Err(Error::ZeroCharge);
    }
    // Decide the half-plane exactly; floating point only fixes the angle.
    if im.is_zero() {
        return Ok(1.0);
    }
    let z = Complex64::new(to_f64(&re), to_f64(&im));
    Ok(unit_phase(z))
}

/// An algebraic stability condition: each `E_i` stable of mass `m_i` and phase `φ_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraicSC {
    pub triple: ExceptionalTriple,
    pub m: [f64; 3],
    pub phi: [f64; 3],
}

impl AlgebraicSC {
    /// Requires `m_i > 0`, `φ1 < φ2 < φ3` and `φ1 + 1 < φ3`.
    pub fn new(triple: ExceptionalTriple, m: [f64; 3], phi: [f64; 3]) -> Result<AlgebraicSC> {
        if m.iter().any(|x| !x.is_finite() || *x <= 0.0) {
            return Err(Error::InvalidParams(format!("masses must be positive: {m:?}")));
        }
        if phi.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams(format!("phases must be finite: {phi:?}")));
        }
        let [p1, p2, p3] = phi;
        if !(p1 < p2 && p2 < p3) {
            return Err(Error::InvalidParams(format!(
                "phases must increase strictly: {phi:?}"
            )));
        }
        if p1 + 1.0 >= p3 {
            return Err(Error::InvalidParams(format!("need φ1 + 1 < φ3: {phi:?}")));
        }
        Ok(AlgebraicSC { triple, m, phi })
    }

    pub fn from_json(text: &str) -> Result<AlgebraicSC> {
        let wire: AlgebraicWire =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let center = DyadicLabel::parse(&wire.triple.center)?;
        let triple = make_triple(center, wire.triple.shape)?;
        let m = <[f64; 3]>::try_from(wire.m.as_slice())
            .map_err(|_| Error::InvalidParams("expected three masses".into()))?;
        let phi = <[f64; 3]>::try_from(wire.phi.as_slice())
            .map_err(|_| Error::InvalidParams("expected three phases".into()))?;
        AlgebraicSC::new(triple, m, phi)
    }

    pub fn to_json(&self) -> String {
        let wire = AlgebraicWire {
            triple: TripleWire {
                center: self.triple.center.to_string(),
                shape: self.triple.shape,
            },
            m: self.m.to_vec(),
            phi: self.phi.to_vec(),
        };
        serde_json::to_string(&wire).expect("serializable")
    }
}

#[derive(Serialize, Deserialize)]
struct TripleWire {
    center: String,
    shape: TripleShape,
}

#[derive(Serialize, Deserialize)]
struct AlgebraicWire {
    triple: TripleWire,
    m: Vec<f64>,
    phi: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ThetaTag {
    Pure,
    LeftLeg,
    RightLeg,
    GeometricCore,
    BoundaryLeft,
    BoundaryRight,
}

/// Phase data behind a [`ThetaTag`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaReport {
    pub tag: ThetaTag,
    /// `φ(L_{E3} E3(3))`.
    pub phi_left: f64,
    /// `φ(R_{E1} E1(−3))`.
    pub phi_right: f64,
}

pub fn classify_theta(sigma: &AlgebraicSC) -> Result<ThetaTag> {
    Ok(theta_report(sigma, PHASE_TOLERANCE)?.tag)
}

pub fn theta_report(sigma: &AlgebraicSC, tol: f64) -> Result<ThetaReport> {
    let s = AlgebraicSC::new(sigma.triple.clone(), sigma.m, sigma.phi)?;
    let [m1, m2, m3] = s.m;
    let [p1, p2, p3] = s.phi;
    let phi_left = phase_left_mutation_closed(&s.triple, m1, m2, p1, p2);
    let phi_right = phase_right_mutation_closed(&s.triple, m2, m3, p2, p3);
    let report = |tag| ThetaReport {
        tag,
        phi_left,
        phi_right,
    };
    if p2 - p1 >= 1.0 && p3 - p2 >= 1.0 {
        return Ok(report(ThetaTag::Pure));
    }
    let left_active = p2 - p1 < 1.0;
    let right_active = p3 - p2 < 1.0;
    let gap_left = p3 - phi_left;
    let gap_right = phi_right - p1;
    let left = left_active && gap_left > tol;
    let right = right_active && gap_right > tol;
    match (left, right) {
        (true, true) => Err(Error::InconsistentLegs),
        (true, false) => Ok(report(ThetaTag::LeftLeg)),
        (false, true) => Ok(report(ThetaTag::RightLeg)),
        _ if left_active && gap_left.abs() <= tol => Ok(report(ThetaTag::BoundaryLeft)),
        _ if right_active && gap_right.abs() <= tol => Ok(report(ThetaTag::BoundaryRight)),
        _ => Ok(report(ThetaTag::GeometricCore)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MZTag {
    Core,
    LeftLeg(ExceptionalBundle),
    RightLeg(ExceptionalBundle),
    Outside,
    Uncertain,
}

impl fmt::Display for MZTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MZTag::Core => write!(f, "Core"),
            MZTag::LeftLeg(e) => write!(f, "LeftLeg owner={e}"),
            MZTag::RightLeg(e) => write!(f, "RightLeg owner={e}"),
            MZTag::Outside => write!(f, "Outside"),
            MZTag::Uncertain => write!(f, "Uncertain"),
        }
    }
}

/// The polygons attached to a triple.
#[derive(Clone, Debug)]
pub struct MZPolygons {
    /// `E1, E1^r, E2, E3^l, E3`; not convex, with a reflex vertex at `E2`.
    pub core: Vec<PlanePoint>,
    /// `E1, E1^+, E2, E3^+, E3`.
    pub mz: Vec<PlanePoint>,
    /// Wall between the core and the left leg, through `E3` and `E3^l`.
    pub left_wall: Line,
    /// Wall between the core and the right leg, through `E1` and `E1^r`.
    pub right_wall: Line,
}

pub fn mz_polygons(t: &ExceptionalTriple) -> MZPolygons {
    let f1 = five_points(&t.e1);
    let f3 = five_points(&t.e3);
    let (p1, p2, p3) = (t.e1.point(), t.e2.point(), t.e3.point());
    let left_wall = Line::two_points(&p3, &f3.e_l).expect("distinct points");
    let right_wall = Line::two_points(&p1, &f1.e_r).expect("distinct points");
    MZPolygons {
        core: vec![p1.clone(), f1.e_r.clone(), p2.clone(), f3.e_l.clone(), p3.clone()],
        mz: vec![p1, f1.e_plus.clone(), p2, f3.e_plus.clone(), p3],
        left_wall,
        right_wall,
    }
}

/// Location of `p` in `MZ` of the triple: open core, closed-toward-the-wall
/// legs, or outside.
pub fn classify_mz(p: &PlanePoint, t: &ExceptionalTriple) -> MZTag {
    let poly = mz_polygons(t);
    classify_mz_with(p, t, &poly)
}

fn classify_mz_with(p: &PlanePoint, t: &ExceptionalTriple, poly: &MZPolygons) -> MZTag {
    if point_in_polygon(p, &poly.mz) != PolygonLocation::Inside {
        return MZTag::Outside;
    }
    if point_in_polygon(p, &poly.core) == PolygonLocation::Inside {
        return MZTag::Core;
    }
    let s3 = t.e3.point().s;
    let s1 = t.e1.point().s;
    if p.s < s3 && orientation(p, &poly.left_wall) != Orientation::Above {
        return MZTag::LeftLeg(t.e3.clone());
    }
    if p.s > s1 && orientation(p, &poly.right_wall) != Orientation::Above {
        return MZTag::RightLeg(t.e1.clone());
    }
    MZTag::Core
}

/// Cheap rejection: every MZ region lies in the box spanned by its vertices.
fn in_bounding_box(p: &PlanePoint, poly: &[PlanePoint]) -> bool {
    let smin = poly.iter().map(|v| &v.s).min().expect("nonempty");
    let smax = poly.iter().map(|v| &v.s).max().expect("nonempty");
    let qmin = poly.iter().map(|v| &v.q).min().expect("nonempty");
    let qmax = poly.iter().map(|v| &v.q).max().expect("nonempty");
    smin <= &p.s && &p.s <= smax && qmin <= &p.q && &p.q <= qmax
}

/// Candidate triples for a point near abscissa `s`, consecutive shapes level
/// by level, then the twisted shapes.
fn candidate_triples(s: &Rat, depth: u32) -> Vec<ExceptionalTriple> {
    let n = s.floor().to_integer().to_i64().expect("abscissa fits i64");
    let mut out = Vec::new();
    let centers_at = |k: u32| -> Vec<DyadicLabel> {
        let steps = 1i64 << k;
        ((n - 2) * steps..=(n + 3) * steps)
            .map(|p| DyadicLabel::new(p, k))
            .filter(|l| l.m() == k)
            .collect()
    };
    let mut per_level = Vec::new();
    for k in 0..=depth {
        per_level.push(centers_at(k));
    }
    for centers in &per_level {
        for &c in centers {
            let t = make_triple(c, TripleShape::Consecutive).expect("valid triple");
            let (s1, s3) = (t.e1.slope(), t.e3.slope());
            if &s1 <= s && s <= &s3 {
                out.push(t);
            }
        }
    }
    for shape in [TripleShape::RightTwisted, TripleShape::LeftTwisted] {
        for centers in &per_level {
            for &c in centers {
                out.push(make_triple(c, shape).expect("valid triple"));
            }
        }
    }
    out
}

/// Finds an MZ region containing the geometric point `p`.
pub fn find_region(p: &PlanePoint, depth: u32) -> Result<(MZTag, Option<ExceptionalTriple>)> {
    match classify(p, depth) {
        GeoClassification::AboveCurve => {}
        GeoClassification::UncertainNearCurve(_) => return Ok((MZTag::Uncertain, None)),
        _ => return Err(Error::NotGeometric(p.s.to_string(), p.q.to_string())),
    }
    let Some(s) = p.s.as_rational() else {
        return Ok((MZTag::Uncertain, None));
    };
    for t in candidate_triples(s, depth) {
        let poly = mz_polygons(&t);
        if !in_bounding_box(p, &poly.mz) {
            continue;
        }
        match classify_mz_with(p, &t, &poly) {
            MZTag::Outside => continue,
            tag => return Ok((tag, Some(t))),
        }
    }
    Ok((MZTag::Uncertain, None))
}

/// True when `p` lies on the line separating a leg of `t` from the core.
pub fn on_leg_wall(p: &PlanePoint, t: &ExceptionalTriple, left: bool) -> bool {
    let poly = mz_polygons(t);
    let wall = if left { &poly.left_wall } else { &poly.right_wall };
    orientation(p, wall) == Orientation::On
}

/// `Δ(p) < 0`.
pub fn in_parabola_interior(p: &PlanePoint) -> bool {
    compare_delta(p, &int(0)) == std::cmp::Ordering::Less
}

//! Exact geometry of the `(s, q)`-plane: lines, the parabolas
//! `Δ_a = {½s² − q = a}`, intersections and orientation predicates.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numk::{reduce, twist, CharVector, ReducedPoint};
use crate::rat::{int, rat, Rat};
use crate::surd::Surd;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanePoint {
    pub s: Surd,
    pub q: Surd,
}

impl PlanePoint {
    pub fn new(s: Surd, q: Surd) -> Self {
        PlanePoint { s, q }
    }

    pub fn rational(s: Rat, q: Rat) -> Self {
        PlanePoint::new(Surd::rational(s), Surd::rational(q))
    }

    pub fn is_rational(&self) -> bool {
        self.s.is_rational() && self.q.is_rational()
    }

    /// Rational coordinates, when both are rational.
    pub fn as_rational(&self) -> Option<(Rat, Rat)> {
        Some((self.s.as_rational()?.clone(), self.q.as_rational()?.clone()))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.s.to_f64(), self.q.to_f64())
    }
}

impl From<ReducedPoint> for PlanePoint {
    fn from(p: ReducedPoint) -> Self {
        PlanePoint::rational(p.s, p.q)
    }
}

impl From<&ReducedPoint> for PlanePoint {
    fn from(p: &ReducedPoint) -> Self {
        PlanePoint::rational(p.s.clone(), p.q.clone())
    }
}

impl fmt::Display for PlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.s, self.q)
    }
}

/// The parabola `½s² − q = a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parabola {
    pub a: Rat,
}

impl Parabola {
    pub fn new(a: Rat) -> Self {
        Parabola { a }
    }

    pub fn delta0() -> Self {
        Parabola::new(Rat::zero())
    }

    pub fn delta_half() -> Self {
        Parabola::new(rat(1, 2))
    }
}

/// How a line was specified. The normalized equation is what the predicates use.
#[derive(Clone, Debug)]
pub enum LineKind {
    TwoPoints(PlanePoint, PlanePoint),
    PointSlope(PlanePoint, Rat),
    Vertical(Surd),
    /// A line given directly by a linear equation, such as `{χ(E, −) = 0}`.
    Equation,
}

/// A line `a·s + b·q + c = 0` with rational coefficients, normalized so that
/// `b = 1`, or `a = 1, b = 0` for vertical lines.
///
/// "Above" means larger `q`; for vertical lines it means larger `s`.
#[derive(Clone, Debug)]
pub struct Line {
    pub kind: LineKind,
    a: Rat,
    b: Rat,
    c: Rat,
}

impl PartialEq for Line {
    fn eq(&self, other: &Line) -> bool {
        self.a == other.a && self.b == other.b && self.c == other.c
    }
}

impl Eq for Line {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Above,
    On,
    Below,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PolygonLocation {
    Inside,
    Boundary,
    Outside,
}

impl Line {
    /// The line `a·s + b·q + c = 0`.
    pub fn from_equation(a: Rat, b: Rat, c: Rat) -> Result<Line> {
        Line::normalized(LineKind::Equation, a, b, c)
    }

    fn normalized(kind: LineKind, a: Rat, b: Rat, c: Rat) -> Result<Line> {
        if !b.is_zero() {
            Ok(Line {
                kind,
                a: &a / &b,
                c: &c / &b,
                b: Rat::one(),
            })
        } else if !a.is_zero() {
            Ok(Line {
                kind,
                c: &c / &a,
                a: Rat::one(),
                b: Rat::zero(),
            })
        } else {
            Err(Error::DegenerateSystem("line equation vanishes".into()))
        }
    }

    /// Normalizes a surd equation, requiring the result to be rational.
    fn from_surd_equation(kind: LineKind, a: Surd, b: Surd, c: Surd) -> Result<Line> {
        let (a, b, c) = if b.sign() != 0 {
            (&a / &b, Surd::rational(Rat::one()), &c / &b)
        } else if a.sign() != 0 {
            (Surd::rational(Rat::one()), Surd::zero(), &c / &a)
        } else {
            return Err(Error::DegenerateSystem("coincident points".into()));
        };
        match (a.as_rational(), b.as_rational(), c.as_rational()) {
            (Some(a), Some(b), Some(c)) => Ok(Line {
                kind,
                a: a.clone(),
                b: b.clone(),
                c: c.clone(),
            }),
            _ => Err(Error::Unsupported("line with irrational coefficients".into())),
        }
    }

    pub fn two_points(p: &PlanePoint, p2: &PlanePoint) -> Result<Line> {
        if p == p2 {
            return Err(Error::DegenerateSystem(format!("line through {p} twice")));
        }
        let a = &p2.q - &p.q;
        let b = &p.s - &p2.s;
        let c = -&(&(&a * &p.s) + &(&b * &p.q));
        Line::from_surd_equation(LineKind::TwoPoints(p.clone(), p2.clone()), a, b, c)
    }

    pub fn point_slope(p: &PlanePoint, slope: &Rat) -> Result<Line> {
        // q − q0 = slope·(s − s0)  ⇔  −slope·s + q + (slope·s0 − q0) = 0
        let c = &(&p.s * slope) - &p.q;
        Line::from_surd_equation(
            LineKind::PointSlope(p.clone(), slope.clone()),
            Surd::rational(-slope),
            Surd::rational(Rat::one()),
            c,
        )
    }

    pub fn vertical(s: &Surd) -> Result<Line> {
        let s0 = s
            .as_rational()
            .ok_or_else(|| Error::Unsupported("vertical line at irrational s".into()))?;
        Ok(Line {
            kind: LineKind::Vertical(s.clone()),
            a: Rat::one(),
            b: Rat::zero(),
            c: -s0,
        })
    }

    pub fn coefficients(&self) -> (&Rat, &Rat, &Rat) {
        (&self.a, &self.b, &self.c)
    }

    pub fn is_vertical(&self) -> bool {
        self.b.is_zero()
    }

    /// `dq/ds`, absent for vertical lines.
    pub fn slope(&self) -> Option<Rat> {
        (!self.is_vertical()).then(|| -&self.a)
    }

    /// `q` on the line at abscissa `s`; absent for vertical lines.
    pub fn q_at(&self, s: &Surd) -> Option<Surd> {
        if self.is_vertical() {
            return None;
        }
        Some(-&(&(s * &self.a) + &self.c))
    }

    /// Signed value `a·s + b·q + c`.
    pub fn evaluate(&self, p: &PlanePoint) -> Surd {
        &(&(&p.s * &self.a) + &(&p.q * &self.b)) + &self.c
    }

    pub fn contains(&self, p: &PlanePoint) -> bool {
        self.evaluate(p).sign() == 0
    }

    /// Image under [`twist_point`].
    pub fn twisted(&self) -> Line {
        // s = s' + 3, q = q' + 3s' + 9/2
        let (a, b, c) = if self.is_vertical() {
            (Rat::one(), Rat::zero(), &self.c + int(3))
        } else {
            (
                &self.a + int(3),
                Rat::one(),
                int(3) * &self.a + rat(9, 2) + &self.c,
            )
        };
        let kind = match &self.kind {
            LineKind::TwoPoints(p, p2) => LineKind::TwoPoints(twist_point(p), twist_point(p2)),
            LineKind::PointSlope(p, m) => LineKind::PointSlope(twist_point(p), m - int(3)),
            LineKind::Vertical(s) => LineKind::Vertical(s - &int(3)),
            LineKind::Equation => LineKind::Equation,
        };
        Line { kind, a, b, c }
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_vertical() {
            write!(f, "s = {}", -&self.c)
        } else {
            write!(f, "q = {}·s + {}", -&self.a, -&self.c)
        }
    }
}

/// `½s² − q`.
pub fn delta_value(p: &PlanePoint) -> Surd {
    &(&p.s.square() * &rat(1, 2)) - &p.q
}

/// Sign of `delta_value(p) − a`.
pub fn compare_delta(p: &PlanePoint, a: &Rat) -> Ordering {
    delta_value(p).cmp_rat(a)
}

/// The line through `σ` and the reduced character of `v`, or through `σ`
/// with slope `ch2/ch1` when `v` has rank zero.
pub fn line_through_char(sigma: &PlanePoint, v: &CharVector) -> Result<Line> {
    if v.ch0.is_zero() {
        if v.ch1.is_zero() {
            return Err(Error::SkyscraperDirection);
        }
        return Line::point_slope(sigma, &(&v.ch2 / &v.ch1));
    }
    let target = PlanePoint::from(reduce(v)?);
    Line::two_points(sigma, &target)
}

/// Points of `L ∩ P`, sorted by `s`.
pub fn intersect_line_parabola(line: &Line, parabola: &Parabola) -> Vec<PlanePoint> {
    let (a, _, c) = line.coefficients();
    if line.is_vertical() {
        let s = -c;
        let q = &s * &s / int(2) - &parabola.a;
        return vec![PlanePoint::rational(s, q)];
    }
    // s²/2 − A = −a·s − c  ⇔  s² + 2a·s + 2(c − A) = 0
    let disc = a * a - int(2) * (c - &parabola.a);
    let Some(root) = Surd::sqrt(&disc) else {
        return Vec::new();
    };
    let centre = Surd::rational(-a);
    let point = |s: Surd| {
        let q = line.q_at(&s).expect("nonvertical");
        PlanePoint::new(s, q)
    };
    if root.sign() == 0 {
        return vec![point(centre)];
    }
    vec![point(&centre - &root), point(&centre + &root)]
}

/// Intersection point of two non-parallel lines.
pub fn intersect_lines(l1: &Line, l2: &Line) -> Option<PlanePoint> {
    let (a1, b1, c1) = l1.coefficients();
    let (a2, b2, c2) = l2.coefficients();
    let det = a1 * b2 - a2 * b1;
    if det.is_zero() {
        return None;
    }
    let s = (b1 * c2 - b2 * c1) / &det;
    let q = (a2 * c1 - a1 * c2) / &det;
    Some(PlanePoint::rational(s, q))
}

/// The map `(s, q) ↦ (s − 3, q − 3s + 9/2)` induced by `− ⊗ O(−3)`.
pub fn twist_point(p: &PlanePoint) -> PlanePoint {
    let s = &p.s - &int(3);
    let q = &(&p.q - &(&p.s * &int(3))) + &rat(9, 2);
    PlanePoint::new(s, q)
}

pub fn twist_segment(seg: &(PlanePoint, PlanePoint)) -> (PlanePoint, PlanePoint) {
    (twist_point(&seg.0), twist_point(&seg.1))
}

pub fn orientation(p: &PlanePoint, line: &Line) -> Orientation {
    match line.evaluate(p).sign() {
        1 => Orientation::Above,
        -1 => Orientation::Below,
        _ => Orientation::On,
    }
}

/// Twice the signed area of `(a, b, p)`; positive when `p` is left of `a → b`.
pub fn orient2d(a: &PlanePoint, b: &PlanePoint, p: &PlanePoint) -> i32 {
    let lhs = &(&b.s - &a.s) * &(&p.q - &a.q);
    let rhs = &(&b.q - &a.q) * &(&p.s - &a.s);
    (&lhs - &rhs).sign()
}

/// True when `p` lies on the closed segment `[a, b]`.
pub fn on_segment(a: &PlanePoint, b: &PlanePoint, p: &PlanePoint) -> bool {
    if orient2d(a, b, p) != 0 {
        return false;
    }
    let within = |x: &Surd, y: &Surd, z: &Surd| {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        lo <= z && z <= hi
    };
    within(&a.s, &b.s, &p.s) && within(&a.q, &b.q, &p.q)
}

/// Location of `p` relative to a simple polygon (either orientation).
pub fn point_in_polygon(p: &PlanePoint, vertices: &[PlanePoint]) -> PolygonLocation {
    let n = vertices.len();
    let mut winding = 0i32;
    for i in 0..n {
        let a = &vertices[i];
        let b = &vertices[(i + 1) % n];
        if on_segment(a, b, p) {
            return PolygonLocation::Boundary;
        }
        if a.q <= p.q {
            if b.q > p.q && orient2d(a, b, p) > 0 {
                winding += 1;
            }
        } else if b.q <= p.q && orient2d(a, b, p) < 0 {
            winding -= 1;
        }
    }
    if winding != 0 {
        PolygonLocation::Inside
    } else {
        PolygonLocation::Outside
    }
}

/// Convex special case of [`point_in_polygon`].
pub fn point_in_convex_polygon(p: &PlanePoint, vertices: &[PlanePoint]) -> PolygonLocation {
    point_in_polygon(p, vertices)
}

/// Widths of the chords `L_{vσ} ∩ Δ_0` and `L_{v(−3)σ(−3)} ∩ Δ_0`.
///
/// The two are always equal: the twist is an affine map preserving every
/// `Δ_a` and translating `s` by `−3`.
pub fn horizontal_distance_pair(sigma: &PlanePoint, v: &CharVector) -> Result<(Surd, Surd)> {
    let chord = |line: Line| -> Result<Surd> {
        let pts = intersect_line_parabola(&line, &Parabola::delta0());
        match pts.as_slice() {
            [] => Err(Error::NoIntersection),
            [_] => Ok(Surd::zero()),
            [a, b] => Ok(&b.s - &a.s),
            _ => unreachable!(),
        }
    };
    let before = chord(line_through_char(sigma, v)?)?;
    let after = chord(line_through_char(&twist_point(sigma), &twist(v, -3))?)?;
    Ok((before, after))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn pt(s: Rat, q: Rat) -> PlanePoint {
        PlanePoint::rational(s, q)
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_value(&pt(int(0), int(1))), Surd::rational(int(-1)));
        assert_eq!(delta_value(&pt(int(0), int(0))), Surd::zero());
        assert_eq!(delta_value(&pt(int(0), int(-1))), Surd::rational(int(1)));
    }

    #[test]
    fn lines_through_characters() {
        let sigma = pt(int(0), int(1));
        let l = line_through_char(&sigma, &CharVector::line_bundle(1)).unwrap();
        assert!(matches!(l.kind, LineKind::TwoPoints(..)));
        assert_eq!(l.slope(), Some(rat(-1, 2)));
        let l = line_through_char(&sigma, &CharVector::new(int(0), int(2), int(3))).unwrap();
        assert!(matches!(l.kind, LineKind::PointSlope(..)));
        assert_eq!(l.slope(), Some(rat(3, 2)));
        assert!(l.contains(&sigma));
        assert_eq!(
            line_through_char(&sigma, &CharVector::new(int(0), int(0), int(1))),
            Err(Error::SkyscraperDirection)
        );
    }

    #[test]
    fn parabola_intersections() {
        let l = Line::two_points(&pt(int(0), int(1)), &pt(int(1), rat(1, 2))).unwrap();
        let pts = intersect_line_parabola(&l, &Parabola::delta0());
        assert_eq!(pts, vec![pt(int(-2), int(2)), pt(int(1), rat(1, 2))]);

        let v = Line::vertical(&Surd::zero()).unwrap();
        assert_eq!(
            intersect_line_parabola(&v, &Parabola::delta0()),
            vec![pt(int(0), int(0))]
        );

        // q = −1 − (3/2)s meets Δ_{1/2} where s² + 3s + 1 = 0.
        let l = Line::from_equation(rat(3, 2), int(1), int(1)).unwrap();
        let pts = intersect_line_parabola(&l, &Parabola::delta_half());
        let root5 = Surd::new(int(0), rat(1, 2), BigInt::from(5));
        assert_eq!(pts[0].s, &Surd::rational(rat(-3, 2)) - &root5);
        assert_eq!(pts[1].s, &Surd::rational(rat(-3, 2)) + &root5);
        for p in &pts {
            assert!(l.contains(p));
            assert_eq!(delta_value(p), Surd::rational(rat(1, 2)));
        }
        let high = Line::from_equation(int(0), int(1), int(1)).unwrap();
        assert!(intersect_line_parabola(&high, &Parabola::delta0()).is_empty());
    }

    #[test]
    fn twist_examples() {
        assert_eq!(twist_point(&pt(int(0), int(0))), pt(int(-3), rat(9, 2)));
        let seg = (pt(int(1), int(2)), pt(rat(1, 3), int(-1)));
        let t = twist_segment(&seg);
        assert_eq!(t.0, twist_point(&seg.0));
        let l = Line::two_points(&seg.0, &seg.1).unwrap();
        let lt = Line::two_points(&t.0, &t.1).unwrap();
        assert_eq!(l.twisted(), lt);
    }

    #[test]
    fn orientation_and_polygons() {
        let l = Line::from_equation(rat(3, 2), int(1), int(1)).unwrap();
        assert_eq!(orientation(&pt(int(0), int(0)), &l), Orientation::Above);
        assert_eq!(orientation(&pt(int(0), int(-1)), &l), Orientation::On);
        let v = Line::vertical(&Surd::rational(int(1))).unwrap();
        assert_eq!(orientation(&pt(int(2), int(-9)), &v), Orientation::Above);

        let tri = [pt(int(0), int(0)), pt(int(3), int(0)), pt(int(0), int(3))];
        assert_eq!(point_in_convex_polygon(&tri[1], &tri), PolygonLocation::Boundary);
        assert_eq!(point_in_convex_polygon(&pt(int(1), int(1)), &tri), PolygonLocation::Inside);
        assert_eq!(point_in_convex_polygon(&pt(int(2), int(2)), &tri), PolygonLocation::Outside);
        // Reflex vertex at (1, 1).
        let dart = [pt(int(0), int(0)), pt(int(2), int(0)), pt(int(1), int(1)), pt(int(2), int(2)), pt(int(0), int(2))];
        assert_eq!(point_in_polygon(&pt(rat(3, 2), int(1)), &dart), PolygonLocation::Outside);
        assert_eq!(point_in_polygon(&pt(rat(1, 2), int(1)), &dart), PolygonLocation::Inside);
        assert_eq!(point_in_polygon(&pt(int(1), int(1)), &dart), PolygonLocation::Boundary);
    }

    #[test]
    fn horizontal_distance_example() {
        let (a, b) =
            horizontal_distance_pair(&pt(int(2), rat(5, 2)), &CharVector::new(int(1), int(4), rat(31, 5)))
                .unwrap();
        assert_eq!(a, b);
        assert!(a.sign() > 0);
        let (a, b) =
            horizontal_distance_pair(&pt(int(0), int(1)), &CharVector::structure_sheaf()).unwrap();
        assert_eq!((a.clone(), b), (Surd::zero(), Surd::zero()));
    }
}

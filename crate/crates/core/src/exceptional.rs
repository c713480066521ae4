//! Exceptional bundles on P², indexed by dyadic rationals, together with
//! exceptional triples and the points each bundle contributes to the
//! Le Potier curve.
//!
//! Every bundle with label in `[0, 1)` is built from its two parents by
//! [`median`]; other labels are integer twists of those. Results are memoized
//! in a process-wide [`BundleTree`].

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numk::{euler_pairing, left_form, reduce, right_form, twist, CharVector};
use crate::plane::{delta_value, intersect_line_parabola, Line, Parabola, PlanePoint};
use crate::rat::{int, parse_rat, rat, Rat};

/// The dyadic rational `p / 2^m`, with `p` odd unless `m = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DyadicLabel {
    p: i64,
    m: u32,
}

impl DyadicLabel {
    pub fn new(p: i64, m: u32) -> DyadicLabel {
        let (mut p, mut m) = (p, m);
        while m > 0 && p % 2 == 0 {
            p /= 2;
            m -= 1;
        }
        DyadicLabel { p, m }
    }

    pub fn integer(n: i64) -> DyadicLabel {
        DyadicLabel { p: n, m: 0 }
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    /// Level in the tree: 0 for integers, `m` for odd `p / 2^m`.
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn value(&self) -> Rat {
        Rat::new(BigInt::from(self.p), BigInt::one() << self.m)
    }

    pub fn from_rat(x: &Rat) -> Result<DyadicLabel> {
        let d = x.denom();
        let m = d.bits() - 1;
        if d != &(BigInt::one() << m) {
            return Err(Error::Parse(format!("{x} is not dyadic")));
        }
        let p = x
            .numer()
            .to_i64()
            .ok_or_else(|| Error::Parse(format!("{x} out of range")))?;
        Ok(DyadicLabel::new(p, m as u32))
    }

    pub fn parse(text: &str) -> Result<DyadicLabel> {
        DyadicLabel::from_rat(&parse_rat(text)?)
    }

    pub fn floor(&self) -> i64 {
        self.p.div_euclid(1 << self.m)
    }

    /// `self + n`.
    pub fn shifted(&self, n: i64) -> DyadicLabel {
        DyadicLabel::new(self.p + (n << self.m), self.m)
    }

    /// The two labels whose median this is; `None` for integers.
    pub fn parents(&self) -> Option<(DyadicLabel, DyadicLabel)> {
        (self.m > 0).then(|| {
            (
                DyadicLabel::new(self.p - 1, self.m),
                DyadicLabel::new(self.p + 1, self.m),
            )
        })
    }
}

impl Ord for DyadicLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = (self.p as i128) << other.m;
        let rhs = (other.p as i128) << self.m;
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for DyadicLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DyadicLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExceptionalBundle {
    pub label: DyadicLabel,
    pub ch: CharVector,
}

impl ExceptionalBundle {
    pub fn rank(&self) -> &Rat {
        &self.ch.ch0
    }

    pub fn slope(&self) -> Rat {
        &self.ch.ch1 / &self.ch.ch0
    }

    pub fn point(&self) -> PlanePoint {
        PlanePoint::from(reduce(&self.ch).expect("exceptional bundles have positive rank"))
    }

    pub fn twisted(&self, n: i64) -> ExceptionalBundle {
        ExceptionalBundle {
            label: self.label.shifted(n),
            ch: twist(&self.ch, n),
        }
    }

    /// Checks `χ(E, E) = 1`, positive integral rank and the lattice condition.
    pub fn validate(&self) -> Result<()> {
        let fail = |why: &str| Err(Error::InvalidCache(format!("E({}): {why}", self.label)));
        if !self.ch.ch0.is_integer() || !self.ch.ch0.is_positive() {
            return fail("rank is not a positive integer");
        }
        if !self.ch.is_lattice() {
            return fail("character is not integral");
        }
        if euler_pairing(&self.ch, &self.ch) != Rat::one() {
            return fail("χ(E, E) ≠ 1");
        }
        Ok(())
    }
}

impl fmt::Display for ExceptionalBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E({})", self.label)
    }
}

/// `O(n)`.
pub fn line_bundle(n: i64) -> ExceptionalBundle {
    ExceptionalBundle {
        label: DyadicLabel::integer(n),
        ch: CharVector::line_bundle(n),
    }
}

fn cross(u: &[Rat; 3], v: &[Rat; 3]) -> [Rat; 3] {
    [
        &u[1] * &v[2] - &u[2] * &v[1],
        &u[2] * &v[0] - &u[0] * &v[2],
        &u[0] * &v[1] - &u[1] * &v[0],
    ]
}

/// The exceptional bundle between two adjacent ones: the unique class `v`
/// with `χ(v, a) = 0`, `χ(b, v) = 0`, `χ(v, v) = 1` and positive rank.
pub fn median(a: &ExceptionalBundle, b: &ExceptionalBundle) -> Result<ExceptionalBundle> {
    let m = a.label.m.max(b.label.m);
    let step = DyadicLabel::new(1, m).value();
    if b.label.value() - a.label.value() != step {
        return Err(Error::NotAdjacent(a.label.to_string(), b.label.to_string()));
    }
    let label = DyadicLabel::from_rat(&((a.label.value() + b.label.value()) / int(2)))?;
    let w = cross(&right_form(&a.ch), &left_form(&b.ch));
    let w = CharVector::new(w[0].clone(), w[1].clone(), w[2].clone());
    let degenerate = |why: &str| Error::DegenerateSystem(format!("median of {a} and {b}: {why}"));
    if w.is_zero() {
        return Err(degenerate("orthogonality conditions are dependent"));
    }
    let norm = euler_pairing(&w, &w);
    if !norm.is_positive() {
        return Err(degenerate("null vector has χ(v, v) ≤ 0"));
    }
    let scale = crate::rat::sqrt_exact(&(Rat::one() / norm))
        .ok_or_else(|| degenerate("χ(v, v) is not a rational square"))?;
    let mut ch = w.scale(&scale);
    if ch.ch0.is_negative() {
        ch = -&ch;
    }
    if ch.ch0.is_zero() {
        return Err(degenerate("rank zero"));
    }
    Ok(ExceptionalBundle { label, ch })
}

/// `[L_E F] = [F] − χ(E, F)[E]`.
pub fn left_mutation_class(e: &CharVector, f: &CharVector) -> CharVector {
    f - &e.scale(&euler_pairing(e, f))
}

/// `[R_E F] = [F] − χ(F, E)[E]`.
pub fn right_mutation_class(f: &CharVector, e: &CharVector) -> CharVector {
    f - &e.scale(&euler_pairing(f, e))
}

/// The points `E^+`, `E^l`, `E^r`, `e^l`, `e^r` attached to a bundle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FivePoints {
    pub e_plus: PlanePoint,
    pub e_l: PlanePoint,
    pub e_r: PlanePoint,
    pub el_curve: PlanePoint,
    pub er_curve: PlanePoint,
    /// `{χ(E, −) = 0}`, which carries `E^+`, `E^l` and `e^l`.
    pub left_line: Line,
    /// `{χ(−, E) = 0}`, which carries `E^+`, `E^r` and `e^r`.
    pub right_line: Line,
}

/// The line `{v : χ(E, v) = 0}` (when `left`) or `{v : χ(v, E) = 0}` in
/// reduced coordinates.
pub fn orthogonal_line(e: &CharVector, left: bool) -> Line {
    let f = if left { left_form(e) } else { right_form(e) };
    let [c, a, b] = f;
    Line::from_equation(a, b, c).expect("rank of an exceptional bundle is nonzero")
}

fn compute_five_points(e: &ExceptionalBundle) -> FivePoints {
    let r = e.rank();
    let p = reduce(&e.ch).expect("positive rank");
    let e_plus = PlanePoint::rational(p.s.clone(), &p.q - Rat::one() / (r * r));
    let e_l = PlanePoint::from(
        reduce(&left_mutation_class(&e.ch, &twist(&e.ch, 3))).expect("mutation has rank"),
    );
    let e_r = PlanePoint::from(
        reduce(&right_mutation_class(&twist(&e.ch, -3), &e.ch)).expect("mutation has rank"),
    );
    let left_line = orthogonal_line(&e.ch, true);
    let right_line = orthogonal_line(&e.ch, false);
    let s_e = crate::surd::Surd::rational(p.s.clone());
    // Walking away from E^+ along each line, the first crossing of Δ_{1/2}
    // is the root nearest to s(E).
    let roots_l = intersect_line_parabola(&left_line, &Parabola::delta_half());
    let el_curve = roots_l
        .into_iter()
        .filter(|x| x.s < s_e)
        .max_by(|x, y| x.s.cmp(&y.s))
        .expect("left line meets Δ_1/2 left of E");
    let roots_r = intersect_line_parabola(&right_line, &Parabola::delta_half());
    let er_curve = roots_r
        .into_iter()
        .filter(|x| x.s > s_e)
        .min_by(|x, y| x.s.cmp(&y.s))
        .expect("right line meets Δ_1/2 right of E");
    FivePoints {
        e_plus,
        e_l,
        e_r,
        el_curve,
        er_curve,
        left_line,
        right_line,
    }
}

/// Memo of bundles with labels in `[0, 1)` and of their five points.
#[derive(Default)]
pub struct BundleTree {
    fractional: RwLock<HashMap<DyadicLabel, CharVector>>,
    five: RwLock<HashMap<DyadicLabel, Arc<FivePoints>>>,
}

static TREE: OnceLock<BundleTree> = OnceLock::new();

/// The process-wide tree.
pub fn tree() -> &'static BundleTree {
    TREE.get_or_init(BundleTree::default)
}

impl BundleTree {
    pub fn new() -> BundleTree {
        BundleTree::default()
    }

    fn fractional(&self, label: DyadicLabel) -> CharVector {
        if label.m == 0 {
            return CharVector::line_bundle(label.p);
        }
        if let Some(ch) = self.fractional.read().unwrap().get(&label) {
            return ch.clone();
        }
        let (lo, hi) = label.parents().expect("non-integer label");
        let a = ExceptionalBundle {
            label: lo,
            ch: self.fractional(lo),
        };
        let b = ExceptionalBundle {
            label: hi,
            ch: self.fractional(hi),
        };
        let ch = median(&a, &b)
            .unwrap_or_else(|e| panic!("internal invariant breach: {e}"))
            .ch;
        self.fractional
            .write()
            .unwrap()
            .entry(label)
            .or_insert(ch)
            .clone()
    }

    pub fn bundle(&self, label: DyadicLabel) -> ExceptionalBundle {
        let n = label.floor();
        let base = label.shifted(-n);
        ExceptionalBundle {
            label,
            ch: twist(&self.fractional(base), n),
        }
    }

    pub fn five_points(&self, e: &ExceptionalBundle) -> Arc<FivePoints> {
        if let Some(f) = self.five.read().unwrap().get(&e.label) {
            return f.clone();
        }
        let f = Arc::new(compute_five_points(e));
        self.five
            .write()
            .unwrap()
            .entry(e.label)
            .or_insert(f)
            .clone()
    }

    /// Every `E(p/2^k)` with `k ≤ depth` whose slope lies in
    /// `[s_min − 3, s_max + 3]`, ordered by label.
    pub fn generate_window(&self, s_min: &Rat, s_max: &Rat, depth: u32) -> Vec<ExceptionalBundle> {
        let lo = s_min - int(3);
        let hi = s_max + int(3);
        // The slope of E(x) lies between ⌊x⌋ and ⌈x⌉, so labels just outside
        // [lo, hi] can be skipped.
        let first = lo.floor().to_integer().to_i64().expect("window fits i64") - 1;
        let last = hi.ceil().to_integer().to_i64().expect("window fits i64") + 1;
        let steps = 1i64 << depth;
        let mut out = Vec::new();
        for n in first..=last {
            for k in 0..steps {
                let label = DyadicLabel::new(n * steps + k, depth);
                let e = self.bundle(label);
                let s = e.slope();
                if s >= lo && s <= hi {
                    out.push(e);
                }
            }
        }
        out
    }

    /// Serializes every memoized bundle up to `depth`.
    pub fn to_cache(&self, depth: u32) -> BundleCache {
        let steps = 1i64 << depth;
        let bundles = (0..steps)
            .map(|k| {
                let e = self.bundle(DyadicLabel::new(k, depth));
                CachedBundle {
                    p: e.label.p,
                    m: e.label.m,
                    ch: e.ch,
                }
            })
            .collect();
        BundleCache { depth, bundles }
    }

    /// Validates a cache and seeds the memo with it.
    pub fn load_cache(&self, cache: &BundleCache) -> Result<usize> {
        let mut accepted = Vec::new();
        let mut previous: Option<ExceptionalBundle> = None;
        let mut sorted = cache.bundles.clone();
        sorted.sort_by_key(|b| DyadicLabel::new(b.p, b.m));
        for entry in &sorted {
            let label = DyadicLabel::new(entry.p, entry.m);
            if label.p != entry.p || label.m != entry.m {
                return Err(Error::InvalidCache(format!(
                    "label {}/2^{} is not normalized",
                    entry.p, entry.m
                )));
            }
            if label.m > cache.depth {
                return Err(Error::InvalidCache(format!(
                    "label {label} deeper than declared depth {}",
                    cache.depth
                )));
            }
            let e = ExceptionalBundle {
                label,
                ch: entry.ch.clone(),
            };
            e.validate()?;
            if let Some(prev) = &previous {
                if prev.label == e.label {
                    return Err(Error::InvalidCache(format!("duplicate label {label}")));
                }
                if prev.slope() >= e.slope() {
                    return Err(Error::InvalidCache(format!(
                        "slopes not increasing at {label}"
                    )));
                }
            }
            let n = label.floor();
            let base = e.twisted(-n);
            if base.label.m == 0 && base.ch != CharVector::line_bundle(0) {
                return Err(Error::InvalidCache(format!("{label} is not a line bundle")));
            }
            previous = Some(e);
            if base.label.m > 0 {
                accepted.push(base);
            }
        }
        // Parents must be orthogonal in the right order; checking the
        // defining conditions against the cached neighbours is cheap.
        let known: HashMap<DyadicLabel, CharVector> =
            accepted.iter().map(|e| (e.label, e.ch.clone())).collect();
        let lookup = |l: DyadicLabel| -> Option<CharVector> {
            if l.m == 0 {
                Some(CharVector::line_bundle(l.p))
            } else {
                known.get(&l).cloned()
            }
        };
        for e in &accepted {
            let (lo, hi) = e.label.parents().expect("fractional");
            if let (Some(a), Some(b)) = (lookup(lo), lookup(hi)) {
                if !euler_pairing(&e.ch, &a).is_zero() || !euler_pairing(&b, &e.ch).is_zero() {
                    return Err(Error::InvalidCache(format!(
                        "E({}) is not the median of its parents",
                        e.label
                    )));
                }
            }
        }
        let mut memo = self.fractional.write().unwrap();
        for e in &accepted {
            if let Some(existing) = memo.get(&e.label) {
                if existing != &e.ch {
                    return Err(Error::InvalidCache(format!(
                        "E({}) disagrees with computed value",
                        e.label
                    )));
                }
            }
        }
        for e in &accepted {
            memo.insert(e.label, e.ch.clone());
        }
        Ok(accepted.len())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CachedBundle {
    pub p: i64,
    pub m: u32,
    pub ch: CharVector,
}

/// On-disk form of the memo: `{"depth": m, "bundles": [{"p", "m", "ch"}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleCache {
    pub depth: u32,
    pub bundles: Vec<CachedBundle>,
}

impl BundleCache {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("serializable");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<BundleCache> {
        serde_json::from_str(text).map_err(|e| Error::InvalidCache(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }

    pub fn load(path: &Path) -> Result<BundleCache> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidCache(format!("{}: {e}", path.display())))?;
        BundleCache::from_json(&text)
    }
}

/// Convenience wrapper over the global tree.
pub fn bundle(label: DyadicLabel) -> ExceptionalBundle {
    tree().bundle(label)
}

pub fn generate_window(s_min: &Rat, s_max: &Rat, depth: u32) -> Vec<ExceptionalBundle> {
    tree().generate_window(s_min, s_max, depth)
}

pub fn five_points(e: &ExceptionalBundle) -> Arc<FivePoints> {
    tree().five_points(e)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TripleShape {
    Consecutive,
    RightTwisted,
    LeftTwisted,
}

impl TripleShape {
    pub const ALL: [TripleShape; 3] = [
        TripleShape::Consecutive,
        TripleShape::RightTwisted,
        TripleShape::LeftTwisted,
    ];

    pub fn parse(text: &str) -> Result<TripleShape> {
        match text.to_ascii_lowercase().replace('_', "-").as_str() {
            "consecutive" => Ok(TripleShape::Consecutive),
            "right-twisted" | "righttwisted" | "right" => Ok(TripleShape::RightTwisted),
            "left-twisted" | "lefttwisted" | "left" => Ok(TripleShape::LeftTwisted),
            _ => Err(Error::Parse(text.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TripleShape::Consecutive => "consecutive",
            TripleShape::RightTwisted => "right-twisted",
            TripleShape::LeftTwisted => "left-twisted",
        }
    }
}

/// An ordered full strong exceptional collection `(E1, E2, E3)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExceptionalTriple {
    pub center: DyadicLabel,
    pub shape: TripleShape,
    pub e1: ExceptionalBundle,
    pub e2: ExceptionalBundle,
    pub e3: ExceptionalBundle,
}

impl ExceptionalTriple {
    pub fn members(&self) -> [&ExceptionalBundle; 3] {
        [&self.e1, &self.e2, &self.e3]
    }

    pub fn ranks(&self) -> [Rat; 3] {
        [
            self.e1.rank().clone(),
            self.e2.rank().clone(),
            self.e3.rank().clone(),
        ]
    }
}

impl fmt::Display for ExceptionalTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.e1, self.e2, self.e3)
    }
}

/// Labels of the triple with the given centre `p/2^m`:
/// consecutive `{(p−1)/2^m, p/2^m, (p+1)/2^m}`, right-twisted
/// `{p/2^m, (p+1)/2^m, (p−1)/2^m + 3}`, left-twisted
/// `{(p+1)/2^m − 3, (p−1)/2^m, p/2^m}`.
pub fn triple_labels(center: DyadicLabel, shape: TripleShape) -> [DyadicLabel; 3] {
    let (p, m) = (center.p, center.m);
    let below = DyadicLabel::new(p - 1, m);
    let above = DyadicLabel::new(p + 1, m);
    match shape {
        TripleShape::Consecutive => [below, center, above],
        TripleShape::RightTwisted => [center, above, below.shifted(3)],
        TripleShape::LeftTwisted => [above.shifted(-3), below, center],
    }
}

pub fn make_triple(center: DyadicLabel, shape: TripleShape) -> Result<ExceptionalTriple> {
    let [l1, l2, l3] = triple_labels(center, shape);
    let t = tree();
    let triple = ExceptionalTriple {
        center,
        shape,
        e1: t.bundle(l1),
        e2: t.bundle(l2),
        e3: t.bundle(l3),
    };
    let [r1, r2, r3] = triple.ranks();
    if &r1 * &r1 + &r2 * &r2 + &r3 * &r3 != int(3) * &r1 * &r2 * &r3 {
        return Err(Error::DegenerateSystem(format!(
            "ranks of {triple} violate the Markov equation"
        )));
    }
    Ok(triple)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleHomData {
    pub hom12: BigInt,
    pub hom23: BigInt,
    pub hom13: BigInt,
    pub h: Rat,
    pub r: BigInt,
}

pub fn hom_data(t: &ExceptionalTriple) -> TripleHomData {
    let [r1, r2, r3] = t.ranks().map(|x| x.to_integer());
    let hom12 = BigInt::from(3) * &r3;
    let hom23 = BigInt::from(3) * &r1;
    let hom13 = BigInt::from(9) * &r1 * &r3 - BigInt::from(3) * &r2;
    let h = Rat::from_integer(hom12.clone())
        - Rat::new(hom23.clone(), hom13.clone());
    let r = &hom13 * &hom12 - &hom23;
    TripleHomData {
        hom12,
        hom23,
        hom13,
        h,
        r,
    }
}

/// `Δ(E) = ½ − 1/(2·rk²)`, the value every exceptional bundle must attain.
pub fn expected_delta(e: &ExceptionalBundle) -> Rat {
    rat(1, 2) - Rat::one() / (int(2) * e.rank() * e.rank())
}

/// Checks the per-bundle invariants exactly: `χ(E, E) = 1`, the parabola
/// `Δ = ½ − 1/(2·rk²)`, and a slope whose denominator divides the rank.
pub fn check_bundle(e: &ExceptionalBundle) -> bool {
    let slope_den = e.slope().denom().clone();
    e.validate().is_ok()
        && delta_value(&e.point()).as_rational() == Some(&expected_delta(e))
        && (e.rank().to_integer() % slope_den).is_zero()
}

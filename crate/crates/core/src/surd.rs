//! Real quadratic irrationals `a + b·√d`.
//!
//! Intersections of rational lines with the parabolas `½s² − q = a` have
//! coordinates of this shape, so this is the only number type beyond `Rat`
//! the geometry needs. Values from different quadratic fields can be compared
//! exactly but not added or multiplied together.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::rat::{int, to_f64, Rat};

/// Square factors tried when reducing `d`. A full square-free decomposition
/// would need integer factorisation; larger square factors are left in place,
/// which only affects the representation, never comparisons.
const SMALL_PRIMES_LIMIT: u32 = 1000;

#[derive(Clone, Debug)]
pub struct Surd {
    a: Rat,
    b: Rat,
    d: BigInt,
}

fn small_primes() -> impl Iterator<Item = u32> {
    (2..SMALL_PRIMES_LIMIT).filter(|n| (2..*n).take_while(|k| k * k <= *n).all(|k| n % k != 0))
}

fn sign_of(x: &Rat) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Sign of `a + b·√d` for `d ≥ 0`.
fn sign_single(a: &Rat, b: &Rat, d: &BigInt) -> i32 {
    let sa = sign_of(a);
    let sb = if d.is_zero() { 0 } else { sign_of(b) };
    if sb == 0 {
        return sa;
    }
    if sa == 0 || sa == sb {
        return sb;
    }
    let lhs = a * a;
    let rhs = b * b * Rat::from_integer(d.clone());
    match lhs.cmp(&rhs) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => 0,
    }
}

/// Sign of `r + x·√m + y·√n`.
fn sign_mixed(r: &Rat, x: &Rat, m: &BigInt, y: &Rat, n: &BigInt) -> i32 {
    let s_first = sign_single(r, x, m);
    let s_last = if n.is_zero() { 0 } else { sign_of(y) };
    if s_last == 0 {
        return s_first;
    }
    if s_first == 0 || s_first == s_last {
        return s_last;
    }
    // Opposite signs: compare squares.
    let mq = Rat::from_integer(m.clone());
    let nq = Rat::from_integer(n.clone());
    let rational = r * r + x * x * &mq - y * y * &nq;
    let radical = int(2) * r * x;
    match sign_single(&rational, &radical, m) {
        1 => s_first,
        -1 => s_last,
        _ => 0,
    }
}

impl Surd {
    /// Builds `a + b·√d`, reducing `d` and folding perfect squares.
    ///
    /// # Panics
    /// When `d` is negative.
    pub fn new(a: Rat, b: Rat, d: BigInt) -> Surd {
        assert!(!d.is_negative(), "negative radicand");
        Surd { a, b, d }.canonical()
    }

    pub fn rational(a: Rat) -> Surd {
        Surd {
            a,
            b: Rat::zero(),
            d: BigInt::zero(),
        }
    }

    pub fn zero() -> Surd {
        Surd::rational(Rat::zero())
    }

    /// `√x` for a non-negative rational, `None` otherwise.
    pub fn sqrt(x: &Rat) -> Option<Surd> {
        if x.is_negative() {
            return None;
        }
        // √(n/k) = √(n·k) / k
        let radicand = x.numer() * x.denom();
        let coeff = Rat::new(BigInt::one(), x.denom().clone());
        Some(Surd::new(Rat::zero(), coeff, radicand))
    }

    fn canonical(mut self) -> Surd {
        if self.b.is_zero() || self.d.is_zero() {
            return Surd::rational(self.a);
        }
        let root = self.d.sqrt();
        if &root * &root == self.d {
            let a = &self.a + &self.b * Rat::from_integer(root);
            return Surd::rational(a);
        }
        for p in small_primes() {
            let p = BigInt::from(p);
            let sq = &p * &p;
            if sq > self.d {
                break;
            }
            while (&self.d % &sq).is_zero() {
                self.d /= &sq;
                self.b *= Rat::from_integer(p.clone());
            }
        }
        self
    }

    pub fn a(&self) -> &Rat {
        &self.a
    }

    pub fn b(&self) -> &Rat {
        &self.b
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        self.is_rational().then_some(&self.a)
    }

    pub fn sign(&self) -> i32 {
        sign_single(&self.a, &self.b, &self.d)
    }

    pub fn conjugate(&self) -> Surd {
        Surd {
            a: self.a.clone(),
            b: -&self.b,
            d: self.d.clone(),
        }
    }

    pub fn abs(&self) -> Surd {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn square(&self) -> Surd {
        self * self
    }

    /// Radicand shared by `self` and `other`, if they live in a common field.
    fn common_d(&self, other: &Surd) -> Option<BigInt> {
        if self.is_rational() {
            Some(other.d.clone())
        } else if other.is_rational() || self.d == other.d {
            Some(self.d.clone())
        } else {
            None
        }
    }

    pub fn same_field(&self, other: &Surd) -> bool {
        self.common_d(other).is_some()
    }

    fn field_of(&self, other: &Surd) -> BigInt {
        self.common_d(other)
            .unwrap_or_else(|| panic!("mixed quadratic fields: √{} and √{}", self.d, other.d))
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_rational() {
            return to_f64(&self.a);
        }
        let root = to_f64(&Rat::from_integer(self.d.clone())).sqrt();
        let a = to_f64(&self.a);
        let b = to_f64(&self.b);
        if a == 0.0 || (a > 0.0) == (b > 0.0) {
            return a + b * root;
        }
        // Opposite signs: divide the norm by the conjugate to avoid cancellation.
        let norm = &self.a * &self.a - &self.b * &self.b * Rat::from_integer(self.d.clone());
        to_f64(&norm) / (a - b * root)
    }

    /// `⌊x⌋` computed exactly.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.a.floor().to_integer();
        }
        let radical = &self.b * &self.b * Rat::from_integer(self.d.clone());
        let root = radical.floor().to_integer().sqrt();
        let mut k = self.a.floor().to_integer()
            + if self.b.is_negative() { -root } else { root };
        loop {
            if *self < Surd::rational(Rat::from_integer(k.clone())) {
                k -= 1;
            } else if *self >= Surd::rational(Rat::from_integer(&k + 1)) {
                k += 1;
            } else {
                return k;
            }
        }
    }

    /// Decimal expansion rounded to `digits` places after the point.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scale = num_traits::pow(BigInt::from(10), digits);
        let scaled = self * &Surd::rational(Rat::from_integer(scale.clone()));
        let shifted = &scaled + &Surd::rational(Rat::new(BigInt::one(), BigInt::from(2)));
        let n = shifted.floor();
        let negative = n.is_negative();
        let mag = n.abs().to_string();
        let padded = if mag.len() <= digits {
            format!("{}{}", "0".repeat(digits + 1 - mag.len()), mag)
        } else {
            mag
        };
        let (whole, frac) = padded.split_at(padded.len() - digits);
        let sign = if negative { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{whole}")
        } else {
            format!("{sign}{whole}.{frac}")
        }
    }

    /// Exact `(a,b,d)` rendering.
    pub fn exact_triple(&self) -> String {
        format!("({},{},{})", self.a, self.b, self.d)
    }

    pub fn cmp_rat(&self, r: &Rat) -> Ordering {
        sign_single(&(&self.a - r), &self.b, &self.d).cmp(&0)
    }
}

impl From<Rat> for Surd {
    fn from(r: Rat) -> Surd {
        Surd::rational(r)
    }
}

impl From<&Rat> for Surd {
    fn from(r: &Rat) -> Surd {
        Surd::rational(r.clone())
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}*sqrt({})", self.b, self.d)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.d)
        }
    }
}

impl PartialEq for Surd {
    fn eq(&self, other: &Surd) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Surd {}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Surd) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Surd) -> Ordering {
        let r = &self.a - &other.a;
        let s = match self.common_d(other) {
            Some(d) => sign_single(&r, &(&self.b - &other.b), &d),
            None => sign_mixed(&r, &self.b, &self.d, &(-&other.b), &other.d),
        };
        s.cmp(&0)
    }
}

impl Add for &Surd {
    type Output = Surd;
    fn add(self, rhs: &Surd) -> Surd {
        let d = self.field_of(rhs);
        Surd::new(&self.a + &rhs.a, &self.b + &rhs.b, d)
    }
}

impl Sub for &Surd {
    type Output = Surd;
    fn sub(self, rhs: &Surd) -> Surd {
        let d = self.field_of(rhs);
        Surd::new(&self.a - &rhs.a, &self.b - &rhs.b, d)
    }
}

impl Mul for &Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        let d = self.field_of(rhs);
        let dq = Rat::from_integer(d.clone());
        Surd::new(
            &self.a * &rhs.a + &self.b * &rhs.b * dq,
            &self.a * &rhs.b + &self.b * &rhs.a,
            d,
        )
    }
}

impl Div for &Surd {
    type Output = Surd;
    /// # Panics
    /// On division by zero or by an element of a different field.
    fn div(self, rhs: &Surd) -> Surd {
        let d = self.field_of(rhs);
        let norm = &rhs.a * &rhs.a - &rhs.b * &rhs.b * Rat::from_integer(d.clone());
        assert!(!norm.is_zero(), "division by zero surd");
        let num = self * &rhs.conjugate();
        Surd::new(&num.a / &norm, &num.b / &norm, d)
    }
}

impl Mul<&Rat> for &Surd {
    type Output = Surd;
    fn mul(self, rhs: &Rat) -> Surd {
        Surd::new(&self.a * rhs, &self.b * rhs, self.d.clone())
    }
}

impl Add<&Rat> for &Surd {
    type Output = Surd;
    fn add(self, rhs: &Rat) -> Surd {
        Surd::new(&self.a + rhs, self.b.clone(), self.d.clone())
    }
}

impl Sub<&Rat> for &Surd {
    type Output = Surd;
    fn sub(self, rhs: &Rat) -> Surd {
        Surd::new(&self.a - rhs, self.b.clone(), self.d.clone())
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd {
            a: -&self.a,
            b: -&self.b,
            d: self.d.clone(),
        }
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        -&self
    }
}

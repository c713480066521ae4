//! The numerical Grothendieck group of P²: Chern characters and the Euler form.
//!
//! A class is recorded by its Chern character `(ch0, ch1·H, ch2)`. All
//! operations are exact.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rat::{int, parse_rat, rat, Rat};

/// Exact Chern character `(ch0, ch1·H, ch2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CharVector {
    pub ch0: Rat,
    pub ch1: Rat,
    pub ch2: Rat,
}

/// The point `(1, s, q)` of the affine plane attached to a class of nonzero rank.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReducedPoint {
    pub s: Rat,
    pub q: Rat,
}

impl CharVector {
    pub fn new(ch0: Rat, ch1: Rat, ch2: Rat) -> Self {
        CharVector { ch0, ch1, ch2 }
    }

    /// Convenience constructor from small integers and a half-integral `ch2`
    /// given as numerator over 2.
    pub fn from_ints(ch0: i64, ch1: i64, twice_ch2: i64) -> Self {
        CharVector::new(int(ch0), int(ch1), rat(twice_ch2, 2))
    }

    pub fn zero() -> Self {
        CharVector::new(Rat::zero(), Rat::zero(), Rat::zero())
    }

    /// Class of the structure sheaf.
    pub fn structure_sheaf() -> Self {
        CharVector::from_ints(1, 0, 0)
    }

    /// Class of a skyscraper sheaf `O_x`.
    pub fn skyscraper() -> Self {
        CharVector::from_ints(0, 0, 2)
    }

    /// Class of the line bundle `O(n)`.
    pub fn line_bundle(n: i64) -> Self {
        twist(&CharVector::structure_sheaf(), n)
    }

    pub fn is_zero(&self) -> bool {
        self.ch0.is_zero() && self.ch1.is_zero() && self.ch2.is_zero()
    }

    pub fn scale(&self, k: &Rat) -> Self {
        CharVector::new(&self.ch0 * k, &self.ch1 * k, &self.ch2 * k)
    }

    /// True when the class could come from a sheaf on P²: integral rank and
    /// degree, and `2·ch2` integral with the parity forced by Riemann–Roch
    /// (`ch2 - ch1²/2` must make χ(O, v) integral).
    pub fn is_lattice(&self) -> bool {
        if !self.ch0.is_integer() || !self.ch1.is_integer() {
            return false;
        }
        let twice = &self.ch2 * int(2);
        if !twice.is_integer() {
            return false;
        }
        euler_pairing(&CharVector::structure_sheaf(), self).is_integer()
    }

    pub fn to_strings(&self) -> [String; 3] {
        [
            self.ch0.to_string(),
            self.ch1.to_string(),
            self.ch2.to_string(),
        ]
    }

    pub fn from_strings(parts: &[impl AsRef<str>]) -> Result<Self> {
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "expected three components, got {}",
                parts.len()
            )));
        }
        Ok(CharVector::new(
            parse_rat(parts[0].as_ref())?,
            parse_rat(parts[1].as_ref())?,
            parse_rat(parts[2].as_ref())?,
        ))
    }

    /// Parses `"r,c,e"`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').collect();
        CharVector::from_strings(&parts)
    }
}

impl fmt::Display for CharVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.ch0, self.ch1, self.ch2)
    }
}

impl Serialize for CharVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CharVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let parts = <Vec<String>>::deserialize(deserializer)?;
        CharVector::from_strings(&parts).map_err(D::Error::custom)
    }
}

impl Add for &CharVector {
    type Output = CharVector;
    fn add(self, rhs: &CharVector) -> CharVector {
        CharVector::new(
            &self.ch0 + &rhs.ch0,
            &self.ch1 + &rhs.ch1,
            &self.ch2 + &rhs.ch2,
        )
    }
}

impl Sub for &CharVector {
    type Output = CharVector;
    fn sub(self, rhs: &CharVector) -> CharVector {
        CharVector::new(
            &self.ch0 - &rhs.ch0,
            &self.ch1 - &rhs.ch1,
            &self.ch2 - &rhs.ch2,
        )
    }
}

impl Neg for &CharVector {
    type Output = CharVector;
    fn neg(self) -> CharVector {
        CharVector::new(-&self.ch0, -&self.ch1, -&self.ch2)
    }
}

impl Mul<&CharVector> for &Rat {
    type Output = CharVector;
    fn mul(self, rhs: &CharVector) -> CharVector {
        rhs.scale(self)
    }
}

/// `(s, q) = (ch1/ch0, ch2/ch0)`.
pub fn reduce(v: &CharVector) -> Result<ReducedPoint> {
    if v.ch0.is_zero() {
        return Err(Error::Ch0Zero);
    }
    Ok(ReducedPoint {
        s: &v.ch1 / &v.ch0,
        q: &v.ch2 / &v.ch0,
    })
}

/// The Euler form χ(a, b) = Σ (-1)^i dim Ext^i(a, b), from Riemann–Roch with
/// td(P²) = 1 + (3/2)H + H².
pub fn euler_pairing(a: &CharVector, b: &CharVector) -> Rat {
    let three_halves = rat(3, 2);
    &a.ch0 * &b.ch2 + &a.ch2 * &b.ch0 - &a.ch1 * &b.ch1
        + three_halves * (&a.ch0 * &b.ch1 - &a.ch1 * &b.ch0)
        + &a.ch0 * &b.ch0
}

/// Coefficients `(c0, c1, c2)` with χ(a, v) = c0·v.ch0 + c1·v.ch1 + c2·v.ch2.
pub fn left_form(a: &CharVector) -> [Rat; 3] {
    let th = rat(3, 2);
    [
        &a.ch2 - &th * &a.ch1 + &a.ch0,
        &th * &a.ch0 - &a.ch1,
        a.ch0.clone(),
    ]
}

/// Coefficients `(c0, c1, c2)` with χ(v, a) = c0·v.ch0 + c1·v.ch1 + c2·v.ch2.
pub fn right_form(a: &CharVector) -> [Rat; 3] {
    let th = rat(3, 2);
    [
        &a.ch2 + &th * &a.ch1 + &a.ch0,
        -&a.ch1 - &th * &a.ch0,
        a.ch0.clone(),
    ]
}

/// Tensor with `O(n)`: multiplication by `e^{nH}`.
pub fn twist(v: &CharVector, n: i64) -> CharVector {
    let n = int(n);
    let half_n2 = &n * &n / int(2);
    CharVector::new(
        v.ch0.clone(),
        &v.ch1 + &n * &v.ch0,
        &v.ch2 + &n * &v.ch1 + half_n2 * &v.ch0,
    )
}

/// Class of the Serre functor `(-) ⊗ O(-3) [2]`; the even shift is invisible.
pub fn serre_twist(v: &CharVector) -> CharVector {
    twist(v, -3)
}

pub fn shift(v: &CharVector, k: i64) -> CharVector {
    if k.rem_euclid(2) == 0 {
        v.clone()
    } else {
        -v
    }
}

/// Class of the derived dual.
pub fn dual(v: &CharVector) -> CharVector {
    CharVector::new(v.ch0.clone(), -&v.ch1, v.ch2.clone())
}

/// `χ(v, v) = ch0²(1 - s² + 2q)` for classes of nonzero rank.
pub fn self_pairing_from_point(ch0: &Rat, p: &ReducedPoint) -> Rat {
    ch0 * ch0 * (int(1) - &p.s * &p.s + int(2) * &p.q)
}

/// Sign of the rank, treating zero as positive.
pub fn rank_sign(v: &CharVector) -> i32 {
    if v.ch0.is_negative() {
        -1
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(n: i64) -> CharVector {
        CharVector::line_bundle(n)
    }

    #[test]
    fn euler_pairing_oracles() {
        assert_eq!(euler_pairing(&o(0), &o(0)), int(1));
        assert_eq!(euler_pairing(&o(0), &o(1)), int(3));
        assert_eq!(euler_pairing(&o(1), &o(0)), int(0));
        assert_eq!(euler_pairing(&o(0), &o(3)), int(10));
    }

    #[test]
    fn pairing_with_line_bundles_counts_monomials() {
        // h^0(O(n)) = (n+1)(n+2)/2 and higher cohomology vanishes for n >= 0.
        for n in 0..8 {
            let expected = int((n + 1) * (n + 2) / 2);
            assert_eq!(euler_pairing(&o(0), &o(n)), expected);
        }
        // O(-1), O(-2) are acyclic.
        assert_eq!(euler_pairing(&o(0), &o(-1)), int(0));
        assert_eq!(euler_pairing(&o(0), &o(-2)), int(0));
    }

    #[test]
    fn reduce_examples() {
        let t = CharVector::new(int(2), int(1), rat(-1, 2));
        let p = reduce(&t).unwrap();
        assert_eq!((p.s, p.q), (rat(1, 2), rat(-1, 4)));
        assert_eq!(reduce(&o(0)).unwrap(), ReducedPoint { s: int(0), q: int(0) });
        assert_eq!(reduce(&CharVector::skyscraper()), Err(Error::Ch0Zero));
        assert_eq!(reduce(&shift(&t, 1)).unwrap(), reduce(&t).unwrap());
    }

    #[test]
    fn twist_examples() {
        assert_eq!(twist(&o(0), 1), CharVector::new(int(1), int(1), rat(1, 2)));
        let p = reduce(&twist(&o(0), -3)).unwrap();
        assert_eq!((p.s, p.q), (int(-3), rat(9, 2)));
        assert_eq!(serre_twist(&CharVector::skyscraper()), CharVector::skyscraper());
        assert_eq!(serre_twist(&o(0)), CharVector::new(int(1), int(-3), rat(9, 2)));
    }

    #[test]
    fn shift_and_dual() {
        let v = CharVector::from_ints(1, 2, 2);
        assert_eq!(shift(&v, 1), CharVector::from_ints(-1, -2, -2));
        assert_eq!(shift(&v, 2), v);
        assert_eq!(shift(&v, -3), -&v);
        let t = CharVector::new(int(2), int(1), rat(-1, 2));
        assert_eq!(dual(&t), CharVector::new(int(2), int(-1), rat(-1, 2)));
        assert_eq!(dual(&dual(&t)), t);
    }

    #[test]
    fn linear_forms_agree_with_pairing() {
        let a = CharVector::new(int(5), int(3), rat(-3, 2));
        let v = CharVector::new(int(2), int(-7), rat(11, 3));
        let l = left_form(&a);
        let r = right_form(&a);
        assert_eq!(
            &l[0] * &v.ch0 + &l[1] * &v.ch1 + &l[2] * &v.ch2,
            euler_pairing(&a, &v)
        );
        assert_eq!(
            &r[0] * &v.ch0 + &r[1] * &v.ch1 + &r[2] * &v.ch2,
            euler_pairing(&v, &a)
        );
    }

    #[test]
    fn lattice_validator() {
        assert!(o(3).is_lattice());
        assert!(CharVector::new(int(2), int(1), rat(-1, 2)).is_lattice());
        assert!(!CharVector::new(int(1), int(4), rat(31, 5)).is_lattice());
        assert!(!CharVector::new(rat(1, 2), int(0), int(0)).is_lattice());
    }

    #[test]
    fn json_round_trip() {
        let t = CharVector::new(int(2), int(1), rat(-1, 2));
        let text = serde_json::to_string(&t).unwrap();
        assert_eq!(text, r#"["2","1","-1/2"]"#);
        let back: CharVector = serde_json::from_str(&text).unwrap();
        assert_eq!(back, t);
        assert!(serde_json::from_str::<CharVector>(r#"["1","2"]"#).is_err());
    }
}

//! Exact arithmetic in real quadratic fields `Q(sqrt(d))`.
//!
//! A scalar is `a + b*sqrt(d)` with rational `a`, `b`. Scalars with `b = 0`
//! are plain rationals and combine with any discriminant; two irrational
//! scalars must share `d`.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

#[derive(Clone)]
pub struct QuadExtScalar {
    a: BigRational,
    b: BigRational,
    d: u64,
}

pub fn is_square_free(d: u64) -> bool {
    if d == 0 {
        return false;
    }
    let mut n = d;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p * p) {
            return false;
        }
        if n.is_multiple_of(p) {
            n /= p;
        }
        p += 1;
    }
    true
}

impl QuadExtScalar {
    pub fn new(a: BigRational, b: BigRational, d: u64) -> Result<Self> {
        if !is_square_free(d) {
            return Err(Error::InvalidDiscriminant(d));
        }
        if d == 1 {
            return Ok(Self::rational(a + b));
        }
        Ok(QuadExtScalar { a, b, d })
    }

    pub fn rational(a: BigRational) -> Self {
        QuadExtScalar {
            a,
            b: BigRational::zero(),
            d: 1,
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::rational(BigRational::from_integer(n.into()))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::rational(BigRational::new(num.into(), den.into()))
    }

    /// `sqrt(d)` itself.
    pub fn sqrt(d: u64) -> Result<Self> {
        Self::new(BigRational::zero(), BigRational::one(), d)
    }

    pub fn zero() -> Self {
        Self::rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.b
    }

    /// Discriminant of the field this value lives in; 1 for rationals.
    pub fn discriminant(&self) -> u64 {
        if self.b.is_zero() {
            1
        } else {
            self.d
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// The value as an integer, if it is one.
    pub fn to_integer(&self) -> Option<BigInt> {
        (self.b.is_zero() && self.a.is_integer()).then(|| self.a.to_integer())
    }

    fn joint_discriminant(&self, other: &Self) -> Result<u64> {
        match (self.discriminant(), other.discriminant()) {
            (1, d) | (d, 1) => Ok(d),
            (l, r) if l == r => Ok(l),
            (l, r) => Err(Error::DiscriminantMismatch { left: l, right: r }),
        }
    }

    fn build(a: BigRational, b: BigRational, d: u64) -> Self {
        if b.is_zero() {
            Self::rational(a)
        } else {
            QuadExtScalar { a, b, d }
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let d = self.joint_discriminant(other)?;
        Ok(Self::build(&self.a + &other.a, &self.b + &other.b, d))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        let d = self.joint_discriminant(other)?;
        Ok(Self::build(&self.a - &other.a, &self.b - &other.b, d))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let d = self.joint_discriminant(other)?;
        if self.b.is_zero() && other.b.is_zero() {
            return Ok(Self::rational(&self.a * &other.a));
        }
        let dr = BigRational::from_integer(d.into());
        let a = &self.a * &other.a + &self.b * &other.b * dr;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Self::build(a, b, d))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        let inv = other.inverse()?;
        self.checked_mul(&inv)
    }

    /// Galois conjugate `a - b*sqrt(d)`.
    pub fn conjugate(&self) -> Self {
        Self::build(self.a.clone(), -&self.b, self.d)
    }

    /// Field norm `a^2 - b^2 d`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(self.d.into())
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        Ok(Self::build(&self.a / &n, -&self.b / &n, self.d))
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::build(&self.a * r, &self.b * r, self.d)
    }

    /// Sign of the real number `a + b*sqrt(d)`.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        // opposite signs: compare a^2 with b^2 d
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * BigRational::from_integer(self.d.into());
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.signum() != Ordering::Less
    }

    /// Floating-point approximation, for display only.
    pub fn approx(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.a.to_f64().unwrap_or(f64::NAN)
            + self.b.to_f64().unwrap_or(f64::NAN) * (self.d as f64).sqrt()
    }
}

impl PartialEq for QuadExtScalar {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && (self.b.is_zero() || self.d == other.d)
    }
}

impl Eq for QuadExtScalar {}

impl Hash for QuadExtScalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.a.hash(state);
        self.b.hash(state);
        self.discriminant().hash(state);
    }
}

impl Default for QuadExtScalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<BigRational> for QuadExtScalar {
    fn from(r: BigRational) -> Self {
        Self::rational(r)
    }
}

impl From<i64> for QuadExtScalar {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<BigInt> for QuadExtScalar {
    fn from(n: BigInt) -> Self {
        Self::rational(BigRational::from_integer(n))
    }
}

// Operator impls panic on a discriminant mismatch, like integer overflow in
// debug builds. Use the `checked_*` methods where mixed fields can occur.
macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&QuadExtScalar> for &QuadExtScalar {
            type Output = QuadExtScalar;
            fn $method(self, rhs: &QuadExtScalar) -> QuadExtScalar {
                self.$checked(rhs).expect("quadratic field mismatch")
            }
        }
        impl $tr<QuadExtScalar> for QuadExtScalar {
            type Output = QuadExtScalar;
            fn $method(self, rhs: QuadExtScalar) -> QuadExtScalar {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&QuadExtScalar> for QuadExtScalar {
            type Output = QuadExtScalar;
            fn $method(self, rhs: &QuadExtScalar) -> QuadExtScalar {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl AddAssign<&QuadExtScalar> for QuadExtScalar {
    fn add_assign(&mut self, rhs: &QuadExtScalar) {
        let d = self.joint_discriminant(rhs).expect("quadratic field mismatch");
        self.a += &rhs.a;
        self.b += &rhs.b;
        self.d = if self.b.is_zero() { 1 } else { d };
    }
}

impl Neg for &QuadExtScalar {
    type Output = QuadExtScalar;
    fn neg(self) -> QuadExtScalar {
        QuadExtScalar::build(-&self.a, -&self.b, self.d)
    }
}

impl Neg for QuadExtScalar {
    type Output = QuadExtScalar;
    fn neg(self) -> QuadExtScalar {
        -&self
    }
}

impl std::iter::Sum for QuadExtScalar {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        let mut acc = QuadExtScalar::zero();
        for x in iter {
            acc += &x;
        }
        acc
    }
}

/// Canonical text form: `p/q`, `r/s*sqrt(d)` or `p/q+r/s*sqrt(d)`.
impl fmt::Display for QuadExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if !self.a.is_zero() {
            write!(f, "{}+", self.a)?;
        }
        write!(f, "{}*sqrt({})", self.b, self.d)
    }
}

impl fmt::Debug for QuadExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    let r: BigRational = s.parse().map_err(|_| bad())?;
    if r.denom().is_zero() {
        return Err(bad());
    }
    Ok(r)
}

impl FromStr for QuadExtScalar {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let s = text.trim();
        let Some(star) = s.find("*sqrt(") else {
            return Ok(Self::rational(parse_rational(s)?));
        };
        let inner = s[star + 6..]
            .strip_suffix(')')
            .ok_or_else(|| Error::Parse(format!("unterminated sqrt in {text:?}")))?;
        let d: u64 = inner
            .parse()
            .map_err(|_| Error::Parse(format!("bad discriminant in {text:?}")))?;
        let head = &s[..star];
        // the surd coefficient starts after the last '+' that is not a leading sign
        if head.is_empty() {
            return Err(Error::Parse(format!("missing coefficient in {text:?}")));
        }
        let (a, b) = match head[1..].rfind('+').map(|i| i + 1) {
            Some(i) => (parse_rational(&head[..i])?, parse_rational(&head[i + 1..])?),
            None => (BigRational::zero(), parse_rational(head)?),
        };
        Self::new(a, b, d)
    }
}

impl PartialOrd for QuadExtScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.checked_sub(other).ok().map(|diff| diff.signum())
    }
}

impl QuadExtScalar {
    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self
        } else {
            self.clone()
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> QuadExtScalar {
        s.parse().unwrap()
    }

    #[test]
    fn projector_coefficient_from_scaled_form() {
        // (1/4)(1 + 1/sqrt5) = 1/4 + (1/20) sqrt5
        let inv_sqrt5 = QuadExtScalar::sqrt(5).unwrap().inverse().unwrap();
        assert_eq!(inv_sqrt5, q("1/5*sqrt(5)"));
        let x = &QuadExtScalar::from_ratio(1, 4) * &(QuadExtScalar::one() + inv_sqrt5);
        assert_eq!(x, q("1/4+1/20*sqrt(5)"));
        assert_eq!(x.rational_part(), &BigRational::new(1.into(), 4.into()));
        assert_eq!(x.surd_part(), &BigRational::new(1.into(), 20.into()));
    }

    #[test]
    fn identities() {
        let x = q("1/4+-1/20*sqrt(5)");
        assert_eq!(&x + &QuadExtScalar::zero(), x);
        assert_eq!(&x * &QuadExtScalar::one(), x);
    }

    #[test]
    fn inverse_sqrt5_squared() {
        let s = QuadExtScalar::sqrt(5).unwrap().inverse().unwrap();
        assert_eq!(&s * &s, QuadExtScalar::from_ratio(1, 5));
        assert!((&s * &s).is_rational());
    }

    #[test]
    fn parse_and_display() {
        for text in ["1/4", "-3", "1/4+-1/20*sqrt(5)", "-1/20*sqrt(5)", "2+1*sqrt(5)"] {
            assert_eq!(q(text).to_string(), text);
        }
        assert_eq!(q("3/6"), QuadExtScalar::from_ratio(1, 2));
        assert_eq!(q("1+1*sqrt(1)"), QuadExtScalar::from_integer(2));
        assert!("1/0".parse::<QuadExtScalar>().is_err());
        assert!("1+1*sqrt(4)".parse::<QuadExtScalar>().is_err());
        assert!("1+1*sqrt(5".parse::<QuadExtScalar>().is_err());
        assert!("x".parse::<QuadExtScalar>().is_err());
        assert!("".parse::<QuadExtScalar>().is_err());
    }

    #[test]
    fn errors() {
        assert!(matches!(
            QuadExtScalar::zero().inverse(),
            Err(Error::DivisionByZero)
        ));
        let a = QuadExtScalar::sqrt(5).unwrap();
        let b = QuadExtScalar::sqrt(2).unwrap();
        assert!(matches!(
            a.checked_add(&b),
            Err(Error::DiscriminantMismatch { .. })
        ));
        // rationals mix with any field
        assert!(a.checked_add(&QuadExtScalar::one()).is_ok());
    }

    #[test]
    fn sign_of_surds() {
        assert!(q("3+-1*sqrt(5)").is_positive());
        assert!(!q("2+-1*sqrt(5)").is_nonnegative());
        assert!(q("-2+1*sqrt(5)").is_positive());
        assert_eq!(QuadExtScalar::zero().signum(), Ordering::Equal);
    }

    fn arb_rat() -> impl Strategy<Value = BigRational> {
        (-40i64..40, 1i64..12).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
    }

    fn arb_q5() -> impl Strategy<Value = QuadExtScalar> {
        (arb_rat(), arb_rat()).prop_map(|(a, b)| QuadExtScalar::new(a, b, 5).unwrap())
    }

    proptest! {
        #[test]
        fn field_axioms(x in arb_q5(), y in arb_q5(), z in arb_q5()) {
            prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert!((&x - &x).is_zero());
            if !x.is_zero() {
                prop_assert!((&x * &x.inverse().unwrap()).is_one());
                prop_assert_eq!(&(&y * &x).checked_div(&x).unwrap(), &y);
            }
        }

        #[test]
        fn conjugation(x in arb_q5(), y in arb_q5()) {
            prop_assert_eq!(x.conjugate().conjugate(), x.clone());
            prop_assert_eq!((&x * &y).conjugate(), &x.conjugate() * &y.conjugate());
            prop_assert_eq!((&x + &y).conjugate(), &x.conjugate() + &y.conjugate());
            prop_assert_eq!(&x.conjugate() * &x, QuadExtScalar::rational(x.norm()));
        }

        #[test]
        fn rationals_agree(a in arb_rat(), b in arb_rat()) {
            let x = QuadExtScalar::rational(a.clone());
            let y = QuadExtScalar::rational(b.clone());
            prop_assert_eq!((&x * &y).rational_part().clone(), &a * &b);
            prop_assert_eq!((&x + &y).rational_part().clone(), &a + &b);
        }

        #[test]
        fn text_round_trip(x in arb_q5()) {
            prop_assert_eq!(x.to_string().parse::<QuadExtScalar>().unwrap(), x);
        }

        #[test]
        fn sign_matches_float(x in arb_q5()) {
            let f = x.approx();
            if f.abs() > 1e-9 {
                prop_assert_eq!(x.is_positive(), f > 0.0);
            }
        }
    }
}

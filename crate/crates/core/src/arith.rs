//! Exact rational arithmetic and the falling-factorial kernels used by every
//! coefficient formula in the crate.
//!
//! [`Rational`] is always in lowest terms with a positive denominator, and
//! serializes as the string `"p/q"` (or `"p"` when `q = 1`).

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Deref, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_dim, GkzError, Result};

/// An exact rational number of arbitrary precision.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `numer/denom`, normalizing sign and common factors.
    ///
    /// Panics if `denom == 0`.
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        Rational(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// True for `0, 1, 2, ...`.
    pub fn is_natural(&self) -> bool {
        self.is_integer() && !self.is_negative()
    }

    /// True for `-1, -2, ...`: the entries that make up a negative support.
    pub fn is_negative_integer(&self) -> bool {
        self.is_integer() && self.is_negative()
    }

    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.to_integer())
    }

    pub fn to_i64(&self) -> Option<i64> {
        self.to_integer().and_then(|n| n.to_i64())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let sign = if self.is_negative() { -1.0 } else { 1.0 };
        sign * self.ln_abs().exp()
    }

    /// `ln |self|`, stable for numerators and denominators far beyond `f64`
    /// range. Returns `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        ln_bigint(self.numer()) - ln_bigint(self.denom())
    }

    pub fn pow(&self, exp: u32) -> Self {
        Rational(num_traits::pow(self.0.clone(), exp as usize))
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

/// `ln |n|` for a nonzero big integer.
pub(crate) fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::from_integer(n)
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom().is_one() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = GkzError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || GkzError::invalid(format!("not a rational number: {s:?}"));
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s, "1"),
        };
        let p: BigInt = p.parse().map_err(|_| bad())?;
        let q: BigInt = q.parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(GkzError::invalid(format!("zero denominator in {s:?}")));
        }
        Ok(Rational::new(p, q))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $tr<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::one(), |acc, x| acc * x)
    }
}

/// A point of `Q^n`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RationalVector(pub Vec<Rational>);

impl RationalVector {
    pub fn new(entries: Vec<Rational>) -> Self {
        RationalVector(entries)
    }

    pub fn zeros(n: usize) -> Self {
        RationalVector(vec![Rational::zero(); n])
    }

    pub fn from_integers(entries: &[i64]) -> Self {
        RationalVector(entries.iter().map(|&e| Rational::from(e)).collect())
    }

    /// Parses a list of `"p/q"` strings.
    pub fn parse(entries: &[&str]) -> Result<Self> {
        entries.iter().map(|s| s.parse()).collect::<Result<_>>().map(RationalVector)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `self + offset` for an integer offset.
    pub fn shifted(&self, offset: &[i64]) -> Result<Self> {
        check_dim(self.dim(), offset.len())?;
        Ok(RationalVector(
            self.0
                .iter()
                .zip(offset)
                .map(|(z, &o)| z + Rational::from(o))
                .collect(),
        ))
    }

    /// `sum_i row_i * self_i`.
    pub fn weighted_sum(&self, row: &[u64]) -> Result<Rational> {
        check_dim(self.dim(), row.len())?;
        Ok(self
            .0
            .iter()
            .zip(row)
            .map(|(z, &a)| z * Rational::from(a))
            .sum())
    }

    pub fn into_inner(self) -> Vec<Rational> {
        self.0
    }
}

impl Deref for RationalVector {
    type Target = [Rational];
    fn deref(&self) -> &[Rational] {
        &self.0
    }
}

impl fmt::Debug for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, z) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{z}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// `(z)_k = z (z-1) ... (z-k+1)`; `1` for `k = 0`.
pub fn falling_factorial_scalar(z: &Rational, k: u64) -> Rational {
    // Integer fast path: avoids a gcd per factor.
    if z.is_integer() {
        let z = z.numer();
        let mut acc = BigInt::one();
        let mut f = z.clone();
        for _ in 0..k {
            if f.is_zero() {
                return Rational::zero();
            }
            acc *= &f;
            f -= 1;
        }
        return Rational::from_integer(acc);
    }
    let (p, q) = (z.numer(), z.denom());
    // (p/q)(p/q - 1)... = prod (p - jq) / q^k
    let mut num = BigInt::one();
    let mut f = p.clone();
    for _ in 0..k {
        num *= &f;
        f -= q;
    }
    let den = num_traits::pow(q.clone(), k as usize);
    Rational::new(num, den)
}

/// `(z)_alpha = prod_i (z_i)_{alpha_i}`.
pub fn falling_factorial(z: &[Rational], alpha: &[u64]) -> Result<Rational> {
    check_dim(z.len(), alpha.len())?;
    let mut acc = Rational::one();
    for (zi, &ai) in z.iter().zip(alpha) {
        if ai == 0 {
            continue;
        }
        let f = falling_factorial_scalar(zi, ai);
        if f.is_zero() {
            return Ok(Rational::zero());
        }
        acc *= &f;
    }
    Ok(acc)
}

/// `k!` as a big integer.
pub fn factorial(k: u64) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * i)
}

/// Binomial coefficient `C(z, l)` for rational `z`.
pub fn binomial(z: &Rational, l: u64) -> Rational {
    falling_factorial_scalar(z, l) / Rational::from_integer(factorial(l))
}

const STIRLING_CUTOFF: u64 = 256;

/// `ln(k!)`: summed exactly below a cutoff, Stirling series above it.
pub fn log_factorial(k: u64) -> f64 {
    if k < STIRLING_CUTOFF {
        return (2..=k).map(|i| (i as f64).ln()).sum();
    }
    let n = k as f64 + 1.0;
    // ln Gamma(n) with four correction terms; error far below 1e-12 here.
    let inv = 1.0 / n;
    let inv2 = inv * inv;
    (n - 0.5) * n.ln() - n + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

/// gcd of a list of positive integers; `0` for an empty list.
pub fn gcd_all(values: &[u64]) -> u64 {
    values.iter().fold(0u64, |g, &v| g.gcd(&v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(q("6/4").to_string(), "3/2");
        assert_eq!(q("-6/-4").to_string(), "3/2");
        assert_eq!(q("3/-4").to_string(), "-3/4");
        assert_eq!(q("0/7").to_string(), "0");
        assert_eq!(q(" 5 ").to_string(), "5");
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
        assert_eq!(q("0").denom(), &BigInt::one());
    }

    #[test]
    fn serde_uses_strings() {
        let v = RationalVector::parse(&["1/2", "-3"]).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"["1/2","-3"]"#);
        let back: RationalVector = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn falling_factorial_examples() {
        let z = RationalVector::parse(&["1/2", "7"]).unwrap();
        assert_eq!(falling_factorial(&z, &[0, 0]).unwrap(), Rational::one());

        let z = RationalVector::parse(&["1/2", "0"]).unwrap();
        assert_eq!(falling_factorial(&z, &[3, 0]).unwrap(), q("3/8"));

        let z = RationalVector::parse(&["-5/2", "2"]).unwrap();
        assert_eq!(falling_factorial(&z, &[0, 2]).unwrap(), q("2"));

        assert!(matches!(
            falling_factorial(&z, &[1]),
            Err(GkzError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn falling_factorial_hits_zero_for_small_naturals() {
        assert!(falling_factorial_scalar(&q("3"), 5).is_zero());
        assert_eq!(falling_factorial_scalar(&q("3"), 3), q("6"));
        assert_eq!(falling_factorial_scalar(&q("-1"), 3), q("-6"));
    }

    #[test]
    fn log_factorial_examples() {
        assert_eq!(log_factorial(0), 0.0);
        assert_eq!(log_factorial(1), 0.0);
        let exact = 3628800f64.ln();
        assert!((log_factorial(10) - exact).abs() / exact < 1e-12);
        // Stirling branch against exact big-integer factorials.
        for k in [256u64, 300, 777, 2000] {
            let exact = ln_bigint(&factorial(k));
            let rel = (log_factorial(k) - exact).abs() / exact;
            assert!(rel < 1e-9, "k={k} rel={rel}");
        }
    }

    #[test]
    fn ln_abs_of_huge_values() {
        let big = Rational::from_integer(factorial(400)) / Rational::from_integer(factorial(150));
        let expect = log_factorial(400) - log_factorial(150);
        assert!((big.ln_abs() - expect).abs() < 1e-9 * expect);
        assert!((q("-1/8").to_f64() + 0.125).abs() < 1e-15);
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-40i64..40, 1i64..12).prop_map(|(p, q)| Rational::new(p, q))
    }

    proptest! {
        #[test]
        fn falling_factorial_shift_rule(
            z in prop::collection::vec(small_rational(), 3),
            alpha in prop::collection::vec(0u64..5, 3),
            beta in prop::collection::vec(0u64..5, 3),
        ) {
            let sum: Vec<u64> = alpha.iter().zip(&beta).map(|(a, b)| a + b).collect();
            let shifted: Vec<Rational> = z
                .iter()
                .zip(&alpha)
                .map(|(zi, &a)| zi - Rational::from(a))
                .collect();
            let lhs = falling_factorial(&z, &sum).unwrap();
            let rhs = falling_factorial(&z, &alpha).unwrap()
                * falling_factorial(&shifted, &beta).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn field_laws(a in small_rational(), b in small_rational(), c in small_rational()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            let reparsed: Rational = a.to_string().parse().unwrap();
            prop_assert_eq!(reparsed.to_string(), a.to_string());
            prop_assert!(a.denom() > &BigInt::zero());
            prop_assert!(a.numer().gcd(a.denom()).is_one() || a.is_zero());
        }
    }
}

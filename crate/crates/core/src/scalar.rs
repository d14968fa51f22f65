//! Exact arithmetic in the real quadratic field Q(√5).
//!
//! Every coefficient that shows up in the H4 computations (roots, group
//! matrices, invariant polynomials, operator coefficients) lives in this
//! field. Values are stored over a common positive denominator,
//! `(a + b·√5) / d`, with `gcd(a, b, d) = 1`. The common denominator keeps
//! integer-valued arithmetic (by far the most frequent case inside
//! polynomial products) free of gcd computations.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use num_bigint::BigInt as Int;
pub type Rational = num_rational::BigRational;

/// An element `(a + b·√5) / d` of Q(√5) in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    a: BigInt,
    b: BigInt,
    d: BigInt,
}

impl ExactScalar {
    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self { a: BigInt::from(n), b: BigInt::zero(), d: BigInt::one() }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self { a: n, b: BigInt::zero(), d: BigInt::one() }
    }

    /// `num / den` as a rational element.
    ///
    /// Panics if `den == 0`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_parts(BigInt::from(num), BigInt::zero(), BigInt::from(den))
    }

    pub fn from_rational(r: &Rational) -> Self {
        Self::from_parts(r.numer().clone(), BigInt::zero(), r.denom().clone())
    }

    /// `a + b·√5` from its rational and irrational parts.
    pub fn new(a: &Rational, b: &Rational) -> Self {
        let d = a.denom().lcm(b.denom());
        let na = a.numer() * (&d / a.denom());
        let nb = b.numer() * (&d / b.denom());
        Self::from_parts(na, nb, d)
    }

    /// Builds `(a + b√5)/d` and reduces it. Panics if `d == 0`.
    pub fn from_parts(a: BigInt, b: BigInt, d: BigInt) -> Self {
        assert!(!d.is_zero(), "zero denominator in ExactScalar");
        let mut s = Self { a, b, d };
        s.normalize();
        s
    }

    pub fn sqrt5() -> Self {
        Self { a: BigInt::zero(), b: BigInt::one(), d: BigInt::one() }
    }

    /// Golden ratio φ₊ = (1 + √5)/2.
    pub fn phi_plus() -> Self {
        Self { a: BigInt::one(), b: BigInt::one(), d: BigInt::from(2) }
    }

    /// Its Galois conjugate φ₋ = (1 − √5)/2.
    pub fn phi_minus() -> Self {
        Self { a: BigInt::one(), b: -BigInt::one(), d: BigInt::from(2) }
    }

    fn normalize(&mut self) {
        if self.d.is_one() {
            return;
        }
        if self.d.is_negative() {
            self.a = -std::mem::take(&mut self.a);
            self.b = -std::mem::take(&mut self.b);
            self.d = -std::mem::take(&mut self.d);
        }
        if self.a.is_zero() && self.b.is_zero() {
            self.d = BigInt::one();
            return;
        }
        let g = self.a.gcd(&self.b).gcd(&self.d);
        if !g.is_one() {
            self.a /= &g;
            self.b /= &g;
            self.d /= &g;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero() && self.d.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.d.is_one()
    }

    /// Rational part `a/d`.
    pub fn rational_part(&self) -> Rational {
        Rational::new(self.a.clone(), self.d.clone())
    }

    /// Coefficient of √5, `b/d`.
    pub fn sqrt5_part(&self) -> Rational {
        Rational::new(self.b.clone(), self.d.clone())
    }

    pub(crate) fn numerators(&self) -> (&BigInt, &BigInt, &BigInt) {
        (&self.a, &self.b, &self.d)
    }

    /// Galois conjugation √5 → −√5.
    pub fn conjugate(&self) -> Self {
        Self { a: self.a.clone(), b: -self.b.clone(), d: self.d.clone() }
    }

    /// Field norm `x · conj(x)`, a rational number.
    pub fn norm(&self) -> Rational {
        let n = &self.a * &self.a - BigInt::from(5) * &self.b * &self.b;
        Rational::new(n, &self.d * &self.d)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // 1/((a+b√5)/d) = d(a − b√5)/(a² − 5b²)
        let n = &self.a * &self.a - BigInt::from(5) * &self.b * &self.b;
        Ok(Self::from_parts(&self.d * &self.a, -(&self.d * &self.b), n))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Sign of the real number `a + b√5` (the field is ordered through its
    /// embedding with √5 > 0).
    pub fn signum(&self) -> i32 {
        let sa = sign(&self.a);
        let sb = sign(&self.b);
        if sa == 0 {
            return sb;
        }
        if sb == 0 || sa == sb {
            return sa;
        }
        // opposite signs: compare a² with 5b²
        let a2 = &self.a * &self.a;
        let b2 = BigInt::from(5) * &self.b * &self.b;
        match a2.cmp(&b2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn cmp_real(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Integer value if this is an integer.
    pub fn to_i64(&self) -> Option<i64> {
        if self.is_rational() && self.d.is_one() {
            self.a.to_i64()
        } else {
            None
        }
    }
}

fn sign(n: &BigInt) -> i32 {
    if n.is_zero() {
        0
    } else if n.is_negative() {
        -1
    } else {
        1
    }
}

impl Default for ExactScalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<&Rational> for ExactScalar {
    fn from(r: &Rational) -> Self {
        Self::from_rational(r)
    }
}

impl<'a> Add<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        if self.d.is_one() && rhs.d.is_one() {
            return ExactScalar { a: &self.a + &rhs.a, b: &self.b + &rhs.b, d: BigInt::one() };
        }
        if self.d == rhs.d {
            return ExactScalar::from_parts(&self.a + &rhs.a, &self.b + &rhs.b, self.d.clone());
        }
        ExactScalar::from_parts(
            &self.a * &rhs.d + &rhs.a * &self.d,
            &self.b * &rhs.d + &rhs.b * &self.d,
            &self.d * &rhs.d,
        )
    }
}

impl<'a> Sub<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        if self.d.is_one() && rhs.d.is_one() {
            return ExactScalar { a: &self.a - &rhs.a, b: &self.b - &rhs.b, d: BigInt::one() };
        }
        if self.d == rhs.d {
            return ExactScalar::from_parts(&self.a - &rhs.a, &self.b - &rhs.b, self.d.clone());
        }
        ExactScalar::from_parts(
            &self.a * &rhs.d - &rhs.a * &self.d,
            &self.b * &rhs.d - &rhs.b * &self.d,
            &self.d * &rhs.d,
        )
    }
}

impl<'a> Mul<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        let (a, b) = if self.b.is_zero() && rhs.b.is_zero() {
            (&self.a * &rhs.a, BigInt::zero())
        } else if self.b.is_zero() {
            (&self.a * &rhs.a, &self.a * &rhs.b)
        } else if rhs.b.is_zero() {
            (&self.a * &rhs.a, &self.b * &rhs.a)
        } else {
            (
                &self.a * &rhs.a + BigInt::from(5) * &self.b * &rhs.b,
                &self.a * &rhs.b + &self.b * &rhs.a,
            )
        };
        if self.d.is_one() && rhs.d.is_one() {
            return ExactScalar { a, b, d: BigInt::one() };
        }
        ExactScalar::from_parts(a, b, &self.d * &rhs.d)
    }
}

impl<'a> Div<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    /// Panics on division by zero; use [`ExactScalar::checked_div`] to
    /// handle that case.
    fn div(self, rhs: &ExactScalar) -> ExactScalar {
        self.checked_div(rhs).expect("division by zero in Q(sqrt5)")
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar { a: -self.a.clone(), b: -self.b.clone(), d: self.d.clone() }
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar { a: -self.a, b: -self.b, d: self.d }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, rhs: ExactScalar) -> ExactScalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, rhs: &ExactScalar) -> ExactScalar {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<ExactScalar> for &'a ExactScalar {
            type Output = ExactScalar;
            fn $m(self, rhs: ExactScalar) -> ExactScalar {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&ExactScalar> for ExactScalar {
    fn add_assign(&mut self, rhs: &ExactScalar) {
        if self.d.is_one() && rhs.d.is_one() {
            self.a += &rhs.a;
            self.b += &rhs.b;
        } else {
            *self = &*self + rhs;
        }
    }
}

impl AddAssign for ExactScalar {
    fn add_assign(&mut self, rhs: ExactScalar) {
        *self += &rhs;
    }
}

impl SubAssign<&ExactScalar> for ExactScalar {
    fn sub_assign(&mut self, rhs: &ExactScalar) {
        if self.d.is_one() && rhs.d.is_one() {
            self.a -= &rhs.a;
            self.b -= &rhs.b;
        } else {
            *self = &*self - rhs;
        }
    }
}

impl MulAssign<&ExactScalar> for ExactScalar {
    fn mul_assign(&mut self, rhs: &ExactScalar) {
        *self = &*self * rhs;
    }
}

impl Sum for ExactScalar {
    fn sum<I: Iterator<Item = ExactScalar>>(iter: I) -> Self {
        iter.fold(ExactScalar::zero(), |acc, x| acc + x)
    }
}

impl Product for ExactScalar {
    fn product<I: Iterator<Item = ExactScalar>>(iter: I) -> Self {
        iter.fold(ExactScalar::one(), |acc, x| acc * x)
    }
}

fn fmt_ratio(n: &BigInt, d: &BigInt) -> String {
    if d.is_one() {
        n.to_string()
    } else {
        format!("{n}/{d}")
    }
}

/// Canonical text form: `a/b`, `c/d*sqrt5` or `a/b+c/d*sqrt5` (signs folded
/// into the numerators, denominators omitted when 1).
impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ra = self.rational_part();
        let rb = self.sqrt5_part();
        let irr = |r: &Rational| -> String {
            if r.numer().is_one() && r.denom().is_one() {
                "sqrt5".to_string()
            } else if (-r.numer()).is_one() && r.denom().is_one() {
                "-sqrt5".to_string()
            } else {
                format!("{}*sqrt5", fmt_ratio(r.numer(), r.denom()))
            }
        };
        if rb.numer().is_zero() {
            write!(f, "{}", fmt_ratio(ra.numer(), ra.denom()))
        } else if ra.numer().is_zero() {
            write!(f, "{}", irr(&rb))
        } else {
            let tail = irr(&rb);
            let sep = if tail.starts_with('-') { "" } else { "+" };
            write!(f, "{}{}{}", fmt_ratio(ra.numer(), ra.denom()), sep, tail)
        }
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for ExactScalar {
    type Err = Error;

    /// Parses the canonical form written by `Display` (and, more generally,
    /// any constant expression accepted by the polynomial parser).
    fn from_str(s: &str) -> Result<Self> {
        let p = crate::poly::Polynomial::parse(s, crate::poly::Context::Cartesian)?;
        p.constant_value()
            .ok_or_else(|| Error::Parse(format!("not a constant: {s}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> ExactScalar {
        x.parse().unwrap()
    }

    #[test]
    fn golden_ratio_identities() {
        let p = ExactScalar::phi_plus();
        let m = ExactScalar::phi_minus();
        assert_eq!(&p * &m, ExactScalar::from_int(-1));
        assert_eq!(&p + &m, ExactScalar::one());
        assert_eq!(p.inv().unwrap(), &p - &ExactScalar::one());
        assert_eq!(p.conjugate(), m);
        assert_eq!(&p * &p, &p + &ExactScalar::one());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert!(matches!(ExactScalar::one().checked_div(&ExactScalar::zero()), Err(Error::DivisionByZero)));
        assert!(ExactScalar::zero().inv().is_err());
    }

    #[test]
    fn canonical_text() {
        assert_eq!(ExactScalar::phi_plus().to_string(), "1/2+1/2*sqrt5");
        assert_eq!(ExactScalar::phi_minus().to_string(), "1/2-1/2*sqrt5");
        assert_eq!(ExactScalar::from_ratio(-6, 4).to_string(), "-3/2");
        assert_eq!((ExactScalar::sqrt5() * ExactScalar::from_int(-3)).to_string(), "-3*sqrt5");
        for t in ["1/2+1/2*sqrt5", "-3/2", "sqrt5", "-7/3-2/5*sqrt5", "0"] {
            assert_eq!(s(t).to_string(), t);
        }
    }

    #[test]
    fn ordering_through_real_embedding() {
        assert_eq!(ExactScalar::phi_minus().signum(), -1);
        assert_eq!(ExactScalar::phi_plus().signum(), 1);
        // 9/4 vs √5 ≈ 2.236
        assert_eq!(s("9/4-sqrt5").signum(), 1);
        assert_eq!(s("2-sqrt5").signum(), -1);
        assert_eq!(ExactScalar::zero().signum(), 0);
        assert_eq!(s("-2+sqrt5").signum(), 1);
    }

    #[test]
    fn norm_and_pow() {
        assert_eq!(ExactScalar::phi_plus().norm(), Rational::from_integer(BigInt::from(-1)));
        assert_eq!(ExactScalar::sqrt5().pow(4), ExactScalar::from_int(25));
        // φ₊³ = 2 + √5
        assert_eq!(ExactScalar::phi_plus().pow(3), s("2+sqrt5"));
    }
}

//! Scalar traits and the Gaussian-rational coefficient field.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary precision rational number.
pub type Rational = BigRational;

/// Commutative ring with exact division where it is defined.
pub trait Ring:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Divides `self` by `rhs`, panicking if the quotient does not exist in the ring.
    fn div_exact(&self, rhs: &Self) -> Self;
}

/// Field of characteristic zero.
pub trait Field: Ring {
    fn inv(&self) -> Self;
    fn from_rational(q: &Rational) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)))
    }

    fn div(&self, rhs: &Self) -> Self {
        self.clone() * rhs.inv()
    }
}

impl Ring for Rational {
    fn div_exact(&self, rhs: &Self) -> Self {
        assert!(!rhs.is_zero(), "division by zero");
        self / rhs
    }
}

impl Field for Rational {
    fn inv(&self) -> Self {
        self.recip()
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats a rational as `p` or `p/q`.
pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // scale down huge numerators/denominators before converting
            let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(900);
            let n = (q.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (q.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// Fractional part in `[0, 1)`.
pub fn frac(q: &Rational) -> Rational {
    q - q.floor()
}

/// Element of the Gaussian rationals `Q(i)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gaussian {
    pub re: Rational,
    pub im: Rational,
}

impl Gaussian {
    pub fn new(re: Rational, im: Rational) -> Self {
        Gaussian { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Gaussian { re, im: Rational::zero() }
    }

    pub fn i() -> Self {
        Gaussian { re: Rational::zero(), im: Rational::one() }
    }

    pub fn conj(&self) -> Self {
        Gaussian { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

impl fmt::Debug for Gaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Gaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rational(&self.re)),
            (true, false) => write!(f, "{}*i", fmt_rational(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                write!(f, "({} {} {}*i)", fmt_rational(&self.re), sign, fmt_rational(&self.im.abs()))
            }
        }
    }
}

impl Zero for Gaussian {
    fn zero() -> Self {
        Gaussian { re: Rational::zero(), im: Rational::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for Gaussian {
    fn one() -> Self {
        Gaussian { re: Rational::one(), im: Rational::zero() }
    }
}

impl Add for Gaussian {
    type Output = Gaussian;
    fn add(self, o: Gaussian) -> Gaussian {
        Gaussian { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for Gaussian {
    type Output = Gaussian;
    fn sub(self, o: Gaussian) -> Gaussian {
        Gaussian { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Mul for Gaussian {
    type Output = Gaussian;
    fn mul(self, o: Gaussian) -> Gaussian {
        Gaussian {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for Gaussian {
    type Output = Gaussian;
    fn neg(self) -> Gaussian {
        Gaussian { re: -self.re, im: -self.im }
    }
}

impl Ring for Gaussian {
    fn div_exact(&self, rhs: &Self) -> Self {
        self.div(rhs)
    }
}

impl Field for Gaussian {
    fn inv(&self) -> Self {
        let n = self.norm();
        assert!(!n.is_zero(), "inverse of zero");
        Gaussian { re: &self.re / &n, im: -&self.im / &n }
    }
    fn from_rational(q: &Rational) -> Self {
        Gaussian::real(q.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_inverse() {
        let z = Gaussian::new(int(3), int(-4));
        assert_eq!(z.clone() * z.inv(), Gaussian::one());
        assert_eq!(Gaussian::i() * Gaussian::i(), -Gaussian::one());
    }

    #[test]
    fn formatting() {
        assert_eq!(fmt_rational(&rat(6, 4)), "3/2");
        assert_eq!(fmt_rational(&int(-2)), "-2");
        assert_eq!(Gaussian::new(int(1), int(-2)).to_string(), "(1 - 2*i)");
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = Rational::new(BigInt::from(10).pow(400), BigInt::from(10).pow(399) * 4);
        assert!((rational_to_f64(&big) - 2.5).abs() < 1e-12);
    }
}

//! Exact integer and Gaussian-integer arithmetic.
//!
//! [`GaussInt`] is the fixed-width workhorse used inside enumeration kernels,
//! [`ExactCoordinate`] is its arbitrary-precision counterpart exposed on
//! [`crate::lattice::LatticePoint`].

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// `re + im·i` with 128-bit components.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GaussInt {
    pub re: i128,
    pub im: i128,
}

impl GaussInt {
    pub const ZERO: GaussInt = GaussInt { re: 0, im: 0 };
    pub const ONE: GaussInt = GaussInt { re: 1, im: 0 };
    pub const I: GaussInt = GaussInt { re: 0, im: 1 };

    pub const fn new(re: i128, im: i128) -> Self {
        GaussInt { re, im }
    }

    pub const fn int(re: i128) -> Self {
        GaussInt { re, im: 0 }
    }

    pub fn conj(self) -> Self {
        GaussInt::new(self.re, -self.im)
    }

    /// `|x|² = x·conj(x)`, the norm down to ℤ.
    pub fn norm_sq(self) -> i128 {
        self.re * self.re + self.im * self.im
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn scale(self, k: i128) -> Self {
        GaussInt::new(self.re * k, self.im * k)
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re as f64, self.im as f64)
    }

    pub fn pow(self, e: u32) -> Self {
        let mut acc = GaussInt::ONE;
        for _ in 0..e {
            acc = acc * self;
        }
        acc
    }
}

impl Add for GaussInt {
    type Output = GaussInt;
    fn add(self, o: GaussInt) -> GaussInt {
        GaussInt::new(self.re + o.re, self.im + o.im)
    }
}

impl AddAssign for GaussInt {
    fn add_assign(&mut self, o: GaussInt) {
        self.re += o.re;
        self.im += o.im;
    }
}

impl Sub for GaussInt {
    type Output = GaussInt;
    fn sub(self, o: GaussInt) -> GaussInt {
        GaussInt::new(self.re - o.re, self.im - o.im)
    }
}

impl Neg for GaussInt {
    type Output = GaussInt;
    fn neg(self) -> GaussInt {
        GaussInt::new(-self.re, -self.im)
    }
}

impl Mul for GaussInt {
    type Output = GaussInt;
    fn mul(self, o: GaussInt) -> GaussInt {
        GaussInt::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

impl fmt::Display for GaussInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (r, 0) => write!(f, "{r}"),
            (0, i) => write!(f, "{i}i"),
            (r, i) if i < 0 => write!(f, "{r}-{}i", -i),
            (r, i) => write!(f, "{r}+{i}i"),
        }
    }
}

/// Arbitrary-precision `a + b·i`. Over the rational integers `b` stays 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactCoordinate {
    pub re: BigInt,
    pub im: BigInt,
}

impl ExactCoordinate {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        ExactCoordinate {
            re: re.into(),
            im: im.into(),
        }
    }

    pub fn zero() -> Self {
        ExactCoordinate::new(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn norm_sq(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    /// `|a + b·i|` in double precision.
    pub fn abs(&self) -> f64 {
        if self.im.is_zero() {
            return self.re.abs().to_f64().unwrap_or(f64::INFINITY);
        }
        self.norm_sq().to_f64().unwrap_or(f64::INFINITY).sqrt()
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl From<GaussInt> for ExactCoordinate {
    fn from(g: GaussInt) -> Self {
        ExactCoordinate::new(g.re, g.im)
    }
}

impl Add for &ExactCoordinate {
    type Output = ExactCoordinate;
    fn add(self, o: &ExactCoordinate) -> ExactCoordinate {
        ExactCoordinate {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl Mul for &ExactCoordinate {
    type Output = ExactCoordinate;
    fn mul(self, o: &ExactCoordinate) -> ExactCoordinate {
        ExactCoordinate {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl fmt::Display for ExactCoordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "{}{:+}i", self.re, self.im)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_product_and_norm() {
        let a = GaussInt::new(2, 3);
        let b = GaussInt::new(1, -1);
        assert_eq!(a * b, GaussInt::new(5, 1));
        assert_eq!((a * b).norm_sq(), a.norm_sq() * b.norm_sq());
        assert_eq!(GaussInt::I * GaussInt::I, GaussInt::int(-1));
    }

    #[test]
    fn exact_coordinate_does_not_overflow() {
        let big = ExactCoordinate::new(i128::MAX, 1);
        let sq = &big * &big;
        assert!(sq.re > BigInt::from(i128::MAX));
        let sum = &big + &big;
        assert_eq!(sum.re, BigInt::from(i128::MAX) * 2);
    }

    #[test]
    fn exact_abs() {
        assert_eq!(ExactCoordinate::new(-5, 0).abs(), 5.0);
        assert_eq!(ExactCoordinate::new(3, 4).abs(), 5.0);
    }
}

//! Minimal commutative-ring interface so forms can be evaluated over any
//! coefficient carrier (scalars, polynomials, series, floats).

use num_complex::Complex64;

use super::poly::{Poly, RatFn};
use super::scalar::Scalar;
use super::series::TruncatedSeries;

pub trait Ring: Clone {
    /// Additive identity compatible with `self` (same variable, precision).
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, c: &Scalar) -> Self;
}

impl Ring for Scalar {
    fn zero_like(&self) -> Self {
        Scalar::zero()
    }
    fn one_like(&self) -> Self {
        Scalar::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, c: &Scalar) -> Self {
        self * c
    }
}

impl Ring for Poly {
    fn zero_like(&self) -> Self {
        Poly::zero()
    }
    fn one_like(&self) -> Self {
        Poly::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, c: &Scalar) -> Self {
        Poly::scale(self, c)
    }
}

impl Ring for RatFn {
    fn zero_like(&self) -> Self {
        RatFn::zero()
    }
    fn one_like(&self) -> Self {
        RatFn::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, c: &Scalar) -> Self {
        RatFn::scale(self, c)
    }
}

impl Ring for TruncatedSeries {
    fn zero_like(&self) -> Self {
        TruncatedSeries::zero(self.var(), self.truncation())
    }
    fn one_like(&self) -> Self {
        TruncatedSeries::one(self.var(), self.truncation())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, c: &Scalar) -> Self {
        TruncatedSeries::scale(self, c)
    }
}

impl Ring for Complex64 {
    fn zero_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one_like(&self) -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, c: &Scalar) -> Self {
        self * c.to_complex()
    }
}

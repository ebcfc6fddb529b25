//! Numeric scalars for charges.
//!
//! Charges are generic over [`Scalar`] so that the lattice operations and
//! decompositions can run either in `f64` with explicit tolerances or in
//! exact rational arithmetic ([`Exact`]) for oracle checks.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

/// Exact rational scalar used by the oracle tests.
pub type Exact = BigRational;

pub trait Scalar: Clone + Debug + PartialOrd + PartialEq + Signed + 'static {
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// `|self| <= tol` in floating point; exactly zero for exact scalars.
    fn is_negligible(&self, tol: f64) -> bool;
    /// `self < -tol` in floating point; strictly negative for exact scalars.
    fn is_negative_beyond(&self, tol: f64) -> bool;

    fn min_of(a: &Self, b: &Self) -> Self {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    fn max_of(a: &Self, b: &Self) -> Self {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    fn sum<'a, I: IntoIterator<Item = &'a Self>>(items: I) -> Self {
        items
            .into_iter()
            .fold(Self::zero(), |acc, x| acc + x.clone())
    }
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }

    fn is_negative_beyond(&self, tol: f64) -> bool {
        *self < -tol
    }

    fn min_of(a: &Self, b: &Self) -> Self {
        a.min(*b)
    }

    fn max_of(a: &Self, b: &Self) -> Self {
        a.max(*b)
    }
}

impl Scalar for BigRational {
    fn from_f64(x: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(x).unwrap_or_else(BigRational::zero)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn is_negative_beyond(&self, _tol: f64) -> bool {
        self.is_negative()
    }
}

/// Builds an exact rational `num / den`.
pub fn ratio(num: i64, den: i64) -> Exact {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

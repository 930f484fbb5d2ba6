//! Exact-field abstraction shared by the polynomial and recurrence machinery.
//!
//! The recurrence solvers need to run over both `Q` and cyclotomic fields
//! `Q(zeta_m)`. The latter carry a runtime parameter (the conductor), so
//! constants cannot come from a nullary `zero()`; instead every element can
//! mint the zero and one of its own field (`zero_like`, `one_like`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt::Debug;

/// An exact field element. Operations take references and return owned
/// values; nothing here allocates more than the result.
pub trait Field: Clone + PartialEq + Debug {
    /// The additive identity of this element's field.
    fn zero_like(&self) -> Self;
    /// The multiplicative identity of this element's field.
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse, `None` exactly for zero.
    fn inv(&self) -> Option<Self>;

    fn is_one(&self) -> bool {
        *self == self.one_like()
    }

    fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self.mul(&r))
    }

    /// The image of the integer `n` in this element's field, built by
    /// double-and-add so it works for any exact field.
    fn int_like(&self, n: i64) -> Self {
        let mut mag = n.unsigned_abs();
        let mut acc = self.zero_like();
        let mut pow = self.one_like();
        while mag > 0 {
            if mag & 1 == 1 {
                acc = acc.add(&pow);
            }
            mag >>= 1;
            if mag > 0 {
                pow = pow.add(&pow);
            }
        }
        if n < 0 {
            acc.neg()
        } else {
            acc
        }
    }
}

impl Field for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn int_like(&self, n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
}

/// Convenience: the rational `p/q` without going through strings.
pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Bit size of a rational, measured as bits of numerator plus denominator.
/// Used by the growth budgets in the dynamics module.
pub fn rational_bits(x: &BigRational) -> u64 {
    x.numer().abs().bits() + x.denom().abs().bits()
}

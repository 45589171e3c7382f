use std::fmt::Debug;

use super::Rational;

/// Commutative ring with unit, with by-reference arithmetic.
///
/// Implemented by every scalar type in the crate and by the chart polynomial
/// ring, so that permanents can be taken of matrices whose entries are
/// position-dependent metric components.
pub trait Ring: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, rhs: &Self) -> Self;
    fn sub_ref(&self, rhs: &Self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn from_rational(r: &Rational) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&super::rat_int(n))
    }

    fn add_assign_ref(&mut self, rhs: &Self) {
        *self = self.add_ref(rhs);
    }
}

/// A [`Ring`] in which every nonzero element is invertible.
pub trait Field: Ring {
    fn inv(&self) -> Option<Self>;

    fn div_ref(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self.mul_ref(&r))
    }
}

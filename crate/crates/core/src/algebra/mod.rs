//! Exact scalar arithmetic.
//!
//! Everything in the crate is computed over the field `Q(h)` of rational
//! functions in the formal deformation parameter `h`. The layers are:
//!
//! * [`Rational`]: arbitrary-precision rationals (backed by `num-rational`);
//! * [`HPoly`]: univariate polynomials in `h` with rational coefficients;
//! * [`HRational`]: reduced fractions of two [`HPoly`] values;
//! * [`HSeries`]: power series in `h` truncated at a fixed precision, used
//!   when only the low orders of an expansion matter.
//!
//! The [`Ring`] and [`Field`] traits let the permanent, the linear solver and
//! the chart-function ring run over any of these scalar types.

mod hpoly;
mod hrational;
mod ring;
mod series;

pub use hpoly::HPoly;
pub use hrational::HRational;
pub use ring::{Field, Ring};
pub use series::HSeries;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

/// Arbitrary-precision rational number, always stored in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("not expandable: pole at h = 0")]
    NotExpandable,
    #[error("invalid rational literal {0:?}")]
    InvalidLiteral(String),
}

/// Builds a rational from a pair of machine integers. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n!` as a rational.
pub fn factorial(n: u64) -> Rational {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Rational::from_integer(acc)
}

/// Parses `"p"` or `"p/q"` into a rational.
pub fn parse_rational(s: &str) -> Result<Rational, AlgebraError> {
    let t = s.trim();
    let parsed: Result<Rational, _> = t.parse();
    match parsed {
        Ok(r) => Ok(r),
        Err(_) => Err(AlgebraError::InvalidLiteral(s.to_string())),
    }
}

/// Canonical decimal string of a rational: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

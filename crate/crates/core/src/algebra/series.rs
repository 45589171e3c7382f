use std::fmt;

use num_traits::Zero;

use super::{AlgebraError, HRational, Rational, Ring};

/// Power series in `h` known through `h^precision`.
///
/// `precision == None` marks an exact polynomial (constants, for instance),
/// which never limits the precision of a result. Binary operations keep the
/// smaller precision of their operands and drop coefficients beyond it.
#[derive(Clone)]
pub struct HSeries {
    coeffs: Vec<Rational>,
    precision: Option<usize>,
}

impl HSeries {
    pub fn exact(coeffs: Vec<Rational>) -> Self {
        Self::build(coeffs, None)
    }

    pub fn truncated(coeffs: Vec<Rational>, precision: usize) -> Self {
        Self::build(coeffs, Some(precision))
    }

    fn build(mut coeffs: Vec<Rational>, precision: Option<usize>) -> Self {
        if let Some(p) = precision {
            coeffs.truncate(p + 1);
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        HSeries { coeffs, precision }
    }

    /// Expansion of `x` through `h^precision`.
    pub fn from_hrational(x: &HRational, precision: usize) -> Result<Self, AlgebraError> {
        Ok(Self::truncated(x.expand_series(precision)?, precision))
    }

    pub fn precision(&self) -> Option<usize> {
        self.precision
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    fn joint(&self, rhs: &HSeries) -> Option<usize> {
        match (self.precision, rhs.precision) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

impl fmt::Debug for HSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.coeffs.iter().map(super::format_rational).collect();
        match self.precision {
            Some(p) => write!(f, "[{}] + O(h^{})", terms.join(", "), p + 1),
            None => write!(f, "[{}]", terms.join(", ")),
        }
    }
}

/// Coefficients are compared up to the smaller of the two precisions.
impl PartialEq for HSeries {
    fn eq(&self, other: &Self) -> bool {
        let len = self.coeffs.len().max(other.coeffs.len());
        let limit = self.joint(other).map_or(len, |p| len.min(p + 1));
        (0..limit).all(|k| self.coeff(k) == other.coeff(k))
    }
}

impl Ring for HSeries {
    fn zero() -> Self {
        HSeries::exact(Vec::new())
    }
    fn one() -> Self {
        HSeries::exact(vec![super::rat_int(1)])
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        let mut coeffs = vec![Rational::zero(); self.coeffs.len().max(rhs.coeffs.len())];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        for (k, c) in rhs.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        HSeries::build(coeffs, self.joint(rhs))
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self.add_ref(&rhs.neg_ref())
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return HSeries::build(Vec::new(), self.joint(rhs));
        }
        let precision = self.joint(rhs);
        let mut len = self.coeffs.len() + rhs.coeffs.len() - 1;
        if let Some(p) = precision {
            len = len.min(p + 1);
        }
        let mut coeffs = vec![Rational::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            for (j, b) in rhs.coeffs.iter().enumerate().take(len - i) {
                coeffs[i + j] += a * b;
            }
        }
        HSeries::build(coeffs, precision)
    }
    fn neg_ref(&self) -> Self {
        HSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            precision: self.precision,
        }
    }
    fn from_rational(r: &Rational) -> Self {
        HSeries::exact(vec![r.clone()])
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), Rational::zero());
        }
        for (k, c) in rhs.coeffs.iter().enumerate() {
            self.coeffs[k] += c;
        }
        let precision = self.joint(rhs);
        let coeffs = std::mem::take(&mut self.coeffs);
        *self = HSeries::build(coeffs, precision);
    }
}

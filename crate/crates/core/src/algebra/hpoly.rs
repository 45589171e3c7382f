use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::{format_rational, Rational};

/// Polynomial in `h` with rational coefficients. `coeffs[k]` multiplies `h^k`.
///
/// Trailing zero coefficients are always stripped, so the zero polynomial is
/// the empty vector and structural equality is polynomial equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct HPoly {
    coeffs: Vec<Rational>,
}

impl HPoly {
    pub fn zero() -> Self {
        HPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    /// The formal parameter `h` itself.
    pub fn hbar() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c * h^k`
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        HPoly { coeffs }
    }

    /// Convenience constructor from integer coefficients in ascending order.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| super::rat_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `h^k` (zero past the degree).
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(0)
    }

    pub fn eval(&self, h: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * h + c;
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        HPoly {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Rescales so that the leading coefficient is 1. Zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lc) if lc.is_one() => self.clone(),
            Some(lc) => self.scale(&lc.recip()),
        }
    }

    /// Euclidean division. Panics if `divisor` is zero.
    pub fn div_rem(&self, divisor: &HPoly) -> (HPoly, HPoly) {
        let d_deg = divisor.degree().expect("polynomial division by zero");
        let lc_inv = divisor.coeffs[d_deg].recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= d_deg {
            return (HPoly::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - d_deg];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + d_deg] * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &c * dc;
            }
            quot[k] = c;
        }
        rem.truncate(d_deg);
        (HPoly::from_coeffs(quot), HPoly::from_coeffs(rem))
    }

    /// Exact quotient; panics in debug builds when the remainder is nonzero.
    pub fn div_exact(&self, divisor: &HPoly) -> HPoly {
        if divisor.is_one() {
            return self.clone();
        }
        let (q, r) = self.div_rem(divisor);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic greatest common divisor. `gcd(0, 0) = 0`.
    pub fn gcd(a: &HPoly, b: &HPoly) -> HPoly {
        if a.degree() == Some(0) && !b.is_zero() || b.degree() == Some(0) && !a.is_zero() {
            return HPoly::one();
        }
        let mut x = a.monic();
        let mut y = b.monic();
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r.monic();
        }
        x
    }
}

impl fmt::Debug for HPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Ascending powers, e.g. `1 - 2*h + 1/2*h^2`.
impl fmt::Display for HPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match (k, abs.is_one()) {
                (0, _) => write!(f, "{}", format_rational(&abs))?,
                (_, true) => {}
                (_, false) => write!(f, "{}*", format_rational(&abs))?,
            }
            match k {
                0 => {}
                1 => write!(f, "h")?,
                _ => write!(f, "h^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &HPoly {
    type Output = HPoly;
    fn add(self, rhs: &HPoly) -> HPoly {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (c, s) in coeffs.iter_mut().zip(&short.coeffs) {
            *c += s;
        }
        HPoly::from_coeffs(coeffs)
    }
}

impl Sub for &HPoly {
    type Output = HPoly;
    fn sub(self, rhs: &HPoly) -> HPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(len, Rational::zero());
        for (c, s) in coeffs.iter_mut().zip(&rhs.coeffs) {
            *c -= s;
        }
        HPoly::from_coeffs(coeffs)
    }
}

impl Mul for &HPoly {
    type Output = HPoly;
    fn mul(self, rhs: &HPoly) -> HPoly {
        if self.is_zero() || rhs.is_zero() {
            return HPoly::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        HPoly::from_coeffs(coeffs)
    }
}

impl Neg for &HPoly {
    type Output = HPoly;
    fn neg(self) -> HPoly {
        HPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for HPoly {
            type Output = HPoly;
            fn $m(self, rhs: HPoly) -> HPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for HPoly {
    type Output = HPoly;
    fn neg(self) -> HPoly {
        -&self
    }
}

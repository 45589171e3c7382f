use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{format_rational, parse_rational, AlgebraError, Field, HPoly, Rational, Ring};

/// Element of `Q(h)`: a reduced fraction of two polynomials in `h`.
///
/// Canonical form: `gcd(num, den) = 1` and `den` is monic. Two values are
/// equal iff their canonical forms are identical, so `PartialEq` is derived.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HRational {
    num: HPoly,
    den: HPoly,
}

impl HRational {
    /// Builds `num / den` in canonical form.
    pub fn new(num: HPoly, den: HPoly) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: HPoly, den: HPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if den.degree() == Some(0) {
            let inv = den.coeffs()[0].recip();
            return HRational {
                num: num.scale(&inv),
                den: HPoly::one(),
            };
        }
        let g = HPoly::gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g), den.div_exact(&g))
        };
        Self::normalize_sign(num, den)
    }

    /// Makes `den` monic; assumes `num/den` already coprime.
    fn normalize_sign(num: HPoly, den: HPoly) -> Self {
        let lc = den.leading().expect("nonzero denominator").clone();
        if lc.is_one() {
            HRational { num, den }
        } else {
            let inv = lc.recip();
            HRational {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn zero() -> Self {
        HRational {
            num: HPoly::zero(),
            den: HPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_poly(HPoly::one())
    }

    pub fn hbar() -> Self {
        Self::from_poly(HPoly::hbar())
    }

    pub fn from_poly(p: HPoly) -> Self {
        HRational {
            num: p,
            den: HPoly::one(),
        }
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::from_poly(HPoly::constant(r))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(super::rat_int(n))
    }

    pub fn numer(&self) -> &HPoly {
        &self.num
    }

    pub fn denom(&self) -> &HPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The value as a plain rational, if it does not depend on `h`.
    pub fn as_rational(&self) -> Option<Rational> {
        match (self.num.degree(), self.den.degree()) {
            (None, _) => Some(Rational::zero()),
            (Some(0), Some(0)) => Some(self.num.coeffs()[0].clone()),
            _ => None,
        }
    }

    pub fn recip(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Self::normalize_sign(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, rhs: &HRational) -> Result<Self, AlgebraError> {
        Ok(self * &rhs.recip()?)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        HRational {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        HRational {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    /// Value at a rational point `h`, or `None` at a pole.
    pub fn eval(&self, h: &Rational) -> Option<Rational> {
        let d = self.den.eval(h);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(h) / d)
        }
    }

    /// Taylor coefficients `c_0..=c_order` of the expansion around `h = 0`.
    pub fn expand_series(&self, order: usize) -> Result<Vec<Rational>, AlgebraError> {
        let d0 = self.den.constant_term();
        if d0.is_zero() {
            return Err(AlgebraError::NotExpandable);
        }
        let d0_inv = d0.recip();
        let den = self.den.coeffs();
        let mut out: Vec<Rational> = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let mut acc = self.num.coeff(k);
            for j in 1..=k.min(den.len().saturating_sub(1)) {
                acc -= &den[j] * &out[k - j];
            }
            out.push(acc * &d0_inv);
        }
        Ok(out)
    }
}

impl Default for HRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl fmt::Debug for HRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for HRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |p: &HPoly| {
            let many = p.coeffs().iter().filter(|c| !c.is_zero()).count() > 1;
            if many {
                format!("({p})")
            } else {
                p.to_string()
            }
        };
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        // Shown with unit constant term in the denominator when possible.
        let d0 = self.den.constant_term();
        let (num, den) = if d0.is_zero() {
            (self.num.clone(), self.den.clone())
        } else {
            let inv = d0.recip();
            (self.num.scale(&inv), self.den.scale(&inv))
        };
        write!(f, "{}/{}", wrap(&num), wrap(&den))
    }
}

impl Add for &HRational {
    type Output = HRational;
    fn add(self, rhs: &HRational) -> HRational {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return HRational::reduce(&self.num + &rhs.num, self.den.clone());
        }
        let g = HPoly::gcd(&self.den, &rhs.den);
        if g.is_one() {
            let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
            return HRational::reduce(num, &self.den * &rhs.den);
        }
        let a = self.den.div_exact(&g);
        let b = rhs.den.div_exact(&g);
        let num = &(&self.num * &b) + &(&rhs.num * &a);
        HRational::reduce(num, &(&a * &b) * &g)
    }
}

impl Sub for &HRational {
    type Output = HRational;
    fn sub(self, rhs: &HRational) -> HRational {
        self + &(-rhs)
    }
}

impl Mul for &HRational {
    type Output = HRational;
    fn mul(self, rhs: &HRational) -> HRational {
        if self.is_zero() || rhs.is_zero() {
            return HRational::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return HRational::from_poly(&self.num * &rhs.num);
        }
        let g1 = HPoly::gcd(&self.num, &rhs.den);
        let g2 = HPoly::gcd(&rhs.num, &self.den);
        let num = &self.num.div_exact(&g1) * &rhs.num.div_exact(&g2);
        let den = &self.den.div_exact(&g2) * &rhs.den.div_exact(&g1);
        HRational::normalize_sign(num, den)
    }
}

/// Panics on division by zero; use [`HRational::checked_div`] for a `Result`.
impl Div for &HRational {
    type Output = HRational;
    fn div(self, rhs: &HRational) -> HRational {
        self.checked_div(rhs).expect("division by zero in Q(h)")
    }
}

impl Neg for &HRational {
    type Output = HRational;
    fn neg(self) -> HRational {
        HRational {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for HRational {
            type Output = HRational;
            fn $m(self, rhs: HRational) -> HRational {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for HRational {
    type Output = HRational;
    fn neg(self) -> HRational {
        -&self
    }
}

impl From<Rational> for HRational {
    fn from(r: Rational) -> Self {
        HRational::from_rational(r)
    }
}

impl From<HPoly> for HRational {
    fn from(p: HPoly) -> Self {
        HRational::from_poly(p)
    }
}

impl Ring for HRational {
    fn zero() -> Self {
        HRational::zero()
    }
    fn one() -> Self {
        HRational::one()
    }
    fn is_zero(&self) -> bool {
        HRational::is_zero(self)
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn from_rational(r: &Rational) -> Self {
        HRational::from_rational(r.clone())
    }
}

impl Field for HRational {
    fn inv(&self) -> Option<Self> {
        self.recip().ok()
    }
}

/// Wire form: `{"num": ["c0", "c1", ...], "den": [...]}`, index = power of `h`.
#[derive(Serialize, Deserialize)]
struct HRationalRepr {
    num: Vec<String>,
    den: Vec<String>,
}

fn poly_to_strings(p: &HPoly) -> Vec<String> {
    p.coeffs().iter().map(format_rational).collect()
}

fn poly_from_strings(v: &[String]) -> Result<HPoly, AlgebraError> {
    let coeffs = v
        .iter()
        .map(|s| parse_rational(s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(HPoly::from_coeffs(coeffs))
}

impl Serialize for HRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        HRationalRepr {
            num: poly_to_strings(&self.num),
            den: poly_to_strings(&self.den),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = HRationalRepr::deserialize(d)?;
        let num = poly_from_strings(&repr.num).map_err(D::Error::custom)?;
        let den = poly_from_strings(&repr.den).map_err(D::Error::custom)?;
        HRational::new(num, den).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rat_int};

    fn h() -> HRational {
        HRational::hbar()
    }

    fn one_minus_h() -> HRational {
        HRational::from_poly(HPoly::from_ints(&[1, -1]))
    }

    #[test]
    fn inverse_pair_multiplies_to_one() {
        let x = HRational::one().checked_div(&one_minus_h()).unwrap();
        assert!((&x * &one_minus_h()).is_one());
    }

    #[test]
    fn doubling_h() {
        assert_eq!(&h() + &h(), HRational::from_poly(HPoly::from_ints(&[0, 2])));
    }

    #[test]
    fn common_factor_cancels() {
        // (h*h) / (2h(1-h)) == h / (2 - 2h)
        let num = &h() * &h();
        let den = &(&h() * &one_minus_h()).scale(&rat_int(2)) * &HRational::one();
        let x = num.checked_div(&den).unwrap();
        let expected = HRational::new(HPoly::hbar(), HPoly::from_ints(&[2, -2])).unwrap();
        assert_eq!(x, expected);
        // canonical: monic denominator h - 1, numerator -h/2
        assert_eq!(x.denom(), &HPoly::from_ints(&[-1, 1]));
        assert_eq!(x.numer(), &HPoly::from_coeffs(vec![rat(0, 1), rat(-1, 2)]));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(
            HRational::one().checked_div(&HRational::zero()),
            Err(AlgebraError::DivisionByZero)
        );
        assert_eq!(
            HRational::new(HPoly::one(), HPoly::zero()),
            Err(AlgebraError::DivisionByZero)
        );
    }

    #[test]
    fn geometric_series() {
        let x = HRational::one().checked_div(&one_minus_h()).unwrap();
        assert_eq!(x.expand_series(3).unwrap(), vec![rat_int(1); 4]);
    }

    #[test]
    fn shifted_geometric_series() {
        let x = (&h() * &h())
            .checked_div(&one_minus_h().scale(&rat_int(2)))
            .unwrap();
        assert_eq!(
            x.expand_series(3).unwrap(),
            vec![rat_int(0), rat_int(0), rat(1, 2), rat(1, 2)]
        );
    }

    #[test]
    fn constant_series() {
        let c = HRational::from_int(5);
        assert_eq!(
            c.expand_series(2).unwrap(),
            vec![rat_int(5), rat_int(0), rat_int(0)]
        );
    }

    #[test]
    fn pole_at_zero_not_expandable() {
        let x = HRational::one().checked_div(&h()).unwrap();
        assert_eq!(x.expand_series(2), Err(AlgebraError::NotExpandable));
    }

    #[test]
    fn json_wire_form() {
        let x = HRational::new(HPoly::hbar(), HPoly::from_ints(&[2, -2])).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"num":["0","-1/2"],"den":["-1","1"]}"#);
        let back: HRational = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        // non-canonical input is reduced on the way in
        let y: HRational = serde_json::from_str(r#"{"num":["0","0","2"],"den":["0","4"]}"#).unwrap();
        assert_eq!(y, HRational::hbar().scale(&rat(1, 2)));
    }

    #[test]
    fn display() {
        let x = HRational::new(HPoly::from_ints(&[0, 0, 1]), HPoly::from_ints(&[2, -2])).unwrap();
        assert_eq!(x.to_string(), "1/2*h^2/(1 - h)");
    }
}

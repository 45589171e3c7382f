//! The localized ring `{ p / s^m }` on the affine chart of `CP^N`.
//!
//! `p` is a polynomial in `z1..zN, zb1..zbN` (the barred variables are
//! independent formal symbols; no conjugation is modeled) and
//! `s = 1 + sum_k z_k zb_k`. The ring is closed under both families of
//! partial derivatives, and the Fubini-Study metric and its inverse live in
//! it, which is what the star-product evaluator needs.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{HRational, Ring};

/// Maximum number of chart variables (`2N`), so `N <= 8`.
pub const MAX_VARS: usize = 16;

/// Exponent vector. Index `k < N` is `z_{k+1}`, index `N + k` is `zb_{k+1}`.
///
/// Ordered lexicographically with `z1` most significant; under this order
/// the leading monomial of `s` is `z1*zb1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial([u8; MAX_VARS]);

impl Monomial {
    pub fn one() -> Self {
        Monomial([0; MAX_VARS])
    }

    pub fn var(v: usize) -> Self {
        let mut e = [0; MAX_VARS];
        e[v] = 1;
        Monomial(e)
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        assert!(exps.len() <= MAX_VARS, "too many chart variables");
        let mut e = [0u8; MAX_VARS];
        for (slot, &x) in e.iter_mut().zip(exps) {
            *slot = u8::try_from(x).expect("chart exponent overflow");
        }
        Monomial(e)
    }

    pub fn exponent(&self, v: usize) -> u32 {
        self.0[v] as u32
    }

    pub fn exponents(&self, nvars: usize) -> Vec<u32> {
        self.0[..nvars].iter().map(|&e| e as u32).collect()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, rhs: &Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(rhs.0.iter()) {
            *a = a.checked_add(*b).expect("chart exponent overflow");
        }
        Monomial(e)
    }

    /// `self / rhs` if `rhs` divides `self`.
    pub fn div(&self, rhs: &Monomial) -> Option<Monomial> {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(rhs.0.iter()) {
            *a = a.checked_sub(*b)?;
        }
        Some(Monomial(e))
    }

    /// Exponent of `v` lowered by one.
    fn lowered(&self, v: usize) -> Option<Monomial> {
        let mut e = self.0;
        e[v] = e[v].checked_sub(1)?;
        Some(Monomial(e))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.0.iter().rposition(|&e| e != 0).map_or(0, |p| p + 1);
        write!(f, "{:?}", &self.0[..last])
    }
}

/// Sparse polynomial in the chart variables with coefficients in `C`.
#[derive(Clone, PartialEq)]
pub struct ZPoly<C> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: Ring> ZPoly<C> {
    pub fn constant(c: C) -> Self {
        Self::monomial(Monomial::one(), c)
    }

    pub fn monomial(m: Monomial, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        ZPoly { terms }
    }

    pub fn var(v: usize) -> Self {
        Self::monomial(Monomial::var(v), C::one())
    }

    /// `s = 1 + sum_k z_k zb_k` for an `N`-dimensional chart.
    pub fn s(dim: usize) -> Self {
        let mut p = Self::constant(C::one());
        for k in 0..dim {
            p.add_term(Monomial::var(k).mul(&Monomial::var(dim + k)), &C::one());
        }
        p
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&Monomial::one())
    }

    pub fn add_term(&mut self, m: Monomial, c: &C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                existing.add_assign_ref(c);
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = BTreeMap::new();
        for (m, x) in &self.terms {
            let v = x.mul_ref(c);
            if !v.is_zero() {
                out.insert(*m, v);
            }
        }
        ZPoly { terms: out }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        ZPoly {
            terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(C::one());
        for _ in 0..e {
            acc = acc.mul_ref(self);
        }
        acc
    }

    /// Partial derivative with respect to chart variable `v`.
    pub fn derivative(&self, v: usize) -> Self {
        let mut out = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if let Some(low) = m.lowered(v) {
                out.insert(low, c.mul_ref(&C::from_i64(e as i64)));
            }
        }
        ZPoly { terms: out }
    }

    /// Division with remainder by `s` (the leading term of `s` is `z1*zb1`).
    pub fn div_rem_s(&self, dim: usize) -> (Self, Self) {
        let lead = Monomial::var(0).mul(&Monomial::var(dim));
        let mut work = self.terms.clone();
        let mut quotient = ZPoly::zero();
        let mut remainder = ZPoly::zero();
        while let Some((m, c)) = work.pop_last() {
            match m.div(&lead) {
                Some(t) => {
                    // c*m = c*t*s - c*t*(1 + sum_{k>=1} z_k zb_k)
                    quotient.add_term(t, &c);
                    let neg = c.neg_ref();
                    for k in 1..dim {
                        let mk = t.mul(&Monomial::var(k)).mul(&Monomial::var(dim + k));
                        add_into(&mut work, mk, &neg);
                    }
                    add_into(&mut work, t, &neg);
                }
                None => remainder.add_term(m, &c),
            }
        }
        (quotient, remainder)
    }

    pub fn map_coeffs<D: Ring>(&self, f: impl Fn(&C) -> D) -> ZPoly<D> {
        let mut out = BTreeMap::new();
        for (m, c) in &self.terms {
            let v = f(c);
            if !v.is_zero() {
                out.insert(*m, v);
            }
        }
        ZPoly { terms: out }
    }

    /// Substitutes `z = zb = 0`.
    pub fn at_origin(&self) -> C {
        self.constant_term()
    }

    pub fn max_exponent(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }
}

fn add_into<C: Ring>(map: &mut BTreeMap<Monomial, C>, m: Monomial, c: &C) {
    match map.get_mut(&m) {
        Some(existing) => {
            existing.add_assign_ref(c);
            if existing.is_zero() {
                map.remove(&m);
            }
        }
        None => {
            map.insert(m, c.clone());
        }
    }
}

impl<C: Ring> Ring for ZPoly<C> {
    fn zero() -> Self {
        ZPoly {
            terms: BTreeMap::new(),
        }
    }
    fn one() -> Self {
        Self::constant(C::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, &c.neg_ref());
        }
        out
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        let (small, large) = if self.terms.len() <= rhs.terms.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut out: BTreeMap<Monomial, C> = BTreeMap::new();
        for (ma, ca) in &small.terms {
            for (mb, cb) in &large.terms {
                add_into(&mut out, ma.mul(mb), &ca.mul_ref(cb));
            }
        }
        ZPoly { terms: out }
    }
    fn neg_ref(&self) -> Self {
        ZPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, c.neg_ref())).collect(),
        }
    }
    fn from_rational(r: &crate::algebra::Rational) -> Self {
        Self::constant(C::from_rational(r))
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, c);
        }
    }
}

impl<C: Ring> fmt::Debug for ZPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

/// Element `num / s^s_power` of the localized chart ring of `CP^dim`.
///
/// Values produced by this module are kept in canonical form (numerator not
/// divisible by `s`), but equality is decided by cross-multiplying, so it
/// holds for non-canonical values too.
#[derive(Clone)]
pub struct ChartFunction<C> {
    dim: usize,
    num: ZPoly<C>,
    s_power: u32,
}

impl<C: Ring> ChartFunction<C> {
    /// Builds `num / s^s_power` and cancels common factors of `s`.
    pub fn new(dim: usize, num: ZPoly<C>, s_power: u32) -> Self {
        Self::raw(dim, num, s_power).normalized()
    }

    /// Builds without normalizing.
    pub fn raw(dim: usize, num: ZPoly<C>, s_power: u32) -> Self {
        assert!(dim >= 1 && 2 * dim <= MAX_VARS, "unsupported chart dimension {dim}");
        ChartFunction { dim, num, s_power }
    }

    pub fn polynomial(dim: usize, num: ZPoly<C>) -> Self {
        Self::raw(dim, num, 0)
    }

    pub fn zero(dim: usize) -> Self {
        Self::raw(dim, ZPoly::zero(), 0)
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, C::one())
    }

    pub fn constant(dim: usize, c: C) -> Self {
        Self::raw(dim, ZPoly::constant(c), 0)
    }

    /// The holomorphic coordinate `z_{k+1}`.
    pub fn z(dim: usize, k: usize) -> Self {
        Self::raw(dim, ZPoly::var(k), 0)
    }

    /// The antiholomorphic coordinate `zb_{k+1}`.
    pub fn zbar(dim: usize, k: usize) -> Self {
        Self::raw(dim, ZPoly::var(dim + k), 0)
    }

    pub fn s(dim: usize) -> Self {
        Self::raw(dim, ZPoly::s(dim), 0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn numerator(&self) -> &ZPoly<C> {
        &self.num
    }

    pub fn s_power(&self) -> u32 {
        self.s_power
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Cancels every factor of `s` from the numerator.
    pub fn normalized(mut self) -> Self {
        while self.s_power > 0 && !self.num.is_zero() {
            let (q, r) = self.num.div_rem_s(self.dim);
            if !r.is_zero() {
                break;
            }
            self.num = q;
            self.s_power -= 1;
        }
        if self.num.is_zero() {
            self.s_power = 0;
        }
        self
    }

    /// Numerator rewritten over `s^target` (`target >= s_power`).
    fn lifted(&self, target: u32) -> ZPoly<C> {
        debug_assert!(target >= self.s_power);
        let extra = target - self.s_power;
        if extra == 0 || self.num.is_zero() {
            self.num.clone()
        } else {
            self.num.mul_ref(&ZPoly::s(self.dim).pow(extra))
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "chart dimension mismatch");
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        let m = self.s_power.max(rhs.s_power);
        Self::raw(self.dim, self.lifted(m).add_ref(&rhs.lifted(m)), m)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        Self::raw(self.dim, self.num.neg_ref(), self.s_power)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "chart dimension mismatch");
        if self.is_zero() || rhs.is_zero() {
            return Self::zero(self.dim);
        }
        Self::raw(self.dim, self.num.mul_ref(&rhs.num), self.s_power + rhs.s_power)
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::raw(self.dim, self.num.scale(c), self.s_power)
    }

    /// Multiplies by `s^-k`.
    pub fn div_s_pow(&self, k: u32) -> Self {
        Self::raw(self.dim, self.num.clone(), self.s_power + k)
    }

    /// Partial derivative in chart variable `v`: `z_{v+1}` for `v < N`,
    /// `zb_{v-N+1}` otherwise.
    pub fn partial(&self, v: usize) -> Self {
        let dp = self.num.derivative(v);
        if self.s_power == 0 {
            return Self::raw(self.dim, dp, 0);
        }
        // d(p/s^m) = (s dp - m p ds) / s^(m+1),  ds/dz_k = zb_k, ds/dzb_k = z_k
        let partner = if v < self.dim { v + self.dim } else { v - self.dim };
        let m = C::from_i64(self.s_power as i64);
        let ds_term = self.num.mul_monomial(&Monomial::var(partner)).scale(&m);
        let num = dp.mul_ref(&ZPoly::s(self.dim)).sub_ref(&ds_term);
        Self::raw(self.dim, num, self.s_power + 1)
    }

    /// `d/dz_{k+1}`
    pub fn d_z(&self, k: usize) -> Self {
        self.partial(k)
    }

    /// `d/dzb_{k+1}`
    pub fn d_zbar(&self, k: usize) -> Self {
        self.partial(self.dim + k)
    }

    /// Value at `z = zb = 0` (where `s = 1`).
    pub fn at_origin(&self) -> C {
        self.num.at_origin()
    }

    pub fn map_coeffs<D: Ring>(&self, f: impl Fn(&C) -> D) -> ChartFunction<D> {
        ChartFunction::raw(self.dim, self.num.map_coeffs(f), self.s_power)
    }

    /// Depends on no `zb` variable (and carries no `s` denominator).
    pub fn is_holomorphic(&self) -> bool {
        let n = self.clone().normalized();
        n.s_power == 0 && (0..self.dim).all(|k| n.num.max_exponent(self.dim + k) == 0)
    }

    /// Depends on no `z` variable (and carries no `s` denominator).
    pub fn is_antiholomorphic(&self) -> bool {
        let n = self.clone().normalized();
        n.s_power == 0 && (0..self.dim).all(|k| n.num.max_exponent(k) == 0)
    }
}

impl<C: Ring> PartialEq for ChartFunction<C> {
    fn eq(&self, other: &Self) -> bool {
        if self.dim != other.dim {
            return false;
        }
        match self.s_power.cmp(&other.s_power) {
            Ordering::Equal => self.num == other.num,
            _ => {
                let m = self.s_power.max(other.s_power);
                self.lifted(m) == other.lifted(m)
            }
        }
    }
}

impl<C: Ring> fmt::Debug for ChartFunction<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) / s^{}", self.num, self.s_power)
    }
}

fn var_name(dim: usize, v: usize) -> String {
    if v < dim {
        format!("z{}", v + 1)
    } else {
        format!("zb{}", v - dim + 1)
    }
}

fn monomial_text(dim: usize, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for v in 0..2 * dim {
        match m.exponent(v) {
            0 => {}
            1 => parts.push(var_name(dim, v)),
            e => parts.push(format!("{}^{}", var_name(dim, v), e)),
        }
    }
    parts.join("*")
}

/// Human-readable form using the CLI variable names, e.g.
/// `(z1*zb1 + h*(...)) / s^2` with `s = 1 + z1*zb1 + ...`.
impl fmt::Display for ChartFunction<HRational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (m, c) in self.num.terms.iter().rev() {
            let mono = monomial_text(self.dim, m);
            let coeff = c.to_string();
            let simple = !coeff.contains([' ', '/', '(']);
            let text = match (mono.is_empty(), c.is_one(), simple) {
                (true, _, _) => coeff,
                (false, true, _) => mono,
                (false, false, true) => format!("{coeff}*{mono}"),
                (false, false, false) => format!("({coeff})*{mono}"),
            };
            parts.push(text);
        }
        let body = parts.join(" + ");
        if self.s_power == 0 {
            write!(f, "{body}")
        } else {
            write!(f, "({body}) / s^{}", self.s_power)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coeff: HRational,
    monomial: Vec<u32>,
}

/// Wire form `{"num": [{"coeff": {...}, "monomial": [z..., zb...]}], "s_power": m}`.
#[derive(Serialize, Deserialize)]
pub struct ChartFunctionRepr {
    num: Vec<TermRepr>,
    s_power: u32,
}

impl ChartFunction<HRational> {
    pub fn to_repr(&self) -> ChartFunctionRepr {
        ChartFunctionRepr {
            num: self
                .num
                .terms
                .iter()
                .map(|(m, c)| TermRepr {
                    coeff: c.clone(),
                    monomial: m.exponents(2 * self.dim),
                })
                .collect(),
            s_power: self.s_power,
        }
    }

    /// Inverse of [`ChartFunction::to_repr`]; `None` on a monomial of the
    /// wrong length.
    pub fn from_repr(dim: usize, repr: &ChartFunctionRepr) -> Option<Self> {
        let mut num = ZPoly::zero();
        for t in &repr.num {
            if t.monomial.len() != 2 * dim || t.monomial.iter().any(|&e| e > u8::MAX as u32) {
                return None;
            }
            num.add_term(Monomial::from_exponents(&t.monomial), &t.coeff);
        }
        Some(Self::new(dim, num, repr.s_power))
    }
}

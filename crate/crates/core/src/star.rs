//! The star product with separation of variables on a `CP^N` chart:
//!
//! `f * g = sum_n sum_{alpha,beta} T^n_{alpha,beta}(z, zb) (D^alpha f)(Dbar^beta g)`
//!
//! with `D^k = g^{k mbar} d_mbar` and `Dbar^j = g^{jbar l} d_l`.

use std::collections::HashMap;

use num_traits::Zero;

use crate::algebra::{AlgebraError, HRational, HSeries, Rational, Ring};
use crate::chart::{ChartFunction, ZPoly};
use crate::coeffs::CoefficientTable;
use crate::geometry::ChartMetric;
use crate::linalg::Matrix;
use crate::multiindex::{enumerate_weight, MultiIndex};
use crate::permanent::{BlockPermanent, PermanentError};

/// Scalars the evaluator can run over.
pub trait StarScalar: Ring {
    /// Converts a table coefficient; series types keep `precision` orders.
    fn from_coefficient(x: &HRational, precision: usize) -> Result<Self, AlgebraError>;

    /// Lowest power of `h` with a nonzero coefficient.
    fn valuation(&self) -> Option<i64>;

    /// Coefficient of `h^k` in the expansion at `h = 0`.
    fn series_coeff(&self, k: usize) -> Result<Rational, AlgebraError>;
}

fn poly_valuation(c: &[Rational]) -> Option<i64> {
    c.iter().position(|x| !x.is_zero()).map(|k| k as i64)
}

impl StarScalar for HRational {
    fn from_coefficient(x: &HRational, _precision: usize) -> Result<Self, AlgebraError> {
        Ok(x.clone())
    }

    fn valuation(&self) -> Option<i64> {
        let num = poly_valuation(self.numer().coeffs())?;
        Some(num - poly_valuation(self.denom().coeffs()).unwrap_or(0))
    }

    fn series_coeff(&self, k: usize) -> Result<Rational, AlgebraError> {
        Ok(self.expand_series(k)?.swap_remove(k))
    }
}

impl StarScalar for HSeries {
    fn from_coefficient(x: &HRational, precision: usize) -> Result<Self, AlgebraError> {
        HSeries::from_hrational(x, precision)
    }

    fn valuation(&self) -> Option<i64> {
        poly_valuation(self.coeffs())
    }

    fn series_coeff(&self, k: usize) -> Result<Rational, AlgebraError> {
        Ok(self.coeff(k))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StarError {
    #[error("star products are evaluated on CP^N tables only")]
    NotProjective,
    #[error("chart dimension {chart} does not match table dimension {table}")]
    DimensionMismatch { chart: usize, table: usize },
    #[error("order {requested} exceeds the table order {available}")]
    OrderTooHigh { requested: usize, available: usize },
    #[error("table entry n = {n}, alpha = {alpha}, beta = {beta} is not a CP^N coefficient")]
    TableMismatch {
        n: usize,
        alpha: MultiIndex,
        beta: MultiIndex,
    },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Permanent(#[from] PermanentError),
}

/// `D^k f = sum_m g^{k mbar} d_{zb_m} f`
pub fn d_holo<C: Ring>(f: &ChartFunction<C>, k: usize, chart: &ChartMetric<C>) -> ChartFunction<C> {
    let mut acc = ChartFunction::zero(chart.dim());
    for m in 0..chart.dim() {
        let df = f.d_zbar(m);
        if !df.is_zero() {
            acc = acc.add(&chart.inverse(m, k).mul(&df));
        }
    }
    acc.normalized()
}

/// `Dbar^j g = sum_l g^{jbar l} d_{z_l} g`
pub fn d_antiholo<C: Ring>(g: &ChartFunction<C>, j: usize, chart: &ChartMetric<C>) -> ChartFunction<C> {
    let mut acc = ChartFunction::zero(chart.dim());
    for l in 0..chart.dim() {
        let dg = g.d_z(l);
        if !dg.is_zero() {
            acc = acc.add(&chart.inverse(j, l).mul(&dg));
        }
    }
    acc.normalized()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Holo,
    Antiholo,
}

fn apply_once<C: Ring>(f: &ChartFunction<C>, k: usize, side: Side, chart: &ChartMetric<C>) -> ChartFunction<C> {
    match side {
        Side::Holo => d_holo(f, k, chart),
        Side::Antiholo => d_antiholo(f, k, chart),
    }
}

/// `D^alpha = (D^1)^{alpha_1} ... (D^N)^{alpha_N}`, applied coordinate by
/// coordinate; an invalid `alpha` gives zero.
pub fn apply_multi<C: Ring>(
    f: &ChartFunction<C>,
    alpha: &MultiIndex,
    side: Side,
    chart: &ChartMetric<C>,
) -> ChartFunction<C> {
    if !alpha.is_valid() {
        return ChartFunction::zero(chart.dim());
    }
    let mut out = f.clone();
    for k in 0..alpha.dim() {
        for _ in 0..alpha.get(k) {
            if out.is_zero() {
                return out;
            }
            out = apply_once(&out, k, side, chart);
        }
    }
    out
}

/// `D^alpha f` for every `alpha` with `|alpha| <= max_order`, sharing
/// intermediate derivatives.
pub fn derivative_table<C: Ring>(
    f: &ChartFunction<C>,
    side: Side,
    max_order: usize,
    chart: &ChartMetric<C>,
) -> HashMap<MultiIndex, ChartFunction<C>> {
    let dim = chart.dim();
    let mut out = HashMap::new();
    out.insert(MultiIndex::zero(dim), f.clone());
    for n in 1..=max_order {
        for alpha in enumerate_weight(dim, n) {
            let k = (0..dim).rev().find(|&k| alpha.get(k) > 0).expect("positive weight");
            let prev = &out[&alpha.minus_unit(k)];
            let v = if prev.is_zero() { prev.clone() } else { apply_once(prev, k, side, chart) };
            out.insert(alpha, v);
        }
    }
    out
}

/// Result of a truncated star product: terms with `n > truncation_order`
/// are omitted.
#[derive(Debug, Clone, PartialEq)]
pub struct StarResult<C: Ring> {
    pub value: ChartFunction<C>,
    pub truncation_order: usize,
}

struct CoefficientField<C: Ring> {
    n: usize,
    alpha: MultiIndex,
    beta: MultiIndex,
    value: ChartFunction<C>,
}

/// Truncated star product on the `CP^N` chart.
///
/// The table supplies the scalars `h_n` in `T^n_{alpha,beta} =
/// |G^{alpha,beta}|+ h_n / (alpha! beta!)` at the origin; away from it the
/// block matrix `G` is filled with the chart metric `g_{p qbar}(z, zb)`.
pub struct StarProduct<C: Ring> {
    chart: ChartMetric<C>,
    order: usize,
    scalars: Vec<HRational>,
    fields: Vec<CoefficientField<C>>,
}

impl<C: StarScalar> StarProduct<C> {
    /// Star product through order `order`; series scalars keep `order`
    /// powers of `h`.
    pub fn from_table(table: &CoefficientTable, order: usize) -> Result<Self, StarError> {
        Self::with_precision(table, order, order)
    }

    pub fn with_precision(table: &CoefficientTable, order: usize, precision: usize) -> Result<Self, StarError> {
        let dim = table.geometry().is_cpn().ok_or(StarError::NotProjective)?;
        if order > table.max_order() {
            return Err(StarError::OrderTooHigh {
                requested: order,
                available: table.max_order(),
            });
        }
        let scalars = extract_scalars(table, order)?;
        let chart = ChartMetric::<C>::cpn(dim);
        let numerators = Matrix::from_fn(dim, dim, |p, q| chart.metric_numerator(p, q).clone());
        let mut perms = BlockPermanent::<ZPoly<C>>::new(numerators);
        let mut fields = Vec::new();
        for (n, h_n) in scalars.iter().enumerate() {
            let h_n = C::from_coefficient(h_n, precision)?;
            if h_n.is_zero() {
                continue;
            }
            for alpha in enumerate_weight(dim, n) {
                for beta in enumerate_weight(dim, n) {
                    let perm = perms.get(&alpha, &beta)?;
                    let facts = alpha.factorial_product().expect("valid") * beta.factorial_product().expect("valid");
                    let scale = h_n.mul_ref(&C::from_rational(&facts.recip()));
                    let value = ChartFunction::new(dim, perm.scale(&scale), 2 * n as u32);
                    if !value.is_zero() {
                        fields.push(CoefficientField { n, alpha: alpha.clone(), beta, value });
                    }
                }
            }
        }
        Ok(StarProduct { chart, order, scalars, fields })
    }
}

/// `h_n = alpha! T^n_{alpha,alpha}` for `alpha = n e_1`, after checking that
/// every entry of order `n` has the projective-space form.
fn extract_scalars(table: &CoefficientTable, order: usize) -> Result<Vec<HRational>, StarError> {
    let dim = table.dim();
    let mut out = Vec::with_capacity(order + 1);
    for n in 0..=order {
        let top = MultiIndex::zero(dim).shift(&[(0, n as i32)]);
        let h_n = &table.get(n, &top, &top) * &HRational::from_rational(top.factorial_product().expect("valid"));
        for alpha in enumerate_weight(dim, n) {
            for beta in enumerate_weight(dim, n) {
                let expected = if alpha == beta {
                    &h_n * &HRational::from_rational(alpha.factorial_product().expect("valid").recip())
                } else {
                    HRational::zero()
                };
                if table.get(n, &alpha, &beta) != expected {
                    return Err(StarError::TableMismatch { n, alpha, beta });
                }
            }
        }
        out.push(h_n);
    }
    Ok(out)
}

impl<C: Ring> StarProduct<C> {
    pub fn chart(&self) -> &ChartMetric<C> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `h_n` for `n <= order`.
    pub fn scalars(&self) -> &[HRational] {
        &self.scalars
    }

    /// `T^n_{alpha,beta}(z, zb)`; zero when absent.
    pub fn coefficient(&self, n: usize, alpha: &MultiIndex, beta: &MultiIndex) -> ChartFunction<C> {
        self.fields
            .iter()
            .find(|c| c.n == n && &c.alpha == alpha && &c.beta == beta)
            .map(|c| c.value.clone())
            .unwrap_or_else(|| ChartFunction::zero(self.dim()))
    }

    pub fn star(&self, f: &ChartFunction<C>, g: &ChartFunction<C>) -> StarResult<C> {
        self.star_to(f, g, self.order)
    }

    /// Star product keeping only the terms with `n <= order`.
    pub fn star_to(&self, f: &ChartFunction<C>, g: &ChartFunction<C>, order: usize) -> StarResult<C> {
        let order = order.min(self.order);
        let df = derivative_table(f, Side::Holo, order, &self.chart);
        let dg = derivative_table(g, Side::Antiholo, order, &self.chart);
        let mut acc = ChartFunction::zero(self.dim());
        for c in self.fields.iter().filter(|c| c.n <= order) {
            let (a, b) = (&df[&c.alpha], &dg[&c.beta]);
            if a.is_zero() || b.is_zero() {
                continue;
            }
            acc = acc.add(&c.value.mul(a).mul(b));
        }
        StarResult {
            value: acc.normalized(),
            truncation_order: order,
        }
    }
}

/// Convenience wrapper building the product from `table` for one call.
pub fn star<C: StarScalar>(
    f: &ChartFunction<C>,
    g: &ChartFunction<C>,
    table: &CoefficientTable,
    order: usize,
) -> Result<StarResult<C>, StarError> {
    let sp = StarProduct::from_table(table, order)?;
    if sp.dim() != f.dim() || sp.dim() != g.dim() {
        return Err(StarError::DimensionMismatch { chart: f.dim(), table: sp.dim() });
    }
    Ok(sp.star(f, g))
}

/// Lowest power of `h` appearing in any coefficient of `f`.
pub fn hbar_valuation<C: StarScalar>(f: &ChartFunction<C>) -> Option<i64> {
    f.numerator().terms().filter_map(|(_, c)| c.valuation()).min()
}

/// The coefficient of `h^k` of every term, as an `h`-free chart function.
pub fn hbar_coefficient<C: StarScalar>(f: &ChartFunction<C>, k: usize) -> Result<ChartFunction<C>, AlgebraError> {
    let mut num = ZPoly::zero();
    for (m, c) in f.numerator().terms() {
        num.add_term(*m, &C::from_rational(&c.series_coeff(k)?));
    }
    Ok(ChartFunction::new(f.dim(), num, f.s_power()))
}

/// Outcome of an axiom check; `failing_order` is the lowest power of `h`
/// at which the two sides differ.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub passed: bool,
    pub failing_order: Option<i64>,
}

impl CheckReport {
    fn from_defect<C: StarScalar>(defect: &ChartFunction<C>) -> Self {
        if defect.is_zero() {
            CheckReport { passed: true, failing_order: None }
        } else {
            CheckReport { passed: false, failing_order: hbar_valuation(defect) }
        }
    }
}

/// `f * 1 = 1 * f = f`
pub fn check_unit<C: StarScalar>(f: &ChartFunction<C>, sp: &StarProduct<C>) -> CheckReport {
    let one = ChartFunction::one(sp.dim());
    let right = sp.star(f, &one).value.sub(f).normalized();
    let left = sp.star(&one, f).value.sub(f).normalized();
    let r = CheckReport::from_defect(&right);
    let l = CheckReport::from_defect(&left);
    match (r.failing_order, l.failing_order) {
        (Some(a), Some(b)) => CheckReport { passed: false, failing_order: Some(a.min(b)) },
        _ if !r.passed => r,
        _ => l,
    }
}

/// `sum_{i,m} g^{i mbar} (d_mbar f d_i g - d_mbar g d_i f)`
pub fn poisson_bivector<C: Ring>(f: &ChartFunction<C>, g: &ChartFunction<C>, chart: &ChartMetric<C>) -> ChartFunction<C> {
    let mut acc = ChartFunction::zero(chart.dim());
    for i in 0..chart.dim() {
        for m in 0..chart.dim() {
            let w = chart.inverse(m, i);
            let term = f.d_zbar(m).mul(&g.d_z(i)).sub(&g.d_zbar(m).mul(&f.d_z(i)));
            if !term.is_zero() {
                acc = acc.add(&w.mul(&term));
            }
        }
    }
    acc.normalized()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonReport<C: Ring> {
    pub passed: bool,
    /// `h^1` coefficient of `f * g - g * f`.
    pub antisymmetric: ChartFunction<C>,
    pub bivector: ChartFunction<C>,
}

/// The `h^1` part of `f * g - g * f` against the Poisson bivector.
pub fn check_poisson<C: StarScalar>(
    f: &ChartFunction<C>,
    g: &ChartFunction<C>,
    sp: &StarProduct<C>,
) -> Result<PoissonReport<C>, AlgebraError> {
    let diff = sp.star_to(f, g, 1).value.sub(&sp.star_to(g, f, 1).value);
    let antisymmetric = hbar_coefficient(&diff, 1)?;
    let bivector = poisson_bivector(f, g, sp.chart());
    Ok(PoissonReport {
        passed: antisymmetric == bivector,
        antisymmetric,
        bivector,
    })
}

/// `(f * g) * h - f * (g * h)` through `h^order`.
pub fn associativity_defect<C: StarScalar>(
    f: &ChartFunction<C>,
    g: &ChartFunction<C>,
    h: &ChartFunction<C>,
    sp: &StarProduct<C>,
) -> ChartFunction<C> {
    let fg = sp.star(f, g).value;
    let gh = sp.star(g, h).value;
    sp.star(&fg, h).value.sub(&sp.star(f, &gh).value).normalized()
}

/// Checks that every coefficient of the associativity defect vanishes
/// through `h^order`. Exact when `C` is [`HSeries`] with precision `order`;
/// over [`HRational`] only the orders `<= order` are inspected.
pub fn check_associativity<C: StarScalar>(
    f: &ChartFunction<C>,
    g: &ChartFunction<C>,
    h: &ChartFunction<C>,
    sp: &StarProduct<C>,
) -> Result<CheckReport, AlgebraError> {
    let defect = associativity_defect(f, g, h, sp);
    for k in 0..=sp.order() {
        if !hbar_coefficient(&defect, k)?.is_zero() {
            return Ok(CheckReport { passed: false, failing_order: Some(k as i64) });
        }
    }
    Ok(CheckReport { passed: true, failing_order: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Monomial;
    use crate::coeffs::{cpn_closed_table, solve_general};
    use crate::geometry::GeometryPoint;

    type F = ChartFunction<HRational>;

    fn q(n: i64) -> HRational {
        HRational::from_int(n)
    }

    fn z(dim: usize, k: usize) -> F {
        F::z(dim, k)
    }

    fn zb(dim: usize, k: usize) -> F {
        F::zbar(dim, k)
    }

    fn monomial(dim: usize, exps: &[u32]) -> F {
        F::polynomial(dim, ZPoly::monomial(Monomial::from_exponents(exps), q(1)))
    }

    fn product(dim: usize, order: usize) -> StarProduct<HRational> {
        StarProduct::from_table(&cpn_closed_table(dim, order).unwrap(), order).unwrap()
    }

    #[test]
    fn first_order_operators() {
        let cm = ChartMetric::<HRational>::cpn(1);
        let s = F::s(1);
        assert!(d_holo(&z(1, 0), 0, &cm).is_zero());
        assert_eq!(d_holo(&zb(1, 0), 0, &cm), s.mul(&s));
        let twice = d_holo(&d_holo(&zb(1, 0), 0, &cm), 0, &cm);
        assert_eq!(twice, z(1, 0).scale(&q(2)).mul(&s).mul(&s).mul(&s));
        assert!(d_antiholo(&zb(1, 0), 0, &cm).is_zero());
        assert_eq!(d_antiholo(&z(1, 0), 0, &cm), s.mul(&s));
        assert_eq!(d_antiholo(&z(1, 0).mul(&zb(1, 0)), 0, &cm), zb(1, 0).mul(&s).mul(&s));
    }

    #[test]
    fn multi_index_application() {
        let cm = ChartMetric::<HRational>::cpn(2);
        let f = zb(2, 0).mul(&zb(2, 1));
        let zero = MultiIndex::zero(2);
        assert_eq!(apply_multi(&f, &zero, Side::Holo, &cm), f);
        assert!(apply_multi(&f, &MultiIndex::new(vec![-1, 2]), Side::Holo, &cm).is_zero());
        let both = apply_multi(&f, &MultiIndex::new(vec![1, 1]), Side::Holo, &cm);
        let a = d_holo(&d_holo(&f, 1, &cm), 0, &cm);
        assert_eq!(both, a);
        let table = derivative_table(&f, Side::Holo, 2, &cm);
        assert_eq!(table[&MultiIndex::new(vec![1, 1])], both);
    }

    #[test]
    fn d_operators_commute_on_cp2() {
        let cm = ChartMetric::<HRational>::cpn(2);
        let samples = [
            zb(2, 0).mul(&zb(2, 1)).mul(&z(2, 0)),
            zb(2, 1).mul(&zb(2, 1)).mul(&z(2, 1)).div_s_pow(1),
            F::s(2).mul(&zb(2, 0)).add(&z(2, 1)),
        ];
        for f in &samples {
            let a = d_holo(&d_holo(f, 0, &cm), 1, &cm);
            let b = d_holo(&d_holo(f, 1, &cm), 0, &cm);
            assert_eq!(a, b);
            let a = d_antiholo(&d_antiholo(f, 0, &cm), 1, &cm);
            let b = d_antiholo(&d_antiholo(f, 1, &cm), 0, &cm);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn first_order_star_on_cp1() {
        let sp = product(1, 1);
        let s = F::s(1);
        let expected = zb(1, 0).mul(&z(1, 0)).add(&s.mul(&s).scale(&HRational::hbar()));
        assert_eq!(sp.star(&zb(1, 0), &z(1, 0)).value, expected);
    }

    #[test]
    fn coefficients_at_the_origin_match_the_table() {
        let table = cpn_closed_table(2, 3).unwrap();
        let sp = StarProduct::<HRational>::from_table(&table, 3).unwrap();
        for n in 0..=3 {
            for a in enumerate_weight(2, n) {
                for b in enumerate_weight(2, n) {
                    assert_eq!(sp.coefficient(n, &a, &b).at_origin(), table.get(n, &a, &b));
                }
            }
        }
    }

    #[test]
    fn separation_of_variables() {
        let sp = product(2, 3);
        let hol = monomial(2, &[2, 1, 0, 0]);
        let anti = monomial(2, &[0, 0, 1, 2]);
        let f = monomial(2, &[1, 0, 2, 1]).div_s_pow(1);
        assert_eq!(sp.star(&hol, &f).value, hol.mul(&f));
        assert_eq!(sp.star(&f, &anti).value, f.mul(&anti));
    }

    #[test]
    fn unit_law_and_corruption() {
        let sp = product(1, 3);
        let f = monomial(1, &[2, 1]);
        assert!(check_unit(&f, &sp).passed);
        assert!(check_unit(&F::one(1), &sp).passed);
        let mut table = cpn_closed_table(1, 3).unwrap();
        let z0 = MultiIndex::zero(1);
        table.set(0, &z0, &z0, &q(1) + &HRational::hbar().pow(2));
        let bad = StarProduct::<HRational>::from_table(&table, 3).unwrap();
        let report = check_unit(&f, &bad);
        assert!(!report.passed);
        assert_eq!(report.failing_order, Some(2));
    }

    #[test]
    fn table_must_have_projective_form() {
        let table = solve_general(&GeometryPoint::grassmann(2, 2).unwrap(), 1).unwrap();
        assert!(matches!(StarProduct::<HRational>::from_table(&table, 1), Err(StarError::NotProjective)));
        let mut table = cpn_closed_table(2, 2).unwrap();
        assert!(matches!(
            StarProduct::<HRational>::from_table(&table, 3),
            Err(StarError::OrderTooHigh { .. })
        ));
        let (a, b) = (MultiIndex::new(vec![2, 0]), MultiIndex::new(vec![0, 2]));
        table.set(2, &a, &b, q(1));
        assert!(matches!(
            StarProduct::<HRational>::from_table(&table, 2),
            Err(StarError::TableMismatch { .. })
        ));
    }

    #[test]
    fn poisson_bracket() {
        let sp = product(1, 1);
        let report = check_poisson(&z(1, 0), &zb(1, 0), &sp).unwrap();
        assert!(report.passed);
        let s = F::s(1);
        assert_eq!(report.bivector, s.mul(&s).neg());
        let f = monomial(1, &[1, 2]);
        let same = check_poisson(&f, &f, &sp).unwrap();
        assert!(same.passed && same.antisymmetric.is_zero());
        let hol = check_poisson(&z(1, 0), &monomial(1, &[3, 0]), &sp).unwrap();
        assert!(hol.passed && hol.bivector.is_zero());
    }

    #[test]
    fn associativity_cp1_series() {
        let table = cpn_closed_table(1, 3).unwrap();
        let sp = StarProduct::<HSeries>::from_table(&table, 3).unwrap();
        let lift = |f: &F| f.map_coeffs(|c| HSeries::from_hrational(c, 3).unwrap());
        let (x, y) = (lift(&zb(1, 0)), lift(&z(1, 0)));
        assert!(check_associativity(&x, &y, &x, &sp).unwrap().passed);
        let one = ChartFunction::<HSeries>::one(1);
        assert!(check_associativity(&one, &y, &x, &sp).unwrap().passed);
    }

    #[test]
    fn origin_consistency() {
        let table = cpn_closed_table(2, 2).unwrap();
        let sp = StarProduct::<HRational>::from_table(&table, 2).unwrap();
        let f = monomial(2, &[1, 0, 2, 1]);
        let g = monomial(2, &[2, 1, 0, 1]);
        let df = derivative_table(&f, Side::Holo, 2, sp.chart());
        let dg = derivative_table(&g, Side::Antiholo, 2, sp.chart());
        let mut expected = HRational::zero();
        for n in 0..=2 {
            for a in enumerate_weight(2, n) {
                for b in enumerate_weight(2, n) {
                    expected = &expected + &(&table.get(n, &a, &b) * &(&df[&a].at_origin() * &dg[&b].at_origin()));
                }
            }
        }
        assert_eq!(sp.star(&f, &g).value.at_origin(), expected);
    }
}

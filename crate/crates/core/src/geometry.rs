//! Pointwise geometric input to the coefficient recurrences.
//!
//! Index conventions (all 0-based):
//!
//! * `metric[a][b]` is `g_{a bbar}`; `g_{bbar a}` is the same number.
//! * `inverse[a][b]` is `g^{abar b}`, so `metric * inverse = 1` as matrices.
//! * `curvature(p, k, l, i)` is the raised component `R_pbar^{kbar lbar}_ibar`,
//!   symmetric in `k <-> l`.
//!
//! The coefficients `T^n` are covariantly constant, so the data at a single
//! point determines a whole table; the built-in constructors all work at the
//! chart origin, where the Grassmann metric is the identity.

use serde::{Deserialize, Serialize};

use crate::algebra::{HRational, Ring};
use crate::chart::{ChartFunction, ZPoly};
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("dimension must be positive")]
    InvalidDimension,
    #[error("metric must be a nonzero scalar")]
    ZeroMetric,
    #[error("metric must be a square {0}x{0} matrix")]
    MetricShape(usize),
    #[error("metric is not symmetric at ({0}, {1})")]
    AsymmetricMetric(usize, usize),
    #[error("metric is singular")]
    SingularMetric,
    #[error("curvature must have {expected} components, got {got}")]
    CurvatureShape { expected: usize, got: usize },
    #[error("curvature not symmetric in its raised indices at (p={p}, k={k}, l={l}, i={i})")]
    AsymmetricCurvature { p: usize, k: usize, l: usize, i: usize },
    #[error("stored data does not match the {0} constructor")]
    Mismatch(&'static str),
}

/// Where a [`GeometryPoint`] came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum GeometryKind {
    Cpn { n: usize },
    Grassmann { p: usize, q: usize },
    OneDim { g: HRational, r: HRational },
    Custom {},
}

impl GeometryKind {
    pub fn label(&self) -> String {
        match self {
            GeometryKind::Cpn { n } => format!("cpn:{n}"),
            GeometryKind::Grassmann { p, q } => format!("grassmann:{p},{q}"),
            GeometryKind::OneDim { g, r } => format!("onedim:{g},{r}"),
            GeometryKind::Custom {} => "custom".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryPoint {
    kind: GeometryKind,
    dim: usize,
    metric: Matrix<HRational>,
    inverse: Matrix<HRational>,
    curvature: Vec<HRational>,
}

fn delta(a: usize, b: usize) -> i64 {
    i64::from(a == b)
}

impl GeometryPoint {
    /// `CP^N` at the origin: identity metric and
    /// `R_pbar^{kbar lbar}_ibar = -d_pk d_il - d_ik d_pl`.
    pub fn cpn(n: usize) -> Result<Self, GeometryError> {
        if n == 0 {
            return Err(GeometryError::InvalidDimension);
        }
        let curvature = Self::curvature_from_fn(n, |p, k, l, i| {
            HRational::from_int(-delta(p, k) * delta(i, l) - delta(i, k) * delta(p, l))
        });
        Ok(Self::identity_metric(GeometryKind::Cpn { n }, n, curvature))
    }

    /// `G_{p,q}` at the origin, composite coordinates `(a, a')` flattened
    /// lexicographically to `a*q + a'`.
    pub fn grassmann(p: usize, q: usize) -> Result<Self, GeometryError> {
        if p == 0 || q == 0 {
            return Err(GeometryError::InvalidDimension);
        }
        let dim = p * q;
        let flat = |row: usize, col: usize| row * q + col;
        let curvature = Self::curvature_from_fn(dim, |a_idx, c, d, b_idx| {
            let (a, a2) = (a_idx / q, a_idx % q);
            let (b, b2) = (b_idx / q, b_idx % q);
            let ab2 = flat(a, b2);
            let ba2 = flat(b, a2);
            HRational::from_int(-delta(ab2, c) * delta(ba2, d) - delta(ba2, c) * delta(ab2, d))
        });
        Ok(Self::identity_metric(GeometryKind::Grassmann { p, q }, dim, curvature))
    }

    /// One complex dimension with metric `g_{1 1bar} = g` and
    /// `R = R_1bar^{1bar 1bar}_1bar`.
    pub fn one_dim(g: HRational, r: HRational) -> Result<Self, GeometryError> {
        let inv = g.recip().map_err(|_| GeometryError::ZeroMetric)?;
        Ok(GeometryPoint {
            kind: GeometryKind::OneDim { g: g.clone(), r: r.clone() },
            dim: 1,
            metric: Matrix::from_fn(1, 1, |_, _| g.clone()),
            inverse: Matrix::from_fn(1, 1, |_, _| inv.clone()),
            curvature: vec![r],
        })
    }

    /// User-supplied data with the curvature already in raised form,
    /// `curvature[p][k][l][i] = R_pbar^{kbar lbar}_ibar`.
    pub fn custom(
        metric: Vec<Vec<HRational>>,
        curvature: Vec<Vec<Vec<Vec<HRational>>>>,
    ) -> Result<Self, GeometryError> {
        let (metric, inverse) = Self::checked_metric(metric)?;
        let dim = metric.rows();
        let flat = Self::flatten_curvature(dim, curvature)?;
        let point = GeometryPoint {
            kind: GeometryKind::Custom {},
            dim,
            metric,
            inverse,
            curvature: flat,
        };
        point.check_curvature_symmetry()?;
        Ok(point)
    }

    /// User-supplied data with the all-lower curvature
    /// `lowered[a][p][q][b] = R_{abar p q bbar}`, raised with two inverse
    /// metrics: `R_abar^{cbar dbar}_bbar = g^{p cbar} g^{q dbar} R_{abar p q bbar}`.
    pub fn custom_from_lowered(
        metric: Vec<Vec<HRational>>,
        lowered: Vec<Vec<Vec<Vec<HRational>>>>,
    ) -> Result<Self, GeometryError> {
        let (metric, inverse) = Self::checked_metric(metric)?;
        let dim = metric.rows();
        let low = Self::flatten_curvature(dim, lowered)?;
        let at = |a: usize, p: usize, q: usize, b: usize| &low[((a * dim + p) * dim + q) * dim + b];
        let raised = Self::curvature_from_fn(dim, |a, c, d, b| {
            let mut acc = HRational::zero();
            for p in 0..dim {
                for q in 0..dim {
                    let term = at(a, p, q, b);
                    if term.is_zero() {
                        continue;
                    }
                    // g^{p cbar} = g^{cbar p} = inverse[c][p]
                    acc = &acc + &(&(inverse.get(c, p) * inverse.get(d, q)) * term);
                }
            }
            acc
        });
        let nested = unflatten(dim, &raised);
        let metric_rows = metric.to_rows();
        Self::custom(metric_rows, nested)
    }

    fn identity_metric(kind: GeometryKind, dim: usize, curvature: Vec<HRational>) -> Self {
        GeometryPoint {
            kind,
            dim,
            metric: Matrix::identity(dim),
            inverse: Matrix::identity(dim),
            curvature,
        }
    }

    fn curvature_from_fn(
        dim: usize,
        f: impl Fn(usize, usize, usize, usize) -> HRational,
    ) -> Vec<HRational> {
        let mut out = Vec::with_capacity(dim.pow(4));
        for p in 0..dim {
            for k in 0..dim {
                for l in 0..dim {
                    for i in 0..dim {
                        out.push(f(p, k, l, i));
                    }
                }
            }
        }
        out
    }

    fn checked_metric(
        rows: Vec<Vec<HRational>>,
    ) -> Result<(Matrix<HRational>, Matrix<HRational>), GeometryError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(GeometryError::InvalidDimension);
        }
        let metric = Matrix::from_rows(rows).ok_or(GeometryError::MetricShape(dim))?;
        if !metric.is_square() {
            return Err(GeometryError::MetricShape(dim));
        }
        for i in 0..dim {
            for j in i + 1..dim {
                if metric.get(i, j) != metric.get(j, i) {
                    return Err(GeometryError::AsymmetricMetric(i, j));
                }
            }
        }
        let inverse = metric.inverse().ok_or(GeometryError::SingularMetric)?;
        Ok((metric, inverse))
    }

    fn flatten_curvature(
        dim: usize,
        nested: Vec<Vec<Vec<Vec<HRational>>>>,
    ) -> Result<Vec<HRational>, GeometryError> {
        let expected = dim.pow(4);
        let shape_ok = nested.len() == dim
            && nested.iter().all(|a| {
                a.len() == dim && a.iter().all(|b| b.len() == dim && b.iter().all(|c| c.len() == dim))
            });
        if !shape_ok {
            let got = nested.iter().flatten().flatten().map(|c| c.len()).sum();
            return Err(GeometryError::CurvatureShape { expected, got });
        }
        Ok(nested.into_iter().flatten().flatten().flatten().collect())
    }

    fn check_curvature_symmetry(&self) -> Result<(), GeometryError> {
        let n = self.dim;
        for p in 0..n {
            for k in 0..n {
                for l in k + 1..n {
                    for i in 0..n {
                        if self.curvature(p, k, l, i) != self.curvature(p, l, k, i) {
                            return Err(GeometryError::AsymmetricCurvature { p, k, l, i });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> &GeometryKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `g_{i jbar}`
    pub fn g(&self, i: usize, j: usize) -> &HRational {
        self.metric.get(i, j)
    }

    /// `g_{ibar d}` as it appears in the recurrences (equal to `g_{d ibar}`).
    pub fn g_bar_first(&self, ibar: usize, d: usize) -> &HRational {
        self.metric.get(d, ibar)
    }

    /// `g^{ibar j}`
    pub fn g_inv(&self, i: usize, j: usize) -> &HRational {
        self.inverse.get(i, j)
    }

    /// `R_pbar^{kbar lbar}_ibar`
    pub fn curvature(&self, p: usize, k: usize, l: usize, i: usize) -> &HRational {
        let n = self.dim;
        &self.curvature[((p * n + k) * n + l) * n + i]
    }

    pub fn metric(&self) -> &Matrix<HRational> {
        &self.metric
    }

    pub fn inverse_metric(&self) -> &Matrix<HRational> {
        &self.inverse
    }

    pub fn curvature_nested(&self) -> Vec<Vec<Vec<Vec<HRational>>>> {
        unflatten(self.dim, &self.curvature)
    }

    pub fn is_cpn(&self) -> Option<usize> {
        match self.kind {
            GeometryKind::Cpn { n } => Some(n),
            _ => None,
        }
    }
}

fn unflatten(dim: usize, flat: &[HRational]) -> Vec<Vec<Vec<Vec<HRational>>>> {
    flat.chunks(dim * dim * dim)
        .map(|a| a.chunks(dim * dim).map(|b| b.chunks(dim).map(|c| c.to_vec()).collect()).collect())
        .collect()
}

/// JSON form: `{"kind": ..., "params": {...}, "metric": [[...]], "curvature": [[[[...]]]]}`.
#[derive(Serialize, Deserialize)]
pub struct GeometryRepr {
    #[serde(flatten)]
    kind: GeometryKind,
    metric: Vec<Vec<HRational>>,
    curvature: Vec<Vec<Vec<Vec<HRational>>>>,
}

impl GeometryPoint {
    pub fn to_repr(&self) -> GeometryRepr {
        GeometryRepr {
            kind: self.kind.clone(),
            metric: self.metric.to_rows(),
            curvature: self.curvature_nested(),
        }
    }

    /// Rebuilds through the matching constructor; built-in kinds must agree
    /// with the stored arrays.
    pub fn from_repr(repr: GeometryRepr) -> Result<Self, GeometryError> {
        let rebuilt = match &repr.kind {
            GeometryKind::Cpn { n } => Self::cpn(*n)?,
            GeometryKind::Grassmann { p, q } => Self::grassmann(*p, *q)?,
            GeometryKind::OneDim { g, r } => Self::one_dim(g.clone(), r.clone())?,
            GeometryKind::Custom {} => return Self::custom(repr.metric, repr.curvature),
        };
        if rebuilt.metric.to_rows() != repr.metric || rebuilt.curvature_nested() != repr.curvature {
            return Err(GeometryError::Mismatch(match repr.kind {
                GeometryKind::Cpn { .. } => "cpn",
                GeometryKind::Grassmann { .. } => "grassmann",
                _ => "one_dim",
            }));
        }
        Ok(rebuilt)
    }
}

/// Symbolic Fubini-Study metric of `CP^N` on the affine chart.
///
/// * `metric(i, j) = g_{i jbar} = (d_ij s - zb_i z_j) / s^2`
/// * `inverse(i, j) = g^{ibar j} = s (d_ij + zb_i z_j)`
#[derive(Clone)]
pub struct ChartMetric<C> {
    dim: usize,
    metric_numerators: Vec<Vec<ZPoly<C>>>,
    inverse: Vec<Vec<ChartFunction<C>>>,
}

impl<C: Ring> ChartMetric<C> {
    pub fn cpn(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        let s = ZPoly::<C>::s(dim);
        let zbz = |i: usize, j: usize| ZPoly::<C>::var(dim + i).mul_ref(&ZPoly::var(j));
        let grid = |f: &dyn Fn(usize, usize) -> ZPoly<C>| -> Vec<Vec<ZPoly<C>>> {
            (0..dim).map(|i| (0..dim).map(|j| f(i, j)).collect()).collect()
        };
        let metric_numerators = grid(&|i, j| {
            let diag = if i == j { s.clone() } else { ZPoly::zero() };
            diag.sub_ref(&zbz(i, j))
        });
        let inverse = grid(&|i, j| {
            let diag = if i == j { ZPoly::one() } else { ZPoly::zero() };
            s.mul_ref(&diag.add_ref(&zbz(i, j)))
        })
        .into_iter()
        .map(|row| row.into_iter().map(|p| ChartFunction::polynomial(dim, p)).collect())
        .collect();
        ChartMetric {
            dim,
            metric_numerators,
            inverse,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Numerator of `g_{i jbar}`; the denominator is always `s^2`.
    pub fn metric_numerator(&self, i: usize, j: usize) -> &ZPoly<C> {
        &self.metric_numerators[i][j]
    }

    /// `g_{i jbar}` as a chart function.
    pub fn metric(&self, i: usize, j: usize) -> ChartFunction<C> {
        ChartFunction::new(self.dim, self.metric_numerators[i][j].clone(), 2)
    }

    /// `g^{ibar j}`
    pub fn inverse(&self, i: usize, j: usize) -> &ChartFunction<C> {
        &self.inverse[i][j]
    }

    /// `sum_j g_{i jbar} g^{jbar k} - d_ik`, which must vanish identically.
    pub fn identity_defect(&self) -> Vec<Vec<ChartFunction<C>>> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|k| {
                        let mut acc = ChartFunction::zero(self.dim);
                        for j in 0..self.dim {
                            acc = acc.add(&self.metric(i, j).mul(self.inverse(j, k)));
                        }
                        if i == k {
                            acc = acc.sub(&ChartFunction::one(self.dim));
                        }
                        acc.normalized()
                    })
                    .collect()
            })
            .collect()
    }
}

//! Exact computation of star products with separation of variables on
//! locally symmetric Kähler manifolds.
//!
//! The pipeline is: a [`GeometryPoint`] (metric and curvature at a point)
//! determines a [`CoefficientTable`] of covariantly constant coefficients
//! `T^n_{alpha,beta}` over `Q(h)`; on `CP^N` the table drives a symbolic
//! [`StarProduct`] on the affine chart.

pub mod algebra;
pub mod chart;
pub mod coeffs;
pub mod geometry;
pub mod linalg;
pub mod multiindex;
pub mod permanent;
pub mod star;

pub use algebra::{AlgebraError, Field, HPoly, HRational, HSeries, Rational, Ring};
pub use chart::{ChartFunction, ChartFunctionRepr, Monomial, ZPoly};
pub use coeffs::{CoeffError, CoefficientTable};
pub use geometry::{ChartMetric, GeometryError, GeometryKind, GeometryPoint};
pub use linalg::{LinearSystemError, Matrix};
pub use multiindex::{enumerate_weight, MultiIndex};
pub use permanent::{block_permanent, plus_det, plus_det_expand, BlockPermanent, BlockSpec, PermanentError};
pub use star::{StarError, StarProduct, StarResult, StarScalar};

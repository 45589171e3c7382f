//! Coefficient tables `T^n_{alpha,beta}` and the routines that fill them.

mod closed;
mod g22;
mod general;

pub use closed::{
    coeff_1d, coeff_1d_table, coeff_2d_order2, cpn_closed, cpn_closed_table, cpn_gamma_coeff, cpn_recurrence,
    RecurrenceCoordinate, ORDER2_INDICES,
};
pub use g22::solve_g22;
pub use general::{solve_general, theorem_equations, verify_residual, Equation, ResidualReport, Violation};

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::algebra::{format_rational, AlgebraError, HRational};
use crate::geometry::{GeometryError, GeometryPoint, GeometryRepr};
use crate::linalg::LinearSystemError;
use crate::multiindex::{enumerate_weight, MultiIndex};
use crate::permanent::PermanentError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoeffError {
    #[error("order {order}, alpha = {alpha}: {source}")]
    Linear {
        order: usize,
        alpha: MultiIndex,
        source: LinearSystemError,
    },
    #[error("the order-2 curvature matrix is singular")]
    SingularCurvature,
    #[error("this routine needs dimension {expected}, geometry has {got}")]
    Dimension { expected: usize, got: usize },
    #[error("multi-indices {alpha} and {beta} must be valid with equal weights")]
    IndexMismatch { alpha: MultiIndex, beta: MultiIndex },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Permanent(#[from] PermanentError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("malformed table: {0}")]
    Malformed(String),
}

type OrderMap = BTreeMap<(MultiIndex, MultiIndex), HRational>;

/// Coefficients `T^n_{alpha,beta}` for `n <= max_order` at one geometry point.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    geometry: GeometryPoint,
    orders: Vec<OrderMap>,
}

impl CoefficientTable {
    /// A table holding only `T^0 = 1`.
    pub fn new(geometry: GeometryPoint) -> Self {
        let zero = MultiIndex::zero(geometry.dim());
        let mut first = OrderMap::new();
        first.insert((zero.clone(), zero), HRational::one());
        CoefficientTable {
            geometry,
            orders: vec![first],
        }
    }

    pub fn geometry(&self) -> &GeometryPoint {
        &self.geometry
    }

    pub fn dim(&self) -> usize {
        self.geometry.dim()
    }

    pub fn max_order(&self) -> usize {
        self.orders.len() - 1
    }

    /// `T^n_{alpha,beta}`; exact zero for any absent or invalid key.
    pub fn get(&self, n: usize, alpha: &MultiIndex, beta: &MultiIndex) -> HRational {
        if !alpha.is_valid() || !beta.is_valid() {
            return HRational::zero();
        }
        self.orders
            .get(n)
            .and_then(|m| m.get(&(alpha.clone(), beta.clone())))
            .cloned()
            .unwrap_or_else(HRational::zero)
    }

    /// Appends order `max_order + 1`.
    pub(crate) fn push_order(&mut self, entries: OrderMap) {
        self.orders.push(entries);
    }

    /// Replaces a stored value. Panics if the key is not a valid entry of
    /// an existing order.
    pub fn set(&mut self, n: usize, alpha: &MultiIndex, beta: &MultiIndex, value: HRational) {
        let slot = self.orders[n]
            .get_mut(&(alpha.clone(), beta.clone()))
            .expect("key is not an entry of this table");
        *slot = value;
    }

    pub fn order(&self, n: usize) -> impl Iterator<Item = (&MultiIndex, &MultiIndex, &HRational)> {
        self.orders[n].iter().map(|((a, b), v)| (a, b, v))
    }

    /// All entries sorted by `(n, alpha, beta)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, &MultiIndex, &MultiIndex, &HRational)> {
        self.orders
            .iter()
            .enumerate()
            .flat_map(|(n, m)| m.iter().map(move |((a, b), v)| (n, a, b, v)))
    }

    /// Copy truncated to orders `<= k`.
    pub fn truncated(&self, k: usize) -> Self {
        CoefficientTable {
            geometry: self.geometry.clone(),
            orders: self.orders[..=k.min(self.max_order())].to_vec(),
        }
    }

    /// Entries of two tables that differ, as `(n, alpha, beta)`.
    pub fn differences(&self, other: &CoefficientTable) -> Vec<(usize, MultiIndex, MultiIndex)> {
        let top = self.max_order().max(other.max_order());
        let dim = self.dim();
        let mut out = Vec::new();
        for n in 0..=top {
            for a in enumerate_weight(dim, n) {
                for b in enumerate_weight(dim, n) {
                    if self.get(n, &a, &b) != other.get(n, &a, &b) {
                        out.push((n, a.clone(), b));
                    }
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_repr()).expect("table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CoeffError> {
        let repr: TableRepr = serde_json::from_str(text).map_err(|e| CoeffError::Malformed(e.to_string()))?;
        Self::from_repr(repr)
    }

    fn to_repr(&self) -> TableRepr {
        TableRepr {
            manifold: self.geometry.to_repr(),
            max_order: self.max_order(),
            entries: self
                .entries()
                .map(|(n, a, b, v)| EntryRepr {
                    n,
                    alpha: a.clone(),
                    beta: b.clone(),
                    coeff: v.clone(),
                })
                .collect(),
        }
    }

    fn from_repr(repr: TableRepr) -> Result<Self, CoeffError> {
        let geometry = GeometryPoint::from_repr(repr.manifold)?;
        let dim = geometry.dim();
        let mut orders = vec![OrderMap::new(); repr.max_order + 1];
        for e in repr.entries {
            let ok = e.n <= repr.max_order
                && [&e.alpha, &e.beta]
                    .iter()
                    .all(|m| m.dim() == dim && m.is_valid() && m.weight() == e.n as i64);
            if !ok {
                return Err(CoeffError::Malformed(format!(
                    "entry n = {}, alpha = {}, beta = {} is not admissible",
                    e.n, e.alpha, e.beta
                )));
            }
            orders[e.n].insert((e.alpha, e.beta), e.coeff);
        }
        Ok(CoefficientTable { geometry, orders })
    }

    /// One row per entry: `n,alpha,beta,h^0,...,h^J` with the coefficients of
    /// the power-series expansion of `T^n_{alpha,beta}` through `h^J`.
    pub fn to_csv(&self, hbar_order: usize) -> Result<String, CoeffError> {
        let mut out = String::from("n,alpha,beta");
        for j in 0..=hbar_order {
            let _ = write!(out, ",h^{j}");
        }
        out.push('\n');
        for (n, a, b, v) in self.entries() {
            let _ = write!(out, "{n},{},{}", csv_index(a), csv_index(b));
            for c in v.expand_series(hbar_order)? {
                let _ = write!(out, ",{}", format_rational(&c));
            }
            out.push('\n');
        }
        Ok(out)
    }
}

fn csv_index(m: &MultiIndex) -> String {
    m.components().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

#[derive(Serialize, Deserialize)]
struct EntryRepr {
    n: usize,
    alpha: MultiIndex,
    beta: MultiIndex,
    coeff: HRational,
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    manifold: GeometryRepr,
    max_order: usize,
    entries: Vec<EntryRepr>,
}

/// Every `(alpha, beta)` pair of weight `n` in `dim` coordinates.
pub(crate) fn all_pairs(dim: usize, n: usize) -> Vec<(MultiIndex, MultiIndex)> {
    let idx = enumerate_weight(dim, n);
    idx.iter()
        .flat_map(|a| idx.iter().map(move |b| (a.clone(), b.clone())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookups_outside_the_table_are_zero() {
        let t = solve_general(&GeometryPoint::cpn(2).unwrap(), 2).unwrap();
        let bad = MultiIndex::new(vec![-1, 3]);
        let good = MultiIndex::new(vec![1, 1]);
        assert!(t.get(2, &bad, &good).is_zero());
        assert!(t.get(2, &good, &bad).is_zero());
        assert!(t.get(7, &good, &good).is_zero());
        assert!(t.get(1, &good, &good).is_zero());
        assert!(!t.get(2, &good, &good).is_zero());
    }

    #[test]
    fn json_round_trip_and_sorting() {
        let t = cpn_closed_table(2, 3).unwrap();
        let text = t.to_json();
        let back = CoefficientTable::from_json(&text).unwrap();
        assert_eq!(back, t);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let entries = v["entries"].as_array().unwrap();
        assert_eq!(entries.len(), 1 + 4 + 9 + 16);
        assert_eq!(v["manifold"]["kind"], "cpn");
        assert_eq!(v["max_order"], 3);
        assert_eq!(entries[1]["alpha"], serde_json::json!([0, 1]));
    }

    #[test]
    fn malformed_tables_are_rejected() {
        let t = cpn_closed_table(1, 1).unwrap();
        let text = t.to_json().replace("\"max_order\": 1", "\"max_order\": 0");
        assert!(matches!(CoefficientTable::from_json(&text), Err(CoeffError::Malformed(_))));
        assert!(CoefficientTable::from_json("{}").is_err());
    }

    #[test]
    fn csv_series() {
        let t = cpn_closed_table(1, 2).unwrap();
        let csv = t.to_csv(3).unwrap();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "n,alpha,beta,h^0,h^1,h^2,h^3");
        assert_eq!(lines[1], "0,0,0,1,0,0,0");
        assert_eq!(lines[2], "1,1,1,0,1,0,0");
        // h^2 / (2 (1 - h)) = h^2/2 + h^3/2 + ...
        assert_eq!(lines[3], "2,2,2,0,0,1/2,1/2");
    }
}

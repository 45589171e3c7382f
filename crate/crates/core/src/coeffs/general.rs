//! The linear system relating `T^n` to `T^{n-1}` on a locally symmetric
//! Kähler manifold, and its exact solution.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{all_pairs, CoeffError, CoefficientTable};
use crate::algebra::HRational;
use crate::geometry::GeometryPoint;
use crate::linalg::solve_unique;
use crate::multiindex::{enumerate_weight, MultiIndex};

/// One equation of the order-`n` system for fixed `(i, alpha, beta)`:
///
/// `sum_k coeff_k T^n_{alpha, beta_k} = known`
///
/// where `known = sum_d h g_{ibar d} T^{n-1}_{alpha - e_d, beta - e_i}`.
#[derive(Debug, Clone)]
pub struct Equation {
    pub i: usize,
    pub alpha: MultiIndex,
    pub beta: MultiIndex,
    pub terms: Vec<(MultiIndex, HRational)>,
    pub known: HRational,
}

fn delta(a: usize, b: usize) -> i32 {
    i32::from(a == b)
}

/// `sum_d h g_{ibar d} T^{n-1}_{alpha - e_d, beta - e_i}`
pub(crate) fn lower_order_side(
    geom: &GeometryPoint,
    prev: &CoefficientTable,
    n: usize,
    i: usize,
    alpha: &MultiIndex,
    beta: &MultiIndex,
) -> HRational {
    let h = HRational::hbar();
    let reduced_beta = beta.minus_unit(i);
    let mut acc = HRational::zero();
    for d in 0..geom.dim() {
        let g = geom.g_bar_first(i, d);
        if g.is_zero() {
            continue;
        }
        let t = prev.get(n - 1, &alpha.minus_unit(d), &reduced_beta);
        if !t.is_zero() {
            acc = &acc + &(&(&h * g) * &t);
        }
    }
    acc
}

fn push_term(terms: &mut BTreeMap<MultiIndex, HRational>, index: MultiIndex, coeff: HRational) {
    if !index.is_valid() || coeff.is_zero() {
        return;
    }
    let slot = terms.entry(index).or_insert_with(HRational::zero);
    *slot = &*slot + &coeff;
}

/// The unknown side for `(i, beta)`:
///
/// `beta_i T_beta`
/// `+ sum_{k,p} h c(c+1)/2 R_pbar^{kbar kbar}_ibar T_{beta - e_p + 2 e_k - e_i}`,
///   `c = beta_k - d_kp - d_ik + 1`
/// `+ sum_{k<m,p} h c_k c_m R_pbar^{mbar kbar}_ibar T_{beta - e_p + e_k + e_m - e_i}`,
///   `c_j = beta_j - d_jp - d_ij + 1`.
fn unknown_side(geom: &GeometryPoint, i: usize, beta: &MultiIndex) -> Vec<(MultiIndex, HRational)> {
    let dim = geom.dim();
    let h = HRational::hbar();
    let mut terms = BTreeMap::new();
    push_term(&mut terms, beta.clone(), HRational::from_int(i64::from(beta.get(i))));
    for k in 0..dim {
        for p in 0..dim {
            let r = geom.curvature(p, k, k, i);
            if r.is_zero() {
                continue;
            }
            let c = i64::from(beta.get(k) - delta(k, p) - delta(i, k) + 1);
            let factor = HRational::from_int(c * (c + 1) / 2);
            let index = beta.shift(&[(p, -1), (k, 2), (i, -1)]);
            push_term(&mut terms, index, &(&h * &factor) * r);
        }
    }
    for k in 0..dim {
        for m in k + 1..dim {
            for p in 0..dim {
                let r = geom.curvature(p, m, k, i);
                if r.is_zero() {
                    continue;
                }
                let ck = i64::from(beta.get(k) - delta(k, p) - delta(i, k) + 1);
                let cm = i64::from(beta.get(m) - delta(m, p) - delta(i, m) + 1);
                let index = beta.shift(&[(p, -1), (k, 1), (m, 1), (i, -1)]);
                push_term(&mut terms, index, &(&h * &HRational::from_int(ck * cm)) * r);
            }
        }
    }
    terms.into_iter().collect()
}

/// All equations of order `n` for one `alpha`, with the known side taken
/// from order `n - 1` of `prev`.
pub fn theorem_equations(
    geom: &GeometryPoint,
    prev: &CoefficientTable,
    n: usize,
    alpha: &MultiIndex,
) -> Vec<Equation> {
    assert!(n >= 1, "equations start at order 1");
    let mut out = Vec::new();
    for beta in enumerate_weight(geom.dim(), n) {
        for i in 0..geom.dim() {
            if beta.get(i) < 1 {
                continue;
            }
            out.push(Equation {
                i,
                alpha: alpha.clone(),
                beta: beta.clone(),
                terms: unknown_side(geom, i, &beta),
                known: lower_order_side(geom, prev, n, i, alpha, &beta),
            });
        }
    }
    out
}

pub(crate) fn hrational_weight(x: &HRational) -> usize {
    x.numer().degree().unwrap_or(0) + x.denom().degree().unwrap_or(0)
}

/// Solves one `alpha` block: the unknowns are `T^n_{alpha, beta}` for all
/// `beta` of weight `n`.
pub(crate) fn solve_block(
    n: usize,
    alpha: &MultiIndex,
    unknowns: &[MultiIndex],
    equations: Vec<(Vec<(MultiIndex, HRational)>, HRational)>,
) -> Result<Vec<(MultiIndex, HRational)>, CoeffError> {
    let col: BTreeMap<&MultiIndex, usize> = unknowns.iter().enumerate().map(|(k, b)| (b, k)).collect();
    let mut rows = Vec::with_capacity(equations.len());
    let mut rhs = Vec::with_capacity(equations.len());
    for (terms, known) in equations {
        let mut row = vec![HRational::zero(); unknowns.len()];
        for (b, c) in terms {
            row[col[&b]] = c;
        }
        rows.push(row);
        rhs.push(known);
    }
    let x = solve_unique(rows, rhs, unknowns.len(), hrational_weight).map_err(|source| {
        CoeffError::Linear {
            order: n,
            alpha: alpha.clone(),
            source,
        }
    })?;
    Ok(unknowns.iter().cloned().zip(x).collect())
}

/// Fills a table through `max_order` by solving the order-`n` system
/// exactly for each `n >= 2`; `T^0 = 1`, `T^1_{e_d, e_i} = h g_{d ibar}`.
///
/// The equations for different `alpha` never share unknowns, so each
/// `alpha` block is solved separately (in parallel).
pub fn solve_general(geom: &GeometryPoint, max_order: usize) -> Result<CoefficientTable, CoeffError> {
    let mut table = CoefficientTable::new(geom.clone());
    if max_order >= 1 {
        table.push_order(first_order(geom));
    }
    let dim = geom.dim();
    for n in 2..=max_order {
        let unknowns = enumerate_weight(dim, n);
        let blocks: Result<Vec<_>, CoeffError> = unknowns
            .par_iter()
            .map(|alpha| {
                let eqs = theorem_equations(geom, &table, n, alpha)
                    .into_iter()
                    .map(|e| (e.terms, e.known))
                    .collect();
                let sol = solve_block(n, alpha, &unknowns, eqs)?;
                Ok(sol.into_iter().map(|(b, v)| ((alpha.clone(), b), v)).collect::<Vec<_>>())
            })
            .collect();
        table.push_order(blocks?.into_iter().flatten().collect());
    }
    Ok(table)
}

pub(crate) fn first_order(geom: &GeometryPoint) -> BTreeMap<(MultiIndex, MultiIndex), HRational> {
    let dim = geom.dim();
    let h = HRational::hbar();
    all_pairs(dim, 1)
        .into_iter()
        .map(|(a, b)| {
            let d = a.expand()[0];
            let i = b.expand()[0];
            let v = &h * geom.g_bar_first(i, d);
            ((a, b), v)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub i: usize,
    pub alpha: MultiIndex,
    pub beta: MultiIndex,
    pub residual: HRational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub order: usize,
    pub equations: usize,
    pub violations: Vec<Violation>,
}

impl ResidualReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluates every order-`n` equation against `table` (order 0 checks
/// `T^0 = 1`).
pub fn verify_residual(table: &CoefficientTable, geom: &GeometryPoint, n: usize) -> ResidualReport {
    let dim = geom.dim();
    if n == 0 {
        let z = MultiIndex::zero(dim);
        let residual = &table.get(0, &z, &z) - &HRational::one();
        let violations = if residual.is_zero() {
            Vec::new()
        } else {
            vec![Violation { i: 0, alpha: z.clone(), beta: z, residual }]
        };
        return ResidualReport { order: 0, equations: 1, violations };
    }
    let per_alpha: Vec<(usize, Vec<Violation>)> = enumerate_weight(dim, n)
        .par_iter()
        .map(|alpha| {
            let eqs = theorem_equations(geom, table, n, alpha);
            let count = eqs.len();
            let bad = eqs
                .into_iter()
                .filter_map(|e| {
                    let mut lhs = HRational::zero();
                    for (b, c) in &e.terms {
                        lhs = &lhs + &(c * &table.get(n, alpha, b));
                    }
                    let residual = &lhs - &e.known;
                    (!residual.is_zero()).then_some(Violation {
                        i: e.i,
                        alpha: e.alpha,
                        beta: e.beta,
                        residual,
                    })
                })
                .collect();
            (count, bad)
        })
        .collect();
    let equations = per_alpha.iter().map(|(c, _)| c).sum();
    let violations = per_alpha.into_iter().flat_map(|(_, v)| v).collect();
    ResidualReport { order: n, equations, violations }
}

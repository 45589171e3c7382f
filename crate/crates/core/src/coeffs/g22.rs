//! Special recurrence for the Grassmannian `G_{2,2}`.

use rayon::prelude::*;

use super::general::{lower_order_side, solve_block};
use super::{CoeffError, CoefficientTable};
use crate::algebra::HRational;
use crate::geometry::GeometryPoint;
use crate::multiindex::{enumerate_weight, MultiIndex};

/// Coordinates `(a, a')` with `a, a' in {0, 1}` flattened to `2a + a'`
/// (order `11' < 12' < 21' < 22'`).
fn flat(a: usize, b: usize) -> usize {
    2 * a + b
}

/// For each `I = (i, i')`, with `j = 1 - i`, `j' = 1 - i'` and `J = (j, j')`:
///
/// `beta_I (1 + h - h beta_I - h beta_{ji'} - h beta_{ij'}) T_{alpha,beta}`
/// `- h (beta_{ij'} + 1)(beta_{ji'} + 1) T_{alpha, beta - e_J + e_{ij'} + e_{ji'} - e_I}`
/// `= sum_D h g_{Ibar D} T^{n-1}_{alpha - e_D, beta - e_I}`.
pub fn solve_g22(max_order: usize) -> Result<CoefficientTable, CoeffError> {
    let geom = GeometryPoint::grassmann(2, 2)?;
    let mut table = CoefficientTable::new(geom.clone());
    let h = HRational::hbar();
    for n in 1..=max_order {
        let unknowns = enumerate_weight(4, n);
        let blocks: Result<Vec<_>, CoeffError> = unknowns
            .par_iter()
            .map(|alpha| {
                let mut eqs = Vec::new();
                for beta in &unknowns {
                    for (i, i2) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                        let big_i = flat(i, i2);
                        if beta.get(big_i) < 1 {
                            continue;
                        }
                        let (j, j2) = (1 - i, 1 - i2);
                        let ij2 = flat(i, j2);
                        let ji2 = flat(j, i2);
                        let big_j = flat(j, j2);
                        let b = |k: usize| i64::from(beta.get(k));
                        let diag = &HRational::from_int(b(big_i))
                            * &(&(&HRational::one() + &h)
                                - &(&h * &HRational::from_int(b(big_i) + b(ji2) + b(ij2))));
                        let mut terms: Vec<(MultiIndex, HRational)> = vec![(beta.clone(), diag)];
                        let shifted = beta.shift(&[(big_j, -1), (ij2, 1), (ji2, 1), (big_i, -1)]);
                        if shifted.is_valid() {
                            let c = &h * &HRational::from_int((b(ij2) + 1) * (b(ji2) + 1));
                            terms.push((shifted, -&c));
                        }
                        let known = lower_order_side(&geom, &table, n, big_i, alpha, beta);
                        eqs.push((merge(terms), known));
                    }
                }
                let sol = solve_block(n, alpha, &unknowns, eqs)?;
                Ok(sol.into_iter().map(|(b, v)| ((alpha.clone(), b), v)).collect::<Vec<_>>())
            })
            .collect();
        table.push_order(blocks?.into_iter().flatten().collect());
    }
    Ok(table)
}

fn merge(terms: Vec<(MultiIndex, HRational)>) -> Vec<(MultiIndex, HRational)> {
    let mut out: Vec<(MultiIndex, HRational)> = Vec::new();
    for (k, v) in terms {
        match out.iter_mut().find(|(m, _)| *m == k) {
            Some(slot) => slot.1 = &slot.1 + &v,
            None => out.push((k, v)),
        }
    }
    out
}

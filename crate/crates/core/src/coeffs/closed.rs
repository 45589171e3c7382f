//! Closed forms and the projective-space recurrence.

use super::general::first_order;
use super::{all_pairs, CoeffError, CoefficientTable};
use crate::algebra::{factorial, HPoly, HRational};
use crate::geometry::GeometryPoint;
use crate::linalg::Matrix;
use crate::multiindex::MultiIndex;
use crate::permanent::BlockPermanent;

/// One complex dimension:
/// `T^n = g^n prod_{k=1}^n 2h / (2k + h k (k - 1) R)` with `g = g_{1 1bar}`.
pub fn coeff_1d(g: &HRational, r: &HRational, n: usize) -> HRational {
    let h = HRational::hbar();
    let two_h = &h * &HRational::from_int(2);
    let mut acc = g.pow(n as u32);
    for k in 1..=n as i64 {
        let den = &HRational::from_int(2 * k) + &(&(&h * &HRational::from_int(k * (k - 1))) * r);
        acc = &acc * &(&two_h / &den);
    }
    acc
}

/// Table of [`coeff_1d`] values for the one-dimensional geometry `(g, r)`.
pub fn coeff_1d_table(g: &HRational, r: &HRational, max_order: usize) -> Result<CoefficientTable, CoeffError> {
    let geom = GeometryPoint::one_dim(g.clone(), r.clone())?;
    let mut table = CoefficientTable::new(geom);
    for n in 1..=max_order {
        let a = MultiIndex::new(vec![n as i32]);
        let mut entries = std::collections::BTreeMap::new();
        entries.insert((a.clone(), a), coeff_1d(g, r, n));
        table.push_order(entries);
    }
    Ok(table)
}

/// Row/column order of [`coeff_2d_order2`]: `(2,0), (1,1), (0,2)`.
pub const ORDER2_INDICES: [[i32; 2]; 3] = [[2, 0], [1, 1], [0, 2]];

/// All `T^2_{alpha,beta}` in two dimensions as `h^2 G M^{-1}`, rows and
/// columns ordered as [`ORDER2_INDICES`].
pub fn coeff_2d_order2(geom: &GeometryPoint) -> Result<[[HRational; 3]; 3], CoeffError> {
    if geom.dim() != 2 {
        return Err(CoeffError::Dimension { expected: 2, got: geom.dim() });
    }
    // g(a, b) = g_{abar b}, r(p, k, l, i) = R_pbar^{kbar lbar}_ibar, 1-based
    let g = |a: usize, b: usize| geom.g_bar_first(a - 1, b - 1).clone();
    let h = HRational::hbar();
    let r = |p: usize, k: usize, l: usize, i: usize| &h * geom.curvature(p - 1, k - 1, l - 1, i - 1);
    let c = HRational::from_int;
    let gm = Matrix::from_rows(vec![
        vec![&g(1, 1) * &g(1, 1), &g(1, 1) * &g(2, 1), &g(2, 1) * &g(2, 1)],
        vec![
            &c(2) * &(&g(1, 1) * &g(1, 2)),
            &(&g(2, 1) * &g(1, 2)) + &(&g(1, 1) * &g(2, 2)),
            &c(2) * &(&g(2, 1) * &g(2, 2)),
        ],
        vec![&g(1, 2) * &g(1, 2), &g(2, 1) * &g(2, 2), &g(2, 2) * &g(2, 2)],
    ])
    .expect("3x3");
    let rm = Matrix::from_rows(vec![
        vec![&c(2) + &r(1, 1, 1, 1), r(2, 1, 1, 1), r(2, 1, 1, 2)],
        vec![r(1, 2, 1, 1), &c(1) + &r(2, 2, 1, 1), r(2, 2, 1, 2)],
        vec![r(1, 2, 2, 1), r(2, 2, 2, 1), &c(2) + &r(2, 2, 2, 2)],
    ])
    .expect("3x3");
    let inv = rm.inverse().ok_or(CoeffError::SingularCurvature)?;
    let t = gm.mul(&inv).expect("3x3").map(|x| &h.pow(2) * x);
    Ok(std::array::from_fn(|a| std::array::from_fn(|b| t.get(a, b).clone())))
}

/// Which coordinate the projective-space recurrence peels off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecurrenceCoordinate {
    First,
    Last,
}

/// `CP^N` table from
/// `T^n_{alpha,beta} = sum_d h g_{ibar d} / ((1 + h - h n) beta_i) T^{n-1}_{alpha - e_d, beta - e_i}`
/// for one coordinate `i` with `beta_i >= 1`.
pub fn cpn_recurrence(
    n_dim: usize,
    max_order: usize,
    coordinate: RecurrenceCoordinate,
) -> Result<CoefficientTable, CoeffError> {
    let geom = GeometryPoint::cpn(n_dim)?;
    let mut table = CoefficientTable::new(geom.clone());
    let h = HRational::hbar();
    for n in 1..=max_order {
        let scalar = HRational::from_poly(HPoly::from_ints(&[1, 1 - n as i64]));
        let entries = all_pairs(n_dim, n)
            .into_iter()
            .map(|(alpha, beta)| {
                let mut candidates = (0..n_dim).filter(|&k| beta.get(k) >= 1);
                let i = match coordinate {
                    RecurrenceCoordinate::First => candidates.next(),
                    RecurrenceCoordinate::Last => candidates.next_back(),
                }
                .expect("beta has positive weight");
                let den = &scalar * &HRational::from_int(i64::from(beta.get(i)));
                let mut acc = HRational::zero();
                for d in 0..n_dim {
                    let g = geom.g_bar_first(i, d);
                    if g.is_zero() {
                        continue;
                    }
                    let prev = table.get(n - 1, &alpha.minus_unit(d), &beta.minus_unit(i));
                    acc = &acc + &(&(&h * g) * &prev);
                }
                let v = &acc / &den;
                ((alpha, beta), v)
            })
            .collect();
        table.push_order(entries);
    }
    Ok(table)
}

/// `prod_{j=1}^n h / (1 + h - h j)`
fn cpn_scalar(n: usize) -> HRational {
    let h = HRational::hbar();
    (1..=n as i64).fold(HRational::one(), |acc, j| {
        &acc * &(&h / &HRational::from_poly(HPoly::from_ints(&[1, 1 - j])))
    })
}

fn cpn_closed_with(
    cache: &mut BlockPermanent<HRational>,
    alpha: &MultiIndex,
    beta: &MultiIndex,
) -> Result<HRational, CoeffError> {
    if !alpha.is_valid() || !beta.is_valid() || alpha.weight() != beta.weight() {
        return Err(CoeffError::IndexMismatch { alpha: alpha.clone(), beta: beta.clone() });
    }
    let perm = cache.get(alpha, beta)?;
    let facts = alpha.factorial_product().expect("valid") * beta.factorial_product().expect("valid");
    let n = alpha.weight() as usize;
    Ok(&perm.scale(&facts.recip()) * &cpn_scalar(n))
}

/// `T^n = |G^{alpha,beta}|+ prod_k 1/(alpha_k! beta_k!) prod_{j=1}^n h/(1 + h - h j)`
/// with the identity metric of the `CP^N` origin.
pub fn cpn_closed(n_dim: usize, alpha: &MultiIndex, beta: &MultiIndex) -> Result<HRational, CoeffError> {
    if alpha.dim() != n_dim || beta.dim() != n_dim {
        return Err(CoeffError::IndexMismatch { alpha: alpha.clone(), beta: beta.clone() });
    }
    let mut cache = BlockPermanent::new(Matrix::identity(n_dim));
    cpn_closed_with(&mut cache, alpha, beta)
}

pub fn cpn_closed_table(n_dim: usize, max_order: usize) -> Result<CoefficientTable, CoeffError> {
    let geom = GeometryPoint::cpn(n_dim)?;
    let mut cache = BlockPermanent::new(geom.metric().clone());
    let mut table = CoefficientTable::new(geom.clone());
    if max_order >= 1 {
        table.push_order(first_order(&geom));
    }
    for n in 2..=max_order {
        let mut entries = std::collections::BTreeMap::new();
        for (a, b) in all_pairs(n_dim, n) {
            let v = cpn_closed_with(&mut cache, &a, &b)?;
            entries.insert((a, b), v);
        }
        table.push_order(entries);
    }
    Ok(table)
}

/// `Gamma(1 - n + 1/h) / (n! Gamma(1 + 1/h))`, telescoped to
/// `h^n / (n! prod_{j=0}^{n-1} (1 - j h))`.
pub fn cpn_gamma_coeff(n: usize) -> HRational {
    let mut den = HPoly::constant(factorial(n as u64));
    for j in 0..n as i64 {
        den = &den * &HPoly::from_ints(&[1, -j]);
    }
    HRational::new(HPoly::hbar().pow(n as u32), den).expect("nonzero denominator")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{solve_general, verify_residual};
    use crate::multiindex::enumerate_weight;

    fn q(n: i64) -> HRational {
        HRational::from_int(n)
    }

    fn h() -> HRational {
        HRational::hbar()
    }

    fn idx(v: &[i32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn one_minus(k: i64) -> HRational {
        HRational::from_poly(HPoly::from_ints(&[1, -k]))
    }

    #[test]
    fn one_dim_values() {
        assert_eq!(coeff_1d(&q(3), &q(-2), 0), q(1));
        assert_eq!(coeff_1d(&q(3), &q(-2), 1), &h() * &q(3));
        assert_eq!(coeff_1d(&q(1), &q(-2), 2), &h().pow(2) / &(&q(2) * &one_minus(1)));
        assert_eq!(coeff_1d(&q(1), &q(0), 3), &h().pow(3) / &q(6));
    }

    #[test]
    fn one_dim_matches_general_solver() {
        for g in [1, 2] {
            let geom = GeometryPoint::one_dim(q(g), q(-2)).unwrap();
            let t = solve_general(&geom, 8).unwrap();
            for n in 0..=8 {
                let a = idx(&[n as i32]);
                assert_eq!(t.get(n, &a, &a), coeff_1d(&q(g), &q(-2), n), "g = {g}, n = {n}");
            }
        }
    }

    #[test]
    fn one_dim_table_matches_solver() {
        let r = HRational::from_rational(crate::algebra::rat(3, 5));
        let geom = GeometryPoint::one_dim(q(2), r.clone()).unwrap();
        let t = coeff_1d_table(&q(2), &r, 5).unwrap();
        assert!(t.differences(&solve_general(&geom, 5).unwrap()).is_empty());
        assert_eq!(t, solve_general(&geom, 5).unwrap());
    }

    #[test]
    fn gamma_values() {
        assert_eq!(cpn_gamma_coeff(0), q(1));
        assert_eq!(cpn_gamma_coeff(1), h());
        assert_eq!(cpn_gamma_coeff(2), &h().pow(2) / &(&q(2) * &one_minus(1)));
    }

    #[test]
    fn cp1_three_way() {
        for n in 0..=8 {
            let a = idx(&[n as i32]);
            let closed = cpn_closed(1, &a, &a).unwrap();
            assert_eq!(closed, cpn_gamma_coeff(n));
            assert_eq!(coeff_1d(&q(1), &q(-2), n), closed);
        }
    }

    #[test]
    fn closed_form_low_orders() {
        for i in 0..3 {
            for j in 0..3 {
                let v = cpn_closed(3, &MultiIndex::unit(3, i), &MultiIndex::unit(3, j)).unwrap();
                assert_eq!(v, if i == j { h() } else { q(0) });
            }
        }
        let z = MultiIndex::zero(2);
        assert_eq!(cpn_closed(2, &z, &z).unwrap(), q(1));
        assert!(cpn_closed(2, &idx(&[1, 0]), &idx(&[1, 1])).is_err());
    }

    #[test]
    fn cpn_oracles_agree() {
        for n_dim in 1..=3 {
            let top = if n_dim == 3 { 4 } else { 5 };
            let general = solve_general(&GeometryPoint::cpn(n_dim).unwrap(), top).unwrap();
            let closed = cpn_closed_table(n_dim, top).unwrap();
            let first = cpn_recurrence(n_dim, top, RecurrenceCoordinate::First).unwrap();
            let last = cpn_recurrence(n_dim, top, RecurrenceCoordinate::Last).unwrap();
            assert!(general.differences(&closed).is_empty(), "N = {n_dim}");
            assert!(first.differences(&closed).is_empty(), "N = {n_dim}");
            assert!(last.differences(&closed).is_empty(), "N = {n_dim}");
        }
    }

    #[test]
    fn closed_table_passes_residuals() {
        let geom = GeometryPoint::cpn(2).unwrap();
        let t = cpn_closed_table(2, 4).unwrap();
        for n in 0..=4 {
            assert!(verify_residual(&t, &geom, n).passed());
        }
    }

    #[test]
    fn gamma_form_contraction() {
        // Summing gamma(n) g_{i_1 j_1}...g_{i_n j_n} over all orderings of the
        // index tuples with multisets alpha, beta gives n! perm / (alpha! beta!).
        let n_dim = 2;
        for n in 1..=4 {
            for a in enumerate_weight(n_dim, n) {
                for b in enumerate_weight(n_dim, n) {
                    let lhs = &cpn_closed(n_dim, &a, &b).unwrap()
                        * &HRational::from_rational(
                            a.factorial_product().unwrap() * b.factorial_product().unwrap(),
                        );
                    let (ra, rb) = (a.expand(), b.expand());
                    let m = Matrix::from_fn(n, n, |x, y| q(i64::from(ra[x] == rb[y])));
                    let perm = crate::permanent::plus_det(&m).unwrap();
                    let nfact = HRational::from_rational(factorial(n as u64));
                    assert_eq!(lhs, &(&cpn_gamma_coeff(n) * &nfact) * &perm);
                }
            }
        }
    }

    #[test]
    fn order2_flat_and_cp2() {
        let flat = GeometryPoint::custom(
            vec![vec![q(1), q(0)], vec![q(0), q(1)]],
            vec![vec![vec![vec![q(0); 2]; 2]; 2]; 2],
        )
        .unwrap();
        let t = coeff_2d_order2(&flat).unwrap();
        assert_eq!(t[0][0], &h().pow(2) / &q(2));
        assert_eq!(t[1][1], h().pow(2));
        assert_eq!(t[2][2], &h().pow(2) / &q(2));
        assert!(t[0][1].is_zero() && t[1][0].is_zero() && t[0][2].is_zero());
        for geom in [flat, GeometryPoint::cpn(2).unwrap()] {
            let t = coeff_2d_order2(&geom).unwrap();
            let general = solve_general(&geom, 2).unwrap();
            for (r, a) in ORDER2_INDICES.iter().enumerate() {
                for (c, b) in ORDER2_INDICES.iter().enumerate() {
                    assert_eq!(t[r][c], general.get(2, &idx(a), &idx(b)));
                }
            }
        }
    }

    #[test]
    fn order2_swap_symmetry_with_general_metric() {
        // Swap-symmetric data: g11 = g22, R invariant under 1 <-> 2.
        let m = vec![vec![q(3), q(1)], vec![q(1), q(3)]];
        let geom = GeometryPoint::custom(m, GeometryPoint::cpn(2).unwrap().curvature_nested()).unwrap();
        let t = coeff_2d_order2(&geom).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(t[r][c], t[2 - r][2 - c]);
            }
        }
        assert!(coeff_2d_order2(&GeometryPoint::cpn(3).unwrap()).is_err());
    }

    #[test]
    fn order2_matches_general_with_nontrivial_metric() {
        let m = vec![vec![q(2), q(1)], vec![q(1), q(3)]];
        let flat = vec![vec![vec![vec![q(0); 2]; 2]; 2]; 2];
        let geom = GeometryPoint::custom(m, flat).unwrap();
        let t = coeff_2d_order2(&geom).unwrap();
        let general = solve_general(&geom, 2).unwrap();
        for (r, a) in ORDER2_INDICES.iter().enumerate() {
            for (c, b) in ORDER2_INDICES.iter().enumerate() {
                assert_eq!(t[r][c], general.get(2, &idx(a), &idx(b)));
            }
        }
    }
}

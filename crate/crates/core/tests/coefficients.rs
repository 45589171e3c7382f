use kstar_core::algebra::{rat, HPoly};
use kstar_core::coeffs::{
    coeff_1d, cpn_closed, cpn_closed_table, cpn_gamma_coeff, cpn_recurrence, solve_general, verify_residual,
    CoeffError, RecurrenceCoordinate,
};
use kstar_core::{enumerate_weight, CoefficientTable, GeometryPoint, HRational, MultiIndex};
use proptest::prelude::*;

fn q(n: i64) -> HRational {
    HRational::from_int(n)
}

#[test]
fn spec_examples_cp1_order3() {
    let t = cpn_closed_table(1, 3).unwrap();
    let h = HRational::hbar();
    let one_minus = |k: i64| HRational::from_poly(HPoly::from_ints(&[1, -k]));
    let a = MultiIndex::new(vec![3]);
    let expected = &h.pow(3) / &(&(&q(6) * &one_minus(1)) * &one_minus(2));
    assert_eq!(t.get(3, &a, &a), expected);
    assert_eq!(coeff_1d(&q(1), &q(-2), 3), expected);
}

#[test]
fn recurrence_is_independent_of_the_coordinate() {
    for n_dim in 1..=3 {
        let first = cpn_recurrence(n_dim, 4, RecurrenceCoordinate::First).unwrap();
        let last = cpn_recurrence(n_dim, 4, RecurrenceCoordinate::Last).unwrap();
        assert!(first.differences(&last).is_empty());
    }
}

#[test]
fn grassmann_2_3_is_solvable_and_consistent() {
    let geom = GeometryPoint::grassmann(2, 3).unwrap();
    let t = solve_general(&geom, 2).unwrap();
    for n in 0..=2 {
        assert!(verify_residual(&t, &geom, n).passed());
    }
}

#[test]
fn scaled_cpn_metric_still_solves() {
    // Metric 2*identity with the curvature raised accordingly.
    let base = GeometryPoint::cpn(2).unwrap();
    let lowered: Vec<Vec<Vec<Vec<HRational>>>> = base
        .curvature_nested()
        .into_iter()
        .map(|a| a.into_iter().map(|b| b.into_iter().map(|c| c.into_iter().map(|x| &x * &q(8)).collect()).collect()).collect())
        .collect();
    let metric = vec![vec![q(2), q(0)], vec![q(0), q(2)]];
    let geom = GeometryPoint::custom_from_lowered(metric, lowered).unwrap();
    let t = solve_general(&geom, 3).unwrap();
    for n in 0..=3 {
        assert!(verify_residual(&t, &geom, n).passed());
    }
    let a = MultiIndex::new(vec![1, 0]);
    assert_eq!(t.get(1, &a, &a), &HRational::hbar() * &q(2));
}

#[test]
fn closed_form_rejects_mismatched_weights() {
    let err = cpn_closed(2, &MultiIndex::new(vec![2, 0]), &MultiIndex::new(vec![1, 0])).unwrap_err();
    assert!(matches!(err, CoeffError::IndexMismatch { .. }));
}

#[test]
fn json_round_trip_of_solver_output() {
    let geom = GeometryPoint::one_dim(q(2), HRational::from_rational(rat(3, 5))).unwrap();
    let t = solve_general(&geom, 4).unwrap();
    let back = CoefficientTable::from_json(&t.to_json()).unwrap();
    assert_eq!(back, t);
    assert_eq!(back.to_json(), t.to_json());
}

proptest! {
    #[test]
    fn invalid_lookups_are_zero(a in proptest::collection::vec(-3i32..4, 2), b in proptest::collection::vec(-3i32..4, 2), n in 0usize..5) {
        let t = cpn_closed_table(2, 4).unwrap();
        let (a, b) = (MultiIndex::new(a), MultiIndex::new(b));
        let v = t.get(n, &a, &b);
        if !a.is_valid() || !b.is_valid() || a.weight() != n as i64 || b.weight() != n as i64 {
            prop_assert!(v.is_zero());
        }
    }

    #[test]
    fn gamma_form_matches_closed_form_in_one_dimension(n in 0usize..9) {
        let a = MultiIndex::new(vec![n as i32]);
        prop_assert_eq!(cpn_closed(1, &a, &a).unwrap(), cpn_gamma_coeff(n));
    }

    #[test]
    fn one_dim_closed_form_matches_solver(g in 1i64..4, num in -4i64..5, den in 1i64..4) {
        let r = HRational::from_rational(rat(num, den));
        let geom = GeometryPoint::one_dim(q(g), r.clone()).unwrap();
        let t = solve_general(&geom, 5).unwrap();
        for n in 0..=5 {
            let a = MultiIndex::new(vec![n as i32]);
            prop_assert_eq!(t.get(n, &a, &a), coeff_1d(&q(g), &r, n));
        }
    }
}

#[test]
fn closed_form_vanishes_off_the_diagonal_at_the_origin() {
    for n in 1..=4 {
        for a in enumerate_weight(3, n) {
            for b in enumerate_weight(3, n) {
                if a != b {
                    assert!(cpn_closed(3, &a, &b).unwrap().is_zero());
                }
            }
        }
    }
}

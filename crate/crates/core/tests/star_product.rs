use kstar_core::chart::Monomial;
use kstar_core::coeffs::cpn_closed_table;
use kstar_core::star::{
    associativity_defect, check_associativity, check_poisson, d_antiholo, d_holo, hbar_valuation, poisson_bivector,
};
use kstar_core::{ChartFunction, ChartMetric, HRational, HSeries, StarProduct, ZPoly};
use proptest::prelude::*;

type F = ChartFunction<HRational>;

fn monomial(dim: usize, exps: &[u32]) -> F {
    F::polynomial(dim, ZPoly::monomial(Monomial::from_exponents(exps), HRational::one()))
}

fn exps(dim: usize, max: u32) -> impl Strategy<Value = Vec<u32>> {
    proptest::collection::vec(0..=max, 2 * dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn separation_of_variables_cp2(h in exps(2, 2), a in exps(2, 2), f in exps(2, 2)) {
        let sp = StarProduct::<HRational>::from_table(&cpn_closed_table(2, 3).unwrap(), 3).unwrap();
        let hol = monomial(2, &[h[0], h[1], 0, 0]);
        let anti = monomial(2, &[0, 0, a[2], a[3]]);
        let f = monomial(2, &f).div_s_pow(1);
        prop_assert_eq!(sp.star(&hol, &f).value, hol.mul(&f));
        prop_assert_eq!(sp.star(&f, &anti).value, f.mul(&anti));
    }

    #[test]
    fn d_operators_commute(e in exps(2, 3), k in 0u32..3) {
        let cm = ChartMetric::<HRational>::cpn(2);
        let f = monomial(2, &e).div_s_pow(k);
        prop_assert_eq!(d_holo(&d_holo(&f, 0, &cm), 1, &cm), d_holo(&d_holo(&f, 1, &cm), 0, &cm));
        prop_assert_eq!(d_antiholo(&d_antiholo(&f, 0, &cm), 1, &cm), d_antiholo(&d_antiholo(&f, 1, &cm), 0, &cm));
    }

    #[test]
    fn poisson_limit_cp2(a in exps(2, 2), b in exps(2, 2)) {
        let sp = StarProduct::<HRational>::from_table(&cpn_closed_table(2, 1).unwrap(), 1).unwrap();
        let (f, g) = (monomial(2, &a), monomial(2, &b));
        prop_assert!(check_poisson(&f, &g, &sp).unwrap().passed);
    }
}

#[test]
fn poisson_bivector_is_antisymmetric() {
    let cm = ChartMetric::<HRational>::cpn(2);
    let f = monomial(2, &[1, 0, 2, 1]);
    let g = monomial(2, &[0, 2, 1, 0]);
    assert_eq!(poisson_bivector(&f, &g, &cm), poisson_bivector(&g, &f, &cm).neg());
}

#[test]
fn associativity_cp1_through_order_four() {
    let table = cpn_closed_table(1, 4).unwrap();
    let sp = StarProduct::<HSeries>::from_table(&table, 4).unwrap();
    let lift = |f: &F| f.map_coeffs(|c| HSeries::from_hrational(c, 4).unwrap());
    let fs: Vec<_> = [[0, 1], [1, 0], [1, 1], [0, 2], [2, 1]].iter().map(|e| lift(&monomial(1, e))).collect();
    for f in &fs {
        for g in &fs {
            assert!(check_associativity(f, g, &fs[0], &sp).unwrap().passed);
        }
    }
}

#[test]
fn truncation_breaks_associativity_only_past_the_order() {
    // With exact scalars the defect of the order-2 truncation starts at h^3.
    let table = cpn_closed_table(1, 2).unwrap();
    let sp = StarProduct::<HRational>::from_table(&table, 2).unwrap();
    let f = monomial(1, &[0, 2]).div_s_pow(1);
    let g = monomial(1, &[2, 0]).div_s_pow(1);
    let defect = associativity_defect(&f, &g, &f, &sp);
    assert!(!defect.is_zero());
    assert_eq!(hbar_valuation(&defect), Some(3));
    assert!(check_associativity(&f, &g, &f, &sp).unwrap().passed);
}

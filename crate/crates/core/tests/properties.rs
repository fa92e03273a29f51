use num_complex::Complex64;
use proptest::prelude::*;
use qmono::linalg::{c, ComplexMatrix};
use qmono::measures::{
    self, coa_two_qubit, concurrence_pure, negativity, negativity_pure_schmidt,
    wootters_concurrence,
};
use qmono::monogamy::{self, EvalSpec, InequalityId, Prepared, StateAnalysis};
use qmono::qstate::{schmidt_rank, Bipartition, BlockGrouping, State};
use qmono::states;

fn cut(s: &str, n: usize) -> Bipartition {
    Bipartition::parse(s, &(0..n).collect::<Vec<_>>()).unwrap()
}

fn unitary(theta: f64, phi: f64, lam: f64) -> ComplexMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    let e = |x: f64| Complex64::from_polar(1.0, x);
    ComplexMatrix::from_row_slice(
        2,
        2,
        &[c(co, 0.0), -e(lam) * s, e(phi) * s, e(phi + lam) * co],
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wootters_matches_two_qubit_pure_formula(seed in any::<u64>()) {
        let s = states::haar_random_pure(2, seed).unwrap();
        let a = s.amplitudes();
        let direct = 2.0 * (a[0] * a[3] - a[1] * a[2]).norm();
        let w = wootters_concurrence(&s.density()).unwrap();
        prop_assert!((w - direct).abs() < 1e-10);
        prop_assert!((concurrence_pure(&s, &cut("0", 2)).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn coa_dominates_concurrence(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = states::random_mixed(2, rank, seed).unwrap();
        let ca = coa_two_qubit(&rho).unwrap();
        let cc = wootters_concurrence(&rho).unwrap();
        prop_assert!(ca >= cc - 1e-12);
        prop_assert!(ca <= 1.0 + 1e-12);
    }

    #[test]
    fn reduced_coa_bounded_by_cut_concurrence(seed in any::<u64>()) {
        // three-qubit pure state: C_a(rho_AB) <= C(A|BC)
        let s = states::haar_random_pure(3, seed).unwrap();
        let ca = coa_two_qubit(&s.reduced(&[0, 1]).unwrap()).unwrap();
        let c_abc = concurrence_pure(&s, &cut("0", 3)).unwrap();
        prop_assert!(ca <= c_abc + 1e-10);
    }

    #[test]
    fn negativity_dominates_concurrence(seed in any::<u64>(), n in 2usize..=4) {
        let s = states::haar_random_pure(n, seed).unwrap();
        let k = cut("0", n);
        let st: State = s.clone().into();
        let neg = negativity(&st, &k).unwrap();
        let con = concurrence_pure(&s, &k).unwrap();
        prop_assert!(neg >= con - 1e-10);
        prop_assert!((neg - negativity_pure_schmidt(&s, &k).unwrap()).abs() < 1e-9);
        // a single qubit side has Schmidt rank at most 2
        prop_assert!(schmidt_rank(&s, &k, 1e-10).unwrap() <= 2);
        prop_assert!((neg - con).abs() < 1e-9);
    }

    #[test]
    fn negativity_exceeds_concurrence_at_higher_rank(seed in any::<u64>()) {
        let s = states::haar_random_pure(4, seed).unwrap();
        let k = cut("0,1|2,3", 4);
        let st: State = s.clone().into();
        let neg = negativity(&st, &k).unwrap();
        let con = concurrence_pure(&s, &k).unwrap();
        prop_assert!(schmidt_rank(&s, &k, 1e-10).unwrap() > 2);
        prop_assert!(neg > con);
    }

    #[test]
    fn local_unitaries_leave_measures_unchanged(
        seed in any::<u64>(),
        q in 0usize..3,
        angles in (0.0..6.3f64, 0.0..6.3f64, 0.0..6.3f64),
    ) {
        let s = states::haar_random_pure(3, seed).unwrap();
        let t = s.apply_single(q, &unitary(angles.0, angles.1, angles.2)).unwrap();
        for side in ["0", "1", "2"] {
            let k = cut(side, 3);
            prop_assert!((concurrence_pure(&s, &k).unwrap() - concurrence_pure(&t, &k).unwrap()).abs() < 1e-10);
        }
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let a = s.reduced(&[i, j]).unwrap();
            let b = t.reduced(&[i, j]).unwrap();
            prop_assert!((coa_two_qubit(&a).unwrap() - coa_two_qubit(&b).unwrap()).abs() < 1e-9);
            prop_assert!((wootters_concurrence(&a).unwrap() - wootters_concurrence(&b).unwrap()).abs() < 1e-9);
            prop_assert!((measures::linear_entropy(&a) - measures::linear_entropy(&b)).abs() < 1e-10);
        }
    }

    #[test]
    fn gsd_phase_does_not_matter(
        raw in prop::array::uniform5(0.01..1.0f64),
        phi in 0.0..6.3f64,
        alpha in 0.0..=2.0f64,
    ) {
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        let l = raw.map(|x| x / norm);
        let a = states::gsd_three_qubit(l, 0.0).unwrap();
        let b = states::gsd_three_qubit(l, phi).unwrap();
        let g = BlockGrouping::singletons(0, &[0, 1, 2]).unwrap();
        let ra = monogamy::theorem1_bound(&a, &g, alpha).unwrap();
        let rb = monogamy::theorem1_bound(&b, &g, alpha).unwrap();
        prop_assert!((ra.lhs - rb.lhs).abs() < 1e-10);
        prop_assert!((ra.rhs - rb.rhs).abs() < 1e-9);
    }

    #[test]
    fn theorem1_at_two_equals_dual_rhs(seed in any::<u64>(), n in 3usize..=4) {
        let s = states::haar_random_pure(n, seed).unwrap();
        let an = StateAnalysis::new(&s).unwrap();
        let spec = EvalSpec::default();
        let t1 = Prepared::new(&an, InequalityId::Thm1, &spec).unwrap().eval(2.0).unwrap();
        let dual = Prepared::new(&an, InequalityId::DualCoa, &spec).unwrap().eval(2.0).unwrap();
        prop_assert!((t1.rhs - dual.rhs).abs() < 1e-12);
        prop_assert!((t1.lhs - dual.lhs).abs() < 1e-12);
        prop_assert!(dual.holds);
    }

    #[test]
    fn ckw_holds_on_random_states(seed in any::<u64>(), n in 3usize..=5, alpha in 2.0..4.0f64) {
        let s = states::haar_random_pure(n, seed).unwrap();
        let r = monogamy::ckw_check(&s, 0, alpha).unwrap();
        prop_assert!(r.holds, "{r}");
        let r = monogamy::negativity_monogamy_check(&s, 0, alpha).unwrap();
        prop_assert!(r.holds, "{r}");
    }

    #[test]
    fn weighted_sum_at_two_is_sum_of_squares(seed in any::<u64>()) {
        let s = states::haar_random_pure(3, seed).unwrap();
        let an = StateAnalysis::new(&s).unwrap();
        let w = an.weighted_blocks(&BlockGrouping::singletons(0, &[0, 1, 2]).unwrap()).unwrap();
        prop_assert!(w.values.iter().all(|&v| (0.0..=1.0 + 1e-12).contains(&v)));
        prop_assert!((w.weighted_sum(2.0) - w.values.iter().map(|v| v * v).sum::<f64>()).abs() < 1e-12);
    }
}

#[test]
fn pure_state_equals_its_density_in_measures() {
    let s = states::haar_random_pure(3, 99).unwrap();
    let k = cut("0,1|2", 3);
    let pure: State = s.clone().into();
    let mixed: State = s.density().into();
    let a = negativity(&pure, &k).unwrap();
    let b = negativity(&mixed, &k).unwrap();
    assert!((a - b).abs() < 1e-12);
}

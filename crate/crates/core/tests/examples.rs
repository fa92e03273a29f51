use approx::assert_abs_diff_eq;
use qmono::measures::{self, coa_two_qubit, negativity, wootters_concurrence};
use qmono::monogamy::{self, EvalSpec, InequalityId, Prepared, StateAnalysis};
use qmono::qstate::{Bipartition, BlockGrouping, State};
use qmono::states;

fn grid() -> impl Iterator<Item = f64> {
    (0..=200).map(|i| i as f64 / 100.0)
}

fn cut(s: &str, n: usize) -> Bipartition {
    Bipartition::parse(s, &(0..n).collect::<Vec<_>>()).unwrap()
}

#[test]
fn gsd_uniform_weights() {
    let l = 1.0 / 5f64.sqrt();
    let s = states::gsd_three_qubit([l; 5], 0.0).unwrap();
    let g = BlockGrouping::singletons(0, &[0, 1, 2]).unwrap();
    let c_abc = 2.0 * 3f64.sqrt() / 5.0;
    let ca = 2.0 * 2f64.sqrt() / 5.0;
    for a in grid() {
        let r = monogamy::theorem1_bound(&s, &g, a).unwrap();
        assert_abs_diff_eq!(r.lhs, c_abc.powf(a), epsilon = 1e-12);
        assert_abs_diff_eq!(r.rhs, (1.0 + a / 2.0) * ca.powf(a), epsilon = 1e-12);
        assert!(r.holds && r.precondition_met);
    }
    let r = monogamy::theorem1_bound(&s, &g, 1.0).unwrap();
    assert_abs_diff_eq!(r.lhs, 0.6928203230275509, epsilon = 1e-12);
    assert_abs_diff_eq!(r.rhs, 0.848528137423857, epsilon = 1e-12);
    assert_abs_diff_eq!(
        monogamy::grouped_coa_sq(&s, 0, &[1, 2]).unwrap(),
        16.0 / 25.0,
        epsilon = 1e-12
    );
}

#[test]
fn gsd_closed_forms_on_random_parameters() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    for _ in 0..1000 {
        let mut l: Vec<f64> = (0..5).map(|_| rng.random_range(0.0..1.0)).collect();
        let n = l.iter().map(|x| x * x).sum::<f64>().sqrt();
        l.iter_mut().for_each(|x| *x /= n);
        let phi = rng.random_range(0.0..std::f64::consts::TAU);
        let s = states::gsd_three_qubit([l[0], l[1], l[2], l[3], l[4]], phi).unwrap();
        let c = measures::concurrence_pure(&s, &cut("0|1,2", 3)).unwrap();
        assert_abs_diff_eq!(
            c,
            2.0 * l[0] * (l[2] * l[2] + l[3] * l[3] + l[4] * l[4]).sqrt(),
            epsilon = 1e-9
        );
        let ab = s.reduced(&[0, 1]).unwrap();
        let ac = s.reduced(&[0, 2]).unwrap();
        // |110> carries the A-B coherence and |101> the A-C one
        assert_abs_diff_eq!(
            wootters_concurrence(&ab).unwrap(),
            2.0 * l[0] * l[3],
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            wootters_concurrence(&ac).unwrap(),
            2.0 * l[0] * l[2],
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            coa_two_qubit(&ab).unwrap(),
            2.0 * l[0] * (l[3] * l[3] + l[4] * l[4]).sqrt(),
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            coa_two_qubit(&ac).unwrap(),
            2.0 * l[0] * (l[2] * l[2] + l[4] * l[4]).sqrt(),
            epsilon = 1e-9
        );
    }
}

#[test]
fn four_qubit_two_term_cut() {
    let s = states::example2_state();
    let analysis = StateAnalysis::new(&s).unwrap();
    assert_abs_diff_eq!(analysis.pair_coa(0, 1).unwrap(), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(
        analysis.cut_concurrence(&[0, 1]).unwrap(),
        2.0 * 2f64.sqrt() / 3.0,
        epsilon = 1e-12
    );
    let spec = EvalSpec::default();
    let lower = Prepared::new(&analysis, InequalityId::Thm2, &spec).unwrap();
    let upper = Prepared::new(&analysis, InequalityId::Thm3, &spec).unwrap();
    for a in grid() {
        let lo = lower.eval(a).unwrap();
        let up = upper.eval(a).unwrap();
        assert_abs_diff_eq!(lo.rhs, (2.0f64 / 3.0).powf(a), epsilon = 1e-9);
        assert_abs_diff_eq!(
            up.rhs,
            (2.0 * 2f64.sqrt() / 3.0).powf(a) + a / 2.0 * (2.0f64 / 3.0).powf(a),
            epsilon = 1e-9
        );
        assert!(lo.holds && up.holds);
    }
    let lo = lower.eval(2.0).unwrap();
    assert_abs_diff_eq!(lo.lhs, 8.0 / 9.0, epsilon = 1e-12);
    assert!(lo.lhs >= 4.0 / 9.0);
    assert_abs_diff_eq!(upper.eval(2.0).unwrap().rhs, 4.0 / 3.0, epsilon = 1e-12);
}

#[test]
fn bell_pair_times_product_regression() {
    let bell = states::ghz(2).unwrap();
    let s = bell.kron(&states::product(2).unwrap()).unwrap();
    for a in [0.0, 0.5, 1.0, 2.0] {
        let r = monogamy::theorem2_lower(&s, a, &EvalSpec::default()).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.rhs <= 1e-12);
        assert!(r.holds);
    }
    let p = states::product(4).unwrap();
    let r = monogamy::theorem3_upper(&p, 1.0, &EvalSpec::default()).unwrap();
    assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
}

#[test]
fn six_qubit_pair_tables() {
    let e3 = states::example3_state();
    let e4 = states::example4_state();
    let a3 = StateAnalysis::new(&e3).unwrap();
    let a4 = StateAnalysis::new(&e4).unwrap();
    assert_abs_diff_eq!(a3.pair_concurrence(0, 2).unwrap(), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(a3.pair_coa(0, 2).unwrap(), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(a4.pair_concurrence(2, 3).unwrap(), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(a4.pair_coa(2, 3).unwrap(), 1.0, epsilon = 1e-12);
    for (i, j) in [
        (0, 1),
        (0, 3),
        (0, 4),
        (0, 5),
        (1, 2),
        (1, 3),
        (2, 4),
        (2, 5),
    ] {
        assert_abs_diff_eq!(a3.pair_concurrence(i, j).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a3.pair_coa(i, j).unwrap(), 0.0, epsilon = 1e-12);
    }
    for (i, j) in [(0, 1), (0, 2), (0, 3), (1, 3), (1, 4), (2, 4), (2, 5)] {
        assert_abs_diff_eq!(a4.pair_concurrence(i, j).unwrap(), 0.0, epsilon = 1e-12);
    }
}

#[test]
fn six_qubit_corollary_bounds() {
    let spec = EvalSpec::default();
    let e3 = states::example3_state();
    let e4 = states::example4_state();
    let c1 = monogamy::corollary1_lower(&e3, 1.0, &spec).unwrap();
    let (l3, u3) = monogamy::corollary2_bounds(&e3, 1.0, &spec).unwrap();
    // the Bell pair sits inside ABC_1, so the cut carries no entanglement
    assert_eq!(c1.lhs, 0.0);
    assert_abs_diff_eq!(l3.rhs, 0.0, epsilon = 1e-12);
    // J_{C_1} contains C_a(C_1 A) = 1 and cancels the Theorem-2 term
    assert_abs_diff_eq!(c1.rhs, 0.0, epsilon = 1e-12);
    assert!(c1.holds && l3.holds && u3.holds);
    let c1 = monogamy::corollary1_lower(&e4, 1.0, &spec).unwrap();
    let (l4, u4) = monogamy::corollary2_bounds(&e4, 1.0, &spec).unwrap();
    assert_abs_diff_eq!(c1.rhs, -1.0, epsilon = 1e-12);
    assert!(!c1.precondition_met);
    assert_abs_diff_eq!(l4.rhs, 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(l4.lhs, 1.0, epsilon = 1e-12);
    assert!(l4.precondition_met && l4.holds && u4.holds);
    let p = states::product(6).unwrap();
    let (_, up) = monogamy::corollary2_bounds(&p, 0.7, &spec).unwrap();
    assert_eq!(up.rhs, 0.0);
}

#[test]
fn w_class_negativity() {
    let l = [0.75, 0.5, 2f64.sqrt() / 4.0, 0.25];
    let s = states::wclass_four_qubit(l).unwrap();
    let st: State = s.clone().into();
    let n = negativity(&st, &cut("0,1|2,3", 4)).unwrap();
    assert_abs_diff_eq!(n, 39f64.sqrt() / 8.0, epsilon = 1e-12);
    let analysis = StateAnalysis::new(&s).unwrap();
    assert_abs_diff_eq!(
        measures::cren_two_qubit(&s.reduced(&[0, 2]).unwrap()).unwrap(),
        3.0 * 2f64.sqrt() / 8.0,
        epsilon = 1e-12
    );
    assert_abs_diff_eq!(analysis.pair_coa(0, 1).unwrap(), 0.75, epsilon = 1e-12);
    assert_abs_diff_eq!(
        analysis.pair_concurrence(0, 1).unwrap(),
        0.75,
        epsilon = 1e-12
    );

    let spec = EvalSpec::default();
    let thm5 = Prepared::new(&analysis, InequalityId::Thm5, &spec).unwrap();
    let thm6 = Prepared::new(&analysis, InequalityId::Thm6, &spec).unwrap();
    let j_a = &thm5.weighted()[0];
    for a in grid() {
        let want = 0.75f64.powf(a)
            + a / 2.0 * (3.0 * 2f64.sqrt() / 8.0).powf(a)
            + (a / 2.0).powi(2) * 0.375f64.powf(a);
        assert_abs_diff_eq!(j_a.weighted_sum(a), want, epsilon = 1e-9);
        let r6 = thm6.eval(a).unwrap();
        assert_eq!(r6.schmidt_rank, Some(2));
        assert!(r6.holds);
    }
    assert_abs_diff_eq!(
        thm5.theorem5_difference(2.0).unwrap(),
        39.0 / 64.0,
        epsilon = 1e-12
    );
    let r = thm5.eval(2.0).unwrap();
    assert!(r.holds);
    assert_abs_diff_eq!(r.lhs, 39.0 / 64.0, epsilon = 1e-12);
    // J'_B uses B's own pairs, so the max-form bound is 63/64 - 48/64
    assert_abs_diff_eq!(r.rhs, 15.0 / 64.0, epsilon = 1e-12);

    let r = monogamy::theorem4_bound(
        &s,
        &BlockGrouping::singletons(0, &[0, 1, 2, 3]).unwrap(),
        2.0,
    )
    .unwrap();
    assert_abs_diff_eq!(r.lhs, 4.0 * 0.5625 * (1.0 - 0.5625), epsilon = 1e-12);
    assert!(r.holds);

    let sym = states::wclass_four_qubit([0.5; 4]).unwrap();
    let an = StateAnalysis::new(&sym).unwrap();
    for (i, j) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
        assert_abs_diff_eq!(an.pair_concurrence(i, j).unwrap(), 0.5, epsilon = 1e-12);
    }
}

#[test]
fn ghz4_theorem6() {
    let s = states::ghz(4).unwrap();
    let r = monogamy::theorem6_upper(&s, 2.0, &EvalSpec::default()).unwrap();
    assert_eq!(r.schmidt_rank, Some(2));
    assert_abs_diff_eq!(r.lhs, 1.0, epsilon = 1e-12);
    assert!(r.holds);
    let p = states::product(4).unwrap();
    let r = monogamy::theorem6_upper(&p, 1.0, &EvalSpec::default()).unwrap();
    assert_eq!(r.schmidt_rank, Some(1));
    assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
}

#[test]
fn negativity_checks_on_small_states() {
    let ghz = states::ghz(3).unwrap();
    let w = states::w(3).unwrap();
    let r = monogamy::negativity_monogamy_check(&ghz, 0, 2.0).unwrap();
    assert_abs_diff_eq!(r.lhs, 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(r.rhs, 0.0, epsilon = 1e-12);
    let g = BlockGrouping::singletons(0, &[0, 1, 2]).unwrap();
    let r = monogamy::negativity_dual_check(&w, &g).unwrap();
    assert_abs_diff_eq!(r.lhs, 8.0 / 9.0, epsilon = 1e-12);
    assert_abs_diff_eq!(r.rhs, 8.0 / 9.0, epsilon = 1e-12);
    assert!(r.holds);
}

#[test]
fn theorem5_rejects_zero_exponent() {
    let s = states::example2_state();
    assert!(matches!(
        monogamy::theorem5_lower(&s, 0.0, &EvalSpec::default()),
        Err(qmono::Error::BadAlpha { .. })
    ));
    let p = states::product(4).unwrap();
    assert!(
        monogamy::theorem5_lower(&p, 1.0, &EvalSpec::default())
            .unwrap()
            .holds
    );
}

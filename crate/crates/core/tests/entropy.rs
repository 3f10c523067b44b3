use hullmetry::entropy::*;
use hullmetry::fixtures;
use proptest::prelude::*;

fn profile(name: &str) -> ProfileScenario {
    ProfileScenario::from_json_str(fixtures::profile_json(name).unwrap()).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn canonical_profiles() {
    let verdicts: Vec<bool> = ["case1", "case2", "case3"]
        .iter()
        .map(|n| {
            let s = profile(n);
            l_existence_report(&s.profile().unwrap(), s.delta, 1.0).unwrap().l_exists
        })
        .collect();
    assert_eq!(verdicts, [true, true, false]);
}

#[test]
fn case_two_value_is_twice_the_constant() {
    let s = profile("case2");
    for c in [1.0, 0.5, 3.0] {
        let r = l_existence_report(&s.profile().unwrap(), s.delta, c).unwrap();
        assert!((r.verdict.value().unwrap() - 2.0 * c).abs() < 1e-3 * c);
        assert_eq!(r.analytic, Some(2.0 * c));
    }
}

#[test]
fn case_three_locates_the_singularity() {
    let s = profile("case3");
    let r = l_existence_report(&s.profile().unwrap(), s.delta, 1.0).unwrap();
    match r.verdict.diagnosis {
        Diagnosis::InteriorSingularity { eps } => assert!((eps - (-1f64).exp()).abs() < 1e-12),
        d => panic!("unexpected diagnosis {d:?}"),
    }
    assert!(!r.verdict.quadrature_trace.is_empty());
}

#[test]
fn case_three_converges_below_the_singularity() {
    let f = RatioFunction::new(RatioKind::Log3OverLoglog, 1.0);
    let v = integral_exists(&f, 0.3).unwrap();
    assert!(v.converges, "{:?}", v.diagnosis);
    for delta in [0.5, 1.0, 2.0] {
        assert!(!integral_exists(&f, delta).unwrap().converges, "delta {delta}");
    }
}

#[test]
fn log_sq_matches_antiderivative() {
    let f = RatioFunction::new(RatioKind::LogSq, 1.0);
    for delta in [0.1, 0.5, 1.0, 2.0] {
        let v = integral_exists(&f, delta).unwrap().value().unwrap();
        assert!(rel(v, log_sq_integral(delta)) < 1e-3, "delta {delta}: {v}");
    }
}

#[test]
fn hull_profile_is_idempotent_on_case_one() {
    let p = EntropyProfile::plain(3.0, 1.0).unwrap();
    let h = hull_profile(&p).unwrap();
    assert_eq!(h, p);
    assert_eq!(hull_profile(&h).unwrap(), h);
}

#[test]
fn unlisted_regimes_are_rejected() {
    for (chi, psi) in [(2.0, -2.0), (2.0, -2.5), (2.0, -5.0)] {
        let p = EntropyProfile::plain(chi, psi).unwrap();
        assert!(l_existence_report(&p, 1.0, 1.0).is_err(), "({chi}, {psi})");
    }
    assert!(EntropyProfile::plain(1.0, 0.0).is_err());
}

#[test]
fn constants_are_labelled() {
    assert_eq!(RatioFunction::new(RatioKind::Constant, 1.0).constant_label, ConstantLabel::C3);
    assert_eq!(RatioFunction::new(RatioKind::LogSq, 1.0).constant_label, ConstantLabel::C4);
    assert_eq!(RatioFunction::new(RatioKind::Log3OverLoglog, 1.0).constant_label, ConstantLabel::C5);
}

#[test]
fn verdicts_are_stable_under_a_larger_budget() {
    for name in ["case1", "case2", "case3"] {
        let s = profile(name);
        let f = ratio_bound(&s.profile().unwrap(), 1.0).unwrap();
        let a = integral_exists_with(&f, s.delta, DEFAULT_BUDGET).unwrap();
        let b = integral_exists_with(&f, s.delta, 2 * DEFAULT_BUDGET).unwrap();
        assert!(a.converges || !b.converges, "{name} flipped to converging");
        assert_eq!(a.converges, b.converges, "{name}");
    }
}

#[test]
fn converged_values_survive_one_more_level() {
    for kind in [RatioKind::Constant, RatioKind::LogSq] {
        let f = RatioFunction::new(kind, 1.0);
        let v = integral_exists(&f, 1.0).unwrap();
        let w = integral_exists_with(&f, 1.0, DEFAULT_BUDGET + 1).unwrap();
        assert!(rel(v.value().unwrap(), w.value().unwrap()) <= CONVERGENCE_TOL);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn constant_kind_is_c_delta(c in 0.01..50.0f64, delta in 0.01..20.0f64) {
        let v = integral_exists(&RatioFunction::new(RatioKind::Constant, c), delta).unwrap();
        prop_assert!(rel(v.value().unwrap(), c * delta) < 1e-6);
    }

    #[test]
    fn values_scale_with_the_constant(c in 0.01..50.0f64, delta in 0.05..3.0f64) {
        let one = integral_exists(&RatioFunction::new(RatioKind::LogSq, 1.0), delta).unwrap().value().unwrap();
        let v = integral_exists(&RatioFunction::new(RatioKind::LogSq, c), delta).unwrap().value().unwrap();
        prop_assert!(rel(v, c * one) < 1e-6);
    }

    #[test]
    fn constants_never_change_verdicts(c in 0.01..50.0f64) {
        for name in ["case1", "case2", "case3"] {
            let s = profile(name);
            let a = l_existence_report(&s.profile().unwrap(), s.delta, 1.0).unwrap().l_exists;
            let b = l_existence_report(&s.profile().unwrap(), s.delta, c).unwrap().l_exists;
            prop_assert_eq!(a, b);
        }
    }
}

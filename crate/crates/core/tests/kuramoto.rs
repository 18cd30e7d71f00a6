mod common;

use std::f64::consts::PI;

use common::*;
use mesostab::kuramoto::{
    classify_stability, find_equilibrium, jacobian, rotating_frame_residual, solve_equilibrium,
    spanning_phase_condition, KuramotoSystem, NewtonOptions, PhaseState, StabilityVerdict,
};
use proptest::prelude::*;
use rand::Rng;

fn system_strategy() -> impl Strategy<Value = (KuramotoSystem, PhaseState)> {
    (2usize..=6, any::<u64>()).prop_map(|(n, seed)| {
        let mut rng = rng(seed);
        let sys = random_kuramoto(&mut rng, n);
        let x = PhaseState::new((0..n).map(|_| rng.gen_range(0.0..2.0 * PI)).collect());
        (sys, x)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn residual_sums_to_zero((sys, x) in system_strategy()) {
        let r = rotating_frame_residual(&sys, &x).unwrap();
        prop_assert!(r.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn jacobian_is_gauge_invariant((sys, x) in system_strategy(), c in -10.0f64..10.0) {
        let a = jacobian(&sys, &x).unwrap();
        let b = jacobian(&sys, &x.shifted(c)).unwrap();
        for i in 0..sys.len() {
            for j in 0..sys.len() {
                prop_assert!((a.get(i, j) - b.get(i, j)).abs() <= 1e-9 * a.max_abs().max(1.0));
            }
        }
        prop_assert!(a.has_zero_row_sums());
    }

    #[test]
    fn equilibria_are_consistent((sys, seed) in system_strategy()) {
        if let Some(out) = solve_equilibrium(&sys, &seed, &NewtonOptions::default()).unwrap() {
            prop_assert!(out.residual_norm < sys.default_tolerance());
            let again = solve_equilibrium(&sys, &out.state, &NewtonOptions::default()).unwrap().unwrap();
            prop_assert_eq!(again.iterations, 0);

            let report = classify_stability(&sys, &out.state).unwrap();
            let phase = spanning_phase_condition(&sys, &out.state).unwrap();
            prop_assert_eq!(report.positive_spanning_tree.is_some(), phase);
            if report.verdict == StabilityVerdict::Passes {
                prop_assert!(phase);
                prop_assert!(report.lines.iter().all(|l| !l.violated));
            }
        }
    }
}

#[test]
fn synchronized_state_of_identical_oscillators_passes() {
    let mut rng = rng(71);
    for _ in 0..20 {
        let n = rng.gen_range(2..=6);
        let base = random_kuramoto(&mut rng, n);
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| base.coupling().get(i, j) > 0.0)
            .map(|(i, j)| (i, j, base.coupling().get(i, j)))
            .collect();
        let sys = KuramotoSystem::from_edges(vec![0.3; n], edges).unwrap();
        let x = PhaseState::new(vec![1.0; n]);
        assert!(rotating_frame_residual(&sys, &x).unwrap().iter().all(|r| r.abs() < 1e-15));
        assert_eq!(classify_stability(&sys, &x).unwrap().verdict, StabilityVerdict::Passes);
    }
}

#[test]
fn lock_exists_only_below_unit_ratio() {
    for (ratio, locks) in [(0.2, true), (0.9, true), (1.2, false), (3.0, false)] {
        let sys = KuramotoSystem::from_edges(vec![ratio, -ratio], [(0, 1, 1.0)]).unwrap();
        let found = find_equilibrium(&sys, &PhaseState::new(vec![0.0, 0.1])).unwrap();
        assert_eq!(found.is_some(), locks, "ratio {ratio}");
        if let Some(x) = found {
            assert!((x.difference(1, 0) - ratio.asin()).abs() < 1e-8);
        }
    }
}

#[test]
fn unstable_ring_state_fails() {
    // Identical oscillators on a 4-cycle in the anti-phase pattern: every
    // coupling has cos = -1, so all Jacobian edges are negative.
    let sys = KuramotoSystem::from_edges(vec![0.0; 4], [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)]).unwrap();
    let x = PhaseState::new(vec![0.0, PI, 0.0, PI]);
    assert!(rotating_frame_residual(&sys, &x).unwrap().iter().all(|r| r.abs() < 1e-12));
    let report = classify_stability(&sys, &x).unwrap();
    assert_eq!(report.verdict, StabilityVerdict::Fails);
    assert!(report.positive_spanning_tree.is_none());
    assert!(!spanning_phase_condition(&sys, &x).unwrap());
}

use proptest::prelude::*;
use wmdistill::channels::{AdParams, NrwmParams};
use wmdistill::multipartite::{
    region_steps, required_steps, w_round, w_trajectory, WScenario, DEFAULT_EPSILON,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn lambda_form_matches_single_step(n in 2usize..7, lambda in 0.0f64..5.0) {
        let step = w_round(n, 1.0 / (1.0 + lambda)).unwrap();
        let next = 1.0 / (1.0 + n as f64 * lambda * lambda);
        prop_assert!((step.fidelity - next).abs() < 1e-14);
    }

    #[test]
    fn fixed_point_separates_improvement(n in 2usize..7, f in 0.001f64..0.999) {
        let fixed = n as f64 / (n as f64 + 1.0);
        prop_assume!((f - fixed).abs() > 1e-9);
        let out = w_round(n, f).unwrap().fidelity;
        if f > fixed {
            prop_assert!(out > f);
        } else {
            prop_assert!(out < f);
        }
    }

    #[test]
    fn step_count_is_minimal(
        n in 2usize..6,
        d in 0.001f64..0.9,
        w in 0.0f64..0.999,
        log_eps in -12.0f64..-2.0,
    ) {
        let eps = 10f64.powf(log_eps);
        let s = WScenario::new(n, d, w, eps).unwrap();
        if let Ok(t) = w_trajectory(&s) {
            let target = 1.0 - eps;
            prop_assert!(t.fidelities[t.steps] >= target);
            if t.steps > 0 {
                prop_assert!(t.fidelities[t.steps - 1] < target);
            }
            prop_assert!(t.step_probs.iter().all(|p| *p > 0.0 && *p <= 1.0));
            prop_assert!(t.fidelities.windows(2).all(|p| p[1] > p[0]));
        } else {
            let l0 = (1.0 - w) * d / (1.0 - d);
            prop_assert_eq!(required_steps(n, l0, eps).unwrap(), None);
        }
    }

    #[test]
    fn region_chain_matches_step_count(d in 0.001f64..0.5, w in 0.0f64..0.999) {
        let s = WScenario::new(3, d, w, DEFAULT_EPSILON).unwrap();
        let steps = w_trajectory(&s).ok().map(|t| t.steps);
        let region = region_steps(3, AdParams::new(d).unwrap(), NrwmParams::new(w).unwrap(), DEFAULT_EPSILON).unwrap();
        prop_assert_eq!(steps, region);
    }
}

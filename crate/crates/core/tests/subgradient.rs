mod common;

use rml_core::subgradient::ArmijoRule;
use rml_core::{
    solve, solve_subgradient, DataPoint, Error, NesterovConfig, ObjectiveConfig, SolveResult,
    SubgradientConfig, Triplet, TripletDataset,
};

fn check_run(r: &SolveResult, budget: f64) {
    assert!(r.weights.is_feasible());
    assert!(r.weights.sum() <= budget + 1e-8);
    let mut prev = f64::INFINITY;
    for rec in r.trace.iter() {
        assert!(
            rec.objective <= prev + 1e-12,
            "objective rose at {}",
            rec.iter
        );
        assert!(rec.gap >= -1e-8);
        prev = rec.objective;
    }
}

#[test]
fn solved_in_one_step_when_objective_is_linear() {
    let pts: Vec<DataPoint> = [0.0, 1.0]
        .iter()
        .map(|v| DataPoint::new(vec![*v]).unwrap())
        .collect();
    let td = TripletDataset::new(pts, vec![Triplet::new(0, 1, 0)]).unwrap();
    let cfg = ObjectiveConfig::new(1.0, 1.0, &td).unwrap();
    let r = solve_subgradient(&cfg, &SubgradientConfig::default()).unwrap();
    assert!(r.converged());
    assert!(r.final_iter <= 1);
    assert_eq!(r.objective, -1.0);
}

#[test]
fn agrees_with_nesterov_and_needs_more_iterations() {
    let td = common::random_instance(120, 20, 3, 0.2);
    let cfg = ObjectiveConfig::new(1.0, 0.8, &td).unwrap();
    let n = solve(&cfg, &NesterovConfig::default()).unwrap();
    let s = solve_subgradient(&cfg, &SubgradientConfig::default()).unwrap();
    assert!(n.converged() && s.converged());
    assert!((n.objective - s.objective).abs() <= 1e-3);
    assert!(s.iterations() >= n.iterations());
    check_run(&s, cfg.budget());
}

#[test]
fn iterates_are_feasible_and_monotone() {
    for seed in 0..5 {
        let td = common::random_instance(121 + seed, 30, 4, 0.25);
        let cfg = ObjectiveConfig::new(2.0, 0.7, &td).unwrap();
        let r = solve_subgradient(&cfg, &SubgradientConfig::default()).unwrap();
        check_run(&r, cfg.budget());
        let reference = cfg.recover_metric(&r.weights).unwrap();
        assert_eq!(&reference, &r.metric);
    }
}

#[test]
fn gradient_norm_rule_still_descends() {
    let td = common::random_instance(126, 20, 3, 0.2);
    let cfg = ObjectiveConfig::new(1.0, 0.8, &td).unwrap();
    let scfg = SubgradientConfig {
        armijo: ArmijoRule::GradientNorm,
        max_iters: 2000,
        ..Default::default()
    };
    let r = solve_subgradient(&cfg, &scfg).unwrap();
    check_run(&r, cfg.budget());
    assert!(r.objective < 0.0);
}

#[test]
fn deterministic() {
    let td = common::random_instance(127, 15, 3, 0.2);
    let cfg = ObjectiveConfig::new(1.0, 0.8, &td).unwrap();
    let a = solve_subgradient(&cfg, &SubgradientConfig::default()).unwrap();
    let b = solve_subgradient(&cfg, &SubgradientConfig::default()).unwrap();
    assert_eq!(a.trace, b.trace);
    assert_eq!(a.weights, b.weights);
}

#[test]
fn invalid_settings_are_rejected() {
    let td = common::random_instance(128, 10, 3, 0.2);
    let cfg = ObjectiveConfig::new(1.0, 0.8, &td).unwrap();
    for bad in [
        SubgradientConfig {
            armijo_c: 1.0,
            ..Default::default()
        },
        SubgradientConfig {
            backtrack_factor: 0.0,
            ..Default::default()
        },
        SubgradientConfig {
            initial_step: Some(-1.0),
            ..Default::default()
        },
        SubgradientConfig {
            max_iters: 0,
            ..Default::default()
        },
    ] {
        assert!(matches!(
            solve_subgradient(&cfg, &bad),
            Err(Error::InvalidInput(_))
        ));
    }
    let tiny = ObjectiveConfig::new(1e-300, 0.8, &td).unwrap();
    assert!(matches!(
        solve_subgradient(&tiny, &SubgradientConfig::default()),
        Err(Error::NumericalFailure { iteration: 0 })
    ));
}

mod common;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rml_core::{solve_projection, Error, ProjectionProblem};

struct Instance {
    scale: f64,
    center: Vec<f64>,
    slope: Vec<f64>,
    offset: Vec<f64>,
    budget: f64,
}

impl Instance {
    fn random(rng: &mut ChaCha8Rng, n: usize) -> Self {
        Self {
            scale: rng.gen_range(0.1..10.0),
            center: (0..n).map(|_| rng.gen_range(-0.5..1.5)).collect(),
            slope: (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect(),
            offset: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            budget: rng.gen_range(0.05..n as f64 + 0.5),
        }
    }

    fn problem(&self) -> ProjectionProblem<'_> {
        ProjectionProblem::new(self.scale, &self.center, &self.slope, self.budget)
            .with_offset(&self.offset)
    }
}

fn clipped_sum(inst: &Instance, mu: f64) -> f64 {
    inst.center
        .iter()
        .zip(&inst.slope)
        .map(|(a, s)| (a - s / inst.scale - mu).clamp(0.0, 1.0))
        .sum()
}

#[test]
fn examples() {
    let zeros = [0.0; 3];
    for budget in [0.5, 2.0, 10.0] {
        let sol = solve_projection(&ProjectionProblem::new(1.0, &zeros, &zeros, budget)).unwrap();
        assert_eq!(sol.weights.as_slice(), &zeros);
        assert_eq!(sol.multiplier, 0.0);
    }

    let sol =
        solve_projection(&ProjectionProblem::new(1.0, &[1.0, 1.0], &[0.0, 0.0], 1.0)).unwrap();
    assert!((sol.weights.as_slice()[0] - 0.5).abs() < 1e-10);
    assert!((sol.weights.as_slice()[1] - 0.5).abs() < 1e-10);
    assert!((sol.multiplier - 0.5).abs() < 1e-10);

    let scale = 2.5;
    let sol = solve_projection(&ProjectionProblem::new(
        scale,
        &[0.2, 0.9, 1.0],
        &[10.0 * scale; 3],
        1.0,
    ))
    .unwrap();
    assert_eq!(sol.weights.as_slice(), &[0.0; 3]);
}

#[test]
fn solutions_match_grid_oracle() {
    let mut rng = common::rng(80);
    for i in 0..60 {
        let n = 1 + i % 4;
        let inst = Instance::random(&mut rng, n);
        let p = inst.problem();
        let sol = solve_projection(&p).unwrap();
        let value = p.objective(sol.weights.as_slice());
        let steps = [2001, 201, 41, 15][n - 1];
        assert!(value <= common::grid_min(&p, n, steps) + 1e-6);
        assert!(sol.complementary_slackness().abs() <= 1e-8);
    }
}

#[test]
fn output_is_always_feasible() {
    let mut rng = common::rng(81);
    for _ in 0..500 {
        let n = rng.gen_range(1..200);
        let inst = Instance::random(&mut rng, n);
        let sol = solve_projection(&inst.problem()).unwrap();
        assert!(sol.weights.is_feasible());
        assert!(sol
            .weights
            .as_slice()
            .iter()
            .all(|q| (0.0..=1.0).contains(q)));
        assert!(sol.weights.sum() <= inst.budget + 1e-8);
        assert!(sol.multiplier >= 0.0);
        assert!(sol.complementary_slackness().abs() <= 1e-8);
    }
}

#[test]
fn offset_does_not_move_the_minimizer() {
    let mut rng = common::rng(82);
    for _ in 0..200 {
        let n = rng.gen_range(1..30);
        let inst = Instance::random(&mut rng, n);
        let with = solve_projection(&inst.problem()).unwrap();
        let without = solve_projection(&ProjectionProblem::new(
            inst.scale,
            &inst.center,
            &inst.slope,
            inst.budget,
        ))
        .unwrap();
        for (a, b) in with
            .weights
            .as_slice()
            .iter()
            .zip(without.weights.as_slice())
        {
            assert!((a - b).abs() <= 1e-12);
        }
    }
}

#[test]
fn clipped_sum_is_nonincreasing_in_multiplier() {
    let mut rng = common::rng(83);
    for _ in 0..100 {
        let inst = Instance::random(&mut rng, 12);
        let mut prev = f64::INFINITY;
        for k in 0..400 {
            let s = clipped_sum(&inst, k as f64 * 0.01 - 1.0);
            assert!(s <= prev);
            prev = s;
        }
    }
}

#[test]
fn active_budget_is_met_with_equality() {
    let mut rng = common::rng(84);
    for _ in 0..200 {
        let inst = Instance::random(&mut rng, 20);
        let sol = solve_projection(&inst.problem()).unwrap();
        if sol.multiplier > 0.0 {
            assert!((sol.weights.sum() - inst.budget).abs() <= 1e-8);
            assert!(clipped_sum(&inst, 0.0) > inst.budget);
        } else {
            assert!(clipped_sum(&inst, 0.0) <= inst.budget + 1e-8);
        }
    }
}

#[test]
fn vacuous_budget_returns_plain_clip() {
    let center = [1.4, -0.2, 0.3];
    let slope = [0.0, 0.0, -1.0];
    let sol = solve_projection(&ProjectionProblem::new(2.0, &center, &slope, 3.0)).unwrap();
    assert_eq!(sol.weights.as_slice(), &[1.0, 0.0, 0.8]);
    assert_eq!(sol.multiplier, 0.0);
}

#[test]
fn invalid_problems_are_rejected() {
    let v = [0.5, 0.5];
    assert!(matches!(
        solve_projection(&ProjectionProblem::new(1.0, &[f64::NAN, 0.0], &v, 1.0)),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(
        solve_projection(&ProjectionProblem::new(0.0, &v, &v, 1.0)),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(
        solve_projection(&ProjectionProblem::new(1.0, &v, &v, 0.0)),
        Err(Error::InvalidInput(_))
    ));
    assert!(solve_projection(&ProjectionProblem::new(1.0, &v, &[0.0], 1.0)).is_err());
}

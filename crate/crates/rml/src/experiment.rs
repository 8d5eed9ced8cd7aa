//! Experiment orchestration: per-seed data preparation, single training runs,
//! the benchmark over methods and the λ grid, and the η sweep.

use std::time::Instant;

use rayon::prelude::*;

use rml_core::knn::{leave_one_out_error, mean_and_stddev};
use rml_core::nesterov::solve_with;
use rml_core::subgradient::solve_subgradient_with;
use rml_core::{
    evaluate, generate_triplets, inject_noise, split, Clock, LabeledDataset, Metric,
    NesterovConfig, NoClock, NoiseSpec, ObjectiveConfig, SolveResult, SplitSpec, Standardizer,
    SubgradientConfig, TripletDataset,
};

use crate::config::{ExperimentConfig, Method};
use crate::error::{AtStage, Result, Stage};
use crate::formats::{BenchReport, ReportRow, SeedResult, SweepRow};

/// Wall-clock time since construction.
#[derive(Debug, Clone, Copy)]
pub struct Stopwatch(Instant);

impl Stopwatch {
    pub fn start() -> Self {
        Self(Instant::now())
    }
}

impl Clock for Stopwatch {
    fn elapsed_seconds(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

/// The noise stream is seeded separately from the split.
pub fn noise_seed(seed: u64) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15
}

/// Everything one seed of an experiment trains and tests on.
#[derive(Debug, Clone)]
pub struct SeedData {
    pub seed: u64,
    pub train: LabeledDataset,
    pub test: LabeledDataset,
    /// Noisy triplets over `train`.
    pub triplets: TripletDataset,
    pub flipped: Vec<bool>,
}

/// Split, standardize (train statistics), generate triplets, inject noise.
pub fn prepare(ds: &LabeledDataset, cfg: &ExperimentConfig, seed: u64) -> Result<SeedData> {
    let (mut train, mut test) =
        split(ds, SplitSpec::new(cfg.train_fraction, seed)).at(Stage::Split)?;
    if cfg.standardize {
        let s = Standardizer::fit(&train);
        train = s.apply(&train).at(Stage::Split)?;
        test = s.apply(&test).at(Stage::Split)?;
    }
    let clean = generate_triplets(&train, cfg.k, cfg.cap_per_anchor).at(Stage::Triplets)?;
    let (triplets, flipped) =
        inject_noise(&clean, NoiseSpec::new(cfg.eta, noise_seed(seed))).at(Stage::Noise)?;
    Ok(SeedData {
        seed,
        train,
        test,
        triplets,
        flipped,
    })
}

/// Solves the robust problem for one λ with the given solver.
pub fn learn(
    method: Method,
    triplets: &TripletDataset,
    lambda: f64,
    cfg: &ExperimentConfig,
) -> Result<SolveResult> {
    let objective = ObjectiveConfig::new(lambda, cfg.eta, triplets).at(Stage::Solve)?;
    let stopwatch = Stopwatch::start();
    let clock: &dyn Clock = if cfg.timing { &stopwatch } else { &NoClock };
    match method {
        Method::Nesterov => {
            let ncfg = NesterovConfig {
                epsilon: cfg.epsilon,
                max_iters: None,
                trace_every: 1,
            };
            solve_with(&objective, &ncfg, clock, |_| {})
        }
        Method::Subgradient => {
            let scfg = SubgradientConfig {
                epsilon: cfg.epsilon,
                max_iters: cfg.subgradient_max_iters,
                ..SubgradientConfig::default()
            };
            solve_subgradient_with(&objective, &scfg, clock)
        }
        Method::Euclidean => unreachable!("the Euclidean baseline is not trained"),
    }
    .at(Stage::Solve)
}

/// One `(λ, seed)` training run per selected solver.
pub fn run_train(
    ds: &LabeledDataset,
    cfg: &ExperimentConfig,
) -> Result<Vec<(Method, SolveResult)>> {
    let data = prepare(ds, cfg, cfg.base_seed)?;
    cfg.solver
        .methods()
        .iter()
        .map(|&m| learn(m, &data.triplets, cfg.lambda, cfg).map(|r| (m, r)))
        .collect()
}

/// Sees every solve a benchmark performs: method, seed, λ and the result.
pub type SolveObserver<'a> = &'a (dyn Fn(Method, u64, f64, &SolveResult) + Sync);

/// Picks λ on the grid by leave-one-out kNN error on the training split
/// (first grid entry wins ties) and returns it with the learned metric.
pub fn select_lambda(
    method: Method,
    data: &SeedData,
    cfg: &ExperimentConfig,
) -> Result<(f64, Metric)> {
    select_lambda_observed(method, data, cfg, &|_, _, _, _| {})
}

fn select_lambda_observed(
    method: Method,
    data: &SeedData,
    cfg: &ExperimentConfig,
    observe: SolveObserver<'_>,
) -> Result<(f64, Metric)> {
    let candidates = cfg
        .lambda_grid
        .par_iter()
        .map(|&lambda| {
            let result = learn(method, &data.triplets, lambda, cfg)?;
            observe(method, data.seed, lambda, &result);
            let metric = result.metric;
            let err = leave_one_out_error(&data.train, &metric, cfg.k).at(Stage::Evaluate)?;
            Ok((lambda, metric, err))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, c) in candidates.iter().enumerate() {
        if c.2 < candidates[best].2 {
            best = i;
        }
    }
    let (lambda, metric, _) = candidates.into_iter().nth(best).expect("grid is nonempty");
    Ok((lambda, metric))
}

fn bench_seed(
    ds: &LabeledDataset,
    cfg: &ExperimentConfig,
    seed: u64,
    observe: SolveObserver<'_>,
) -> Result<Vec<SeedResult>> {
    let data = prepare(ds, cfg, seed)?;
    let mut out = Vec::new();
    for &method in cfg.solver.methods() {
        let (lambda, metric) = select_lambda_observed(method, &data, cfg, observe)?;
        let report = evaluate(&data.train, &data.test, &metric, cfg.k).at(Stage::Evaluate)?;
        out.push(SeedResult {
            method,
            seed,
            lambda: Some(lambda),
            test_error: report.error_rate,
        });
    }
    let eucl = evaluate(
        &data.train,
        &data.test,
        &Metric::identity(data.train.dim()),
        cfg.k,
    )
    .at(Stage::Evaluate)?;
    out.push(SeedResult {
        method: Method::Euclidean,
        seed,
        lambda: None,
        test_error: eucl.error_rate,
    });
    Ok(out)
}

/// Test error per method over all seeds, λ tuned per seed.
pub fn run_bench(ds: &LabeledDataset, cfg: &ExperimentConfig) -> Result<BenchReport> {
    run_bench_observed(ds, cfg, &|_, _, _, _| {})
}

/// [`run_bench`], reporting each solve to `observe` (possibly from several threads).
pub fn run_bench_observed(
    ds: &LabeledDataset,
    cfg: &ExperimentConfig,
    observe: SolveObserver<'_>,
) -> Result<BenchReport> {
    let per_seed: Vec<SeedResult> = cfg
        .seed_list()
        .par_iter()
        .map(|&seed| bench_seed(ds, cfg, seed, observe))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut methods: Vec<Method> = cfg.solver.methods().to_vec();
    methods.push(Method::Euclidean);
    let rows = methods
        .into_iter()
        .map(|method| {
            let errors: Vec<f64> = per_seed
                .iter()
                .filter(|r| r.method == method)
                .map(|r| r.test_error)
                .collect();
            let (mean, std) = mean_and_stddev(&errors);
            ReportRow {
                method,
                mean,
                std,
                n_seeds: errors.len(),
            }
        })
        .collect();
    Ok(BenchReport { rows, per_seed })
}

/// The benchmark at each η with the grid collapsed to `lambda`.
pub fn run_sweep(
    ds: &LabeledDataset,
    cfg: &ExperimentConfig,
    etas: &[f64],
    lambda: f64,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &eta in etas {
        let c = ExperimentConfig {
            eta,
            lambda,
            lambda_grid: vec![lambda],
            ..cfg.clone()
        };
        c.validate()?;
        let report = run_bench(ds, &c)?;
        rows.extend(report.rows.iter().map(|r| SweepRow {
            eta,
            method: r.method,
            mean: r.mean,
            std: r.std,
        }));
    }
    Ok(rows)
}

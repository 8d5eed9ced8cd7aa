use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rml::config::SWEEP_LAMBDA;
use rml::error::AtStage;
use rml::experiment::{prepare, run_bench, run_sweep, run_train};
use rml::formats::{
    metric_from_json, metric_to_json, per_seed_to_csv, report_table, report_to_csv, sweep_to_csv,
    trace_to_csv,
};
use rml::{load_csv, ExperimentConfig, Method, RmlError, SolverChoice, Stage};
use rml_core::{
    evaluate, psd_project, solve_projection, Metric, ProjectionProblem, SymmetricMatrix,
};

type Result<T> = std::result::Result<T, RmlError>;

#[derive(Parser)]
#[command(
    name = "rml",
    version,
    about = "Robust Mahalanobis metric learning from noisy triplets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a metric for one λ and seed; writes metric JSON and trace CSV per solver.
    Train(ExperimentArgs),
    /// Test error of a saved metric (or the identity) on the configured split.
    Eval {
        #[command(flatten)]
        args: ExperimentArgs,
        /// Metric JSON written by `train`; omitted means Euclidean.
        #[arg(long)]
        metric: Option<PathBuf>,
    },
    /// Per-seed λ tuning and test error for every method.
    Bench(ExperimentArgs),
    /// The benchmark at several η with λ fixed.
    SweepEta {
        #[command(flatten)]
        args: ExperimentArgs,
        /// Comma-separated η values.
        #[arg(long, value_delimiter = ',', required = true)]
        etas: Vec<f64>,
    },
    /// Run a single projection and print the result.
    ProjectTest {
        #[command(subcommand)]
        kind: ProjectKind,
    },
}

#[derive(Subcommand)]
enum ProjectKind {
    /// argmin over q in [0,1]^N, Σq ≤ budget, of scale/2·‖q − center‖² + (q − offset)ᵀslope.
    Simplex {
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_hyphen_values = true
        )]
        center: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        slope: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        offset: Vec<f64>,
        #[arg(long)]
        budget: f64,
    },
    /// Nearest PSD matrix; rows separated by `;`, entries by `,`.
    Psd {
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
    },
}

/// Flags shared by the experiment subcommands; each overrides the config file.
#[derive(Args, Default)]
struct ExperimentArgs {
    /// JSON config file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    data: Option<PathBuf>,
    /// Label column: index, header name, or `last`.
    #[arg(long)]
    label_col: Option<String>,
    /// The CSV has no header row.
    #[arg(long)]
    no_header: bool,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    lambda_grid: Option<Vec<f64>>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Number of consecutive seeds.
    #[arg(long)]
    seeds: Option<usize>,
    /// First seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum)]
    solver: Option<SolverChoice>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    no_standardize: bool,
    /// Record wall-clock seconds in traces (otherwise the column is 0).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    train_fraction: Option<f64>,
    #[arg(long)]
    cap_per_anchor: Option<usize>,
    #[arg(long)]
    subgradient_max_iters: Option<usize>,
}

impl ExperimentArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = &self.data {
            c.data = Some(v.clone());
        }
        if let Some(v) = &self.label_col {
            c.label_col = v.clone();
        }
        if self.no_header {
            c.has_header = false;
        }
        macro_rules! set {
            ($($field:ident),*) => {$(if let Some(v) = self.$field.clone() { c.$field = v; })*};
        }
        set!(
            eta,
            lambda,
            lambda_grid,
            epsilon,
            seeds,
            k,
            solver,
            out_dir,
            train_fraction,
            cap_per_anchor
        );
        set!(subgradient_max_iters);
        if let Some(v) = self.seed {
            c.base_seed = v;
        }
        if self.no_standardize {
            c.standardize = false;
        }
        if self.timing {
            c.timing = true;
        }
        c.validate()?;
        Ok(c)
    }
}

fn load(cfg: &ExperimentConfig) -> Result<rml_core::LabeledDataset> {
    Ok(load_csv(cfg.data_path()?, &cfg.label_column(), cfg.has_header)?.data)
}

/// Writes all files or none: everything goes to temporaries first.
fn write_all(dir: &Path, files: &[(String, String)]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| RmlError::io(dir, e))?;
    let mut staged = Vec::new();
    for (name, contents) in files {
        let tmp = dir.join(format!(".{name}.tmp"));
        if let Err(e) = std::fs::write(&tmp, contents) {
            for (t, _) in &staged {
                let _ = std::fs::remove_file(t);
            }
            return Err(RmlError::io(tmp, e));
        }
        staged.push((tmp, dir.join(name)));
    }
    for (tmp, dest) in staged {
        std::fs::rename(&tmp, &dest).map_err(|e| RmlError::io(dest, e))?;
    }
    Ok(())
}

fn solver_suffix(m: Method) -> &'static str {
    match m {
        Method::Nesterov => "nesterov",
        Method::Subgradient => "subgradient",
        Method::Euclidean => "euclidean",
    }
}

fn cmd_train(args: &ExperimentArgs) -> Result<()> {
    let cfg = args.resolve()?;
    let ds = load(&cfg)?;
    let results = run_train(&ds, &cfg)?;
    let mut files = Vec::new();
    for (method, r) in &results {
        println!(
            "{}: lambda={} iterations={} objective={} gap={:e} status={:?}",
            method.name(),
            cfg.lambda,
            r.iterations(),
            r.objective,
            r.final_gap,
            r.status
        );
        let s = solver_suffix(*method);
        files.push((format!("metric_{s}.json"), metric_to_json(&r.metric)));
        files.push((format!("trace_{s}.csv"), trace_to_csv(&r.trace)));
    }
    write_all(&cfg.out_dir, &files)
}

fn cmd_eval(args: &ExperimentArgs, metric: Option<&Path>) -> Result<()> {
    let cfg = args.resolve()?;
    let ds = load(&cfg)?;
    let metric = match metric {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| RmlError::io(path, e))?;
            metric_from_json(&text).map_err(|e| RmlError::parse(path, 1, e.to_string()))?
        }
        None => Metric::identity(ds.dim()),
    };
    for seed in cfg.seed_list() {
        let data = prepare(&ds, &cfg, seed)?;
        let report = evaluate(&data.train, &data.test, &metric, cfg.k).at(Stage::Evaluate)?;
        println!(
            "seed={seed} n_test={} test_error={}",
            report.n_test, report.error_rate
        );
    }
    Ok(())
}

fn cmd_bench(args: &ExperimentArgs) -> Result<()> {
    let cfg = args.resolve()?;
    let ds = load(&cfg)?;
    let report = run_bench(&ds, &cfg)?;
    let table = report_table(
        &format!("eta={} k={} seeds={}", cfg.eta, cfg.k, cfg.seeds),
        &report.rows,
    );
    print!("{table}");
    write_all(
        &cfg.out_dir,
        &[
            ("report.csv".into(), report_to_csv(&report.rows)),
            ("per_seed.csv".into(), per_seed_to_csv(&report.per_seed)),
            ("report.txt".into(), table),
        ],
    )
}

fn cmd_sweep(args: &ExperimentArgs, etas: &[f64]) -> Result<()> {
    let cfg = args.resolve()?;
    let lambda = args.lambda.unwrap_or(SWEEP_LAMBDA);
    let ds = load(&cfg)?;
    let rows = run_sweep(&ds, &cfg, etas, lambda)?;
    let csv = sweep_to_csv(&rows);
    print!("{csv}");
    write_all(&cfg.out_dir, &[("sweep.csv".into(), csv)])
}

fn parse_matrix(text: &str) -> Result<SymmetricMatrix> {
    let rows = text
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| RmlError::Usage(format!("bad matrix entry {v:?}")))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    for (i, row) in rows.iter().enumerate() {
        if row.len() != rows.len() {
            return Err(RmlError::Usage(format!(
                "matrix row {i} has {} entries, expected {}",
                row.len(),
                rows.len()
            )));
        }
        for (j, v) in row.iter().enumerate() {
            if *v != rows[j][i] {
                return Err(RmlError::Usage(format!(
                    "matrix is not symmetric at ({i},{j})"
                )));
            }
        }
    }
    SymmetricMatrix::from_rows(&rows).at(Stage::Config)
}

fn cmd_project(kind: &ProjectKind) -> Result<()> {
    match kind {
        ProjectKind::Simplex {
            scale,
            center,
            slope,
            offset,
            budget,
        } => {
            let slope = if slope.is_empty() {
                vec![0.0; center.len()]
            } else {
                slope.clone()
            };
            let problem =
                ProjectionProblem::new(*scale, center, &slope, *budget).with_offset(offset);
            let sol = solve_projection(&problem).at(Stage::Solve)?;
            let q: Vec<String> = sol.weights.as_slice().iter().map(f64::to_string).collect();
            println!("q={}", q.join(","));
            println!("sum={}", sol.weights.sum());
            println!("multiplier={}", sol.multiplier);
        }
        ProjectKind::Psd { matrix } => {
            let projected = psd_project(&parse_matrix(matrix)?).at(Stage::Solve)?;
            let json = serde_json::json!({ "dim": projected.dim(), "rows": projected.to_rows() });
            println!(
                "{}",
                serde_json::to_string_pretty(&json).expect("matrix serializes")
            );
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Eval { args, metric } => cmd_eval(args, metric.as_deref()),
        Command::Bench(args) => cmd_bench(args),
        Command::SweepEta { args, etas } => cmd_sweep(args, etas),
        Command::ProjectTest { kind } => cmd_project(kind),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! Command-line front end: database generation, detection, recovery,
//! bound evaluation and Monte Carlo sweeps.
//!
//! Exit codes: 0 success (for `detect`: the null hypothesis), 1 the
//! alternate hypothesis from `detect`, 2 usage or input errors, 3
//! numeric failures. Thread count follows `RAYON_NUM_THREADS`.

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gaussalign::bounds::{bound_report, DEFAULT_K_MAX};
use gaussalign::combinat::BWeights;
use gaussalign::detect::{
    count_decide, count_statistic, sop_decide, sop_statistic, CountTestConfig, SopTestConfig,
};
use gaussalign::io::{
    alignment_lines, bound_csv_row, experiment_csv_row, fmt_sig, read_matrix_csv, read_truth_csv,
    write_atomic, write_matrix_csv, write_truth_csv, BOUND_CSV_HEADER, EXPERIMENT_CSV_HEADER,
};
use gaussalign::mc::{
    sweep, Detector, ExperimentMode, ExperimentSpec, RecoveryAlgo, SweepAxis,
};
use gaussalign::model::{
    sample_h0, sample_h1, score_table, DatabasePair, GroundTruth, Hypothesis, ModelParams,
    Permutation,
};
use gaussalign::recover::{
    evaluate_alignment, hungarian_max, maximum_path, threshold_and_clean, two_stage_full,
    PartialAlignment,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gaussalign", version, about = "Correlation detection and alignment recovery for Gaussian databases")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a database pair (and its ground truth) to CSV files.
    Generate(GenerateArgs),
    /// Run a detector on a database pair read from CSV files.
    Detect(DetectArgs),
    /// Run a recovery algorithm on a database pair.
    Recover(RecoverArgs),
    /// Evaluate the error-probability bounds at a point or over a sweep.
    Bounds(BoundsArgs),
    /// Monte Carlo parameter sweep of error-rate estimates.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Number of rows n
    #[arg(long)]
    n: usize,
    /// Number of features d
    #[arg(long)]
    d: usize,
    /// Correlation coefficient rho (used under h1)
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Which hypothesis to sample under
    #[arg(long, value_enum, default_value_t = HypothesisArg::H1)]
    hypothesis: HypothesisArg,
    /// Row permutation under h1
    #[arg(long, value_enum, default_value_t = SigmaArg::Identity)]
    sigma: SigmaArg,
    /// Output path for the X database
    #[arg(long)]
    out_x: PathBuf,
    /// Output path for the Y database
    #[arg(long)]
    out_y: PathBuf,
    /// Output path for the 1-based truth file (h1 only)
    #[arg(long)]
    out_truth: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum HypothesisArg {
    H0,
    H1,
}

#[derive(Clone, Copy, ValueEnum)]
enum SigmaArg {
    Identity,
    Random,
}

#[derive(Args)]
struct DetectArgs {
    /// X database CSV
    #[arg(long)]
    x: PathBuf,
    /// Y database CSV
    #[arg(long)]
    y: PathBuf,
    #[arg(long, value_enum, default_value_t = DetectorArg::Count)]
    detector: DetectorArg,
    /// Score threshold theta (count detector)
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    /// Decision-threshold fraction beta (count detector)
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    /// Correlation coefficient rho
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    /// Override the local detect probability P in the count threshold
    #[arg(long)]
    p_ref: Option<f64>,
    /// Exponent parameter gamma (sum-of-products detector)
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum DetectorArg {
    Count,
    Sop,
}

#[derive(Args)]
struct RecoverArgs {
    /// X database CSV
    #[arg(long)]
    x: PathBuf,
    /// Y database CSV
    #[arg(long)]
    y: PathBuf,
    #[arg(long, value_enum)]
    algo: AlgoArg,
    /// Score threshold theta (tc and two-stage)
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    /// Kept fraction R (mp)
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    /// Ground-truth file; enables the JSON error summary
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Write the alignment here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Tc,
    Ml,
    Mp,
    TwoStage,
}

#[derive(Args)]
struct BoundsArgs {
    /// Number of rows n
    #[arg(long)]
    n: usize,
    /// Number of features d
    #[arg(long)]
    d: usize,
    /// Correlation coefficient rho
    #[arg(long)]
    rho: f64,
    /// Score threshold theta
    #[arg(long)]
    theta: f64,
    /// Decision-threshold fraction beta
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    /// Truncation of the type-I minimization over k
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    k_max: usize,
    /// Sweep this parameter instead of evaluating a single point
    #[arg(long)]
    sweep: Option<String>,
    /// Sweep grid: comma list ("0.1,0.2") or range ("0.1:0.9:0.1")
    #[arg(long)]
    grid: Option<String>,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// What to estimate at each grid point
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Number of rows n
    #[arg(long)]
    n: usize,
    /// Number of features d
    #[arg(long)]
    d: usize,
    /// Correlation coefficient rho
    #[arg(long)]
    rho: f64,
    /// Score threshold theta
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    /// Decision-threshold fraction beta (count detector)
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    /// Exponent parameter gamma (sop detector)
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Kept fraction R (mp recovery)
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    #[arg(long, value_enum, default_value_t = DetectorArg::Count)]
    detector: DetectorArg,
    #[arg(long, value_enum, default_value_t = AlgoArg::Tc)]
    algo: AlgoArg,
    /// Monte Carlo trials per grid point
    #[arg(long)]
    trials: u64,
    /// Master seed for the per-trial RNG streams
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Parameter to sweep: theta|rho|beta|r|n|d
    #[arg(long)]
    axis: String,
    /// Sweep grid: comma list or "start:end:step" range
    #[arg(long)]
    grid: String,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Detect,
    Recover,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            // numeric failures exit 3, everything else is a usage/input
            // problem and exits 2
            let numeric = err
                .chain()
                .any(|c| matches!(c.downcast_ref::<gaussalign::Error>(),
                    Some(gaussalign::Error::NumericFailure { .. })));
            ExitCode::from(if numeric { 3 } else { 2 })
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.cmd {
        Cmd::Generate(a) => generate(a),
        Cmd::Detect(a) => detect(a),
        Cmd::Recover(a) => recover(a),
        Cmd::Bounds(a) => bounds_cmd(a),
        Cmd::Experiment(a) => experiment(a),
    }
}

fn generate(a: GenerateArgs) -> anyhow::Result<ExitCode> {
    let mut params = ModelParams::new(a.n, a.d, a.rho)?;
    if matches!(a.sigma, SigmaArg::Random) {
        // a distinct stream of the master seed drives the permutation
        params = params.with_sigma(Permutation::random(a.n, a.seed ^ 0x5157_4d4f_4452_4e41))?;
    }
    let db = match a.hypothesis {
        HypothesisArg::H0 => sample_h0(&params, a.seed),
        HypothesisArg::H1 => sample_h1(&params, a.seed),
    };
    write_matrix_csv(&a.out_x, &db.x)?;
    write_matrix_csv(&a.out_y, &db.y)?;
    if let Some(path) = &a.out_truth {
        match &db.truth {
            Some(GroundTruth::Correlated { sigma }) => write_truth_csv(path, sigma)?,
            _ => bail!("--out-truth is only meaningful under h1"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn load_pair(x: &std::path::Path, y: &std::path::Path) -> anyhow::Result<DatabasePair> {
    let x = read_matrix_csv(x).context("reading X database")?;
    let y = read_matrix_csv(y).context("reading Y database")?;
    if x.rows() != y.rows() || x.cols() != y.cols() {
        bail!(
            "database shapes differ: X is {}x{}, Y is {}x{}",
            x.rows(),
            x.cols(),
            y.rows(),
            y.cols()
        );
    }
    Ok(DatabasePair { x, y, truth: None })
}

fn detect(a: DetectArgs) -> anyhow::Result<ExitCode> {
    let db = load_pair(&a.x, &a.y)?;
    let (statistic, threshold, decision) = match a.detector {
        DetectorArg::Count => {
            let cfg = match a.p_ref {
                Some(p) => CountTestConfig::new(a.theta, a.beta, p)?,
                None => CountTestConfig::from_model(a.theta, a.beta, db.d(), a.rho)?,
            };
            let table = score_table(&db)?;
            let n_stat = count_statistic(&table, a.theta);
            let decision = count_decide(n_stat, db.n(), &cfg);
            (
                n_stat as f64,
                cfg.decision_threshold(db.n()),
                decision,
            )
        }
        DetectorArg::Sop => {
            let cfg = SopTestConfig::new(a.gamma, a.rho, db.n(), db.d())?;
            let t_stat = sop_statistic(&db);
            (t_stat, cfg.threshold, sop_decide(t_stat, &cfg))
        }
    };
    println!(
        "{}",
        serde_json::json!({
            "statistic": statistic,
            "threshold": threshold,
            "decision": decision.to_string(),
        })
    );
    Ok(ExitCode::from(match decision {
        Hypothesis::H0 => 0,
        Hypothesis::H1 => 1,
    }))
}

fn recover(a: RecoverArgs) -> anyhow::Result<ExitCode> {
    let db = load_pair(&a.x, &a.y)?;
    let table = score_table(&db)?;
    let alignment = match a.algo {
        AlgoArg::Tc => threshold_and_clean(&table, a.theta),
        AlgoArg::Ml => PartialAlignment::from_permutation(&hungarian_max(&table)),
        AlgoArg::Mp => maximum_path(&table, a.r)?.alignment,
        AlgoArg::TwoStage => {
            PartialAlignment::from_permutation(&two_stage_full(&table, a.theta))
        }
    };
    let lines = alignment_lines(&alignment);
    match &a.out {
        Some(path) => write_atomic(path, &lines)?,
        None => print!("{lines}"),
    }
    if let Some(truth_path) = &a.truth {
        let sigma = read_truth_csv(truth_path, db.n())?;
        let eval = evaluate_alignment(&alignment, &sigma);
        println!(
            "{}",
            serde_json::json!({
                "size": eval.size,
                "err1": eval.err_full,
                "err2": eval.err_mismatch,
            })
        );
    }
    Ok(ExitCode::SUCCESS)
}

/// Parse "a,b,c" or "start:end:step" into a grid.
fn parse_grid(spec: &str) -> anyhow::Result<Vec<f64>> {
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            bail!("range grid must be start:end:step, got '{spec}'");
        }
        let start: f64 = parts[0].parse().context("grid start")?;
        let end: f64 = parts[1].parse().context("grid end")?;
        let step: f64 = parts[2].parse().context("grid step")?;
        if step <= 0.0 || end < start {
            bail!("grid range needs step > 0 and end >= start");
        }
        let mut grid = Vec::new();
        let count = ((end - start) / step).round() as usize;
        for i in 0..=count {
            let v = start + step * i as f64;
            if v <= end + 1e-12 {
                grid.push(v);
            }
        }
        Ok(grid)
    } else {
        spec.split(',')
            .map(|s| s.trim().parse::<f64>().with_context(|| format!("grid value '{s}'")))
            .collect()
    }
}

fn bounds_cmd(a: BoundsArgs) -> anyhow::Result<ExitCode> {
    let weights = BWeights::new(a.k_max)?;
    let mut rows = vec![BOUND_CSV_HEADER.to_string()];
    let points: Vec<(f64, f64, f64)> = match (&a.sweep, &a.grid) {
        (None, None) => vec![(a.rho, a.theta, a.beta)],
        (Some(axis), Some(grid)) => {
            let grid = parse_grid(grid)?;
            match axis.as_str() {
                "beta" => grid.iter().map(|&b| (a.rho, a.theta, b)).collect(),
                "theta" => grid.iter().map(|&t| (a.rho, t, a.beta)).collect(),
                "rho" => grid.iter().map(|&r| (r, a.theta, a.beta)).collect(),
                other => bail!("bounds sweep axis must be beta|theta|rho, got '{other}'"),
            }
        }
        _ => bail!("--sweep and --grid must be given together"),
    };
    for (rho, theta, beta) in points {
        let report = bound_report(a.n, a.d, rho, theta, beta, &weights)?;
        rows.push(bound_csv_row(&report));
    }
    let mut text = rows.join("\n");
    text.push('\n');
    match &a.out {
        Some(path) => write_atomic(path, &text)?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn experiment(a: ExperimentArgs) -> anyhow::Result<ExitCode> {
    let params = ModelParams::new(a.n, a.d, a.rho)?;
    let mut spec = ExperimentSpec::new(params, a.trials, a.seed)?;
    spec.theta = a.theta;
    spec.test_beta = a.beta;
    spec.gamma = a.gamma;
    spec.r = a.r;
    spec.detector = match a.detector {
        DetectorArg::Count => Detector::Count,
        DetectorArg::Sop => Detector::Sop,
    };
    spec.algo = match a.algo {
        AlgoArg::Tc => RecoveryAlgo::ThresholdClean,
        AlgoArg::Ml => RecoveryAlgo::MaxLikelihood,
        AlgoArg::Mp => RecoveryAlgo::MaximumPath,
        AlgoArg::TwoStage => RecoveryAlgo::TwoStage,
    };
    let mode = match a.mode {
        ModeArg::Detect => ExperimentMode::Detection,
        ModeArg::Recover => ExperimentMode::Recovery,
    };
    let axis = SweepAxis::parse(&a.axis)?;
    let grid = parse_grid(&a.grid)?;
    let rows = sweep(&spec, axis, &grid, mode)?;

    let mut text = String::from(EXPERIMENT_CSV_HEADER);
    text.push('\n');
    for row in &rows {
        text.push_str(&experiment_csv_row(axis.name(), row));
        text.push('\n');
    }
    match &a.out {
        Some(path) => write_atomic(path, &text)?,
        None => print!("{text}"),
    }
    let total: f64 = rows.iter().map(|r| r.result.wall.as_secs_f64()).sum();
    eprintln!("{} grid points in {} s", rows.len(), fmt_sig(total, 3));
    Ok(ExitCode::SUCCESS)
}

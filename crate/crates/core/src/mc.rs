//! Seeded Monte Carlo engine for the detection and recovery error
//! rates.
//!
//! Reproducibility contract: every trial draws from an RNG stream
//! derived from `(master seed, trial index)` by a splitmix64 counter
//! scheme, so results are a pure function of the spec and independent
//! of how trials are scheduled across threads. Per-trial outputs are
//! collected in trial order before they are merged.

use crate::bounds;
use crate::detect::{
    count_decide, count_statistic, sop_decide, sop_statistic, CountTestConfig, SopTestConfig,
};
use crate::error::{Error, Result};
use crate::model::{sample_h0, sample_h1, score_table, GroundTruth, Hypothesis, ModelParams};
use crate::recover::{
    evaluate_alignment, hungarian_max, maximum_path, threshold_and_clean, two_stage_full,
    PartialAlignment,
};
use crate::special::betainc_reg;
use rayon::prelude::*;
use std::time::{Duration, Instant};

/// Which detector an experiment runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detector {
    /// Threshold-count test on the score table.
    Count,
    /// Sum-of-inner-products test on raw vectors.
    Sop,
}

/// Which recovery algorithm an experiment runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecoveryAlgo {
    ThresholdClean,
    /// Exact maximum-score assignment over the full table.
    MaxLikelihood,
    MaximumPath,
    TwoStage,
}

/// Full description of a Monte Carlo experiment.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub params: ModelParams,
    pub theta: f64,
    pub test_beta: f64,
    pub gamma: f64,
    /// Kept fraction for maximum-path recovery.
    pub r: f64,
    pub trials: u64,
    pub seed: u64,
    pub detector: Detector,
    pub algo: RecoveryAlgo,
    /// Local detect probability used in the count-test threshold;
    /// computed from the model when absent.
    pub p_ref: Option<f64>,
}

impl ExperimentSpec {
    pub fn new(params: ModelParams, trials: u64, seed: u64) -> Result<Self> {
        if trials < 1 {
            return Err(Error::param("trials", "must be >= 1"));
        }
        Ok(ExperimentSpec {
            params,
            theta: 0.5,
            test_beta: 0.5,
            gamma: 0.5,
            r: 1.0,
            trials,
            seed,
            detector: Detector::Count,
            algo: RecoveryAlgo::ThresholdClean,
            p_ref: None,
        })
    }
}

/// A success count over a trial budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rate {
    pub successes: u64,
    pub trials: u64,
}

impl Rate {
    pub fn point(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    /// One-sided 95% Clopper-Pearson upper confidence limit; the
    /// companion to report alongside a zero (or tiny) point estimate.
    pub fn cp_upper95(&self) -> f64 {
        let (x, n) = (self.successes, self.trials);
        if x >= n {
            return 1.0;
        }
        // smallest p with P(X <= x; p) <= 0.05, via the binomial tail
        // identity P(X <= x; p) = I_{1-p}(n - x, x + 1)
        let alpha = 0.05;
        let (a, b) = ((n - x) as f64, (x + 1) as f64);
        let mut lo = 0.0;
        let mut hi = 1.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if betainc_reg(1.0 - mid, a, b) > alpha {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Estimates produced by one experiment. Detection runs fill the first
/// two rates; recovery runs fill the rest.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub p_fa: Option<Rate>,
    pub p_md: Option<Rate>,
    pub pe1: Option<Rate>,
    pub pe2: Option<Rate>,
    /// Average output size divided by n.
    pub r_bar: Option<f64>,
    pub wall: Duration,
}

/// splitmix64; the counter scheme behind per-trial seeds.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the `stream`-th independent draw inside trial `trial`.
pub fn trial_seed(master: u64, trial: u64, stream: u64) -> u64 {
    splitmix64(master ^ splitmix64(trial.wrapping_mul(2).wrapping_add(stream)))
}

/// Estimate the false-alarm and missed-detection rates of the selected
/// detector. The permutation is fixed to the one in the spec (identity
/// by default): the model is exchangeable, so every statistic in scope
/// has a sigma-invariant distribution.
pub fn estimate_detection(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    let start = Instant::now();
    enum Cfg {
        Count(CountTestConfig),
        Sop(SopTestConfig),
    }
    let cfg = match spec.detector {
        Detector::Count => {
            let p_ref = match spec.p_ref {
                Some(p) => p,
                None => crate::probs::p_prob(spec.params.d, spec.params.rho, spec.theta)?,
            };
            Cfg::Count(CountTestConfig::new(spec.theta, spec.test_beta, p_ref)?)
        }
        Detector::Sop => Cfg::Sop(SopTestConfig::new(
            spec.gamma,
            spec.params.rho,
            spec.params.n,
            spec.params.d,
        )?),
    };

    let outcomes: Result<Vec<(bool, bool)>> = (0..spec.trials)
        .into_par_iter()
        .map(|t| {
            let h0 = sample_h0(&spec.params, trial_seed(spec.seed, t, 0));
            let h1 = sample_h1(&spec.params, trial_seed(spec.seed, t, 1));
            let decide = |db: &crate::model::DatabasePair| -> Result<Hypothesis> {
                Ok(match &cfg {
                    Cfg::Count(c) => {
                        let table = score_table(db)?;
                        count_decide(count_statistic(&table, c.theta), db.n(), c)
                    }
                    Cfg::Sop(c) => sop_decide(sop_statistic(db), c),
                })
            };
            let fa = decide(&h0)? == Hypothesis::H1;
            let md = decide(&h1)? == Hypothesis::H0;
            Ok((fa, md))
        })
        .collect();
    let outcomes = outcomes?;

    let fa = outcomes.iter().filter(|o| o.0).count() as u64;
    let md = outcomes.iter().filter(|o| o.1).count() as u64;
    Ok(ExperimentResult {
        p_fa: Some(Rate {
            successes: fa,
            trials: spec.trials,
        }),
        p_md: Some(Rate {
            successes: md,
            trials: spec.trials,
        }),
        pe1: None,
        pe2: None,
        r_bar: None,
        wall: start.elapsed(),
    })
}

/// Estimate the recovery error rates and the averaged success rate of
/// the selected algorithm under the alternate hypothesis.
pub fn estimate_recovery(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    let start = Instant::now();
    let outcomes: Result<Vec<(bool, bool, usize)>> = (0..spec.trials)
        .into_par_iter()
        .map(|t| {
            let db = sample_h1(&spec.params, trial_seed(spec.seed, t, 1));
            let sigma = match &db.truth {
                Some(GroundTruth::Correlated { sigma }) => sigma.clone(),
                _ => unreachable!("sample_h1 records its permutation"),
            };
            let table = score_table(&db)?;
            let alignment = match spec.algo {
                RecoveryAlgo::ThresholdClean => threshold_and_clean(&table, spec.theta),
                RecoveryAlgo::MaxLikelihood => {
                    PartialAlignment::from_permutation(&hungarian_max(&table))
                }
                RecoveryAlgo::MaximumPath => maximum_path(&table, spec.r)?.alignment,
                RecoveryAlgo::TwoStage => {
                    PartialAlignment::from_permutation(&two_stage_full(&table, spec.theta))
                }
            };
            let eval = evaluate_alignment(&alignment, &sigma);
            Ok((eval.err_full, eval.err_mismatch, eval.size))
        })
        .collect();
    let outcomes = outcomes?;

    let e1 = outcomes.iter().filter(|o| o.0).count() as u64;
    let e2 = outcomes.iter().filter(|o| o.1).count() as u64;
    let size_sum: usize = outcomes.iter().map(|o| o.2).sum();
    Ok(ExperimentResult {
        p_fa: None,
        p_md: None,
        pe1: Some(Rate {
            successes: e1,
            trials: spec.trials,
        }),
        pe2: Some(Rate {
            successes: e2,
            trials: spec.trials,
        }),
        r_bar: Some(size_sum as f64 / (spec.trials as f64 * spec.params.n as f64)),
        wall: start.elapsed(),
    })
}

/// What a sweep estimates at each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentMode {
    Detection,
    Recovery,
}

/// The parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Theta,
    Rho,
    TestBeta,
    R,
    N,
    D,
}

impl SweepAxis {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "theta" => SweepAxis::Theta,
            "rho" => SweepAxis::Rho,
            "beta" => SweepAxis::TestBeta,
            "r" => SweepAxis::R,
            "n" => SweepAxis::N,
            "d" => SweepAxis::D,
            other => {
                return Err(Error::param(
                    "axis",
                    format!("unknown axis '{other}' (theta|rho|beta|r|n|d)"),
                ))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Theta => "theta",
            SweepAxis::Rho => "rho",
            SweepAxis::TestBeta => "beta",
            SweepAxis::R => "r",
            SweepAxis::N => "n",
            SweepAxis::D => "d",
        }
    }
}

/// Apply one grid value to a spec, rebuilding the model parameters for
/// the axes that live inside them.
fn apply_axis(spec: &ExperimentSpec, axis: SweepAxis, value: f64) -> Result<ExperimentSpec> {
    let mut out = spec.clone();
    match axis {
        SweepAxis::Theta => out.theta = value,
        SweepAxis::TestBeta => out.test_beta = value,
        SweepAxis::R => out.r = value,
        SweepAxis::Rho => {
            out.params = ModelParams::new(spec.params.n, spec.params.d, value)?;
        }
        SweepAxis::N => {
            if value < 1.0 || value.fract() != 0.0 {
                return Err(Error::param("n", "grid values must be positive integers"));
            }
            out.params = ModelParams::new(value as usize, spec.params.d, spec.params.rho)?;
        }
        SweepAxis::D => {
            if value < 1.0 || value.fract() != 0.0 {
                return Err(Error::param("d", "grid values must be positive integers"));
            }
            out.params = ModelParams::new(spec.params.n, value as usize, spec.params.rho)?;
        }
    }
    Ok(out)
}

/// One sweep row: the grid value, the spec it produced and the result.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub spec: ExperimentSpec,
    pub result: ExperimentResult,
}

/// Run the experiment once per grid value. An empty grid yields no rows
/// (the CSV layer still writes its header).
pub fn sweep(
    spec: &ExperimentSpec,
    axis: SweepAxis,
    grid: &[f64],
    mode: ExperimentMode,
) -> Result<Vec<SweepRow>> {
    grid.iter()
        .map(|&value| {
            let point_spec = apply_axis(spec, axis, value)?;
            let result = match mode {
                ExperimentMode::Detection => estimate_detection(&point_spec)?,
                ExperimentMode::Recovery => estimate_recovery(&point_spec)?,
            };
            Ok(SweepRow {
                value,
                spec: point_spec,
                result,
            })
        })
        .collect()
}

/// Deterministic theta solving for a target success rate, re-exported
/// here because sweeps that hold the success rate fixed need it.
pub use bounds::{theta_for_success_rate, ThetaBranch};

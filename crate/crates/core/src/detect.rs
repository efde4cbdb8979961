//! The two hypothesis tests: the sum-of-inner-products test on raw
//! vectors and the threshold-count test on the score table.

use crate::error::{Error, Result};
use crate::model::{DatabasePair, Hypothesis, ScoreTable};

/// Configuration of the sum-of-inner-products test. The threshold is
/// `t = sqrt(gamma) * d * n / 2` with `gamma in (0, 4 rho^2)`.
#[derive(Debug, Clone, Copy)]
pub struct SopTestConfig {
    pub gamma: f64,
    pub threshold: f64,
}

impl SopTestConfig {
    pub fn new(gamma: f64, rho: f64, n: usize, d: usize) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::param("rho", "must be in (0,1)"));
        }
        if !(gamma > 0.0 && gamma < 4.0 * rho * rho) {
            return Err(Error::param(
                "gamma",
                format!("must be in (0, 4 rho^2) = (0, {})", 4.0 * rho * rho),
            ));
        }
        Ok(SopTestConfig {
            gamma,
            threshold: gamma.sqrt() * (d * n) as f64 / 2.0,
        })
    }
}

/// Configuration of the threshold-count test: declare correlation when
/// the number of score entries at or above `theta` reaches
/// `test_beta * n * p_ref`.
#[derive(Debug, Clone, Copy)]
pub struct CountTestConfig {
    pub theta: f64,
    pub test_beta: f64,
    /// The local detect probability used in the decision threshold;
    /// defaults to `p_prob(d, rho, theta)` but an empirical value may be
    /// injected.
    pub p_ref: f64,
}

impl CountTestConfig {
    pub fn new(theta: f64, test_beta: f64, p_ref: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::param("theta", "must be in [0,1]"));
        }
        if !(test_beta > 0.0 && test_beta < 1.0) {
            return Err(Error::param("test_beta", "must be in (0,1)"));
        }
        if !(p_ref > 0.0 && p_ref <= 1.0) {
            return Err(Error::param("p_ref", "must be in (0,1]"));
        }
        Ok(CountTestConfig {
            theta,
            test_beta,
            p_ref,
        })
    }

    /// From the model quantities, with `p_ref = p_prob(d, rho, theta)`.
    pub fn from_model(theta: f64, test_beta: f64, d: usize, rho: f64) -> Result<Self> {
        let p_ref = crate::probs::p_prob(d, rho, theta)?;
        Self::new(theta, test_beta, p_ref)
    }

    pub fn decision_threshold(&self, n: usize) -> f64 {
        self.test_beta * n as f64 * self.p_ref
    }
}

/// `T = sum_i sum_j X_i . Y_j`, computed through the algebraic identity
/// `T = (sum_i X_i) . (sum_j Y_j)` on the raw, unnormalized vectors.
pub fn sop_statistic(db: &DatabasePair) -> f64 {
    let d = db.d();
    let mut sx = vec![0.0; d];
    let mut sy = vec![0.0; d];
    for i in 0..db.n() {
        for (k, v) in db.x.row(i).iter().enumerate() {
            sx[k] += v;
        }
        for (k, v) in db.y.row(i).iter().enumerate() {
            sy[k] += v;
        }
    }
    sx.iter().zip(&sy).map(|(a, b)| a * b).sum()
}

/// Accept the alternate hypothesis iff `T >= t` (boundary inclusive).
pub fn sop_decide(t_stat: f64, cfg: &SopTestConfig) -> Hypothesis {
    if t_stat >= cfg.threshold {
        Hypothesis::H1
    } else {
        Hypothesis::H0
    }
}

/// `N(theta)`: how many score entries are at or above theta. Ties at
/// exactly theta count as dots.
pub fn count_statistic(table: &ScoreTable, theta: f64) -> usize {
    table.entries().iter().filter(|&&s| s >= theta).count()
}

/// Accept the alternate hypothesis iff `N >= test_beta * n * p_ref`
/// (boundary inclusive).
pub fn count_decide(n_stat: usize, n: usize, cfg: &CountTestConfig) -> Hypothesis {
    if n_stat as f64 >= cfg.decision_threshold(n) {
        Hypothesis::H1
    } else {
        Hypothesis::H0
    }
}

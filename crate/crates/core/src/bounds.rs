//! Closed-form error-probability bounds for both detectors and for the
//! threshold-and-clean recovery, plus the auxiliary quantities they are
//! built from.
//!
//! Naming note: the detection threshold parameter (a fraction of the
//! expected diagonal count) is `test_beta` throughout, while the upper
//! split point of the matched-pair integral in [`crate::probs`] is a
//! different quantity (`split_beta` internally). They are unrelated
//! despite the shared letter in common notation.

use crate::combinat::BWeights;
use crate::error::{Error, Result};
use crate::probs::{p_prob, q_prob};

/// Default truncation of the type-I minimization over k.
pub const DEFAULT_K_MAX: usize = 40;

/// A bound value kept both raw (possibly above one) and clipped to the
/// probability range; clipping is the default reading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundValue {
    pub raw: f64,
    pub clipped: f64,
}

impl BoundValue {
    fn from_raw(raw: f64) -> Self {
        BoundValue {
            raw,
            clipped: raw.clamp(0.0, 1.0),
        }
    }
}

/// Type-I (false alarm) bound: the minimum over `k in 1..=k_max` of
/// `k (k+1) B(k) * bracket / (test_beta * n * P)^k` where the bracket is
/// `(n^2 Q)^k` when `n^2 Q >= 1` and `n^2 Q` otherwise. Evaluated in the
/// log domain; returns the bound and the minimizing k.
pub fn type1_bound(
    n: usize,
    p: f64,
    q: f64,
    test_beta: f64,
    weights: &BWeights,
) -> Result<(BoundValue, usize)> {
    if !(test_beta > 0.0 && test_beta < 1.0) {
        return Err(Error::param("test_beta", "must be in (0,1)"));
    }
    if p <= 0.0 {
        return Err(Error::param(
            "p",
            "detection threshold is undefined when P = 0",
        ));
    }
    if q == 0.0 {
        // no independent pair can cross the threshold; every k-term is 0
        return Ok((BoundValue::from_raw(0.0), 1));
    }
    let n2q = (n * n) as f64 * q;
    let ln_n2q = n2q.ln();
    let ln_denom_base = (test_beta * n as f64 * p).ln();
    let mut best = f64::INFINITY;
    let mut best_k = 1;
    for k in 1..=weights.k_max() {
        let kf = k as f64;
        let ln_bracket = if n2q >= 1.0 { kf * ln_n2q } else { ln_n2q };
        let ln_term =
            kf.ln() + (kf + 1.0).ln() + weights.log_b(k) + ln_bracket - kf * ln_denom_base;
        if ln_term < best {
            best = ln_term;
            best_k = k;
        }
    }
    Ok((BoundValue::from_raw(best.exp()), best_k))
}

/// Type-II (missed detection) bound:
/// `exp(-min((1-test_beta)^2 nP / (16nQ + 2), (1-test_beta) n / 12))`.
pub fn type2_bound(n: usize, p: f64, q: f64, test_beta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&test_beta) {
        return Err(Error::param("test_beta", "must be in [0,1]"));
    }
    let nf = n as f64;
    let one_minus = 1.0 - test_beta;
    let rate = (one_minus * one_minus * nf * p / (16.0 * nf * q + 2.0)).min(one_minus * nf / 12.0);
    Ok((-rate).exp())
}

/// The three quantities of the dependency-graph deviation bound for the
/// indicator sum: its mean and the pairwise/neighborhood masses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JansonQuantities {
    /// Mean of the indicator sum: `nP + n(n-1)Q`.
    pub delta: f64,
    /// Pairwise dependence mass: `2PQn(n-1) + Q^2 n(n-1)(n-2)`.
    pub theta_big: f64,
    /// Neighborhood mass: `2P + (2n-4)Q`.
    pub omega: f64,
}

pub fn janson_quantities(n: usize, p: f64, q: f64) -> Result<JansonQuantities> {
    for (name, v) in [("p", p), ("q", q)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::param(name, "must be a probability"));
        }
    }
    if n < 1 {
        return Err(Error::param("n", "must be >= 1"));
    }
    let nf = n as f64;
    Ok(JansonQuantities {
        delta: nf * p + nf * (nf - 1.0) * q,
        theta_big: 2.0 * p * q * nf * (nf - 1.0) + q * q * nf * (nf - 1.0) * (nf - 2.0),
        omega: 2.0 * p + (2.0 * nf - 4.0) * q,
    })
}

/// Upper bound on the probability that threshold-and-clean does not
/// output the exact permutation: `min(1, n(1-P) + n(n-1)Q)`.
pub fn pe1_upper(n: usize, p: f64, q: f64) -> f64 {
    let nf = n as f64;
    (nf * (1.0 - p) + nf * (nf - 1.0) * q).min(1.0)
}

/// Matching lower bound:
/// `(n(1-P) + n(n-1)Q) / (max(P, 1-Q) + n(1-P) + n(n-1)Q)`.
pub fn pe1_lower(n: usize, p: f64, q: f64) -> f64 {
    let nf = n as f64;
    let mass = nf * (1.0 - p) + nf * (nf - 1.0) * q;
    mass / (p.max(1.0 - q) + mass)
}

/// Upper bound on the probability that at least one output pair is a
/// mismatch: `min(1, n(n-1) Q (1-P)^2 (1-Q)^(2n-4))`.
///
/// The exponent `2n - 4` needs `n >= 2`.
pub fn pe2_upper(n: usize, p: f64, q: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::param("n", "mismatch bound needs n >= 2"));
    }
    let nf = n as f64;
    let raw = nf * (nf - 1.0) * q * (1.0 - p) * (1.0 - p) * (1.0 - q).powi(2 * n as i32 - 4);
    Ok(raw.min(1.0))
}

/// Raw (unclipped) version of [`pe2_upper`], used for log-scale sweeps.
pub fn pe2_upper_raw(n: usize, p: f64, q: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::param("n", "mismatch bound needs n >= 2"));
    }
    let nf = n as f64;
    Ok(nf * (nf - 1.0) * q * (1.0 - p) * (1.0 - p) * (1.0 - q).powi(2 * n as i32 - 4))
}

/// Exponent functions of the sum-of-inner-products test, valid for
/// `gamma in (0, 4 rho^2)`.
pub fn sop_g_functions(gamma: f64, rho: f64) -> Result<(f64, f64)> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::param("rho", "must be in (0,1)"));
    }
    if !(gamma > 0.0 && gamma < 4.0 * rho * rho) {
        return Err(Error::param(
            "gamma",
            format!("must be in (0, 4 rho^2) = (0, {})", 4.0 * rho * rho),
        ));
    }
    let s = (1.0 + gamma).sqrt();
    let g_fa = s - 1.0 - ((1.0 + s) / 2.0).ln();
    let r2 = 1.0 - rho * rho;
    let t = (r2 * r2 + gamma).sqrt();
    let g_md = (t - (rho * rho * gamma).sqrt()) / r2 - 1.0 - ((r2 + t) / 2.0).ln();
    Ok((g_fa, g_md))
}

/// Error-probability bounds of the sum-of-inner-products test:
/// `exp(-d G / 2)` for each exponent. They do not depend on n beyond the
/// threshold the test itself uses.
pub fn sop_bounds(n: usize, d: usize, gamma: f64, rho: f64) -> Result<(f64, f64)> {
    if n < 1 || d < 1 {
        return Err(Error::param("n/d", "must be >= 1"));
    }
    let (g_fa, g_md) = sop_g_functions(gamma, rho)?;
    let half_d = d as f64 / 2.0;
    Ok(((-half_d * g_fa).exp(), (-half_d * g_md).exp()))
}

/// Right-hand side of the indicator-sum moment bound:
/// `k (k+1) B(k) * [(n^2 q)^k if n^2 q >= 1 else n^2 q]`.
pub fn moment_bound_rhs(n: usize, q: f64, k: usize, weights: &BWeights) -> Result<f64> {
    if k < 1 || k > weights.k_max() {
        return Err(Error::param("k", "outside the prepared weight table"));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::param("q", "must be a probability"));
    }
    let n2q = (n * n) as f64 * q;
    let kf = k as f64;
    let ln_bracket = if n2q >= 1.0 {
        kf * n2q.ln()
    } else {
        n2q.ln()
    };
    Ok((kf.ln() + (kf + 1.0).ln() + weights.log_b(k) + ln_bracket).exp())
}

/// Everything the bound sweep emits for one parameter point.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub n: usize,
    pub d: usize,
    pub rho: f64,
    pub theta: f64,
    pub test_beta: f64,
    pub p: f64,
    pub q: f64,
    pub n2q: f64,
    pub fa_bound: BoundValue,
    pub fa_argmin_k: usize,
    pub md_bound: f64,
    pub pe1_lower: f64,
    pub pe1_upper: f64,
    pub pe2_upper: f64,
}

/// Evaluate every bound at one parameter point.
pub fn bound_report(
    n: usize,
    d: usize,
    rho: f64,
    theta: f64,
    test_beta: f64,
    weights: &BWeights,
) -> Result<BoundReport> {
    let p = p_prob(d, rho, theta)?;
    let q = q_prob(d, theta)?;
    let (fa_bound, fa_argmin_k) = type1_bound(n, p, q, test_beta, weights)?;
    Ok(BoundReport {
        n,
        d,
        rho,
        theta,
        test_beta,
        p,
        q,
        n2q: (n * n) as f64 * q,
        fa_bound,
        fa_argmin_k,
        md_bound: type2_bound(n, p, q, test_beta)?,
        pe1_lower: pe1_lower(n, p, q),
        pe1_upper: pe1_upper(n, p, q),
        pe2_upper: pe2_upper(n, p, q)?,
    })
}

/// Expected fraction of rows that survive threshold-and-clean under the
/// alternate hypothesis, per the survival probabilities of single dots:
/// a correct dot survives when its row and column hold nothing else, a
/// spurious dot needs the two matched dots of its row/column absent too.
pub fn expected_success_rate(n: usize, p: f64, q: f64) -> f64 {
    let nf = n as f64;
    let correct = p * (1.0 - q).powi(2 * n as i32 - 2);
    let spurious = (nf - 1.0) * q * (1.0 - p) * (1.0 - p) * (1.0 - q).powi(2 * n as i32 - 4);
    correct + spurious
}

/// Which side of the unimodal success-rate curve to solve on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaBranch {
    /// Below the peak (smaller theta, many dots, heavy cleaning).
    Lower,
    /// Above the peak (larger theta, few spurious dots).
    Upper,
}

/// Solve for the threshold theta at which the expected success rate of
/// threshold-and-clean equals `target`, on the requested branch of the
/// unimodal rate curve. Returns None when the peak is below the target.
pub fn theta_for_success_rate(
    n: usize,
    d: usize,
    rho: f64,
    target: f64,
    branch: ThetaBranch,
) -> Result<Option<f64>> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::param("target", "must be in (0,1)"));
    }
    let rate = |theta: f64| -> Result<f64> {
        let p = p_prob(d, rho, theta)?;
        let q = q_prob(d, theta)?;
        Ok(expected_success_rate(n, p, q))
    };
    // locate the peak on a coarse grid, then bisect on the chosen side
    let lo = 0.02;
    let hi = 0.995;
    let grid = 160;
    let mut peak_theta = lo;
    let mut peak_val = f64::NEG_INFINITY;
    for i in 0..=grid {
        let th = lo + (hi - lo) * i as f64 / grid as f64;
        let v = rate(th)?;
        if v > peak_val {
            peak_val = v;
            peak_theta = th;
        }
    }
    if peak_val < target {
        return Ok(None);
    }
    let (mut a, mut b, increasing) = match branch {
        ThetaBranch::Lower => (lo, peak_theta, true),
        ThetaBranch::Upper => (peak_theta, hi, false),
    };
    // the target may be unreachable on one side if the curve does not
    // drop below it before the boundary
    let boundary = if increasing { rate(a)? } else { rate(b)? };
    if boundary > target {
        return Ok(None);
    }
    for _ in 0..80 {
        let mid = 0.5 * (a + b);
        let v = rate(mid)?;
        if (v > target) == increasing {
            b = mid;
        } else {
            a = mid;
        }
        if (b - a) < 1e-12 {
            break;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

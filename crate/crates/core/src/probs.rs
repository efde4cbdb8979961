//! The local probabilities of the threshold test.
//!
//! `q_prob` is the chance that two independent normalized feature
//! vectors have cosine at least theta: a hyper-spherical cap probability
//! expressed through the regularized incomplete beta. `p_prob` is the
//! same event for a correlated (matched) pair, evaluated as a
//! three-piece integral over the norm ratio `u = |X|^2 / |Z|^2`, which
//! follows an F-distribution with (d, d) degrees of freedom. The inner
//! cosine integrals reduce to cap probabilities, so only the outer
//! integral needs quadrature.

use crate::error::{Error, Result};
use crate::quad;
use crate::special::{betainc_reg, cap_prob_ge, f_dist_cdf_equal_dof, ln_beta};

/// Requested relative accuracy of `p_prob`.
pub const P_PROB_REL_TOL: f64 = 1e-9;

/// Local detect / false-alarm probability pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalProbs {
    /// P(d, rho, theta): matched pair crosses the threshold.
    pub p: f64,
    /// Q(d, theta): independent pair crosses the threshold.
    pub q: f64,
}

impl LocalProbs {
    pub fn compute(d: usize, rho: f64, theta: f64) -> Result<Self> {
        Ok(LocalProbs {
            p: p_prob(d, rho, theta)?,
            q: q_prob(d, theta)?,
        })
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::param(
            "theta",
            format!("must be in [0,1], got {theta}"),
        ));
    }
    Ok(())
}

/// Probability that two independent normalized d-dimensional Gaussian
/// rows have cosine at least `theta`:
/// `Q = 1/2 * I_{1 - theta^2}((d-1)/2, 1/2)`.
///
/// `theta = 0` and `theta = 1` are accepted as the limits 1/2 and 0.
pub fn q_prob(d: usize, theta: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::param("d", "cap probability needs dimension >= 2"));
    }
    check_theta(theta)?;
    Ok(0.5 * betainc_reg(1.0 - theta * theta, (d as f64 - 1.0) / 2.0, 0.5))
}

/// Case-split points of the matched-pair integral.
fn split_points(rho: f64, theta: f64) -> (f64, f64) {
    let alpha = (1.0 - rho * rho) / (rho * rho);
    let split_beta = alpha / (1.0 - theta * theta);
    (alpha, split_beta)
}

/// Probability that a matched pair with correlation `rho` has cosine at
/// least `theta`.
///
/// The integrand boundaries are
/// `F1(u) = -c1*sqrt(u) - theta*sqrt(1 - c2*u)` and
/// `F2(u) = -c1*sqrt(u) + theta*sqrt(1 - c2*u)`, with the cosine mass
/// above/below them given by cap probabilities; the tail beyond the
/// upper split point is the F-distribution survival function.
pub fn p_prob(d: usize, rho: f64, theta: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::param("d", "matched-pair probability needs d >= 2"));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::param("rho", format!("must be in (0,1), got {rho}")));
    }
    check_theta(theta)?;
    if theta == 1.0 {
        return Ok(0.0);
    }
    // theta = 0 needs no special case: the split points coincide there,
    // the middle piece vanishes and the remaining two pieces are exact.

    let (alpha, split_beta) = split_points(rho, theta);
    let c1 = rho * (1.0 - theta * theta) / (1.0 - rho * rho).sqrt();
    let c2 = rho * rho * (1.0 - theta * theta) / (1.0 - rho * rho);
    let half_d = d as f64 / 2.0;
    let ln_bdd = ln_beta(half_d, half_d);
    let f_u = move |u: f64| {
        if u <= 0.0 {
            return if d == 2 { (-ln_bdd).exp() } else { 0.0 };
        }
        ((half_d - 1.0) * u.ln() - d as f64 * u.ln_1p() - ln_bdd).exp()
    };
    let f1 = move |u: f64| -c1 * u.sqrt() - theta * (1.0 - c2 * u).max(0.0).sqrt();
    let f2 = move |u: f64| -c1 * u.sqrt() + theta * (1.0 - c2 * u).max(0.0).sqrt();

    // piece 1: only the upper cosine interval [F2(u), 1] contributes
    let i1 = quad::integrate(
        |u| cap_prob_ge(d, f2(u)) * f_u(u),
        0.0,
        alpha,
        1e-13,
        P_PROB_REL_TOL,
        4000,
    )
    .map_err(upgrade_quad_error)?;
    // piece 2: both cosine intervals [-1, F1(u)] and [F2(u), 1].
    // The interval [alpha, split_beta] spans many decades when theta is
    // close to 1, so integrate in log-u.
    let i2 = if split_beta > alpha {
        quad::integrate(
            |t| {
                let u = t.exp();
                ((1.0 - cap_prob_ge(d, f1(u))) + cap_prob_ge(d, f2(u))) * f_u(u) * u
            },
            alpha.ln(),
            split_beta.ln(),
            1e-13,
            P_PROB_REL_TOL,
            4000,
        )
        .map_err(upgrade_quad_error)?
    } else {
        0.0
    };
    // piece 3: the event is certain; F-distribution survival at the
    // split point, never by truncating the infinite range
    let i3 = 1.0 - f_dist_cdf_equal_dof(split_beta, d);

    Ok((i1 + i2 + i3).clamp(0.0, 1.0))
}

fn upgrade_quad_error(e: Error) -> Error {
    match e {
        Error::NumericFailure {
            requested,
            achieved,
            ..
        } => Error::NumericFailure {
            context: "p_prob outer integral",
            requested,
            achieved,
        },
        other => other,
    }
}

//! Tail probabilities, VaR, expected shortfall and return levels from a
//! fitted GPD anchored at a threshold.
//!
//! The tail estimator is `F_bar(y) = (n_u/n) * (1 + xi*(y-u)/beta)^(-1/xi)`
//! for `y >= u`; quantiles invert it exactly, so `tail_prob(var_q(q))`
//! round-trips to `1 - q`. Infinite results (`es` at `xi >= 1`, `var` at
//! `q = 1` with heavy shape) are explicit values, not errors.

use crate::math::{expm1, fabs, ln, ln_1p};
use crate::{Error, GpdFit, Result};

/// A fitted GPD tail anchored at threshold `u`, with the sample counts that
/// pin the empirical exceedance probability `n_u/n`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TailModel {
    pub u: f64,
    pub xi: f64,
    pub beta: f64,
    pub n: usize,
    pub n_u: usize,
}

/// VaR and ES at one probability level.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RiskEstimates {
    pub q: f64,
    pub var_q: f64,
    pub es_q: f64,
}

impl TailModel {
    pub fn new(u: f64, xi: f64, beta: f64, n: usize, n_u: usize) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!("beta must be > 0, got {beta}")));
        }
        if n_u == 0 || n_u > n {
            return Err(Error::InvalidParameter(alloc::format!(
                "need 0 < n_u <= n, got n_u={n_u}, n={n}"
            )));
        }
        Ok(Self { u, xi, beta, n, n_u })
    }

    pub fn from_fit(fit: &GpdFit) -> Result<Self> {
        Self::new(fit.threshold, fit.params.xi, fit.params.beta, fit.n_total, fit.n_exceed)
    }

    /// Empirical exceedance probability of the threshold.
    pub fn threshold_prob(&self) -> f64 {
        self.n_u as f64 / self.n as f64
    }
}

/// Estimated `P(X > y)` for `y >= u`.
pub fn tail_prob(m: &TailModel, y: f64) -> Result<f64> {
    if y < m.u {
        return Err(Error::BelowThreshold(alloc::format!(
            "tail_prob is undefined below the threshold ({y} < {})",
            m.u
        )));
    }
    let z = (y - m.u) / m.beta;
    let gpd_sf = if fabs(m.xi) < crate::dist::SHAPE_EPS {
        crate::math::exp(-z)
    } else {
        let t = m.xi * z;
        if t <= -1.0 {
            return Ok(0.0); // beyond the finite upper endpoint
        }
        crate::math::exp(-ln_1p(t) / m.xi)
    };
    Ok(m.threshold_prob() * gpd_sf)
}

/// Quantile (VaR) for `q` above the threshold probability: inverts the tail
/// estimator, so it satisfies `tail_prob(var_q(q)) = 1 - q`.
pub fn var_q(m: &TailModel, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(alloc::format!("q must be a probability, got {q}")));
    }
    let p_u = m.threshold_prob();
    if q <= 1.0 - p_u {
        return Err(Error::BelowThreshold(alloc::format!(
            "q={q} lies at or below the threshold probability 1 - n_u/n = {}",
            1.0 - p_u
        )));
    }
    if q == 1.0 {
        return Ok(if m.xi < 0.0 { m.u - m.beta / m.xi } else { f64::INFINITY });
    }
    // w = ln((1-q) * n / n_u) < 0 on this domain
    let w = ln((1.0 - q) / p_u);
    if fabs(m.xi) < crate::dist::SHAPE_EPS {
        Ok(m.u - m.beta * w)
    } else {
        Ok(m.u + m.beta * expm1(-m.xi * w) / m.xi)
    }
}

/// Expected shortfall `E[X | X > VaR_q]`; infinite exactly when `xi >= 1`.
pub fn es_q(m: &TailModel, q: f64) -> Result<f64> {
    let var = var_q(m, q)?;
    if m.xi >= 1.0 {
        return Ok(f64::INFINITY);
    }
    // mean excess above var under the threshold-shift rule, added back to var
    Ok((var + m.beta - m.xi * m.u) / (1.0 - m.xi))
}

/// VaR and ES together.
pub fn risk_estimates(m: &TailModel, q: f64) -> Result<RiskEstimates> {
    Ok(RiskEstimates { q, var_q: var_q(m, q)?, es_q: es_q(m, q)? })
}

/// The level exceeded on average once every `period_count` periods of `r`
/// observations each: solves `tail_prob(x) = 1 / (r * period_count)`.
pub fn return_level(m: &TailModel, r: f64, period_count: f64) -> Result<f64> {
    if !(r > 0.0) || !(period_count > 0.0) {
        return Err(Error::Domain("return_level needs r > 0 and period_count > 0".into()));
    }
    let rate = r * period_count * m.threshold_prob();
    if rate < 1.0 {
        return Err(Error::BelowThreshold(alloc::format!(
            "return level for r*T = {} lies below the threshold",
            r * period_count
        )));
    }
    if fabs(m.xi) < crate::dist::SHAPE_EPS {
        Ok(m.u + m.beta * ln(rate))
    } else {
        Ok(m.u + m.beta * expm1(m.xi * ln(rate)) / m.xi)
    }
}

//! Generalized Pareto and generalized extreme value kernels.
//!
//! GPD: `G(x) = 1 - (1 + xi*x/beta)^(-1/xi)` for `xi != 0`,
//!      `G(x) = 1 - exp(-x/beta)`            for `xi = 0`.
//!
//! GEV (standardized): `H(x) = exp(-(1 + gamma*x)^(-1/gamma))` for
//! `gamma != 0`, `H(x) = exp(-exp(-x))` for `gamma = 0`.
//!
//! Shape branches are evaluated through `ln_1p`/`expm1` so both families are
//! continuous in the shape parameter through 0; below `SHAPE_EPS` the exact
//! zero-shape branch takes over (the general expression loses all relative
//! accuracy around that scale).

use alloc::vec::Vec;

use crate::math::{exp, expm1, fabs, ln, ln_1p};
use crate::rng::SplitMix64;
use crate::{Error, Result};

/// Shapes below this magnitude evaluate on the exact zero-shape branch.
pub const SHAPE_EPS: f64 = 1e-12;

/// GPD shape/scale bundle. Support is `[0, inf)` for `xi >= 0` and
/// `[0, -beta/xi]` for `xi < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GpdParams {
    pub xi: f64,
    pub beta: f64,
}

impl GpdParams {
    pub fn new(xi: f64, beta: f64) -> Result<Self> {
        let p = Self { xi, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) || !self.beta.is_finite() || !self.xi.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!(
                "GPD needs finite xi and beta > 0, got xi={}, beta={}",
                self.xi,
                self.beta
            )));
        }
        Ok(())
    }

    /// Upper end of the support: finite only for negative shape.
    pub fn upper_endpoint(&self) -> f64 {
        if self.xi < 0.0 { -self.beta / self.xi } else { f64::INFINITY }
    }
}

/// Standardized GEV extreme value index. The cdf is supported on
/// `{x : 1 + gamma*x > 0}`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GevParams {
    pub gamma: f64,
}

/// Finite or infinite first and second moments of a GPD.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpdMoments {
    pub mean: f64,
    pub variance: f64,
}

/// GPD cdf. Arguments outside the support clamp to 0/1 (threshold sweeps
/// legitimately probe boundary values).
pub fn gpd_cdf(p: &GpdParams, x: f64) -> Result<f64> {
    p.validate()?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    let z = x / p.beta;
    if fabs(p.xi) < SHAPE_EPS {
        Ok(-expm1(-z))
    } else {
        let t = p.xi * z;
        if t <= -1.0 {
            return Ok(1.0); // at or beyond the upper endpoint for xi < 0
        }
        Ok(-expm1(-ln_1p(t) / p.xi))
    }
}

/// GPD density; 0 outside the support.
pub fn gpd_pdf(p: &GpdParams, x: f64) -> Result<f64> {
    p.validate()?;
    if x < 0.0 {
        return Ok(0.0);
    }
    let z = x / p.beta;
    if fabs(p.xi) < SHAPE_EPS {
        Ok(exp(-z) / p.beta)
    } else {
        let t = p.xi * z;
        if t <= -1.0 {
            return Ok(0.0);
        }
        Ok(exp(-(1.0 / p.xi + 1.0) * ln_1p(t)) / p.beta)
    }
}

/// GPD quantile for `q` in `[0, 1)`. Written as `beta * unit_quantile` so
/// scale equivariance is exact in floating point.
pub fn gpd_quantile(p: &GpdParams, q: f64) -> Result<f64> {
    p.validate()?;
    if !(0.0..1.0).contains(&q) {
        return Err(Error::Domain(alloc::format!("quantile needs q in [0,1), got {q}")));
    }
    Ok(p.beta * gpd_unit_quantile(p.xi, q))
}

fn gpd_unit_quantile(xi: f64, q: f64) -> f64 {
    let l = ln_1p(-q); // ln(1 - q)
    if fabs(xi) < SHAPE_EPS { -l } else { expm1(-xi * l) / xi }
}

/// Mean and variance; `+inf` when the corresponding moment does not exist
/// (`xi >= 1` for the mean, `xi >= 1/2` for the variance).
pub fn gpd_moments(p: &GpdParams) -> Result<GpdMoments> {
    p.validate()?;
    let mean = if p.xi < 1.0 { p.beta / (1.0 - p.xi) } else { f64::INFINITY };
    let variance = if p.xi < 0.5 {
        p.beta * p.beta / ((1.0 - p.xi) * (1.0 - p.xi) * (1.0 - 2.0 * p.xi))
    } else {
        f64::INFINITY
    };
    Ok(GpdMoments { mean, variance })
}

/// `n` inversion samples from a seeded stream; same seed, same output.
pub fn gpd_sample(p: &GpdParams, n: usize, seed: u64) -> Result<Vec<f64>> {
    p.validate()?;
    let mut rng = SplitMix64::new(seed);
    Ok((0..n).map(|_| p.beta * gpd_unit_quantile(p.xi, rng.next_f64())).collect())
}

/// GEV cdf; values outside `{1 + gamma x > 0}` clamp to the 0/1 limit.
pub fn gev_cdf(g: &GevParams, x: f64) -> f64 {
    if fabs(g.gamma) < SHAPE_EPS {
        exp(-exp(-x))
    } else {
        let t = g.gamma * x;
        if t <= -1.0 {
            return if g.gamma > 0.0 { 0.0 } else { 1.0 };
        }
        exp(-exp(-ln_1p(t) / g.gamma))
    }
}

/// GEV quantile for `q` in `(0, 1)`.
pub fn gev_quantile(g: &GevParams, q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(alloc::format!("GEV quantile needs q in (0,1), got {q}")));
    }
    let w = -ln(-ln(q)); // Gumbel quantile
    if fabs(g.gamma) < SHAPE_EPS { Ok(w) } else { Ok(expm1(g.gamma * w) / g.gamma) }
}

/// `n` GEV inversion samples from a seeded stream.
pub fn gev_sample(g: &GevParams, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = SplitMix64::new(seed);
    (0..n).map(|_| gev_quantile(g, rng.next_open01()).expect("open01 is in (0,1)")).collect()
}

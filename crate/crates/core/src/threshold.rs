//! Exceedance extraction and threshold-selection diagnostics: mean residual
//! life curve, parameter-stability curve, L-moment curve, exceedance-count
//! dispersion, and a mechanized threshold suggestion.

use alloc::string::String;
use alloc::vec::Vec;

use crate::math::{fabs, percentile_sorted, sorted, sqrt, wls_line};
use crate::{Error, Result};

/// A threshold together with the excesses above it.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExcessSample {
    pub threshold: f64,
    /// `x - threshold` for every `x > threshold`, original order preserved.
    pub excesses: Vec<f64>,
    pub n_total: usize,
    pub n_exceed: usize,
}

impl ExcessSample {
    /// Wrap raw excesses (threshold 0), e.g. direct draws from a GPD.
    pub fn from_excesses(excesses: Vec<f64>) -> Self {
        let n = excesses.len();
        Self { threshold: 0.0, excesses, n_total: n, n_exceed: n }
    }
}

/// Extract the excesses of `data` over `u`.
pub fn exceedances(data: &[f64], u: f64) -> ExcessSample {
    let excesses: Vec<f64> = data.iter().filter(|&&x| x > u).map(|&x| x - u).collect();
    let n_exceed = excesses.len();
    ExcessSample { threshold: u, excesses, n_total: data.len(), n_exceed }
}

/// Arithmetic mean of the excesses over `u` (the empirical mean excess
/// function `e_n(u)`).
pub fn empirical_mean_excess(data: &[f64], u: f64) -> Result<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for &x in data {
        if x > u {
            sum += x - u;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::NoExceedances);
    }
    Ok(sum / count as f64)
}

/// One point of the mean residual life curve.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MrlPoint {
    pub u: f64,
    pub mean_excess: f64,
    pub n_u: usize,
}

/// Mean residual life curve over a sorted threshold grid; grid points with
/// fewer than `min_exceed` exceedances are skipped.
pub fn mrl_curve(data: &[f64], u_grid: &[f64], min_exceed: usize) -> Vec<MrlPoint> {
    let mut out = Vec::new();
    for &u in u_grid {
        let mut sum = 0.0;
        let mut n_u = 0usize;
        for &x in data {
            if x > u {
                sum += x - u;
                n_u += 1;
            }
        }
        if n_u >= min_exceed.max(1) {
            out.push(MrlPoint { u, mean_excess: sum / n_u as f64, n_u });
        }
    }
    out
}

/// One point of the parameter-stability (threshold choice) curve.
///
/// `sigma_star` is the threshold-invariant modified scale `sigma_u - xi*u`:
/// under the GPD transition rule `sigma_u = sigma_0 + xi*(u - u_0)` it is the
/// same constant at every valid threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StabilityPoint {
    pub u: f64,
    pub sigma_star: f64,
    pub xi_hat: f64,
    pub se_sigma_star: f64,
    pub se_xi: f64,
}

/// Stability curve plus a count of grid points whose fit did not converge.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StabilityCurve {
    pub points: Vec<StabilityPoint>,
    pub skipped: usize,
}

/// Fit a GPD at every qualifying grid threshold and report the modified
/// scale and shape with delta-method standard errors. Non-converged fits are
/// skipped and counted.
pub fn stability_curve(data: &[f64], u_grid: &[f64], min_exceed: usize) -> StabilityCurve {
    let mut points = Vec::new();
    let mut skipped = 0usize;
    for &u in u_grid {
        let sample = exceedances(data, u);
        if sample.n_exceed < min_exceed.max(4) {
            continue;
        }
        match crate::fit::fit_gpd_mle(&sample, None) {
            Ok(fit) if fit.converged => {
                let xi = fit.params.xi;
                let sigma_star = fit.params.beta - xi * u;
                let (se_sigma_star, se_xi) = match fit.cov {
                    Some(cov) => {
                        // var(sigma*) = var(beta) + u^2 var(xi) - 2u cov(xi, beta)
                        let v = cov[1][1] + u * u * cov[0][0] - 2.0 * u * cov[0][1];
                        (sqrt(v.max(0.0)), fit.se_xi)
                    }
                    None => (0.0, 0.0),
                };
                points.push(StabilityPoint { u, sigma_star, xi_hat: xi, se_sigma_star, se_xi });
            }
            _ => skipped += 1,
        }
    }
    StabilityCurve { points, skipped }
}

/// First four sample L-moments as level, scale and the ratio pair
/// `(tau3, tau4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Lmoments {
    pub l1: f64,
    pub l2: f64,
    pub tau3: f64,
    pub tau4: f64,
}

/// Unbiased probability-weighted-moment estimator of the first four
/// L-moments (Hosking's order-statistic form).
///
/// The ratio bounds `|tau3| <= 1`, `|tau4| <= 1` hold for every sample of
/// five or more points. At exactly `n = 4` the fourth L-moment is a single
/// order-statistic contrast with no subset averaging and `tau4` can reach
/// +-1.5; curves built on top of this use far larger minimum counts.
pub fn sample_lmoments(data: &[f64]) -> Result<Lmoments> {
    let n = data.len();
    if n < 4 {
        return Err(Error::InsufficientData { required: 4, got: n });
    }
    let x = sorted(data);
    let nf = n as f64;
    let (mut b0, mut b1, mut b2, mut b3) = (0.0, 0.0, 0.0, 0.0);
    for (idx, &v) in x.iter().enumerate() {
        let i = (idx + 1) as f64; // 1-indexed rank
        b0 += v;
        b1 += v * (i - 1.0) / (nf - 1.0);
        b2 += v * (i - 1.0) * (i - 2.0) / ((nf - 1.0) * (nf - 2.0));
        b3 += v * (i - 1.0) * (i - 2.0) * (i - 3.0) / ((nf - 1.0) * (nf - 2.0) * (nf - 3.0));
    }
    b0 /= nf;
    b1 /= nf;
    b2 /= nf;
    b3 /= nf;
    let l1 = b0;
    let l2 = 2.0 * b1 - b0;
    let l3 = 6.0 * b2 - 6.0 * b1 + b0;
    let l4 = 20.0 * b3 - 30.0 * b2 + 12.0 * b1 - b0;
    if l2 == 0.0 {
        return Err(Error::DegenerateSample(String::from("zero L-scale (all values equal)")));
    }
    Ok(Lmoments { l1, l2, tau3: l3 / l2, tau4: l4 / l2 })
}

/// Theoretical GPD L-kurtosis implied by an L-skewness:
/// `tau4 = tau3 (1 + 5 tau3) / (5 + tau3)`.
pub fn gpd_tau4_of_tau3(tau3: f64) -> f64 {
    tau3 * (1.0 + 5.0 * tau3) / (5.0 + tau3)
}

/// One point of the L-moment curve.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LmomPoint {
    pub u: f64,
    pub tau3: f64,
    pub tau4: f64,
    /// Where a GPD with this `tau3` would sit.
    pub tau4_gpd: f64,
}

/// Per-threshold `(tau3, tau4)` of the excesses, with the theoretical GPD
/// curve value alongside.
pub fn lmoment_curve(data: &[f64], u_grid: &[f64], min_exceed: usize) -> Vec<LmomPoint> {
    let mut out = Vec::new();
    for &u in u_grid {
        let sample = exceedances(data, u);
        if sample.n_exceed < min_exceed.max(4) {
            continue;
        }
        if let Ok(lm) = sample_lmoments(&sample.excesses) {
            out.push(LmomPoint {
                u,
                tau3: lm.tau3,
                tau4: lm.tau4,
                tau4_gpd: gpd_tau4_of_tau3(lm.tau3),
            });
        }
    }
    out
}

/// Mean, variance and dispersion ratio of per-batch exceedance counts.
/// Under the Poisson limit the ratio is close to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CountDispersion {
    pub mean_count: f64,
    pub var_count: f64,
    pub dispersion_ratio: f64,
}

pub fn exceedance_count_check(batches: &[Vec<f64>], u: f64) -> Result<CountDispersion> {
    if batches.len() < 2 {
        return Err(Error::InsufficientData { required: 2, got: batches.len() });
    }
    let counts: Vec<f64> =
        batches.iter().map(|b| b.iter().filter(|&&x| x > u).count() as f64).collect();
    let m = counts.len() as f64;
    let mean = counts.iter().sum::<f64>() / m;
    let var = counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (m - 1.0);
    let ratio = if mean > 0.0 { var / mean } else { 0.0 };
    Ok(CountDispersion { mean_count: mean, var_count: var, dispersion_ratio: ratio })
}

/// Knobs for [`suggest_threshold`].
#[derive(Debug, Clone, Copy)]
pub struct SuggestConfig {
    /// Upper bound on the weighted RMS residual of the trailing MRL line,
    /// relative to the window's mean excess level.
    pub mrl_linearity_bound: f64,
    /// How many pooled standard errors the shape may drift across the
    /// trailing window.
    pub xi_se_mult: f64,
}

impl Default for SuggestConfig {
    fn default() -> Self {
        Self { mrl_linearity_bound: 0.025, xi_se_mult: 2.0 }
    }
}

/// Per-threshold diagnostics behind a suggestion.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThresholdScore {
    pub u: f64,
    /// Relative weighted RMS deviation of the trailing MRL points from a line.
    pub mrl_residual: f64,
    /// Max shape drift across the trailing window, in pooled-SE units.
    pub xi_drift: f64,
    pub n_exceed: usize,
    pub qualifies: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThresholdSuggestion {
    pub u_star: f64,
    /// False when no grid point qualified; `u_star` is then the grid maximum.
    pub found: bool,
    pub scores: Vec<ThresholdScore>,
}

/// Mechanized threshold choice: the smallest grid `u` whose trailing MRL
/// points are linear (weighted by exceedance counts) and whose fitted shape
/// stays within `xi_se_mult` standard errors across all later thresholds.
pub fn suggest_threshold(
    data: &[f64],
    u_grid: &[f64],
    min_exceed: usize,
    cfg: &SuggestConfig,
) -> ThresholdSuggestion {
    let mrl = mrl_curve(data, u_grid, min_exceed);
    let stab = stability_curve(data, u_grid, min_exceed);

    // Align the two curves on shared thresholds (either may skip points).
    let mut aligned: Vec<(f64, f64, usize, f64, f64)> = Vec::new();
    for m in &mrl {
        if let Some(s) = stab.points.iter().find(|s| s.u == m.u) {
            aligned.push((m.u, m.mean_excess, m.n_u, s.xi_hat, s.se_xi));
        }
    }

    let mut scores = Vec::new();
    let mut u_star = None;
    // Trailing windows shorter than 4 points cannot support a linearity
    // judgement; the last grid points are therefore never candidates.
    for i in 0..aligned.len().saturating_sub(3) {
        let window = &aligned[i..];
        let us: Vec<f64> = window.iter().map(|w| w.0).collect();
        let mes: Vec<f64> = window.iter().map(|w| w.1).collect();
        let ws: Vec<f64> = window.iter().map(|w| w.2 as f64).collect();
        let (slope, intercept) = wls_line(&us, &mes, &ws);
        let wsum: f64 = ws.iter().sum();
        let mut wrss = 0.0;
        for ((&u, &me), &w) in us.iter().zip(&mes).zip(&ws) {
            let r = me - (intercept + slope * u);
            wrss += w * r * r;
        }
        let scale = mes.iter().map(|m| fabs(*m)).sum::<f64>() / mes.len() as f64;
        let mrl_residual = sqrt(wrss / wsum) / scale.max(1e-12);

        let (xi0, se0) = (window[0].3, window[0].4);
        let mut xi_drift: f64 = 0.0;
        for w in &window[1..] {
            let pooled = se0.max(w.4).max(1e-12);
            xi_drift = xi_drift.max(fabs(w.3 - xi0) / pooled);
        }

        let qualifies = mrl_residual <= cfg.mrl_linearity_bound && xi_drift <= cfg.xi_se_mult;
        if qualifies && u_star.is_none() {
            u_star = Some(window[0].0);
        }
        scores.push(ThresholdScore {
            u: window[0].0,
            mrl_residual,
            xi_drift,
            n_exceed: window[0].2,
            qualifies,
        });
    }

    match u_star {
        Some(u) => ThresholdSuggestion { u_star: u, found: true, scores },
        None => ThresholdSuggestion {
            u_star: u_grid.last().copied().unwrap_or(f64::NAN),
            found: false,
            scores,
        },
    }
}

/// Default diagnostic grid: 40 thresholds from the 50th to the 99.5th sample
/// percentile (the GPD is typically a plausible model for roughly the upper
/// half of a severity sample).
pub fn default_u_grid(data: &[f64]) -> Vec<f64> {
    let s = sorted(data);
    let steps = 40usize;
    (0..steps)
        .map(|i| {
            let p = 0.50 + (0.995 - 0.50) * i as f64 / (steps - 1) as f64;
            percentile_sorted(&s, p)
        })
        .collect()
}

//! GPD parameter estimation and model ranking.
//!
//! Maximum likelihood runs a deterministic Nelder–Mead simplex over
//! `(xi, ln beta)` — the log-scale keeps the scale positive without
//! constrained optimization — initialized from the probability-weighted
//! moments estimate. Support violations score `-inf` likelihood so the
//! simplex walks itself back into the feasible region.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::math::{exp, fabs, ln, sqrt};
use crate::rng::SplitMix64;
use crate::threshold::{ExcessSample, sample_lmoments};
use crate::{Error, GpdParams, Result};

/// How a [`GpdFit`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum FitMethod {
    Mle,
    Pwm,
}

/// A fitted GPD anchored at a threshold.
///
/// `cov` is the parameter covariance in `(xi, beta)` order from the inverse
/// observed information; absent for PWM fits. `reliable` is Smith's rule:
/// ML estimators are trustworthy only for `xi > -0.5`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GpdFit {
    pub params: GpdParams,
    pub threshold: f64,
    pub n_total: usize,
    pub n_exceed: usize,
    pub loglik: f64,
    pub cov: Option<[[f64; 2]; 2]>,
    pub se_xi: f64,
    pub se_beta: f64,
    pub converged: bool,
    pub reliable: bool,
    pub method: FitMethod,
}

/// GPD log-likelihood of a set of excesses; `-inf` when any excess violates
/// the support constraint `1 + xi*x/beta > 0`.
pub fn gpd_loglik(p: &GpdParams, excesses: &[f64]) -> Result<f64> {
    p.validate()?;
    if excesses.is_empty() {
        return Err(Error::InsufficientData { required: 1, got: 0 });
    }
    Ok(loglik_unchecked(p.xi, p.beta, excesses))
}

fn loglik_unchecked(xi: f64, beta: f64, excesses: &[f64]) -> f64 {
    let n = excesses.len() as f64;
    if fabs(xi) < crate::dist::SHAPE_EPS {
        let sum: f64 = excesses.iter().sum();
        return -n * ln(beta) - sum / beta;
    }
    let mut sum_log = 0.0;
    for &x in excesses {
        let t = 1.0 + xi * x / beta;
        if t <= 0.0 {
            return f64::NEG_INFINITY;
        }
        sum_log += ln(t);
    }
    -n * ln(beta) - (1.0 / xi + 1.0) * sum_log
}

/// Closed-form probability-weighted-moments fit: with sample L-moments
/// `l1, l2`, `xi = 2 - l1/l2` and `beta = l1 (l1/l2 - 1)`. The sign
/// convention is pinned by the exponential fixed point (`l1 = 1, l2 = 1/2`
/// must give `xi = 0, beta = 1`).
pub fn fit_gpd_pwm(sample: &ExcessSample) -> Result<GpdFit> {
    let n = sample.n_exceed;
    if n < 4 {
        return Err(Error::InsufficientData { required: 4, got: n });
    }
    let lm = sample_lmoments(&sample.excesses)?;
    let ratio = lm.l1 / lm.l2;
    let xi = 2.0 - ratio;
    let beta = lm.l1 * (ratio - 1.0);
    if !(beta > 0.0) || !beta.is_finite() || !xi.is_finite() {
        return Err(Error::DegenerateSample(alloc::format!(
            "PWM mapping produced xi={xi}, beta={beta}"
        )));
    }
    let params = GpdParams { xi, beta };
    let loglik = loglik_unchecked(xi, beta, &sample.excesses);
    Ok(GpdFit {
        params,
        threshold: sample.threshold,
        n_total: sample.n_total,
        n_exceed: n,
        loglik,
        cov: None,
        se_xi: 0.0,
        se_beta: 0.0,
        converged: true,
        reliable: xi > -0.5,
        method: FitMethod::Pwm,
    })
}

/// Negative log-likelihood in the optimizer's `(xi, ln beta)` coordinates.
/// Shapes at or below -1 make the likelihood unbounded (the density spikes
/// at the sample maximum), so they are walled off.
fn nll(theta: &[f64; 2], excesses: &[f64]) -> f64 {
    let (xi, lnb) = (theta[0], theta[1]);
    if xi <= -1.0 + 1e-9 || fabs(xi) > 20.0 || !(-300.0..=300.0).contains(&lnb) {
        return f64::INFINITY;
    }
    let ll = loglik_unchecked(xi, exp(lnb), excesses);
    if ll.is_finite() { -ll } else { f64::INFINITY }
}

/// Deterministic Nelder–Mead on a 2-parameter objective.
fn nelder_mead_2d<F: Fn(&[f64; 2]) -> f64>(
    f: F,
    x0: [f64; 2],
    step: [f64; 2],
    max_iter: usize,
) -> ([f64; 2], f64) {
    let mut simplex = [x0, [x0[0] + step[0], x0[1]], [x0[0], x0[1] + step[1]]];
    let mut fv = [f(&simplex[0]), f(&simplex[1]), f(&simplex[2])];

    for _ in 0..max_iter {
        // order ascending
        let mut idx = [0usize, 1, 2];
        idx.sort_unstable_by(|&a, &b| fv[a].total_cmp(&fv[b]));
        let (best, mid, worst) = (idx[0], idx[1], idx[2]);

        let size = (0..2)
            .map(|k| {
                fabs(simplex[mid][k] - simplex[best][k])
                    .max(fabs(simplex[worst][k] - simplex[best][k]))
            })
            .fold(0.0, f64::max);
        let fspread = fabs(fv[worst] - fv[best]);
        if size < 1e-10 && fspread < 1e-12 * (1.0 + fabs(fv[best])) {
            break;
        }

        let centroid = [
            0.5 * (simplex[best][0] + simplex[mid][0]),
            0.5 * (simplex[best][1] + simplex[mid][1]),
        ];
        let refl = [
            centroid[0] + (centroid[0] - simplex[worst][0]),
            centroid[1] + (centroid[1] - simplex[worst][1]),
        ];
        let f_refl = f(&refl);

        if f_refl < fv[best] {
            let expand = [
                centroid[0] + 2.0 * (centroid[0] - simplex[worst][0]),
                centroid[1] + 2.0 * (centroid[1] - simplex[worst][1]),
            ];
            let f_exp = f(&expand);
            if f_exp < f_refl {
                simplex[worst] = expand;
                fv[worst] = f_exp;
            } else {
                simplex[worst] = refl;
                fv[worst] = f_refl;
            }
        } else if f_refl < fv[mid] {
            simplex[worst] = refl;
            fv[worst] = f_refl;
        } else {
            let contraction_base = if f_refl < fv[worst] { refl } else { simplex[worst] };
            let contract = [
                centroid[0] + 0.5 * (contraction_base[0] - centroid[0]),
                centroid[1] + 0.5 * (contraction_base[1] - centroid[1]),
            ];
            let f_con = f(&contract);
            if f_con < fv[worst].min(f_refl) {
                simplex[worst] = contract;
                fv[worst] = f_con;
            } else {
                // shrink toward the best vertex
                for i in 0..3 {
                    if i != best {
                        simplex[i] = [
                            simplex[best][0] + 0.5 * (simplex[i][0] - simplex[best][0]),
                            simplex[best][1] + 0.5 * (simplex[i][1] - simplex[best][1]),
                        ];
                        fv[i] = f(&simplex[i]);
                    }
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..3 {
        if fv[i] < fv[best] {
            best = i;
        }
    }
    (simplex[best], fv[best])
}

fn scaled_grad_norm(theta: &[f64; 2], excesses: &[f64], f_at: f64) -> f64 {
    let mut g_max = 0.0_f64;
    for k in 0..2 {
        let h = 1e-6 * fabs(theta[k]).max(1.0);
        let mut hi = *theta;
        let mut lo = *theta;
        hi[k] += h;
        lo[k] -= h;
        let (fh, fl) = (nll(&hi, excesses), nll(&lo, excesses));
        if !fh.is_finite() || !fl.is_finite() {
            return f64::INFINITY;
        }
        g_max = g_max.max(fabs((fh - fl) / (2.0 * h)));
    }
    g_max / fabs(f_at).max(1.0)
}

/// Observed-information covariance: invert the central-difference Hessian of
/// the negative log-likelihood in `(xi, beta)` coordinates (relative step
/// 1e-4 per coordinate, shrinking if a stencil point leaves the support).
fn covariance(xi: f64, beta: f64, excesses: &[f64]) -> Option<[[f64; 2]; 2]> {
    let f = |p: &[f64; 2]| -> f64 {
        if p[1] <= 0.0 {
            return f64::INFINITY;
        }
        let ll = loglik_unchecked(p[0], p[1], excesses);
        if ll.is_finite() { -ll } else { f64::INFINITY }
    };
    let theta = [xi, beta];
    let mut h = [1e-4 * fabs(xi).max(0.1), 1e-4 * beta];
    for _ in 0..20 {
        let mut hess = [[0.0; 2]; 2];
        let f0 = f(&theta);
        let mut ok = true;
        for i in 0..2 {
            for j in i..2 {
                let v = if i == j {
                    let mut a = theta;
                    let mut b = theta;
                    a[i] += h[i];
                    b[i] -= h[i];
                    (f(&a) - 2.0 * f0 + f(&b)) / (h[i] * h[i])
                } else {
                    let mut pp = theta;
                    let mut pm = theta;
                    let mut mp = theta;
                    let mut mm = theta;
                    pp[i] += h[i];
                    pp[j] += h[j];
                    pm[i] += h[i];
                    pm[j] -= h[j];
                    mp[i] -= h[i];
                    mp[j] += h[j];
                    mm[i] -= h[i];
                    mm[j] -= h[j];
                    (f(&pp) - f(&pm) - f(&mp) + f(&mm)) / (4.0 * h[i] * h[j])
                };
                if !v.is_finite() {
                    ok = false;
                }
                hess[i][j] = v;
                hess[j][i] = v;
            }
        }
        if ok {
            let det = hess[0][0] * hess[1][1] - hess[0][1] * hess[0][1];
            if det > 0.0 && hess[0][0] > 0.0 {
                return Some([
                    [hess[1][1] / det, -hess[0][1] / det],
                    [-hess[0][1] / det, hess[0][0] / det],
                ]);
            }
            return None;
        }
        h = [h[0] * 0.5, h[1] * 0.5];
    }
    None
}

/// Maximum-likelihood GPD fit over `(xi, ln beta)`, seeded from the PWM
/// estimate (or `init`), with a restart from `(xi=0.1, beta=mean excess)`
/// when the first search fails to converge.
pub fn fit_gpd_mle(sample: &ExcessSample, init: Option<GpdParams>) -> Result<GpdFit> {
    let n = sample.n_exceed;
    if n < 10 {
        return Err(Error::InsufficientData { required: 10, got: n });
    }
    let excesses = &sample.excesses;
    let mean: f64 = excesses.iter().sum::<f64>() / n as f64;
    let max_x = excesses.iter().cloned().fold(f64::MIN, f64::max);

    let mut start = match init {
        Some(p) => p,
        None => match fit_gpd_pwm(sample) {
            Ok(f) => f.params,
            Err(_) => GpdParams { xi: 0.1, beta: mean },
        },
    };
    // keep the start point interior
    start.xi = start.xi.clamp(-0.9, 5.0);
    if start.beta <= 0.0 || !start.beta.is_finite() {
        start.beta = mean;
    }
    if start.xi < 0.0 && start.beta < -start.xi * max_x {
        start.beta = -start.xi * max_x * 1.05;
    }

    let starts = [start, GpdParams { xi: 0.1, beta: mean }];
    let mut best: Option<([f64; 2], f64)> = None;
    let mut converged = false;
    for s in starts {
        let theta0 = [s.xi, ln(s.beta)];
        let (theta, fval) = nelder_mead_2d(|t| nll(t, excesses), theta0, [0.1, 0.1], 800);
        if best.is_none() || fval < best.unwrap().1 {
            best = Some((theta, fval));
        }
        if fval.is_finite() && scaled_grad_norm(&theta, excesses, fval) < 1e-6 {
            best = Some((theta, fval));
            converged = true;
            break;
        }
    }

    let (theta, fval) = best.unwrap();
    let params = GpdParams { xi: theta[0], beta: exp(theta[1]) };
    let loglik = if fval.is_finite() { -fval } else { f64::NEG_INFINITY };
    let cov = if converged { covariance(params.xi, params.beta, excesses) } else { None };
    let (se_xi, se_beta) = match cov {
        Some(c) => (sqrt(c[0][0].max(0.0)), sqrt(c[1][1].max(0.0))),
        None => (0.0, 0.0),
    };
    let fit = GpdFit {
        params,
        threshold: sample.threshold,
        n_total: sample.n_total,
        n_exceed: n,
        loglik,
        cov,
        se_xi,
        se_beta,
        converged,
        reliable: params.xi > -0.5,
        method: FitMethod::Mle,
    };
    if converged { Ok(fit) } else { Err(Error::NonConvergence(Box::new(fit))) }
}

/// Hill estimator of a positive tail index from the top `k` order
/// statistics: the mean upper log-spacing above `X_(n-k)`.
pub fn hill_estimator(data: &[f64], k: usize) -> Result<f64> {
    let n = data.len();
    if k < 2 || k >= n {
        return Err(Error::Domain(alloc::format!("hill needs 2 <= k < n, got k={k}, n={n}")));
    }
    if data.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Domain("hill needs strictly positive data".to_string()));
    }
    let x = crate::math::sorted(data);
    let ln_anchor = ln(x[n - k - 1]);
    let sum: f64 = x[n - k..].iter().map(|&v| ln(v) - ln_anchor).sum();
    Ok(sum / k as f64)
}

/// One candidate in a model comparison, ranked by AIC.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelScore {
    pub label: String,
    pub aic: f64,
    pub deviance: f64,
    pub k: usize,
    pub loglik: f64,
}

fn rank(mut entries: Vec<(String, f64, usize)>) -> Vec<ModelScore> {
    let max_ll = entries.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
    entries.sort_by(|a, b| {
        let aic_a = 2.0 * a.2 as f64 - 2.0 * a.1;
        let aic_b = 2.0 * b.2 as f64 - 2.0 * b.1;
        aic_a.total_cmp(&aic_b).then(a.2.cmp(&b.2)).then(a.0.cmp(&b.0))
    });
    entries
        .into_iter()
        .map(|(label, loglik, k)| ModelScore {
            label,
            aic: 2.0 * k as f64 - 2.0 * loglik,
            deviance: 2.0 * (max_ll - loglik),
            k,
            loglik,
        })
        .collect()
}

/// Rank converged fits by AIC (`2k - 2 loglik`), with deviance relative to
/// the best log-likelihood in the set. Scores are only comparable when the
/// fits share one observation set; that is the caller's contract.
pub fn score_models(fits: &[GpdFit], labels: &[&str]) -> Result<Vec<ModelScore>> {
    if fits.len() != labels.len() {
        return Err(Error::InvalidInput(alloc::format!(
            "{} fits but {} labels",
            fits.len(),
            labels.len()
        )));
    }
    if fits.is_empty() {
        return Err(Error::InvalidInput("no fits to score".to_string()));
    }
    for (fit, label) in fits.iter().zip(labels) {
        if !fit.converged {
            return Err(Error::InvalidInput(alloc::format!("fit '{label}' did not converge")));
        }
    }
    Ok(rank(fits.iter().zip(labels).map(|(f, l)| (l.to_string(), f.loglik, 2usize)).collect()))
}

/// Knobs for [`compare_thresholds`].
#[derive(Debug, Clone, Copy)]
pub struct CompareConfig {
    /// Repeated random train/test splits averaged into the score.
    pub folds: usize,
    /// Fraction of the data held out per fold.
    pub test_fraction: f64,
    /// Seed for the deterministic fold assignment.
    pub seed: u64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self { folds: 40, test_fraction: 0.5, seed: 0x7A11 }
    }
}

/// Score candidate thresholds on a common upper sample region.
///
/// A raw AIC across thresholds is meaningless (each fit sees a different
/// excess set, and the highest candidate would win any shared region it was
/// itself fitted on), so candidates are scored out of sample: per fold, each
/// candidate's GPD is fitted on the train half and its threshold-shifted
/// parameters (`beta + xi*(u_max - u)`) are evaluated as a conditional
/// log-likelihood on the test half's excesses over the highest candidate.
/// The fold-averaged held-out log-likelihood feeds the usual AIC ranking.
pub fn compare_thresholds(
    data: &[f64],
    candidates: &[f64],
    cfg: &CompareConfig,
) -> Result<Vec<ModelScore>> {
    if candidates.len() < 2 {
        return Err(Error::InvalidInput("need at least two candidate thresholds".to_string()));
    }
    if cfg.folds == 0 || !(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0) {
        return Err(Error::InvalidInput(alloc::format!(
            "need folds >= 1 and test_fraction in (0,1), got {} and {}",
            cfg.folds,
            cfg.test_fraction
        )));
    }
    let u_max = candidates.iter().cloned().fold(f64::MIN, f64::max);
    let mut totals = alloc::vec![0.0f64; candidates.len()];
    let mut rng = SplitMix64::new(cfg.seed);

    for _ in 0..cfg.folds {
        let assign: Vec<bool> = data.iter().map(|_| rng.next_f64() < cfg.test_fraction).collect();
        let train: Vec<f64> =
            data.iter().zip(&assign).filter(|&(_, &is_test)| !is_test).map(|(&x, _)| x).collect();
        let test: Vec<f64> =
            data.iter().zip(&assign).filter(|&(_, &is_test)| is_test).map(|(&x, _)| x).collect();
        let eval = crate::threshold::exceedances(&test, u_max);

        for (i, &u) in candidates.iter().enumerate() {
            let sample = crate::threshold::exceedances(&train, u);
            let fitted = fit_gpd_mle(&sample, None)
                .map(|f| f.params)
                .or_else(|_| fit_gpd_pwm(&sample).map(|f| f.params));
            let score = match fitted {
                Ok(p) => {
                    let beta_shifted = p.beta + p.xi * (u_max - u);
                    if beta_shifted > 0.0 {
                        loglik_unchecked(p.xi, beta_shifted, &eval.excesses)
                    } else {
                        f64::NEG_INFINITY
                    }
                }
                Err(_) => f64::NEG_INFINITY,
            };
            totals[i] += score;
        }
    }

    let entries: Vec<(String, f64, usize)> = candidates
        .iter()
        .zip(&totals)
        .map(|(&u, &t)| (alloc::format!("u={u}"), t / cfg.folds as f64, 2usize))
        .collect();
    Ok(rank(entries))
}

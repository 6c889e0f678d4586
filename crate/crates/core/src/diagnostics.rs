//! Plot-ready data series for model checking: QQ against the standard
//! exponential, PP and QQ against a fitted GPD, return-level curves with
//! delta-method bands, and density/histogram overlays.
//!
//! Every series uses the mean-rank plotting position `i/(n+1)` and is a
//! deterministic function of its inputs; rendering is someone else's job.

use alloc::vec::Vec;

use crate::dist::{gpd_cdf, gpd_pdf, gpd_quantile};
use crate::math::{fabs, ln_1p, ls_line, ls_quadratic_coeff, sorted, sqrt};
use crate::tail::{TailModel, return_level};
use crate::{Error, GpdFit, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SeriesKind {
    QqExp,
    Pp,
    QqGpd,
    ReturnLevel,
    Density,
    Histogram,
}

/// Least-squares line (and curvature) summarizing a QQ series. The sign of
/// `curvature` is the concavity summary: positive means the points bend up
/// away from the reference line (heavy tail), negative means they bend down.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LineSummary {
    pub slope: f64,
    pub intercept: f64,
    pub curvature: f64,
}

/// A plottable series: points ordered by x, optional confidence bands.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlotSeries {
    pub kind: SeriesKind,
    pub points: Vec<(f64, f64)>,
    pub bands: Option<Vec<(f64, f64, f64)>>,
    pub line: Option<LineSummary>,
}

/// Histogram of the excesses plus the fitted density on a fine grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DensityPlot {
    pub histogram: PlotSeries,
    pub fitted: PlotSeries,
}

fn plotting_position(i: usize, n: usize) -> f64 {
    (i + 1) as f64 / (n + 1) as f64
}

/// QQ plot of the data against standard exponential quantiles:
/// `(-ln(1 - i/(n+1)), X_(i))`. A concave departure (positive curvature of
/// the quadratic fit) flags a tail heavier than exponential.
pub fn qq_exponential(data: &[f64]) -> Result<PlotSeries> {
    if data.len() < 2 {
        return Err(Error::InsufficientData { required: 2, got: data.len() });
    }
    let ys = sorted(data);
    let n = ys.len();
    let points: Vec<(f64, f64)> =
        ys.into_iter().enumerate().map(|(i, y)| (-ln_1p(-plotting_position(i, n)), y)).collect();
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (slope, intercept) = ls_line(&xs, &ys);
    let curvature = ls_quadratic_coeff(&xs, &ys);
    Ok(PlotSeries {
        kind: SeriesKind::QqExp,
        points,
        bands: None,
        line: Some(LineSummary { slope, intercept, curvature }),
    })
}

fn require_converged(fit: &GpdFit) -> Result<()> {
    if !fit.converged {
        return Err(Error::InvalidInput(alloc::string::String::from(
            "diagnostic plots need a converged fit",
        )));
    }
    Ok(())
}

/// Probability plot: `(i/(n+1), G(excess_(i)))`. Close to the diagonal when
/// the fit is adequate.
pub fn pp_plot(fit: &GpdFit, excesses: &[f64]) -> Result<PlotSeries> {
    require_converged(fit)?;
    let xs = sorted(excesses);
    let n = xs.len();
    let mut points = Vec::with_capacity(n);
    for (i, &x) in xs.iter().enumerate() {
        points.push((plotting_position(i, n), gpd_cdf(&fit.params, x)?));
    }
    Ok(PlotSeries { kind: SeriesKind::Pp, points, bands: None, line: None })
}

/// Quantile plot: `(G^-1(i/(n+1)), excess_(i))`; near the line `y = x` for
/// an adequate fit.
pub fn qq_gpd(fit: &GpdFit, excesses: &[f64]) -> Result<PlotSeries> {
    require_converged(fit)?;
    let ys = sorted(excesses);
    let n = ys.len();
    let mut points = Vec::with_capacity(n);
    for (i, &y) in ys.iter().enumerate() {
        points.push((gpd_quantile(&fit.params, plotting_position(i, n))?, y));
    }
    let line = if n >= 2 {
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
        let (slope, intercept) = ls_line(&xs, &ys);
        let curvature = ls_quadratic_coeff(&xs, &ys);
        Some(LineSummary { slope, intercept, curvature })
    } else {
        None
    };
    Ok(PlotSeries { kind: SeriesKind::QqGpd, points, bands: None, line })
}

/// Return levels over a period grid with 95% delta-method bands propagated
/// from the fit covariance (finite-difference gradient in `(xi, beta)`).
/// Infeasible grid points (level below the threshold) are skipped.
pub fn return_level_series(
    model: &TailModel,
    cov: &[[f64; 2]; 2],
    r: f64,
    periods: &[f64],
) -> PlotSeries {
    let mut points = Vec::new();
    let mut bands = Vec::new();
    for &t in periods {
        let Ok(level) = return_level(model, r, t) else { continue };
        let grad = {
            let h_xi = 1e-5 * fabs(model.xi).max(0.1);
            let h_beta = 1e-5 * model.beta;
            let at = |xi: f64, beta: f64| -> f64 {
                let m = TailModel { xi, beta, ..*model };
                return_level(&m, r, t).unwrap_or(level)
            };
            [
                (at(model.xi + h_xi, model.beta) - at(model.xi - h_xi, model.beta)) / (2.0 * h_xi),
                (at(model.xi, model.beta + h_beta) - at(model.xi, model.beta - h_beta))
                    / (2.0 * h_beta),
            ]
        };
        let var = grad[0] * grad[0] * cov[0][0]
            + 2.0 * grad[0] * grad[1] * cov[0][1]
            + grad[1] * grad[1] * cov[1][1];
        let half = 1.959963984540054 * sqrt(var.max(0.0));
        points.push((t, level));
        bands.push((t, level - half, level + half));
    }
    PlotSeries { kind: SeriesKind::ReturnLevel, points, bands: Some(bands), line: None }
}

/// Equal-width density-normalized histogram of the excesses plus the fitted
/// GPD density on a 200-point grid.
pub fn density_series(fit: &GpdFit, excesses: &[f64], bins: usize) -> Result<DensityPlot> {
    if bins == 0 {
        return Err(Error::Domain(alloc::string::String::from("bins must be >= 1")));
    }
    if excesses.is_empty() {
        return Err(Error::InsufficientData { required: 1, got: 0 });
    }
    let max = excesses.iter().cloned().fold(f64::MIN, f64::max);
    let width = max / bins as f64;
    let mut counts = alloc::vec![0usize; bins];
    for &x in excesses {
        let mut b = (x / width) as usize;
        if b >= bins {
            b = bins - 1; // the maximum lands in the last bin
        }
        counts[b] += 1;
    }
    let n = excesses.len() as f64;
    let histogram: Vec<(f64, f64)> = counts
        .iter()
        .enumerate()
        .map(|(b, &c)| ((b as f64 + 0.5) * width, c as f64 / (n * width)))
        .collect();

    let mut fitted = Vec::with_capacity(200);
    for i in 0..200 {
        let x = max * i as f64 / 199.0;
        fitted.push((x, gpd_pdf(&fit.params, x)?));
    }
    Ok(DensityPlot {
        histogram: PlotSeries {
            kind: SeriesKind::Histogram,
            points: histogram,
            bands: None,
            line: None,
        },
        fitted: PlotSeries { kind: SeriesKind::Density, points: fitted, bands: None, line: None },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{GpdParams, gpd_sample};
    use crate::fit::{FitMethod, fit_gpd_mle};
    use crate::math::{exp, ln, pow};
    use crate::rng::SplitMix64;
    use crate::threshold::ExcessSample;

    fn exact_fit(xi: f64, beta: f64, n: usize) -> GpdFit {
        GpdFit {
            params: GpdParams { xi, beta },
            threshold: 0.0,
            n_total: n,
            n_exceed: n,
            loglik: 0.0,
            cov: None,
            se_xi: 0.0,
            se_beta: 0.0,
            converged: true,
            reliable: true,
            method: FitMethod::Mle,
        }
    }

    #[test]
    fn qq_exp_exact_data_on_diagonal() {
        // order statistics placed at their theoretical plotting positions
        let n = 200;
        let data: Vec<f64> = (0..n).map(|i| -ln(1.0 - (i + 1) as f64 / (n + 1) as f64)).collect();
        let s = qq_exponential(&data).unwrap();
        let mut prev = -1.0;
        for &(x, y) in &s.points {
            assert!((x - y).abs() < 1e-12);
            assert!(x >= 0.0 && x > prev, "x grid must be nonnegative increasing");
            prev = x;
        }
        let line = s.line.unwrap();
        assert!((line.slope - 1.0).abs() < 1e-9);
        assert!(line.intercept.abs() < 1e-9);
    }

    #[test]
    fn qq_exp_concavity_signs() {
        // Pareto (heavy) bends up; uniform (short) bends down.
        for seed in 0..10u64 {
            let mut rng = SplitMix64::new(100 + seed);
            let pareto: Vec<f64> = (0..2000).map(|_| pow(rng.next_open01(), -0.5)).collect();
            assert!(qq_exponential(&pareto).unwrap().line.unwrap().curvature > 0.0);

            let uniform: Vec<f64> = (0..2000).map(|_| rng.next_f64()).collect();
            assert!(qq_exponential(&uniform).unwrap().line.unwrap().curvature < 0.0);
        }
        assert!(qq_exponential(&[1.0]).is_err());
    }

    #[test]
    fn pp_plot_uniformity() {
        let p = GpdParams::new(0.2, 1.0).unwrap();
        let data = gpd_sample(&p, 10_000, 3).unwrap();
        let fit = fit_gpd_mle(&ExcessSample::from_excesses(data.clone()), None).unwrap();
        let s = pp_plot(&fit, &data).unwrap();
        let worst = s.points.iter().map(|&(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(worst < 0.03, "worst {worst}");
        assert!(
            s.points.iter().all(|&(x, y)| (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y))
        );

        // mis-specified fit: force an exponential onto Pareto-like data
        let heavy = GpdParams::new(0.8, 1.0).unwrap();
        let data = gpd_sample(&heavy, 10_000, 5).unwrap();
        let bad = exact_fit(0.0, data.iter().sum::<f64>() / data.len() as f64, data.len());
        let s = pp_plot(&bad, &data).unwrap();
        let worst = s.points.iter().map(|&(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(worst > 0.05, "worst {worst}");

        let single = pp_plot(&exact_fit(0.0, 1.0, 1), &[0.7]).unwrap();
        assert_eq!(single.points.len(), 1);
        assert!((single.points[0].0 - 0.5).abs() < 1e-15);

        let mut nc = exact_fit(0.0, 1.0, 1);
        nc.converged = false;
        assert!(pp_plot(&nc, &[0.7]).is_err());
    }

    #[test]
    fn qq_gpd_slope() {
        let p = GpdParams::new(0.15, 2.0).unwrap();
        let data = gpd_sample(&p, 10_000, 7).unwrap();
        let fit = fit_gpd_mle(&ExcessSample::from_excesses(data.clone()), None).unwrap();
        let s = qq_gpd(&fit, &data).unwrap();
        let slope = s.line.unwrap().slope;
        assert!((slope - 1.0).abs() < 0.05, "slope {slope}");

        // doubling the data against the same fit doubles the slope
        let doubled: Vec<f64> = data.iter().map(|x| 2.0 * x).collect();
        let s2 = qq_gpd(&fit, &doubled).unwrap();
        assert!((s2.line.unwrap().slope - 2.0 * slope).abs() < 1e-9);

        let one = qq_gpd(&exact_fit(0.1, 1.0, 1), &[0.4]).unwrap();
        assert_eq!(one.points.len(), 1);
        assert!(one.line.is_none());
    }

    #[test]
    fn return_level_series_shape() {
        let periods: Vec<f64> = (0..30).map(|i| 2.0 * pow(1.3, i as f64)).collect();
        let zero_cov = [[0.0, 0.0], [0.0, 0.0]];

        // xi = 0: linear in ln(period)
        let m = TailModel::new(5.0, 0.0, 1.0, 10_000, 1_000).unwrap();
        let s = return_level_series(&m, &zero_cov, 100.0, &periods);
        let xs: Vec<f64> = s.points.iter().map(|p| ln(p.0)).collect();
        let ys: Vec<f64> = s.points.iter().map(|p| p.1).collect();
        let curv = ls_quadratic_coeff(&xs, &ys);
        assert!(curv.abs() < 1e-9, "curvature {curv}");
        // zero covariance collapses the bands onto the curve
        for (p, b) in s.points.iter().zip(s.bands.as_ref().unwrap()) {
            assert_eq!(p.1, b.1);
            assert_eq!(p.1, b.2);
        }

        // xi > 0: convex in ln(period)
        let m = TailModel::new(5.0, 0.3, 1.0, 10_000, 1_000).unwrap();
        let s = return_level_series(&m, &zero_cov, 100.0, &periods);
        let xs: Vec<f64> = s.points.iter().map(|p| ln(p.0)).collect();
        let ys: Vec<f64> = s.points.iter().map(|p| p.1).collect();
        assert!(ls_quadratic_coeff(&xs, &ys) > 0.0);

        // bands widen with a real covariance and stay ordered
        let cov = [[1e-4, 0.0], [0.0, 1e-4]];
        let s = return_level_series(&m, &cov, 100.0, &periods);
        for b in s.bands.as_ref().unwrap() {
            assert!(b.1 < b.2);
        }

        // infeasible early periods are skipped
        let m = TailModel::new(5.0, 0.1, 1.0, 10_000, 10).unwrap();
        let s = return_level_series(&m, &zero_cov, 1.0, &[1.0, 2.0, 1e6]);
        assert_eq!(s.points.len(), 1);
    }

    #[test]
    fn pp_and_qq_share_plotting_positions() {
        // the PP y-values at the QQ x-values must agree: both series use
        // the mean-rank position i/(n+1)
        let p = GpdParams::new(0.3, 1.5).unwrap();
        let data = gpd_sample(&p, 500, 13).unwrap();
        let fit = exact_fit(0.3, 1.5, data.len());
        let pp = pp_plot(&fit, &data).unwrap();
        let qq = qq_gpd(&fit, &data).unwrap();
        for (i, (ppt, qpt)) in pp.points.iter().zip(&qq.points).enumerate() {
            let pos = (i + 1) as f64 / (data.len() + 1) as f64;
            assert!((ppt.0 - pos).abs() < 1e-15);
            let back = crate::dist::gpd_cdf(&fit.params, qpt.0).unwrap();
            assert!((back - pos).abs() < 1e-12, "i={i}");
        }
    }

    #[test]
    fn density_normalization() {
        let p = GpdParams::new(0.2, 1.0).unwrap();
        let data = gpd_sample(&p, 100_000, 9).unwrap();
        let fit = fit_gpd_mle(&ExcessSample::from_excesses(data.clone()), None).unwrap();
        let d = density_series(&fit, &data, 50).unwrap();
        let max = data.iter().cloned().fold(f64::MIN, f64::max);
        let width = max / 50.0;
        let area: f64 = d.histogram.points.iter().map(|p| p.1 * width).sum();
        assert!((area - 1.0).abs() < 1e-9, "area {area}");

        let worst = d
            .histogram
            .points
            .iter()
            .map(|&(x, h)| (h - exp(crate::fit::gpd_loglik(&fit.params, &[x]).unwrap())).abs())
            .fold(0.0, f64::max);
        assert!(worst < 0.05, "worst {worst}");

        let single = density_series(&fit, &data, 1).unwrap();
        assert!((single.histogram.points[0].1 - 1.0 / max).abs() < 1e-12);
        assert!(density_series(&fit, &data, 0).is_err());
    }
}

//! Built-in named distribution specs for the classifier.
//!
//! Addressable by string (the CLI's `classify-doa` passes these through):
//! `exponential`, `pareto:alpha`, `uniform`, `normal`, `gpd:xi,beta`,
//! `lognormal:mu,sigma`. Every builtin carries exact survival and
//! upper-quantile overrides so the limit probes stay accurate deep in the
//! tail.

use alloc::string::ToString;

use super::CdfSpec;
use crate::dist::{GpdParams, gpd_cdf, gpd_pdf};
use crate::math::{exp, expm1, fabs, ln, ln_1p, norm_cdf, norm_pdf, norm_quantile, norm_sf, pow};
use crate::{Error, Result};

fn parse_args(name: &str, rest: &str, n: usize) -> Result<alloc::vec::Vec<f64>> {
    let parts: alloc::vec::Vec<&str> = rest.split(',').collect();
    if parts.len() != n {
        return Err(Error::InvalidInput(alloc::format!(
            "'{name}' takes {n} parameter(s), got '{rest}'"
        )));
    }
    parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(alloc::format!("bad number '{p}' in '{name}'")))
        })
        .collect()
}

/// Look up a named spec, e.g. `"pareto:2"` or `"gpd:0.3,1.5"`.
pub fn spec_from_name(name: &str) -> Result<CdfSpec> {
    let (head, rest) = match name.split_once(':') {
        Some((h, r)) => (h.trim(), r.trim()),
        None => (name.trim(), ""),
    };
    match head {
        "exponential" => {
            let rate = if rest.is_empty() { 1.0 } else { parse_args(head, rest, 1)?[0] };
            if !(rate > 0.0) {
                return Err(Error::InvalidParameter("exponential rate must be > 0".to_string()));
            }
            Ok(CdfSpec::new(
                move |x| if x <= 0.0 { 0.0 } else { -expm1(-rate * x) },
                move |p| -ln_1p(-p) / rate,
                0.0,
                f64::INFINITY,
            )
            .with_survival(move |x| if x <= 0.0 { 1.0 } else { exp(-rate * x) })
            .with_upper_quantile(move |u| -ln(u) / rate)
            .with_derivative(move |x| if x < 0.0 { 0.0 } else { rate * exp(-rate * x) })
            .with_second_derivative(
                move |x| {
                    if x < 0.0 { 0.0 } else { -rate * rate * exp(-rate * x) }
                },
            )
            .with_name(name))
        }
        "pareto" => {
            let alpha = parse_args(head, rest, 1)?[0];
            if !(alpha > 0.0) {
                return Err(Error::InvalidParameter("pareto alpha must be > 0".to_string()));
            }
            Ok(CdfSpec::new(
                move |x| if x <= 1.0 { 0.0 } else { 1.0 - pow(x, -alpha) },
                move |p| exp(-ln_1p(-p) / alpha),
                1.0,
                f64::INFINITY,
            )
            .with_survival(move |x| if x <= 1.0 { 1.0 } else { pow(x, -alpha) })
            .with_upper_quantile(move |u| pow(u, -1.0 / alpha))
            .with_derivative(move |x| if x < 1.0 { 0.0 } else { alpha * pow(x, -alpha - 1.0) })
            .with_second_derivative(move |x| {
                if x < 1.0 { 0.0 } else { -alpha * (alpha + 1.0) * pow(x, -alpha - 2.0) }
            })
            .with_name(name))
        }
        "uniform" => Ok(CdfSpec::new(|x| x.clamp(0.0, 1.0), |p| p, 0.0, 1.0)
            .with_survival(|x| (1.0 - x).clamp(0.0, 1.0))
            .with_upper_quantile(|u| 1.0 - u)
            .with_derivative(|x| if (0.0..=1.0).contains(&x) { 1.0 } else { 0.0 })
            .with_second_derivative(|_| 0.0)
            .with_name(name)),
        "normal" => Ok(CdfSpec::new(norm_cdf, norm_quantile, f64::NEG_INFINITY, f64::INFINITY)
            // the lower-tail Acklam branch is the accurate one, so the upper
            // quantile goes through the symmetry -Q(u)
            .with_survival(norm_sf)
            .with_upper_quantile(|u| -norm_quantile(u))
            .with_derivative(norm_pdf)
            .with_second_derivative(|x| -x * norm_pdf(x))
            .with_name(name)),
        "gpd" => {
            let args = parse_args(head, rest, 2)?;
            let p = GpdParams::new(args[0], args[1])?;
            let (xi, beta, uep) = (p.xi, p.beta, p.upper_endpoint());
            Ok(CdfSpec::new(
                move |x| gpd_cdf(&p, x).unwrap_or(0.0),
                move |q| gpd_upper_quantile(xi, beta, (1.0 - q).max(1e-300)),
                0.0,
                uep,
            )
            .with_survival(move |x| gpd_sf(xi, beta, x))
            .with_upper_quantile(move |u| gpd_upper_quantile(xi, beta, u))
            .with_derivative(move |x| gpd_pdf(&p, x).unwrap_or(0.0))
            .with_second_derivative(move |x| {
                // d/dx of the density
                if x < 0.0 {
                    return 0.0;
                }
                if fabs(xi) < crate::dist::SHAPE_EPS {
                    return -exp(-x / beta) / (beta * beta);
                }
                let t = 1.0 + xi * x / beta;
                if t <= 0.0 {
                    return 0.0;
                }
                -(1.0 + xi) / (beta * beta) * pow(t, -1.0 / xi - 2.0)
            })
            .with_name(name))
        }
        "lognormal" => {
            let args = parse_args(head, rest, 2)?;
            let (mu, sigma) = (args[0], args[1]);
            if !(sigma > 0.0) {
                return Err(Error::InvalidParameter("lognormal sigma must be > 0".to_string()));
            }
            Ok(CdfSpec::new(
                move |x| if x <= 0.0 { 0.0 } else { norm_cdf((ln(x) - mu) / sigma) },
                move |p| exp(mu + sigma * norm_quantile(p)),
                0.0,
                f64::INFINITY,
            )
            .with_survival(move |x| if x <= 0.0 { 1.0 } else { norm_sf((ln(x) - mu) / sigma) })
            .with_upper_quantile(move |u| exp(mu - sigma * norm_quantile(u)))
            .with_derivative(move |x| {
                if x <= 0.0 {
                    return 0.0;
                }
                let z = (ln(x) - mu) / sigma;
                norm_pdf(z) / (sigma * x)
            })
            .with_second_derivative(move |x| {
                if x <= 0.0 {
                    return 0.0;
                }
                let z = (ln(x) - mu) / sigma;
                -norm_pdf(z) / (sigma * x * x) * (z / sigma + 1.0)
            })
            .with_name(name))
        }
        other => Err(Error::InvalidInput(alloc::format!(
            "unknown spec '{other}'; known: exponential, pareto:alpha, uniform, normal, \
             gpd:xi,beta, lognormal:mu,sigma"
        ))),
    }
}

fn gpd_sf(xi: f64, beta: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if fabs(xi) < crate::dist::SHAPE_EPS {
        return exp(-x / beta);
    }
    let t = 1.0 + xi * x / beta;
    if t <= 0.0 { 0.0 } else { exp(-ln_1p(xi * x / beta) / xi) }
}

fn gpd_upper_quantile(xi: f64, beta: f64, u: f64) -> f64 {
    if fabs(xi) < crate::dist::SHAPE_EPS { -beta * ln(u) } else { beta * expm1(-xi * ln(u)) / xi }
}

//! Synthetic spliced portfolio: log-severities drawn from a truncated
//! normal body below the splice point and an exact GPD tail above it, with
//! class labels assigned by mix proportions. Stands in for proprietary
//! claim data in tests and demos.

use tailrisk_core::dist::{GpdParams, gpd_quantile};
use tailrisk_core::math::{norm_cdf, norm_quantile};
use tailrisk_core::rng::SplitMix64;

use crate::portfolio::{ClaimRecord, Experience, Gender, Portfolio};
use crate::{CliError, CliResult};

/// Simulator settings; log-scale parameters. Defaults give a plausible
/// motor-severity portfolio: right-skewed log sizes, kurtosis above the
/// Gaussian 3, an 8% GPD tail spliced at 8.5 log-units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulateConfig {
    pub n: usize,
    pub body_mu: f64,
    pub body_sigma: f64,
    pub splice_u: f64,
    pub tail_xi: f64,
    pub tail_beta: f64,
    pub tail_weight: f64,
    pub male_frac: f64,
    pub young_frac: f64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            n: 100_000,
            body_mu: 7.5,
            body_sigma: 0.5,
            splice_u: 8.5,
            tail_xi: 0.25,
            tail_beta: 0.4,
            tail_weight: 0.08,
            male_frac: 0.6,
            young_frac: 0.35,
        }
    }
}

impl SimulateConfig {
    /// Parse a `key = value` config file; `#` starts a comment. Unknown keys
    /// are usage errors so typos do not silently fall back to defaults.
    pub fn from_file(path: &std::path::Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "{}:{}: expected 'key = value', got '{raw}'",
                    path.display(),
                    lineno + 1
                )));
            };
            let key = key.trim();
            let value = value.trim();
            let bad_num = || {
                CliError::Usage(format!(
                    "{}:{}: bad number '{value}' for '{key}'",
                    path.display(),
                    lineno + 1
                ))
            };
            match key {
                "n" => cfg.n = value.parse().map_err(|_| bad_num())?,
                "body_mu" => cfg.body_mu = value.parse().map_err(|_| bad_num())?,
                "body_sigma" => cfg.body_sigma = value.parse().map_err(|_| bad_num())?,
                "splice_u" => cfg.splice_u = value.parse().map_err(|_| bad_num())?,
                "tail_xi" => cfg.tail_xi = value.parse().map_err(|_| bad_num())?,
                "tail_beta" => cfg.tail_beta = value.parse().map_err(|_| bad_num())?,
                "tail_weight" => cfg.tail_weight = value.parse().map_err(|_| bad_num())?,
                "male_frac" => cfg.male_frac = value.parse().map_err(|_| bad_num())?,
                "young_frac" => cfg.young_frac = value.parse().map_err(|_| bad_num())?,
                other => {
                    return Err(CliError::Usage(format!(
                        "{}:{}: unknown simulator key '{other}'",
                        path.display(),
                        lineno + 1
                    )));
                }
            }
        }
        Ok(cfg)
    }

    fn validate(&self) -> CliResult<GpdParams> {
        // zero is allowed and means a pure body portfolio
        if !(self.tail_weight >= 0.0 && self.tail_weight < 1.0) {
            return Err(CliError::Usage(format!(
                "tail_weight must be in [0,1), got {}",
                self.tail_weight
            )));
        }
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail too
        if !(self.body_sigma > 0.0) {
            return Err(CliError::Usage("body_sigma must be > 0".into()));
        }
        if !(0.0..=1.0).contains(&self.male_frac) || !(0.0..=1.0).contains(&self.young_frac) {
            return Err(CliError::Usage("class fractions must be in [0,1]".into()));
        }
        let tail = GpdParams::new(self.tail_xi, self.tail_beta)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        // the body must actually put mass below the splice
        let body_mass = norm_cdf((self.splice_u - self.body_mu) / self.body_sigma);
        if body_mass < 1e-8 {
            return Err(CliError::Usage(format!(
                "infeasible truncation: body mass below splice_u={} is ~{body_mass:.2e}",
                self.splice_u
            )));
        }
        Ok(tail)
    }
}

/// Draw a portfolio. Per record the generator consumes, in order: the
/// body/tail selector, the severity uniform, the gender uniform, the
/// experience uniform — fixing the byte-exact stream for a given seed.
pub fn simulate_portfolio(cfg: &SimulateConfig, seed: u64) -> CliResult<Portfolio> {
    let tail = cfg.validate()?;
    let body_mass = norm_cdf((cfg.splice_u - cfg.body_mu) / cfg.body_sigma);
    let mut rng = SplitMix64::new(seed);
    let mut records = Vec::with_capacity(cfg.n);
    for _ in 0..cfg.n {
        let log_size = if rng.next_f64() < cfg.tail_weight {
            cfg.splice_u + gpd_quantile(&tail, rng.next_f64()).expect("validated params")
        } else {
            // inverse-cdf draw from the normal body truncated at splice_u
            cfg.body_mu + cfg.body_sigma * norm_quantile(rng.next_open01() * body_mass)
        };
        let gender = if rng.next_f64() < cfg.male_frac { Gender::Male } else { Gender::Female };
        let experience = if rng.next_f64() < cfg.young_frac {
            Experience::Young
        } else {
            Experience::Experienced
        };
        records.push(ClaimRecord { claim_size: log_size.exp(), gender, experience });
    }
    Ok(Portfolio::new(records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tailrisk_core::dist::gpd_cdf;
    use tailrisk_core::threshold::exceedances;

    #[test]
    fn tail_weight_zero_means_no_tail() {
        let cfg = SimulateConfig { n: 20_000, tail_weight: 0.0, ..Default::default() };
        let pf = simulate_portfolio(&cfg, 1).unwrap();
        assert!(pf.log_sizes.iter().all(|&l| l < cfg.splice_u));

        let cfg = SimulateConfig { tail_weight: 1.0, ..Default::default() };
        assert_eq!(simulate_portfolio(&cfg, 1).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn exceedance_fraction_matches_weight() {
        let cfg = SimulateConfig::default();
        let pf = simulate_portfolio(&cfg, 42).unwrap();
        let s = exceedances(&pf.log_sizes, cfg.splice_u);
        let frac = s.n_exceed as f64 / s.n_total as f64;
        assert!((frac - cfg.tail_weight).abs() < 0.01, "frac {frac}");
    }

    #[test]
    fn excesses_are_exactly_gpd() {
        // one-sample KS distance below the 95% band 1.36/sqrt(n)
        let cfg = SimulateConfig::default();
        let pf = simulate_portfolio(&cfg, 7).unwrap();
        let mut ex = exceedances(&pf.log_sizes, cfg.splice_u).excesses;
        ex.sort_unstable_by(f64::total_cmp);
        let tail = GpdParams::new(cfg.tail_xi, cfg.tail_beta).unwrap();
        let n = ex.len() as f64;
        let mut ks: f64 = 0.0;
        for (i, &x) in ex.iter().enumerate() {
            let f = gpd_cdf(&tail, x).unwrap();
            let lo = i as f64 / n;
            let hi = (i + 1) as f64 / n;
            ks = ks.max((f - lo).abs()).max((f - hi).abs());
        }
        assert!(ks < 1.36 / n.sqrt(), "KS {ks} with n={n}");
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = SimulateConfig { n: 500, ..Default::default() };
        let a = simulate_portfolio(&cfg, 99).unwrap();
        let b = simulate_portfolio(&cfg, 99).unwrap();
        assert_eq!(a.log_sizes, b.log_sizes);
        let c = simulate_portfolio(&cfg, 100).unwrap();
        assert_ne!(a.log_sizes, c.log_sizes);
    }

    #[test]
    fn infeasible_truncation_rejected() {
        let cfg = SimulateConfig { splice_u: 0.0, body_mu: 7.5, ..Default::default() };
        let err = simulate_portfolio(&cfg, 1).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn class_mix_proportions() {
        let cfg = SimulateConfig::default();
        let pf = simulate_portfolio(&cfg, 5).unwrap();
        let male =
            pf.records.iter().filter(|r| r.gender == Gender::Male).count() as f64 / cfg.n as f64;
        let young = pf.records.iter().filter(|r| r.experience == Experience::Young).count() as f64
            / cfg.n as f64;
        assert!((male - cfg.male_frac).abs() < 0.01);
        assert!((young - cfg.young_frac).abs() < 0.01);
    }

    #[test]
    fn summary_is_plausibly_heavy_tailed() {
        let cfg = SimulateConfig::default();
        let pf = simulate_portfolio(&cfg, 11).unwrap();
        let s = crate::portfolio::summarize(&pf.log_sizes).unwrap();
        assert!(s.skewness > 0.0, "skewness {}", s.skewness);
        assert!(s.kurtosis > 3.0, "kurtosis {}", s.kurtosis);
    }

    #[test]
    fn config_file_parsing() {
        let path = std::env::temp_dir().join(format!("tailrisk_cfg_{}.conf", std::process::id()));
        std::fs::write(&path, "n = 1000\ntail_xi = -0.1 # bounded tail\n\nsplice_u = 8.0\n")
            .unwrap();
        let cfg = SimulateConfig::from_file(&path).unwrap();
        assert_eq!(cfg.n, 1000);
        assert_eq!(cfg.tail_xi, -0.1);
        assert_eq!(cfg.splice_u, 8.0);
        assert_eq!(cfg.body_mu, SimulateConfig::default().body_mu);

        std::fs::write(&path, "bogus_key = 3\n").unwrap();
        assert_eq!(SimulateConfig::from_file(&path).unwrap_err().exit_code(), 2);
        std::fs::remove_file(&path).ok();
    }
}

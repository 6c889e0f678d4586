//! `tailrisk` — batch peaks-over-threshold analysis of claim severities.
//!
//! Pipeline: ingest (or simulate) -> summarize -> threshold diagnostics ->
//! GPD fit -> VaR/ES/return-level report, plus domain-of-attraction
//! classification of named distributions. Every run writes its outputs and
//! a `run_manifest.json` into `--out-dir`; identical configurations and
//! seeds reproduce every output byte for byte (the manifest's timings
//! excepted).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tailrisk_cli::portfolio::{CsvSchema, GroupBy, Portfolio, group, load_csv, summarize};
use tailrisk_cli::report::{
    OutputFormat, RunManifest, Sink, lmom_csv, mrl_csv, series_csv, stability_csv, write_csv_rows,
    write_json,
};
use tailrisk_cli::simulate::{SimulateConfig, simulate_portfolio};
use tailrisk_cli::{CliError, CliResult};

use tailrisk_core::diagnostics::{
    density_series, pp_plot, qq_exponential, qq_gpd, return_level_series,
};
use tailrisk_core::doa::{DoaConfig, classify_domain_with, spec_from_name};
use tailrisk_core::fit::{CompareConfig, GpdFit, compare_thresholds, fit_gpd_mle};
use tailrisk_core::tail::{TailModel, risk_estimates};
use tailrisk_core::threshold::{
    SuggestConfig, default_u_grid, exceedances, lmoment_curve, mrl_curve, stability_curve,
    suggest_threshold,
};

#[derive(Parser)]
#[command(
    name = "tailrisk",
    version,
    about = "Peaks-over-threshold tail analysis for claim severities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GroupByArg {
    Gender,
    Experience,
    None,
}

impl From<GroupByArg> for GroupBy {
    fn from(g: GroupByArg) -> Self {
        match g {
            GroupByArg::Gender => GroupBy::Gender,
            GroupByArg::Experience => GroupBy::Experience,
            GroupByArg::None => GroupBy::None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

/// Where the claim data comes from: a CSV file or the seeded simulator.
#[derive(Args)]
struct DataArgs {
    /// CSV input; needs at least the claim-size column
    #[arg(long, value_name = "PATH", conflicts_with_all = ["simulate", "simulate_config"])]
    input: Option<PathBuf>,

    /// Simulate the portfolio with the built-in default config
    #[arg(long, conflicts_with = "simulate_config")]
    simulate: bool,

    /// Simulate the portfolio from a key=value config file
    #[arg(long, value_name = "PATH")]
    simulate_config: Option<PathBuf>,

    /// Seed for the simulator and any seeded analysis
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Partition the analysis by policyholder class
    #[arg(long, value_enum, default_value = "none")]
    group_by: GroupByArg,

    /// Claim-size column name
    #[arg(long, default_value = "claim_size")]
    claim_col: String,

    /// Gender column name
    #[arg(long, default_value = "gender")]
    gender_col: String,

    /// Experience column name
    #[arg(long, default_value = "experience")]
    experience_col: String,
}

impl DataArgs {
    fn load(&self) -> CliResult<Portfolio> {
        if let Some(path) = &self.input {
            let schema = CsvSchema {
                claim_col: self.claim_col.clone(),
                gender_col: self.gender_col.clone(),
                experience_col: self.experience_col.clone(),
            };
            let (pf, stats) = load_csv(path, &schema)?;
            if stats.rejected_rows > 0 {
                eprintln!("note: rejected {} malformed row(s)", stats.rejected_rows);
            }
            if pf.is_empty() {
                return Err(CliError::Data(format!("no usable rows in {}", path.display())));
            }
            return Ok(pf);
        }
        let cfg = match &self.simulate_config {
            Some(path) => SimulateConfig::from_file(path)?,
            None if self.simulate => SimulateConfig::default(),
            None => {
                return Err(CliError::Usage(
                    "need a data source: --input, --simulate, or --simulate-config".into(),
                ));
            }
        };
        simulate_portfolio(&cfg, self.seed)
    }

    fn groups(&self) -> CliResult<Vec<(String, Portfolio)>> {
        Ok(group(&self.load()?, self.group_by.into()))
    }
}

#[derive(Args)]
struct OutArgs {
    /// Output directory (created if absent)
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,

    /// Table format for curve/report files
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

impl OutArgs {
    fn sink(&self) -> CliResult<Sink> {
        let fmt = match self.format {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        };
        Sink::new(&self.out_dir, fmt)
    }
}

/// Threshold grid parameters shared by the diagnostic curves.
#[derive(Args)]
struct GridArgs {
    /// Explicit grid as lo:hi:steps (log-severity units); default is 40
    /// points from the 50th to the 99.5th sample percentile
    #[arg(long, value_name = "LO:HI:STEPS")]
    u_grid: Option<String>,

    /// Skip grid points with fewer exceedances than this
    #[arg(long, default_value_t = 30)]
    min_exceed: usize,
}

impl GridArgs {
    fn resolve(&self, data: &[f64]) -> CliResult<Vec<f64>> {
        match &self.u_grid {
            None => Ok(default_u_grid(data)),
            Some(spec) => {
                let parts: Vec<&str> = spec.split(':').collect();
                let bad = || CliError::Usage(format!("--u-grid wants LO:HI:STEPS, got '{spec}'"));
                if parts.len() != 3 {
                    return Err(bad());
                }
                let lo: f64 = parts[0].parse().map_err(|_| bad())?;
                let hi: f64 = parts[1].parse().map_err(|_| bad())?;
                let steps: usize = parts[2].parse().map_err(|_| bad())?;
                #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail too
                if steps < 2 || !(hi > lo) {
                    return Err(bad());
                }
                Ok((0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect())
            }
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Summary statistics of the log claim sizes, per group
    Summary {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Mean residual life curve
    Mrl {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        out: OutArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// GPD parameter-stability curve (modified scale and shape per threshold)
    Stability {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        out: OutArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// L-skewness/L-kurtosis curve of threshold excesses
    Lmom {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        out: OutArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// QQ plot of log claim sizes against standard exponential quantiles
    Qqexp {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Fit a GPD to the excesses over a threshold
    Fit {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        out: OutArgs,
        /// Threshold in log-severity units
        #[arg(long)]
        u: f64,
    },
    /// Score candidate thresholds and suggest one
    Select {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        out: OutArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Candidate thresholds (repeat or comma-separate); at least two
        #[arg(long = "u", value_delimiter = ',', num_args = 1.., required = true)]
        candidates: Vec<f64>,
        /// Cross-validation folds behind the candidate scores
        #[arg(long, default_value_t = 40)]
        folds: usize,
    },
    /// VaR and expected shortfall table from a GPD tail fit
    Var {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        out: OutArgs,
        /// Threshold in log-severity units
        #[arg(long)]
        u: f64,
        /// Probability levels
        #[arg(long = "q", value_delimiter = ',', num_args = 1..,
              default_values_t = [0.95, 0.99, 0.995])]
        q: Vec<f64>,
    },
    /// PP/QQ/return-level/density diagnostic series for a fitted tail
    Diagnose {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        out: OutArgs,
        /// Threshold to fit at (exclusive with --fit)
        #[arg(long)]
        u: Option<f64>,
        /// Reuse a fit JSON written by `fit` instead of re-estimating
        #[arg(long, value_name = "PATH")]
        fit: Option<PathBuf>,
        /// Histogram bins for the density plot
        #[arg(long, default_value_t = 40)]
        bins: usize,
        /// Observations per period for the return-level axis
        #[arg(long, default_value_t = 250.0)]
        obs_per_period: f64,
    },
    /// Write a simulated claims CSV
    Simulate {
        /// Optional key=value simulator config (absent = defaults)
        #[arg(long, value_name = "PATH")]
        simulate_config: Option<PathBuf>,
        /// Override the configured record count
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Classify the extremal domain of attraction of a named distribution
    ClassifyDoa {
        /// Spec name: exponential, pareto:alpha, uniform, normal,
        /// gpd:xi,beta, lognormal:mu,sigma
        #[arg(long)]
        spec: String,
        /// Acceptance residual for the limit checks
        #[arg(long, default_value_t = 1e-2)]
        residual: f64,
        #[command(flatten)]
        out: OutArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let (name, result) = run(&cli.command);
    match result {
        Ok((out_dir, mut manifest)) => {
            manifest.elapsed_ms = started.elapsed().as_millis();
            if let Err(e) = manifest.write(&out_dir) {
                eprintln!("tailrisk: {e}");
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("tailrisk {name}: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cmd: &Command) -> (&'static str, CliResult<(PathBuf, RunManifest)>) {
    match cmd {
        Command::Summary { data, out } => ("summary", cmd_summary(data, out)),
        Command::Mrl { data, out, grid } => ("mrl", cmd_mrl(data, out, grid)),
        Command::Stability { data, out, grid } => ("stability", cmd_stability(data, out, grid)),
        Command::Lmom { data, out, grid } => ("lmom", cmd_lmom(data, out, grid)),
        Command::Qqexp { data, out } => ("qqexp", cmd_qqexp(data, out)),
        Command::Fit { data, out, u } => ("fit", cmd_fit(data, out, *u)),
        Command::Select { data, out, grid, candidates, folds } => {
            ("select", cmd_select(data, out, grid, candidates, *folds))
        }
        Command::Var { data, out, u, q } => ("var", cmd_var(data, out, *u, q)),
        Command::Diagnose { data, out, u, fit, bins, obs_per_period } => {
            ("diagnose", cmd_diagnose(data, out, *u, fit.as_deref(), *bins, *obs_per_period))
        }
        Command::Simulate { simulate_config, n, seed, out } => {
            ("simulate", cmd_simulate(simulate_config.as_deref(), *n, *seed, out))
        }
        Command::ClassifyDoa { spec, residual, out } => {
            ("classify-doa", cmd_classify(spec, *residual, out))
        }
    }
}

fn manifest_for(
    name: &str,
    data: Option<&DataArgs>,
    out: &OutArgs,
    sink: &Sink,
) -> (PathBuf, RunManifest) {
    let mut m = RunManifest::new(name, &out.out_dir);
    if let Some(d) = data {
        m.seed = Some(d.seed);
        m.input = d.input.as_ref().map(|p| p.display().to_string());
    }
    m.outputs = sink.written.clone();
    (out.out_dir.clone(), m)
}

fn fit_at(log_sizes: &[f64], u: f64) -> CliResult<GpdFit> {
    let sample = exceedances(log_sizes, u);
    Ok(fit_gpd_mle(&sample, None)?)
}

fn cmd_summary(data: &DataArgs, out: &OutArgs) -> CliResult<(PathBuf, RunManifest)> {
    let groups = data.groups()?;
    let mut sink = out.sink()?;
    let mut rows = Vec::new();
    println!(
        "{:<14}{:>9}{:>10}{:>8}{:>8}{:>10}{:>10}{:>8}{:>8}{:>8}",
        "group", "n", "mean", "min", "max", "skewness", "kurtosis", "p90", "p95", "p99"
    );
    for (label, pf) in &groups {
        let s = summarize(&pf.log_sizes)?;
        println!(
            "{label:<14}{:>9}{:>10.4}{:>8.3}{:>8.3}{:>10.4}{:>10.4}{:>8.3}{:>8.3}{:>8.3}",
            s.n, s.mean, s.min, s.max, s.skewness, s.kurtosis, s.p90, s.p95, s.p99
        );
        rows.push((label.clone(), s));
    }
    match sink.format {
        OutputFormat::Json => {
            let obj: Vec<serde_json::Value> = rows
                .iter()
                .map(|(l, s)| {
                    let mut v = serde_json::to_value(s).expect("summary serializes");
                    v["group"] = serde_json::Value::String(l.clone());
                    v
                })
                .collect();
            write_json(&sink.table_path("summary"), &obj)?;
        }
        OutputFormat::Csv => {
            write_csv_rows(
                &sink.table_path("summary"),
                "group,n,mean,min,max,skewness,kurtosis,p90,p95,p99",
                &rows,
                |(l, s)| {
                    format!(
                        "{l},{},{},{},{},{},{},{},{},{}",
                        s.n, s.mean, s.min, s.max, s.skewness, s.kurtosis, s.p90, s.p95, s.p99
                    )
                },
            )?;
        }
    }
    Ok(manifest_for("summary", Some(data), out, &sink))
}

fn cmd_mrl(data: &DataArgs, out: &OutArgs, grid: &GridArgs) -> CliResult<(PathBuf, RunManifest)> {
    let groups = data.groups()?;
    let mut sink = out.sink()?;
    for (label, pf) in &groups {
        let u_grid = grid.resolve(&pf.log_sizes)?;
        let curve = mrl_curve(&pf.log_sizes, &u_grid, grid.min_exceed);
        match sink.format {
            OutputFormat::Csv => mrl_csv(&sink.table_path(&format!("{label}_mrl")), &curve)?,
            OutputFormat::Json => write_json(&sink.table_path(&format!("{label}_mrl")), &curve)?,
        }
    }
    Ok(manifest_for("mrl", Some(data), out, &sink))
}

fn cmd_stability(
    data: &DataArgs,
    out: &OutArgs,
    grid: &GridArgs,
) -> CliResult<(PathBuf, RunManifest)> {
    let groups = data.groups()?;
    let mut sink = out.sink()?;
    for (label, pf) in &groups {
        let u_grid = grid.resolve(&pf.log_sizes)?;
        let curve = stability_curve(&pf.log_sizes, &u_grid, grid.min_exceed);
        if curve.skipped > 0 {
            eprintln!("note: {label}: {} non-converged threshold(s) skipped", curve.skipped);
        }
        match sink.format {
            OutputFormat::Csv => {
                stability_csv(&sink.table_path(&format!("{label}_stability")), &curve.points)?
            }
            OutputFormat::Json => {
                write_json(&sink.table_path(&format!("{label}_stability")), &curve)?
            }
        }
    }
    Ok(manifest_for("stability", Some(data), out, &sink))
}

fn cmd_lmom(data: &DataArgs, out: &OutArgs, grid: &GridArgs) -> CliResult<(PathBuf, RunManifest)> {
    let groups = data.groups()?;
    let mut sink = out.sink()?;
    for (label, pf) in &groups {
        let u_grid = grid.resolve(&pf.log_sizes)?;
        let curve = lmoment_curve(&pf.log_sizes, &u_grid, grid.min_exceed);
        match sink.format {
            OutputFormat::Csv => lmom_csv(&sink.table_path(&format!("{label}_lmom")), &curve)?,
            OutputFormat::Json => write_json(&sink.table_path(&format!("{label}_lmom")), &curve)?,
        }
    }
    Ok(manifest_for("lmom", Some(data), out, &sink))
}

fn cmd_qqexp(data: &DataArgs, out: &OutArgs) -> CliResult<(PathBuf, RunManifest)> {
    let groups = data.groups()?;
    let mut sink = out.sink()?;
    for (label, pf) in &groups {
        let series = qq_exponential(&pf.log_sizes)?;
        series_csv(&sink.path(&format!("{label}_qqexp.csv")), &series)?;
        let line = series.line.expect("qq series carries its line fit");
        write_json(&sink.path(&format!("{label}_qqexp_meta.json")), &line)?;
        let verdict = if line.curvature > 0.0 {
            "heavier than exponential"
        } else {
            "lighter than exponential"
        };
        println!("{label}: slope {:.4}, curvature {:+.5} ({verdict})", line.slope, line.curvature);
    }
    Ok(manifest_for("qqexp", Some(data), out, &sink))
}

fn cmd_fit(data: &DataArgs, out: &OutArgs, u: f64) -> CliResult<(PathBuf, RunManifest)> {
    let groups = data.groups()?;
    let mut sink = out.sink()?;
    for (label, pf) in &groups {
        let fit = fit_at(&pf.log_sizes, u)?;
        println!(
            "{label}: xi={:.4} (se {:.4}), beta={:.4} (se {:.4}), n_exceed={}, loglik={:.3}, reliable={}",
            fit.params.xi,
            fit.se_xi,
            fit.params.beta,
            fit.se_beta,
            fit.n_exceed,
            fit.loglik,
            fit.reliable
        );
        write_json(&sink.path(&format!("{label}_fit.json")), &fit)?;
    }
    Ok(manifest_for("fit", Some(data), out, &sink))
}

fn cmd_select(
    data: &DataArgs,
    out: &OutArgs,
    grid: &GridArgs,
    candidates: &[f64],
    folds: usize,
) -> CliResult<(PathBuf, RunManifest)> {
    if candidates.len() < 2 {
        return Err(CliError::Usage("select needs at least two --u candidates".into()));
    }
    let groups = data.groups()?;
    let mut sink = out.sink()?;
    for (label, pf) in &groups {
        let cfg = CompareConfig { folds, seed: data.seed, ..CompareConfig::default() };
        let scores = compare_thresholds(&pf.log_sizes, candidates, &cfg)?;
        println!("{label}: best candidate {}", scores[0].label);
        match sink.format {
            OutputFormat::Csv => write_csv_rows(
                &sink.table_path(&format!("{label}_select")),
                "label,aic,deviance,k,loglik",
                &scores,
                |s| format!("{},{},{},{},{}", s.label, s.aic, s.deviance, s.k, s.loglik),
            )?,
            OutputFormat::Json => {
                write_json(&sink.table_path(&format!("{label}_select")), &scores)?
            }
        }

        let u_grid = grid.resolve(&pf.log_sizes)?;
        let suggestion =
            suggest_threshold(&pf.log_sizes, &u_grid, grid.min_exceed, &SuggestConfig::default());
        println!(
            "{label}: suggested threshold {:.4}{}",
            suggestion.u_star,
            if suggestion.found { "" } else { " (no grid point qualified; grid maximum)" }
        );
        write_json(&sink.path(&format!("{label}_suggest.json")), &suggestion)?;
    }
    Ok(manifest_for("select", Some(data), out, &sink))
}

fn cmd_var(
    data: &DataArgs,
    out: &OutArgs,
    u: f64,
    qs: &[f64],
) -> CliResult<(PathBuf, RunManifest)> {
    for &q in qs {
        if !(q > 0.0 && q < 1.0) {
            return Err(CliError::Usage(format!("--q must be in (0,1), got {q}")));
        }
    }
    let groups = data.groups()?;
    let mut sink = out.sink()?;
    for (label, pf) in &groups {
        let fit = fit_at(&pf.log_sizes, u)?;
        let model = TailModel::from_fit(&fit)?;
        let mut rows = Vec::new();
        for &q in qs {
            let r = risk_estimates(&model, q)?;
            // var maps back to claim units monotonically; es only lives on
            // the modeling (log) scale
            rows.push((q, r.var_q, r.es_q, r.var_q.exp()));
            println!(
                "{label}: q={q}  var={:.4}  es={:.4}  var_claims={:.1}",
                r.var_q,
                r.es_q,
                r.var_q.exp()
            );
        }
        match sink.format {
            OutputFormat::Csv => write_csv_rows(
                &sink.table_path(&format!("{label}_var")),
                "q,var,es,var_claims",
                &rows,
                |(q, v, e, c)| format!("{q},{v},{e},{c}"),
            )?,
            OutputFormat::Json => {
                let obj: Vec<serde_json::Value> = rows
                    .iter()
                    .map(|(q, v, e, c)| {
                        serde_json::json!({"q": q, "var": v, "es": e, "var_claims": c})
                    })
                    .collect();
                write_json(&sink.table_path(&format!("{label}_var")), &obj)?;
            }
        }
    }
    Ok(manifest_for("var", Some(data), out, &sink))
}

fn cmd_diagnose(
    data: &DataArgs,
    out: &OutArgs,
    u: Option<f64>,
    fit_path: Option<&Path>,
    bins: usize,
    obs_per_period: f64,
) -> CliResult<(PathBuf, RunManifest)> {
    let groups = data.groups()?;
    let mut sink = out.sink()?;
    if fit_path.is_some() && groups.len() > 1 {
        return Err(CliError::Usage(
            "--fit applies to a single group (use --group-by none)".into(),
        ));
    }
    for (label, pf) in &groups {
        // either reuse the fit JSON verbatim (no re-estimation drift) or fit
        // here and write the same object `fit` would have written
        let fit: GpdFit = match fit_path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Data(format!("cannot read {}: {e}", p.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Data(format!("bad fit JSON {}: {e}", p.display())))?
            }
            None => {
                let u = u.ok_or_else(|| CliError::Usage("diagnose needs --u or --fit".into()))?;
                let fit = fit_at(&pf.log_sizes, u)?;
                write_json(&sink.path(&format!("{label}_fit.json")), &fit)?;
                fit
            }
        };
        let sample = exceedances(&pf.log_sizes, fit.threshold);
        let excesses = &sample.excesses;

        let pp = pp_plot(&fit, excesses)?;
        let qq = qq_gpd(&fit, excesses)?;
        let model = TailModel::from_fit(&fit)?;
        let cov = fit.cov.unwrap_or([[0.0; 2]; 2]);
        let periods: Vec<f64> =
            (0..40).map(|i| 1.2f64.powi(i) * 1.0).filter(|&t| t >= 1.0).collect();
        let rl = return_level_series(&model, &cov, obs_per_period, &periods);
        let dens = density_series(&fit, excesses, bins)?;

        series_csv(&sink.path(&format!("{label}_pp.csv")), &pp)?;
        series_csv(&sink.path(&format!("{label}_qq.csv")), &qq)?;
        series_csv(&sink.path(&format!("{label}_return_level.csv")), &rl)?;
        series_csv(&sink.path(&format!("{label}_density_hist.csv")), &dens.histogram)?;
        series_csv(&sink.path(&format!("{label}_density_fit.csv")), &dens.fitted)?;
        let combined = serde_json::json!({
            "fit": fit,
            "pp": pp,
            "qq": qq,
            "return_level": rl,
            "density": dens,
        });
        write_json(&sink.path(&format!("{label}_diagnostics.json")), &combined)?;
        println!(
            "{label}: diagnostics written ({} excesses over u={})",
            excesses.len(),
            fit.threshold
        );
    }
    Ok(manifest_for("diagnose", Some(data), out, &sink))
}

fn cmd_simulate(
    cfg_path: Option<&Path>,
    n: Option<usize>,
    seed: u64,
    out: &OutArgs,
) -> CliResult<(PathBuf, RunManifest)> {
    let mut cfg = match cfg_path {
        None => SimulateConfig::default(),
        Some(p) => SimulateConfig::from_file(p)?,
    };
    if let Some(n) = n {
        cfg.n = n;
    }
    let pf = simulate_portfolio(&cfg, seed)?;
    let mut sink = out.sink()?;
    write_csv_rows(&sink.path("claims.csv"), "claim_size,gender,experience", &pf.records, |r| {
        format!(
            "{},{},{}",
            r.claim_size,
            match r.gender {
                tailrisk_cli::portfolio::Gender::Male => "male",
                tailrisk_cli::portfolio::Gender::Female => "female",
                tailrisk_cli::portfolio::Gender::Unknown => "unknown",
            },
            match r.experience {
                tailrisk_cli::portfolio::Experience::Young => "young",
                tailrisk_cli::portfolio::Experience::Experienced => "experienced",
                tailrisk_cli::portfolio::Experience::Unknown => "unknown",
            }
        )
    })?;
    println!("wrote {} simulated claims", pf.len());
    let mut m = RunManifest::new("simulate", &out.out_dir);
    m.seed = Some(seed);
    m.outputs = sink.written.clone();
    Ok((out.out_dir.clone(), m))
}

fn cmd_classify(
    spec_name: &str,
    residual: f64,
    out: &OutArgs,
) -> CliResult<(PathBuf, RunManifest)> {
    let spec = spec_from_name(spec_name).map_err(|e| CliError::Usage(e.to_string()))?;
    let cfg = DoaConfig { acceptance_residual: residual, ..DoaConfig::default() };
    let verdict = classify_domain_with(&spec, &cfg);
    println!(
        "{spec_name}: {:?} (gamma_hat={:.4}, criterion {:?}, residual {:.3e})",
        verdict.classified_domain, verdict.gamma_hat, verdict.criterion_used, verdict.residual
    );
    let mut sink = out.sink()?;
    let obj = serde_json::json!({
        "spec": spec_name,
        "domain": verdict.classified_domain,
        "gamma_hat": verdict.gamma_hat,
        "criterion": verdict.criterion_used,
        "residual": verdict.residual,
    });
    write_json(&sink.path("doa_verdict.json"), &obj)?;
    let mut m = RunManifest::new("classify-doa", &out.out_dir);
    m.outputs = sink.written.clone();
    Ok((out.out_dir.clone(), m))
}

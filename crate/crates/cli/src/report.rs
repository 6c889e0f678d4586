//! Output files: CSV/JSON curve tables, fit objects, verdicts and the run
//! manifest. Everything goes through an atomic write-then-rename so a
//! crashed run never leaves a truncated file, and all numbers print in
//! shortest round-trip form so identical runs produce identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tailrisk_core::diagnostics::PlotSeries;
use tailrisk_core::threshold::{LmomPoint, MrlPoint, StabilityPoint};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Write into `<path>.tmp` and rename over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("out")
    ));
    std::fs::write(&tmp, bytes)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| CliError::Data(format!("cannot rename to {}: {e}", path.display())))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| CliError::Data(format!("serialization failed: {e}")))?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

/// Tabular CSV from explicit header and row-formatting closure.
pub fn write_csv_rows<T>(
    path: &Path,
    header: &str,
    rows: &[T],
    mut fmt_row: impl FnMut(&T) -> String,
) -> CliResult<()> {
    let mut out = String::with_capacity(rows.len() * 32 + header.len() + 1);
    out.push_str(header);
    out.push('\n');
    for r in rows {
        out.push_str(&fmt_row(r));
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

pub fn mrl_csv(path: &Path, points: &[MrlPoint]) -> CliResult<()> {
    write_csv_rows(path, "u,mean_excess,n_u", points, |p| {
        format!("{},{},{}", p.u, p.mean_excess, p.n_u)
    })
}

pub fn stability_csv(path: &Path, points: &[StabilityPoint]) -> CliResult<()> {
    write_csv_rows(path, "u,sigma_star,xi_hat,se_sigma_star,se_xi", points, |p| {
        format!("{},{},{},{},{}", p.u, p.sigma_star, p.xi_hat, p.se_sigma_star, p.se_xi)
    })
}

pub fn lmom_csv(path: &Path, points: &[LmomPoint]) -> CliResult<()> {
    write_csv_rows(path, "u,tau3,tau4,tau4_gpd", points, |p| {
        format!("{},{},{},{}", p.u, p.tau3, p.tau4, p.tau4_gpd)
    })
}

/// Plot series as `x,y[,lo,hi]` rows.
pub fn series_csv(path: &Path, series: &PlotSeries) -> CliResult<()> {
    let mut out = String::new();
    match &series.bands {
        Some(bands) => {
            out.push_str("x,y,lo,hi\n");
            for ((x, y), (_, lo, hi)) in series.points.iter().zip(bands) {
                let _ = writeln!(out, "{x},{y},{lo},{hi}");
            }
        }
        None => {
            out.push_str("x,y\n");
            for (x, y) in &series.points {
                let _ = writeln!(out, "{x},{y}");
            }
        }
    }
    write_atomic(path, out.as_bytes())
}

/// Every run drops one of these next to its outputs; timings and the
/// timestamp are the only non-reproducible fields, so byte-level
/// reproducibility checks compare everything except this file.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub args: Vec<String>,
    pub seed: Option<u64>,
    pub input: Option<String>,
    pub out_dir: String,
    pub outputs: Vec<String>,
    pub elapsed_ms: u128,
    pub created_unix_ms: u128,
}

impl RunManifest {
    pub fn new(subcommand: &str, out_dir: &Path) -> Self {
        Self {
            tool: "tailrisk",
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.to_string(),
            args: std::env::args().skip(1).collect(),
            seed: None,
            input: None,
            out_dir: out_dir.display().to_string(),
            outputs: Vec::new(),
            elapsed_ms: 0,
            created_unix_ms: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_millis())
                .unwrap_or(0),
        }
    }

    pub fn write(&self, out_dir: &Path) -> CliResult<()> {
        write_json(&out_dir.join("run_manifest.json"), self)
    }
}

/// An output sink bound to a directory: tracks written files for the
/// manifest and picks extensions from the configured format.
pub struct Sink {
    pub dir: PathBuf,
    pub format: OutputFormat,
    pub written: Vec<String>,
}

impl Sink {
    pub fn new(dir: &Path, format: OutputFormat) -> CliResult<Self> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Data(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), format, written: Vec::new() })
    }

    pub fn path(&mut self, name: &str) -> PathBuf {
        self.written.push(name.to_string());
        self.dir.join(name)
    }

    /// `<stem>.<ext>` honoring the configured format.
    pub fn table_path(&mut self, stem: &str) -> PathBuf {
        let name = format!("{stem}.{}", self.format.extension());
        self.path(&name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_and_series_csv() {
        let dir = std::env::temp_dir().join(format!("tailrisk_report_{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let series = PlotSeries {
            kind: tailrisk_core::diagnostics::SeriesKind::ReturnLevel,
            points: vec![(1.0, 2.0), (2.0, 3.5)],
            bands: Some(vec![(1.0, 1.5, 2.5), (2.0, 3.0, 4.0)]),
            line: None,
        };
        let path = dir.join("rl.csv");
        series_csv(&path, &series).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "x,y,lo,hi\n1,2,1.5,2.5\n2,3.5,3,4\n");
        assert!(!dir.join("rl.csv.tmp").exists());
        std::fs::remove_dir_all(&dir).ok();
    }
}

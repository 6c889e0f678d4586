//! Claim records, CSV ingestion, class grouping and summary statistics.
//!
//! Severities are modeled on the natural-log scale throughout the pipeline;
//! `Portfolio` keeps the derived `log_sizes` alongside the raw records.

use serde::Serialize;
use tailrisk_core::math::percentile_sorted;

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Male,
    Female,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experience {
    Young,
    Experienced,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClaimRecord {
    pub claim_size: f64,
    pub gender: Gender,
    pub experience: Experience,
}

/// An ingested portfolio with the log-severities derived once.
#[derive(Debug, Clone, Default)]
pub struct Portfolio {
    pub records: Vec<ClaimRecord>,
    pub log_sizes: Vec<f64>,
}

impl Portfolio {
    pub fn new(records: Vec<ClaimRecord>) -> Self {
        let log_sizes = records.iter().map(|r| r.claim_size.ln()).collect();
        Self { records, log_sizes }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Column names expected in an input CSV. Only the claim-size column is
/// mandatory; missing class columns make every record `Unknown`.
#[derive(Debug, Clone)]
pub struct CsvSchema {
    pub claim_col: String,
    pub gender_col: String,
    pub experience_col: String,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            claim_col: "claim_size".into(),
            gender_col: "gender".into(),
            experience_col: "experience".into(),
        }
    }
}

/// What happened during a load: malformed or non-positive rows are rejected
/// and counted, unmapped class codes fall back to `Unknown` with a warning
/// count.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct LoadStats {
    pub rows_read: usize,
    pub rejected_rows: usize,
    pub unknown_gender_codes: usize,
    pub unknown_experience_codes: usize,
}

fn parse_gender(code: &str) -> Option<Gender> {
    match code.trim().to_ascii_lowercase().as_str() {
        "m" | "male" | "1" => Some(Gender::Male),
        "f" | "female" | "2" => Some(Gender::Female),
        "" | "unknown" | "na" => Some(Gender::Unknown),
        _ => None,
    }
}

fn parse_experience(code: &str) -> Option<Experience> {
    match code.trim().to_ascii_lowercase().as_str() {
        "y" | "young" | "new" => Some(Experience::Young),
        "e" | "exp" | "experienced" => Some(Experience::Experienced),
        "" | "unknown" | "na" => Some(Experience::Unknown),
        _ => None,
    }
}

/// Load claim records from a headered CSV in deterministic row order.
pub fn load_csv(path: &std::path::Path, schema: &CsvSchema) -> CliResult<(Portfolio, LoadStats)> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let headers =
        reader.headers().map_err(|e| CliError::Data(format!("bad CSV header: {e}")))?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);

    let claim_idx = col(&schema.claim_col).ok_or_else(|| {
        CliError::Data(format!(
            "missing claim-size column '{}' in {}",
            schema.claim_col,
            path.display()
        ))
    })?;
    let gender_idx = col(&schema.gender_col);
    let experience_idx = col(&schema.experience_col);

    let mut stats = LoadStats::default();
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| CliError::Data(format!("bad CSV row: {e}")))?;
        stats.rows_read += 1;
        let size: Option<f64> = row.get(claim_idx).and_then(|s| s.trim().parse().ok());
        let Some(size) = size.filter(|s| *s > 0.0 && s.is_finite()) else {
            stats.rejected_rows += 1;
            continue;
        };
        let gender = match gender_idx.and_then(|i| row.get(i)) {
            Some(code) => parse_gender(code).unwrap_or_else(|| {
                stats.unknown_gender_codes += 1;
                Gender::Unknown
            }),
            None => Gender::Unknown,
        };
        let experience = match experience_idx.and_then(|i| row.get(i)) {
            Some(code) => parse_experience(code).unwrap_or_else(|| {
                stats.unknown_experience_codes += 1;
                Experience::Unknown
            }),
            None => Experience::Unknown,
        };
        records.push(ClaimRecord { claim_size: size, gender, experience });
    }
    Ok((Portfolio::new(records), stats))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupBy {
    Gender,
    Experience,
    None,
}

/// Partition into labeled sub-portfolios, preserving record order; the
/// `Unknown` class stays its own group. `GroupBy::None` returns the whole
/// portfolio labeled `portfolio`.
pub fn group(p: &Portfolio, by: GroupBy) -> Vec<(String, Portfolio)> {
    let labels_of = |r: &ClaimRecord| -> &'static str {
        match by {
            GroupBy::Gender => match r.gender {
                Gender::Male => "male",
                Gender::Female => "female",
                Gender::Unknown => "unknown",
            },
            GroupBy::Experience => match r.experience {
                Experience::Young => "young",
                Experience::Experienced => "experienced",
                Experience::Unknown => "unknown",
            },
            GroupBy::None => "portfolio",
        }
    };
    let order: &[&str] = match by {
        GroupBy::Gender => &["male", "female", "unknown"],
        GroupBy::Experience => &["young", "experienced", "unknown"],
        GroupBy::None => &["portfolio"],
    };
    let mut out: Vec<(String, Vec<ClaimRecord>)> =
        order.iter().map(|l| (l.to_string(), Vec::new())).collect();
    for r in &p.records {
        let label = labels_of(r);
        let slot = out.iter_mut().find(|(l, _)| l == label).unwrap();
        slot.1.push(*r);
    }
    out.into_iter()
        .filter(|(_, recs)| !recs.is_empty())
        .map(|(l, recs)| (l, Portfolio::new(recs)))
        .collect()
}

/// Table-style summary of a value series (the pipeline feeds log-severities
/// here). Kurtosis is the raw fourth standardized moment, so the Gaussian
/// reference value is 3; percentiles interpolate order statistics at
/// position `p(n-1)+1`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub p90: f64,
    pub p95: f64,
    pub p99: f64,
}

pub fn summarize(values: &[f64]) -> CliResult<SummaryStats> {
    let n = values.len();
    if n < 2 {
        return Err(CliError::Data(format!("summarize needs at least 2 values, got {n}")));
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in values {
        let d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    let sd = m2.sqrt();
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    Ok(SummaryStats {
        n,
        mean,
        min: sorted[0],
        max: sorted[n - 1],
        skewness: if sd > 0.0 { m3 / (sd * sd * sd) } else { 0.0 },
        kurtosis: if sd > 0.0 { m4 / (m2 * m2) } else { 0.0 },
        p90: percentile_sorted(&sorted, 0.90),
        p95: percentile_sorted(&sorted, 0.95),
        p99: percentile_sorted(&sorted, 0.99),
    })
}

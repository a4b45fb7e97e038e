//! Seeded Monte Carlo experiments.
//!
//! Trial `t` draws from `SeedKey::new(seed).trial(t)`, trials run on the rayon
//! pool and are collected in trial order, so every report is a pure function
//! of its configuration and seed.

mod dreg;
mod girko;
mod grid;
mod wigner;

use serde::{Deserialize, Serialize};

use crate::io::fmt_f64;

pub use dreg::{dreg_trial, run_dreg_experiment, DregAggregates, DregConfig, DregRow, NbCertificateConfig};
pub use girko::{
    girko_trial, matching_inclusion_monte_carlo, run_girko_experiment, GirkoAggregates, GirkoConfig,
    GirkoRow, InclusionEstimate,
};
pub use grid::{
    run_assumption_grid, shape_catalog, GridAggregates, GridConfig, GridRow, MAX_GRID_EDGES,
    MAX_GRID_VERTICES,
};
pub use wigner::{run_wigner_experiment, wigner_trial, WignerAggregates, WignerConfig, WignerRow};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub experiment: String,
    pub version: String,
    pub seed: u64,
    pub threads: usize,
    pub params: serde_json::Value,
}

impl ReportMeta {
    pub fn new(experiment: &str, seed: u64, params: &impl Serialize) -> Self {
        Self {
            experiment: experiment.to_string(),
            version: version(),
            seed,
            threads: rayon::current_num_threads(),
            params: serde_json::to_value(params).expect("parameters serialize"),
        }
    }
}

/// Crate version, with `git describe` output when the build saw a repository.
pub fn version() -> String {
    match option_env!("SPECTRA_GIT_DESCRIBE") {
        Some(g) if !g.is_empty() => format!("{} ({g})", env!("CARGO_PKG_VERSION")),
        _ => env!("CARGO_PKG_VERSION").to_string(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report<A, R> {
    pub meta: ReportMeta,
    pub aggregates: A,
    pub rows: Vec<R>,
}

/// A per-trial record with a fixed CSV layout.
pub trait CsvRow {
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

impl<A: Serialize, R: CsvRow> Report<A, R> {
    pub fn to_json(&self) -> serde_json::Result<String>
    where
        R: Serialize,
    {
        serde_json::to_string_pretty(self)
    }

    pub fn rows_csv(&self) -> String {
        let mut out = R::header().join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.fields().join(","));
            out.push('\n');
        }
        out
    }
}

pub(crate) fn f(x: f64) -> String {
    fmt_f64(x)
}

pub(crate) fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, fmt_f64)
}

/// Mean, standard error of the mean, median and range of a sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub stderr: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let count = values.len();
        if count == 0 {
            return Self {
                count,
                mean: f64::NAN,
                stderr: f64::NAN,
                median: f64::NAN,
                min: f64::NAN,
                max: f64::NAN,
            };
        }
        let mean = values.iter().sum::<f64>() / count as f64;
        let stderr = if count > 1 {
            let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
            (ss / (count - 1) as f64 / count as f64).sqrt()
        } else {
            f64::INFINITY
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let median = if count % 2 == 1 {
            sorted[count / 2]
        } else {
            (sorted[count / 2 - 1] + sorted[count / 2]) / 2.0
        };
        Self {
            count,
            mean,
            stderr,
            median,
            min: sorted[0],
            max: sorted[count - 1],
        }
    }
}

/// `mean(lhs) <= mean(rhs) + sigmas * sqrt(se_lhs^2 + se_rhs^2)`.
pub fn mean_dominated(lhs: &Summary, rhs: &Summary, sigmas: f64) -> bool {
    lhs.mean <= rhs.mean + sigmas * lhs.stderr.hypot(rhs.stderr)
}

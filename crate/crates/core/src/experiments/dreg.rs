use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{f, opt, CsvRow, Report, ReportMeta, Summary};
use crate::ensembles::{centered_adjacency, sample_config_model, ConfigGraph, EnsembleSpec};
use crate::error::{Error, Result};
use crate::jensen::certify;
use crate::nonbacktracking::build_nb_matrix;
use crate::rng::SeedKey;
use crate::spectral::{max_row_norm, regular_extremes, regular_second_eigenvalue, DENSE_REGULAR_LIMIT};

/// Largest `n` for which the nonbacktracking certificate is computed.
pub const NB_CERTIFICATE_CAP: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NbCertificateConfig {
    pub tau: f64,
    pub delta: f64,
    pub nodes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DregConfig {
    pub n: usize,
    pub d: usize,
    pub trials: u64,
    /// Contour certificate for `B_M` of the centered adjacency (small `n` only).
    pub nb_certificate: Option<NbCertificateConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DregRow {
    pub trial: u64,
    /// `None` above the dense limit, where only the second eigenvalue is computed.
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub lambda_min: Option<f64>,
    /// `max(lambda2, -lambda_min)`.
    pub second: f64,
    /// `second / sqrt(d - 1)`.
    pub ratio: f64,
    pub centered_max_row_norm: f64,
    pub loops: u32,
    pub nb_log_mean_sq_det: Option<f64>,
    pub nb_outlier_bound: Option<u64>,
}

impl CsvRow for DregRow {
    fn header() -> &'static [&'static str] {
        &[
            "trial", "lambda1", "lambda2", "lambda_min", "second", "ratio", "centered_max_row_norm",
            "loops", "nb_log_mean_sq_det", "nb_outlier_bound",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.trial.to_string(),
            opt(self.lambda1),
            opt(self.lambda2),
            opt(self.lambda_min),
            f(self.second),
            f(self.ratio),
            f(self.centered_max_row_norm),
            self.loops.to_string(),
            opt(self.nb_log_mean_sq_det),
            self.nb_outlier_bound.map_or_else(String::new, |b| b.to_string()),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DregAggregates {
    pub ratio: Summary,
    pub centered_max_row_norm: Summary,
    /// `lambda1 == d` up to rounding in every dense trial.
    pub lambda1_is_degree: bool,
    /// Asymptotic lower limit of the ratio, `2`.
    pub ratio_floor: f64,
}

pub fn dreg_trial(g: &ConfigGraph, cfg: &DregConfig, trial: u64) -> Result<DregRow> {
    let d = g.d() as f64;
    let (lambda1, lambda2, lambda_min, second) = if g.n() <= DENSE_REGULAR_LIMIT {
        let e = regular_extremes(g)?;
        (Some(e.lambda1), Some(e.lambda2), Some(e.lambda_min), e.second())
    } else {
        (None, None, None, regular_second_eigenvalue(g)?)
    };
    let m = centered_adjacency(g);
    let (nb_log_mean_sq_det, nb_outlier_bound) = match cfg.nb_certificate {
        Some(c) if g.n() <= NB_CERTIFICATE_CAP => {
            let cert = certify(&build_nb_matrix(&m)?, c.tau, c.nodes, c.delta)?;
            (Some(cert.log_mean_sq_det), Some(cert.outlier_count_bound))
        }
        _ => (None, None),
    };
    Ok(DregRow {
        trial,
        lambda1,
        lambda2,
        lambda_min,
        second,
        ratio: second / (d - 1.0).sqrt(),
        centered_max_row_norm: max_row_norm(&m),
        loops: (0..g.n()).map(|i| g.loops(i)).sum(),
        nb_log_mean_sq_det,
        nb_outlier_bound,
    })
}

/// Second adjacency eigenvalue of configuration-model graphs relative to `sqrt(d - 1)`.
pub fn run_dreg_experiment(cfg: &DregConfig, seed: u64) -> Result<Report<DregAggregates, DregRow>> {
    EnsembleSpec::DregCentered { n: cfg.n, d: cfg.d }.validate()?;
    if cfg.trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    let key = SeedKey::new(seed);
    let rows = (0..cfg.trials)
        .into_par_iter()
        .map(|t| dreg_trial(&sample_config_model(cfg.n, cfg.d, key.trial(t))?, cfg, t))
        .collect::<Result<Vec<_>>>()?;
    let d = cfg.d as f64;
    let aggregates = DregAggregates {
        ratio: Summary::of(&rows.iter().map(|r| r.ratio).collect::<Vec<_>>()),
        centered_max_row_norm: Summary::of(&rows.iter().map(|r| r.centered_max_row_norm).collect::<Vec<_>>()),
        lambda1_is_degree: rows
            .iter()
            .all(|r| r.lambda1.is_none_or(|l| (l - d).abs() <= 1e-9 * d)),
        ratio_floor: 2.0,
    };
    Ok(Report {
        meta: ReportMeta::new("dreg", seed, cfg),
        aggregates,
        rows,
    })
}

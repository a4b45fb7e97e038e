use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{f, opt, CsvRow, Report, ReportMeta, Summary};
use crate::ensembles::{sample_wigner, EnsembleSpec, EntryLaw};
use crate::error::{Error, Result};
use crate::matrix::CMat;
use crate::nonbacktracking::ihara_bass_parts;
use crate::rng::SeedKey;
use crate::spectral::{eigenvalues, max_row_norm, spectral_radius};

/// Default largest `n` for which `B_M` (dimension `n(n-1)`) is diagonalized.
pub const DEFAULT_NB_CAP: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerConfig {
    pub n: usize,
    pub entry_law: EntryLaw,
    pub trials: u64,
    /// `B_M` is only formed when `n <= nb_cap`.
    pub nb_cap: usize,
}

impl WignerConfig {
    pub fn new(n: usize, entry_law: EntryLaw, trials: u64) -> Self {
        Self {
            n,
            entry_law,
            trials,
            nb_cap: DEFAULT_NB_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerRow {
    pub trial: u64,
    pub rho: f64,
    pub max_row_norm: f64,
    pub rho_nb: Option<f64>,
    pub ihara_bass_bound: Option<f64>,
    pub bound_holds: Option<bool>,
    /// `rho / (1 + max row norm)`.
    pub normalized_rho: f64,
}

impl CsvRow for WignerRow {
    fn header() -> &'static [&'static str] {
        &["trial", "rho", "max_row_norm", "rho_nb", "ihara_bass_bound", "bound_holds", "normalized_rho"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.trial.to_string(),
            f(self.rho),
            f(self.max_row_norm),
            opt(self.rho_nb),
            opt(self.ihara_bass_bound),
            self.bound_holds.map_or_else(String::new, |b| b.to_string()),
            f(self.normalized_rho),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerAggregates {
    pub rho: Summary,
    pub normalized_rho: Summary,
    /// Present when `B_M` was formed.
    pub rho_nb_sq: Option<Summary>,
    pub bound_violations: u64,
    /// Entry law meets `E|M_ij|^4 <= 1/n`.
    pub fourth_moment_ok: bool,
}

/// Spectral radius, row norms and (optionally) the nonbacktracking bound for one Hermitian matrix.
pub fn wigner_trial(m: &CMat, with_nb: bool, trial: u64) -> Result<WignerRow> {
    let rho = spectral_radius(&eigenvalues(m)?);
    let (rho_nb, ihara_bass_bound, bound_holds, row_norm) = if with_nb {
        let parts = ihara_bass_parts(m)?;
        let b = parts.bound();
        (Some(parts.rho_nb), Some(b), Some(rho <= b), parts.max_row_norm)
    } else {
        (None, None, None, max_row_norm(m))
    };
    Ok(WignerRow {
        trial,
        rho,
        max_row_norm: row_norm,
        rho_nb,
        ihara_bass_bound,
        bound_holds,
        normalized_rho: rho / (1.0 + row_norm),
    })
}

/// Hermitian spectral radius against the nonbacktracking bound.
pub fn run_wigner_experiment(cfg: &WignerConfig, seed: u64) -> Result<Report<WignerAggregates, WignerRow>> {
    let spec = EnsembleSpec::Wigner {
        n: cfg.n,
        entry_law: cfg.entry_law,
    };
    spec.validate()?;
    if cfg.trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    let with_nb = cfg.n <= cfg.nb_cap;
    let key = SeedKey::new(seed);
    let rows = (0..cfg.trials)
        .into_par_iter()
        .map(|t| wigner_trial(&sample_wigner(&spec, key.trial(t))?, with_nb, t))
        .collect::<Result<Vec<_>>>()?;
    let col = |g: fn(&WignerRow) -> f64| rows.iter().map(g).collect::<Vec<_>>();
    let n = cfg.n as f64;
    let aggregates = WignerAggregates {
        rho: Summary::of(&col(|r| r.rho)),
        normalized_rho: Summary::of(&col(|r| r.normalized_rho)),
        rho_nb_sq: with_nb.then(|| Summary::of(&col(|r| r.rho_nb.unwrap_or(0.0).powi(2)))),
        bound_violations: rows.iter().filter(|r| r.bound_holds == Some(false)).count() as u64,
        fourth_moment_ok: cfg.entry_law.fourth_abs_moment() / (n * n) <= 1.0 / n,
    };
    Ok(Report {
        meta: ReportMeta::new("wigner", seed, cfg),
        aggregates,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_matrix_row() {
        let r = wigner_trial(&CMat::zeros(6, 6), true, 0).unwrap();
        assert_eq!(r.rho, 0.0);
        assert_eq!(r.rho_nb, Some(0.0));
        assert_eq!(r.bound_holds, Some(true));
        assert_eq!(r.normalized_rho, 0.0);
    }

    #[test]
    fn small_experiment_has_no_violations() {
        let cfg = WignerConfig::new(8, EntryLaw::Gaussian, 10);
        let r = run_wigner_experiment(&cfg, 2).unwrap();
        assert_eq!(r.aggregates.bound_violations, 0);
        assert!(r.aggregates.rho_nb_sq.is_some());
        assert!(r.aggregates.fourth_moment_ok);
        let big = WignerConfig::new(40, EntryLaw::Rademacher, 2);
        assert!(run_wigner_experiment(&big, 2).unwrap().aggregates.rho_nb_sq.is_none());
        assert!(!run_wigner_experiment(&WignerConfig::new(2, EntryLaw::Gaussian, 1), 0)
            .unwrap()
            .aggregates
            .fourth_moment_ok);
    }
}

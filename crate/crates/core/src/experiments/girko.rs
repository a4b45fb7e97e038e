use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{f, mean_dominated, CsvRow, Report, ReportMeta, Summary};
use crate::combinatorics::{girko_closed_form, matching_inclusion_prob, rat_to_f64};
use crate::ensembles::{sample_config_model, sample_matrix, spike_magnitude, EnsembleSpec, SPIKE_MAGNITUDE_CAP};
use crate::error::{Error, Result};
use crate::jensen::{certify_with_spectrum, jensen_lhs_from_spectrum};
use crate::matrix::CMat;
use crate::rng::SeedKey;
use crate::spectral::{eigenvalues, outlier_count, spectral_radius};

/// Slack allowed between the two sides of the per-matrix inequality.
const QUADRATURE_SLACK: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GirkoConfig {
    pub ensemble: EnsembleSpec,
    pub trials: u64,
    pub tau: f64,
    pub delta: f64,
    pub nodes: usize,
    /// Outliers are also counted beyond `1 + epsilon`.
    pub epsilon: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GirkoRow {
    pub trial: u64,
    pub rho_sq: f64,
    pub outliers_tau: usize,
    pub outliers_eps: usize,
    /// Eigenvalues beyond `tau * sqrt(1 + delta)`.
    pub outliers_certified: usize,
    pub jensen_lhs: f64,
    pub log_rhs: f64,
    pub rhs: f64,
    pub bound: u64,
    /// `(1 + delta)^outliers_certified`.
    pub growth: f64,
    pub near_circle: bool,
    pub theorem_holds: bool,
}

impl CsvRow for GirkoRow {
    fn header() -> &'static [&'static str] {
        &[
            "trial", "rho_sq", "outliers_tau", "outliers_eps", "outliers_certified", "jensen_lhs",
            "log_rhs", "rhs", "bound", "growth", "near_circle", "theorem_holds",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.trial.to_string(),
            f(self.rho_sq),
            self.outliers_tau.to_string(),
            self.outliers_eps.to_string(),
            self.outliers_certified.to_string(),
            f(self.jensen_lhs),
            f(self.log_rhs),
            f(self.rhs),
            self.bound.to_string(),
            f(self.growth),
            self.near_circle.to_string(),
            self.theorem_holds.to_string(),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GirkoAggregates {
    pub rho_sq: Summary,
    pub outliers_certified: Summary,
    pub growth: Summary,
    pub rhs: Summary,
    /// Mean growth is within three combined standard errors below the mean RHS.
    pub expectation_bound_holds: bool,
    /// Exact value of the mean RHS, for Girko ensembles with `tau > 1`.
    pub closed_form: Option<f64>,
    /// `(mean rhs - closed_form) / stderr`.
    pub closed_form_z: Option<f64>,
    pub theorem_violations: u64,
    /// Fraction of trials whose spectral radius is exactly zero.
    pub zero_radius_fraction: f64,
    pub spike_capped: Option<bool>,
}

impl GirkoConfig {
    fn validate(&self) -> Result<()> {
        self.ensemble.validate()?;
        if self.ensemble.n() < 2 {
            return Err(Error::Domain("experiment needs n >= 2".into()));
        }
        if matches!(self.ensemble, EnsembleSpec::Wigner { .. }) {
            return Err(Error::WrongEnsemble {
                expected: "girko",
                actual: "wigner",
            });
        }
        if self.trials == 0 {
            return Err(Error::Domain("trials must be at least 1".into()));
        }
        Ok(())
    }
}

/// One trial on a given matrix.
pub fn girko_trial(m: &CMat, cfg: &GirkoConfig, trial: u64) -> Result<GirkoRow> {
    let s = eigenvalues(m)?;
    let cert = certify_with_spectrum(m, &s, cfg.tau, cfg.nodes, cfg.delta)?;
    let rho = spectral_radius(&s);
    let jensen_lhs = jensen_lhs_from_spectrum(&s, cfg.tau);
    let outliers_certified = outlier_count(&s, cert.certified_threshold());
    Ok(GirkoRow {
        trial,
        rho_sq: rho * rho,
        outliers_tau: outlier_count(&s, cfg.tau),
        outliers_eps: outlier_count(&s, 1.0 + cfg.epsilon),
        outliers_certified,
        jensen_lhs,
        log_rhs: cert.log_mean_sq_det,
        rhs: cert.log_mean_sq_det.exp(),
        bound: cert.outlier_count_bound,
        growth: (1.0 + cfg.delta).powi(outliers_certified as i32),
        near_circle: cert.near_circle_warning,
        theorem_holds: jensen_lhs <= cert.log_mean_sq_det + QUADRATURE_SLACK,
    })
}

/// Spectral radius, outlier counts and contour certificates over many non-Hermitian samples.
pub fn run_girko_experiment(cfg: &GirkoConfig, seed: u64) -> Result<Report<GirkoAggregates, GirkoRow>> {
    cfg.validate()?;
    let key = SeedKey::new(seed);
    let rows = (0..cfg.trials)
        .into_par_iter()
        .map(|t| girko_trial(&sample_matrix(&cfg.ensemble, key.trial(t))?, cfg, t))
        .collect::<Result<Vec<_>>>()?;

    let col = |g: fn(&GirkoRow) -> f64| rows.iter().map(g).collect::<Vec<_>>();
    let rhs = Summary::of(&col(|r| r.rhs));
    let growth = Summary::of(&col(|r| r.growth));
    let closed_form = match cfg.ensemble {
        EnsembleSpec::Girko { n, .. } if cfg.tau > 1.0 => Some(girko_closed_form(n as u32, cfg.tau)?),
        _ => None,
    };
    let aggregates = GirkoAggregates {
        rho_sq: Summary::of(&col(|r| r.rho_sq)),
        outliers_certified: Summary::of(&col(|r| r.outliers_certified as f64)),
        expectation_bound_holds: mean_dominated(&growth, &rhs, 3.0),
        growth,
        closed_form,
        closed_form_z: closed_form.map(|c| (rhs.mean - c) / rhs.stderr),
        rhs,
        theorem_violations: rows.iter().filter(|r| !r.theorem_holds).count() as u64,
        zero_radius_fraction: rows.iter().filter(|r| r.rho_sq == 0.0).count() as f64 / rows.len() as f64,
        spike_capped: match cfg.ensemble {
            EnsembleSpec::SparseSpike { n } => Some(spike_magnitude(n, SPIKE_MAGNITUDE_CAP).1),
            _ => None,
        },
    };
    Ok(Report {
        meta: ReportMeta::new("girko", seed, cfg),
        aggregates,
        rows,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InclusionEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub exact: f64,
}

/// Frequency with which the pairs `(0,1), (2,3), ..., (2t-2, 2t-1)` all appear in a uniform matching of `[N]`.
pub fn matching_inclusion_monte_carlo(n: usize, t: usize, trials: u64, seed: u64) -> Result<InclusionEstimate> {
    let exact = rat_to_f64(&matching_inclusion_prob(n, t)?);
    if trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    let key = SeedKey::new(seed);
    let hits = (0..trials)
        .into_par_iter()
        .map(|i| {
            let g = sample_config_model(n, 1, key.trial(i))?;
            Ok((0..t).all(|p| g.contains_pair(2 * p, 2 * p + 1)) as u64)
        })
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum::<u64>();
    let p = hits as f64 / trials as f64;
    Ok(InclusionEstimate {
        estimate: p,
        stderr: (p * (1.0 - p) / trials as f64).sqrt(),
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::EntryLaw;

    fn cfg(ensemble: EnsembleSpec, trials: u64) -> GirkoConfig {
        GirkoConfig {
            ensemble,
            trials,
            tau: 1.5,
            delta: 0.2,
            nodes: 64,
            epsilon: 0.05,
        }
    }

    #[test]
    fn report_is_reproducible() {
        let c = cfg(EnsembleSpec::Girko { n: 8, entry_law: EntryLaw::Gaussian }, 20);
        let a = run_girko_experiment(&c, 3).unwrap();
        let b = run_girko_experiment(&c, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.aggregates.theorem_violations, 0);
        assert!(a.aggregates.closed_form.is_some());
        assert_eq!(a.rows_csv().lines().count(), 21);
    }

    #[test]
    fn spike_is_mostly_zero() {
        let c = cfg(EnsembleSpec::SparseSpike { n: 30 }, 50);
        let r = run_girko_experiment(&c, 1).unwrap();
        assert!(r.aggregates.zero_radius_fraction > 0.9);
        assert_eq!(r.aggregates.spike_capped, Some(false));
    }

    #[test]
    fn rejects_hermitian_ensembles() {
        let c = cfg(EnsembleSpec::Wigner { n: 8, entry_law: EntryLaw::Gaussian }, 2);
        assert!(run_girko_experiment(&c, 0).is_err());
    }

    #[test]
    fn inclusion_frequency_small() {
        let e = matching_inclusion_monte_carlo(8, 1, 20_000, 5).unwrap();
        assert!((e.estimate - e.exact).abs() < 4.0 * e.stderr);
        assert!((e.exact - 1.0 / 7.0).abs() < 1e-15);
    }
}

//! Dense spectra: eigenvalues, spectral radius, outliers, row norms and
//! log-determinants.
//!
//! Eigenvalues come from `faer` (Hermitian inputs go to its self-adjoint
//! solver). Determinants never touch the eigensolver: they go through the LU
//! and Hessenberg routines in this module, which keeps the Jensen quadrature
//! an independent check on the spectrum.

mod hessenberg;
mod lu;
mod regular;

use faer::Side;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{CMat, C64};

pub use hessenberg::{hessenberg, Hessenberg};
pub use lu::{determinant, log_abs_det};
pub use regular::{
    deflated_power_iteration, regular_extremes, regular_second_eigenvalue, RegularExtremes,
    DENSE_REGULAR_LIMIT,
};

/// Eigenvalues within this distance of an outlier threshold raise a warning.
pub const THRESHOLD_WARNING_BAND: f64 = 1e-9;

/// Multiset of eigenvalues of an `n x n` matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    eigenvalues: Vec<C64>,
    source_dim: usize,
    hermitian: bool,
}

impl Spectrum {
    pub fn from_eigenvalues(eigenvalues: Vec<C64>) -> Self {
        let source_dim = eigenvalues.len();
        Self {
            eigenvalues,
            source_dim,
            hermitian: false,
        }
    }

    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigenvalues
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    /// Whether the source was routed to the Hermitian solver (real eigenvalues, sorted descending).
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Real parts, for Hermitian sources.
    pub fn real_parts(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.re).collect()
    }
}

pub fn eigenvalues(m: &CMat) -> Result<Spectrum> {
    let n = m.require_square()?;
    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: Vec::new(),
            source_dim: 0,
            hermitian: true,
        });
    }
    if m.is_hermitian() {
        let mut values: Vec<f64> = if m.is_real() {
            let a = faer::Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)].re);
            a.self_adjoint_eigenvalues(Side::Lower)
                .map_err(|_| Error::NoConvergence)?
        } else {
            m.to_faer()
                .self_adjoint_eigenvalues(Side::Lower)
                .map_err(|_| Error::NoConvergence)?
        };
        values.sort_by(|a, b| b.total_cmp(a));
        return Ok(Spectrum {
            eigenvalues: values.into_iter().map(|x| C64::new(x, 0.0)).collect(),
            source_dim: n,
            hermitian: true,
        });
    }
    let values = if m.is_real() {
        let a = faer::Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)].re);
        a.eigenvalues().map_err(|_| Error::NoConvergence)?
    } else {
        m.to_faer().eigenvalues().map_err(|_| Error::NoConvergence)?
    };
    if values.len() != n || values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NoConvergence);
    }
    Ok(Spectrum {
        eigenvalues: values,
        source_dim: n,
        hermitian: false,
    })
}

pub fn spectral_radius(s: &Spectrum) -> f64 {
    s.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues with modulus strictly above `threshold`.
pub fn outlier_count(s: &Spectrum, threshold: f64) -> usize {
    outlier_scan(s, threshold).count
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutlierScan {
    pub count: usize,
    /// Some eigenvalue modulus lies within [`THRESHOLD_WARNING_BAND`] of the threshold.
    pub near_threshold: bool,
}

pub fn outlier_scan(s: &Spectrum, threshold: f64) -> OutlierScan {
    debug_assert!(threshold > 0.0);
    let mut scan = OutlierScan {
        count: 0,
        near_threshold: false,
    };
    for z in &s.eigenvalues {
        let r = z.norm();
        if r > threshold {
            scan.count += 1;
        }
        if (r - threshold).abs() <= THRESHOLD_WARNING_BAND {
            scan.near_threshold = true;
        }
    }
    scan
}

/// Largest Euclidean norm of a row.
pub fn max_row_norm(m: &CMat) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

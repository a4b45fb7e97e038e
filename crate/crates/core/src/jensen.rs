//! Contour certificates for eigenvalue outliers.
//!
//! For any square `M` and `tau > 0`,
//! `prod_{|lambda| > tau} (|lambda|/tau)^2 <= E_theta |det(I - e^{i theta} M / tau)|^2`.
//! The right side is evaluated by a `K`-node trapezoid rule, entirely in log
//! domain; since `det(I - zM)` is a polynomial of degree at most `n`, the rule
//! is exact (up to rounding) once `K > n`.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{CMat, C64};
use crate::spectral::{eigenvalues, hessenberg, Spectrum};

pub const DEFAULT_NODES: usize = 1024;
pub const MIN_NODES: usize = 8;
/// Relative half-width of the band around `tau` that raises `near_circle_warning`.
pub const NEAR_CIRCLE_BAND: f64 = 1e-3;
/// Minimum distance from a zero of `det(I - zM)` to the circle in [`jensen_formula_check`].
pub const ZERO_CLEARANCE: f64 = 1e-6;

/// Node evaluations run in parallel from this dimension on.
const PARALLEL_DIM: usize = 48;

fn check_nodes(k: usize) -> Result<()> {
    if k < MIN_NODES {
        return Err(Error::Domain(format!("need at least {MIN_NODES} nodes, got {k}")));
    }
    Ok(())
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("{name} must be positive and finite, got {x}")));
    }
    Ok(())
}

/// `log|det(I - z_j M)|` at `z_j = r e^{2 pi i j / K}`, `j < K`.
fn log_det_on_circle(m: &CMat, r: f64, k: usize) -> Result<Vec<f64>> {
    let h = hessenberg(m)?;
    let node = |j: usize| h.log_abs_det_one_minus(C64::from_polar(r, TAU * j as f64 / k as f64));
    Ok(if h.dim() >= PARALLEL_DIM {
        (0..k).into_par_iter().map(node).collect()
    } else {
        (0..k).map(node).collect()
    })
}

/// Sum in a fixed balanced tree so the result does not depend on scheduling.
fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        len => {
            let (a, b) = v.split_at(len / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// `log((1/K) sum_j exp(x_j))` with a max shift; `-inf` entries contribute zero.
pub fn log_mean_exp(x: &[f64]) -> f64 {
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let shifted: Vec<f64> = x.iter().map(|&v| (v - max).exp()).collect();
    max + pairwise_sum(&shifted).ln() - (x.len() as f64).ln()
}

/// `log E_theta |det(I - e^{i theta} M / tau)|^2` by the `K`-node trapezoid rule.
pub fn mean_sq_det_on_circle(m: &CMat, tau: f64, k: usize) -> Result<f64> {
    check_positive("tau", tau)?;
    check_nodes(k)?;
    let twice: Vec<f64> = log_det_on_circle(m, 1.0 / tau, k)?
        .into_iter()
        .map(|v| 2.0 * v)
        .collect();
    Ok(log_mean_exp(&twice))
}

/// `sum_{|lambda| > tau} 2 log(|lambda| / tau)`.
pub fn jensen_lhs_from_spectrum(s: &Spectrum, tau: f64) -> f64 {
    s.eigenvalues()
        .iter()
        .map(|z| z.norm())
        .filter(|&r| r > tau)
        .map(|r| 2.0 * (r / tau).ln())
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JensenCheck {
    /// Quadrature of `log|f(r e^{i theta})|`.
    pub lhs: f64,
    /// `log|f(0)| + sum_{|a| < r} log(r/|a|)` over the zeros `a = 1/lambda`.
    pub rhs: f64,
    /// Distance from the nearest zero to the circle (`inf` if there are none).
    pub zero_distance: f64,
}

/// Both sides of Jensen's formula for `f(z) = det(I - zM)` on the circle of radius `r`.
pub fn jensen_formula_check(m: &CMat, r: f64, k: usize) -> Result<JensenCheck> {
    check_positive("r", r)?;
    check_nodes(k)?;
    let s = eigenvalues(m)?;
    let mut rhs = 0.0;
    let mut zero_distance = f64::INFINITY;
    for lam in s.eigenvalues() {
        let mag = lam.norm();
        if mag == 0.0 {
            continue;
        }
        zero_distance = zero_distance.min((1.0 / mag - r).abs());
        if mag * r > 1.0 {
            rhs += (r * mag).ln();
        }
    }
    if zero_distance < ZERO_CLEARANCE {
        return Err(Error::ZeroNearCircle {
            radius: r,
            distance: zero_distance,
        });
    }
    let lhs = pairwise_sum(&log_det_on_circle(m, r, k)?) / k as f64;
    Ok(JensenCheck {
        lhs,
        rhs,
        zero_distance,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JensenCertificate {
    pub tau: f64,
    #[serde(rename = "K")]
    pub nodes: usize,
    pub delta: f64,
    pub log_mean_sq_det: f64,
    /// At most this many eigenvalues exceed `tau * sqrt(1 + delta)`.
    pub outlier_count_bound: u64,
    pub near_circle_warning: bool,
}

impl JensenCertificate {
    /// The radius beyond which [`Self::outlier_count_bound`] applies.
    pub fn certified_threshold(&self) -> f64 {
        self.tau * (1.0 + self.delta).sqrt()
    }

    /// `E |det|^2` in linear scale (may overflow to `inf`).
    pub fn mean_sq_det(&self) -> f64 {
        self.log_mean_sq_det.exp()
    }
}

/// `floor(log_mean / log(1 + delta))`, clamped at zero.
pub fn outlier_count_bound(log_mean_sq_det: f64, delta: f64) -> u64 {
    let b = (log_mean_sq_det / delta.ln_1p()).floor();
    if b.is_nan() || b <= 0.0 {
        0
    } else if b >= u64::MAX as f64 {
        u64::MAX
    } else {
        b as u64
    }
}

pub fn certify(m: &CMat, tau: f64, k: usize, delta: f64) -> Result<JensenCertificate> {
    let s = eigenvalues(m)?;
    certify_with_spectrum(m, &s, tau, k, delta)
}

/// [`certify`] reusing a spectrum already computed for `m` (used only for the warning flag).
pub fn certify_with_spectrum(
    m: &CMat,
    s: &Spectrum,
    tau: f64,
    k: usize,
    delta: f64,
) -> Result<JensenCertificate> {
    check_positive("delta", delta)?;
    let log_mean_sq_det = mean_sq_det_on_circle(m, tau, k)?;
    let (lo, hi) = (tau * (1.0 - NEAR_CIRCLE_BAND), tau * (1.0 + NEAR_CIRCLE_BAND));
    let near_circle_warning = s.eigenvalues().iter().any(|z| (lo..=hi).contains(&z.norm()));
    Ok(JensenCertificate {
        tau,
        nodes: k,
        delta,
        log_mean_sq_det,
        outlier_count_bound: outlier_count_bound(log_mean_sq_det, delta),
        near_circle_warning,
    })
}

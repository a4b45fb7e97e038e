use serde::{Deserialize, Serialize};

use super::{matching_moment_exact, rat_from_f64, rat_to_f64};
use crate::error::{Error, Result};

fn check_alpha_beta(alpha: f64, beta: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&alpha) {
        return Err(Error::Domain(format!("alpha must lie in [0, 1/2], got {alpha}")));
    }
    if !(beta >= 1.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("beta must be finite and >= 1, got {beta}")));
    }
    Ok(())
}

/// Smaller root of `t^2 - (beta + 1) t + beta (1 - alpha)`, the interior critical point of [`laplace_g`].
pub fn laplace_tstar(alpha: f64, beta: f64) -> Result<f64> {
    check_alpha_beta(alpha, beta)?;
    if alpha == 0.0 {
        return Ok(1.0);
    }
    // (beta+1)^2/4 - beta(1-alpha) rewritten to avoid cancellation.
    let disc = (beta - 1.0).powi(2) / 4.0 + alpha * beta;
    Ok((beta + 1.0) / 2.0 - disc.sqrt())
}

/// `g(t) = -t/2 + ((1 - alpha)/2) ln t + (alpha/2) ln|1 - t/beta|`.
pub fn laplace_g(alpha: f64, beta: f64, t: f64) -> f64 {
    let mut g = -t / 2.0 + (1.0 - alpha) / 2.0 * t.ln();
    if alpha != 0.0 {
        g += alpha / 2.0 * (1.0 - t / beta).abs().ln();
    }
    g
}

pub fn laplace_g_prime(alpha: f64, beta: f64, t: f64) -> f64 {
    let mut g = -0.5 + (1.0 - alpha) / (2.0 * t);
    if alpha != 0.0 {
        g -= alpha / 2.0 / (beta - t);
    }
    g
}

pub fn laplace_g_second(alpha: f64, beta: f64, t: f64) -> f64 {
    let mut g = -(1.0 - alpha) / (2.0 * t * t);
    if alpha != 0.0 {
        g -= alpha / 2.0 / (beta - t).powi(2);
    }
    g
}

/// `((beta - 1)/beta + sqrt(2k/(beta N)))^k / N^k`: the matching-moment bound without its constant.
pub fn laplace_bound_bracket(n: usize, k: usize, beta: f64) -> Result<f64> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::Domain(format!("N must be positive and even, got {n}")));
    }
    if 2 * k > n {
        return Err(Error::Domain(format!("k = {k} edges do not fit in N = {n} points")));
    }
    if !(beta >= 1.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("beta must be finite and >= 1, got {beta}")));
    }
    let (nf, kf) = (n as f64, k as f64);
    let inner = (beta - 1.0) / beta + (2.0 * kf / (beta * nf)).sqrt();
    Ok((inner / nf).powi(k as i32))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchingMomentRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub k: usize,
    pub beta: f64,
    pub exact: f64,
    pub bracket: f64,
    pub ratio: f64,
}

/// `|exact| / bracket` over a parameter grid; combinations with `2k > N` are skipped.
pub fn matching_moment_grid(ns: &[usize], ks: &[usize], betas: &[f64]) -> Result<Vec<MatchingMomentRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        for &k in ks {
            if 2 * k > n {
                continue;
            }
            for &beta in betas {
                let exact = rat_to_f64(&matching_moment_exact(n, k, &rat_from_f64(beta)?)?);
                let bracket = laplace_bound_bracket(n, k, beta)?;
                rows.push(MatchingMomentRow {
                    n,
                    k,
                    beta,
                    exact,
                    bracket,
                    ratio: exact.abs() / bracket,
                });
            }
        }
    }
    Ok(rows)
}

use faer::Side;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ensembles::ConfigGraph;
use crate::error::{Error, Result};
use crate::rng::SeedKey;

/// Largest `n` handled by the dense symmetric eigensolver.
pub const DENSE_REGULAR_LIMIT: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularExtremes {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda_min: f64,
}

impl RegularExtremes {
    /// `max(lambda2, -lambda_min)`.
    pub fn second(&self) -> f64 {
        self.lambda2.max(-self.lambda_min)
    }
}

/// Adjacency with loops counted twice on the diagonal.
fn dense_adjacency(g: &ConfigGraph) -> faer::Mat<f64> {
    let a = g.adjacency_dense();
    let n = g.n();
    faer::Mat::from_fn(n, n, |i, j| {
        if i == j {
            2.0 * g.loops(i) as f64
        } else {
            a[i * n + j] as f64
        }
    })
}

/// Top, second and bottom eigenvalues of the multigraph adjacency (dense).
pub fn regular_extremes(g: &ConfigGraph) -> Result<RegularExtremes> {
    let n = g.n();
    if n > DENSE_REGULAR_LIMIT {
        return Err(Error::SizeCap(format!(
            "dense regular spectrum limited to n <= {DENSE_REGULAR_LIMIT}, got {n}"
        )));
    }
    let ev = dense_adjacency(g)
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::NoConvergence)?;
    let lambda1 = *ev.last().expect("n >= 1");
    let lambda2 = if n >= 2 { ev[n - 2] } else { lambda1 };
    Ok(RegularExtremes {
        lambda1,
        lambda2,
        lambda_min: ev[0],
    })
}

/// `max(lambda2, -lambda_n)`: dense up to [`DENSE_REGULAR_LIMIT`], deflated power iteration above.
pub fn regular_second_eigenvalue(g: &ConfigGraph) -> Result<f64> {
    if g.n() <= DENSE_REGULAR_LIMIT {
        regular_extremes(g).map(|e| e.second())
    } else {
        Ok(deflated_power_iteration(g, 20_000, 1e-10))
    }
}

/// Power iteration on the adjacency restricted to the complement of the
/// all-ones vector, which is an exact eigenvector because every row sums to `d`.
pub fn deflated_power_iteration(g: &ConfigGraph, max_iter: usize, tol: f64) -> f64 {
    let n = g.n();
    if n < 2 {
        return 0.0;
    }
    let mut rng = SeedKey::new(0x0d0e_f1a7).rng();
    let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    let mut w = vec![0.0; n];
    let mut estimate = 0.0;
    for _ in 0..max_iter {
        project_and_normalize(&mut v);
        for i in 0..n {
            let mut s = 2.0 * g.loops(i) as f64 * v[i];
            for &(j, m) in g.neighbors(i) {
                s += m as f64 * v[j];
            }
            w[i] = s;
        }
        let next = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        std::mem::swap(&mut v, &mut w);
        let converged = (next - estimate).abs() <= tol * next.max(1.0);
        estimate = next;
        if converged || next == 0.0 {
            break;
        }
    }
    estimate
}

fn project_and_normalize(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

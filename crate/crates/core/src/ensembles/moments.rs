use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics;
use crate::error::{Error, Result};
use crate::rng::SeedKey;

use super::{centered_er_values, sample_matrix, spike_magnitude, EnsembleSpec, SPIKE_MAGNITUDE_CAP};

/// Largest vertex count for which the exact configuration-model moment is offered.
pub const MAX_EXACT_DREG_VERTICES: usize = 5;

/// Distinct unordered vertex pairs, each carrying a power in `1..=4`.
///
/// Pairs are normalized to `(u, v)` with `u < v` and kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubgraphWithMultiplicities {
    edges: Vec<(usize, usize, u32)>,
}

impl SubgraphWithMultiplicities {
    pub fn new(edges: impl IntoIterator<Item = (usize, usize, u32)>) -> Result<Self> {
        let mut out = Vec::new();
        for (u, v, m) in edges {
            if u == v {
                return Err(Error::InvalidSubgraph(format!("loop at vertex {u}")));
            }
            if !(1..=4).contains(&m) {
                return Err(Error::InvalidSubgraph(format!(
                    "multiplicity {m} on ({u}, {v}) is outside 1..=4"
                )));
            }
            out.push((u.min(v), u.max(v), m));
        }
        out.sort_unstable();
        if out.windows(2).any(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::InvalidSubgraph("repeated edge".into()));
        }
        Ok(Self { edges: out })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn edges(&self) -> &[(usize, usize, u32)] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Sorted distinct endpoints.
    pub fn vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.edges.iter().flat_map(|&(a, b, _)| [a, b]).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn total_multiplicity(&self) -> u32 {
        self.edges.iter().map(|e| e.2).sum()
    }

    pub fn check_range(&self, n: usize) -> Result<()> {
        match self.vertices().last() {
            Some(&vertex) if vertex >= n => Err(Error::VertexOutOfRange { vertex, n }),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    /// Real part of the sample mean of `prod M_uv^m`.
    pub estimate: f64,
    pub estimate_im: f64,
    /// Standard error of the mean (modulus of the complex deviation).
    pub stderr: f64,
    pub trials: u64,
    pub exact: Option<f64>,
}

/// `E M_uv^m` for one off-diagonal entry of an independent-entry ensemble.
pub fn entry_moment(spec: &EnsembleSpec, m: u32) -> Option<f64> {
    let n = spec.n() as f64;
    match *spec {
        EnsembleSpec::Girko { entry_law, .. } | EnsembleSpec::Wigner { entry_law, .. } => {
            Some(entry_law.raw_moment(m) * n.powf(-(m as f64) / 2.0))
        }
        EnsembleSpec::SparseSpike { n } => {
            if m % 2 == 1 {
                return Some(0.0);
            }
            let (a, _) = spike_magnitude(n, SPIKE_MAGNITUDE_CAP);
            Some((-(n as f64)).exp2() * a.powi(m as i32))
        }
        EnsembleSpec::CenteredEr { n } => {
            let (p, hi, lo) = centered_er_values(n);
            Some(p * hi.powi(m as i32) + (1.0 - p) * lo.powi(m as i32))
        }
        EnsembleSpec::DregCentered { .. } => None,
    }
}

/// Exact `E prod M_uv^m`, when available.
pub fn exact_moment(spec: &EnsembleSpec, s: &SubgraphWithMultiplicities) -> Result<Option<f64>> {
    spec.validate()?;
    s.check_range(spec.n())?;
    if let EnsembleSpec::DregCentered { n, d } = *spec {
        if s.vertices().len() > MAX_EXACT_DREG_VERTICES {
            return Ok(None);
        }
        return combinatorics::dreg_moment_exact(n, d, s).map(Some);
    }
    Ok(Some(
        s.edges()
            .iter()
            .map(|&(_, _, m)| entry_moment(spec, m).expect("independent entries"))
            .product(),
    ))
}

/// Monte Carlo estimate of `E prod_{uv in S} M_uv^{m(uv)}`; trial `t` uses `key.trial(t)`.
pub fn empirical_moment_check(
    spec: &EnsembleSpec,
    s: &SubgraphWithMultiplicities,
    trials: u64,
    key: SeedKey,
) -> Result<MomentEstimate> {
    spec.validate()?;
    s.check_range(spec.n())?;
    if trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    let values = (0..trials)
        .into_par_iter()
        .map(|t| {
            let m = sample_matrix(spec, key.trial(t))?;
            Ok(s.edges()
                .iter()
                .map(|&(u, v, p)| m[(u, v)].powu(p))
                .product::<crate::matrix::C64>())
        })
        .collect::<Result<Vec<_>>>()?;
    let count = trials as f64;
    let mean = values.iter().sum::<crate::matrix::C64>() / count;
    let stderr = if trials > 1 {
        let ss: f64 = values.iter().map(|z| (z - mean).norm_sqr()).sum();
        (ss / (count - 1.0) / count).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(MomentEstimate {
        estimate: mean.re,
        estimate_im: mean.im,
        stderr,
        trials,
        exact: exact_moment(spec, s)?,
    })
}

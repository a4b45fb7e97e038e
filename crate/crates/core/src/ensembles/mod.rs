//! Seeded samplers for the random matrix ensembles.
//!
//! All samplers are pure functions of `(spec, SeedKey)`.

mod config;
mod moments;

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{CMat, C64, ZERO};
use crate::rng::SeedKey;

pub use config::{centered_adjacency, sample_config_model, ConfigGraph};
pub use moments::{
    empirical_moment_check, entry_moment, exact_moment, MomentEstimate,
    SubgraphWithMultiplicities, MAX_EXACT_DREG_VERTICES,
};

/// Largest entry magnitude the sparse spike ensemble will produce.
pub const SPIKE_MAGNITUDE_CAP: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryLaw {
    /// `±1` with equal probability.
    Rademacher,
    /// Real standard normal.
    Gaussian,
    /// Uniform point on the unit circle.
    ComplexPhase,
}

impl EntryLaw {
    /// One unit-variance draw (before the `1/sqrt(n)` scaling).
    fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> C64 {
        match self {
            EntryLaw::Rademacher => {
                if rng.random::<bool>() {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(-1.0, 0.0)
                }
            }
            EntryLaw::Gaussian => C64::new(rng.sample(StandardNormal), 0.0),
            EntryLaw::ComplexPhase => {
                let phi = rng.random::<f64>() * std::f64::consts::TAU;
                C64::from_polar(1.0, phi)
            }
        }
    }

    /// `E|X|^4` for the unscaled law.
    pub fn fourth_abs_moment(self) -> f64 {
        match self {
            EntryLaw::Rademacher | EntryLaw::ComplexPhase => 1.0,
            EntryLaw::Gaussian => 3.0,
        }
    }

    /// `E X^m` for the unscaled law, `m >= 1`.
    pub fn raw_moment(self, m: u32) -> f64 {
        match self {
            EntryLaw::Rademacher => {
                if m % 2 == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            EntryLaw::Gaussian => {
                if m % 2 == 0 {
                    (1..m).step_by(2).map(f64::from).product()
                } else {
                    0.0
                }
            }
            EntryLaw::ComplexPhase => {
                if m == 0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleSpec {
    Girko { n: usize, entry_law: EntryLaw },
    Wigner { n: usize, entry_law: EntryLaw },
    SparseSpike { n: usize },
    CenteredEr { n: usize },
    DregCentered { n: usize, d: usize },
}

impl EnsembleSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            EnsembleSpec::Girko { .. } => "girko",
            EnsembleSpec::Wigner { .. } => "wigner",
            EnsembleSpec::SparseSpike { .. } => "sparse_spike",
            EnsembleSpec::CenteredEr { .. } => "centered_er",
            EnsembleSpec::DregCentered { .. } => "dreg_centered",
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            EnsembleSpec::Girko { n, .. }
            | EnsembleSpec::Wigner { n, .. }
            | EnsembleSpec::SparseSpike { n }
            | EnsembleSpec::CenteredEr { n }
            | EnsembleSpec::DregCentered { n, .. } => n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 {
            return Err(Error::InvalidEnsemble("n must be at least 1".into()));
        }
        match *self {
            EnsembleSpec::CenteredEr { n } if n < 2 => {
                Err(Error::InvalidEnsemble("centered_er needs n >= 2".into()))
            }
            EnsembleSpec::DregCentered { n, d } => {
                if d < 2 || d >= n {
                    Err(Error::InvalidEnsemble(format!(
                        "dreg_centered needs 2 <= d < n, got n = {n}, d = {d}"
                    )))
                } else if (n * d) % 2 == 1 {
                    Err(Error::NoPerfectMatching { half_edges: n * d })
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Entries are independent (up to Hermitian mirroring) across unordered pairs.
    pub fn has_independent_entries(&self) -> bool {
        !matches!(self, EnsembleSpec::DregCentered { .. })
    }
}

fn wrong_kind(expected: &'static str, spec: &EnsembleSpec) -> Error {
    Error::WrongEnsemble {
        expected,
        actual: spec.kind(),
    }
}

/// Independent off-diagonal entries `X / sqrt(n)`, zero diagonal.
pub fn sample_girko(spec: &EnsembleSpec, key: SeedKey) -> Result<CMat> {
    let EnsembleSpec::Girko { n, entry_law } = *spec else {
        return Err(wrong_kind("girko", spec));
    };
    spec.validate()?;
    let scale = 1.0 / (n as f64).sqrt();
    let mut rng = key.rng();
    Ok(CMat::from_fn(n, n, |i, j| {
        if i == j {
            ZERO
        } else {
            entry_law.draw(&mut rng) * scale
        }
    }))
}

/// Hermitian, zero diagonal, independent entries above the diagonal.
pub fn sample_wigner(spec: &EnsembleSpec, key: SeedKey) -> Result<CMat> {
    let EnsembleSpec::Wigner { n, entry_law } = *spec else {
        return Err(wrong_kind("wigner", spec));
    };
    spec.validate()?;
    let scale = 1.0 / (n as f64).sqrt();
    let mut rng = key.rng();
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let x = entry_law.draw(&mut rng) * scale;
            m[(i, j)] = x;
            m[(j, i)] = x.conj();
        }
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpikeSample {
    pub matrix: CMat,
    /// Magnitude of a nonzero entry after capping.
    pub magnitude: f64,
    /// The uncapped magnitude `2^(n/2) / sqrt(n)` exceeded the cap.
    pub capped: bool,
}

/// Magnitude `2^(n/2)/sqrt(n)` of a nonzero spike entry, and whether `cap` clipped it.
pub fn spike_magnitude(n: usize, cap: f64) -> (f64, bool) {
    let raw = (n as f64 / 2.0).exp2() / (n as f64).sqrt();
    if raw > cap {
        (cap, true)
    } else {
        (raw, false)
    }
}

pub fn sample_sparse_spike(n: usize, key: SeedKey) -> Result<SpikeSample> {
    sample_sparse_spike_capped(n, SPIKE_MAGNITUDE_CAP, key)
}

/// Each entry is `0` w.p. `1 - 2^-n` and `±2^(n/2)/sqrt(n)` w.p. `2^(-n-1)` each.
pub fn sample_sparse_spike_capped(n: usize, cap: f64, key: SeedKey) -> Result<SpikeSample> {
    if n == 0 {
        return Err(Error::InvalidEnsemble("n must be at least 1".into()));
    }
    if !(cap > 0.0) {
        return Err(Error::Domain(format!("spike cap must be positive, got {cap}")));
    }
    let (magnitude, capped) = spike_magnitude(n, cap);
    let mut rng = key.rng();
    let matrix = CMat::from_fn(n, n, |_, _| {
        if all_bits_zero(&mut rng, n) {
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            C64::new(sign * magnitude, 0.0)
        } else {
            ZERO
        }
    });
    Ok(SpikeSample {
        matrix,
        magnitude,
        capped,
    })
}

/// True with probability exactly `2^-bits`.
fn all_bits_zero<R: RngCore + ?Sized>(rng: &mut R, bits: usize) -> bool {
    let mut left = bits;
    while left >= 64 {
        if rng.next_u64() != 0 {
            return false;
        }
        left -= 64;
    }
    left == 0 || rng.next_u64() >> (64 - left) == 0
}

/// Centered, scaled adjacency of a directed Erdős–Rényi graph with edge probability `1/(2n)`.
pub fn sample_centered_er(n: usize, key: SeedKey) -> Result<CMat> {
    EnsembleSpec::CenteredEr { n }.validate()?;
    let (p, hi, lo) = centered_er_values(n);
    let mut rng = key.rng();
    Ok(CMat::from_fn(n, n, |i, j| {
        if i == j {
            ZERO
        } else if rng.random_bool(p) {
            C64::new(hi, 0.0)
        } else {
            C64::new(lo, 0.0)
        }
    }))
}

/// `(p, value w.p. p, value w.p. 1 - p)` for a centered ER entry.
pub fn centered_er_values(n: usize) -> (f64, f64, f64) {
    let p = 1.0 / (2.0 * n as f64);
    let s = std::f64::consts::SQRT_2;
    (p, s * (1.0 - p), -s * p)
}

/// The centered ER block on an isolated directed 3-cycle `a -> b -> c -> a`.
pub fn isolated_three_cycle_block(n: usize) -> CMat {
    let (_, hi, lo) = centered_er_values(n);
    CMat::from_fn(3, 3, |i, j| {
        if i == j {
            ZERO
        } else if j == (i + 1) % 3 {
            C64::new(hi, 0.0)
        } else {
            C64::new(lo, 0.0)
        }
    })
}

/// Draws one matrix from any ensemble.
pub fn sample_matrix(spec: &EnsembleSpec, key: SeedKey) -> Result<CMat> {
    spec.validate()?;
    match *spec {
        EnsembleSpec::Girko { .. } => sample_girko(spec, key),
        EnsembleSpec::Wigner { .. } => sample_wigner(spec, key),
        EnsembleSpec::SparseSpike { n } => Ok(sample_sparse_spike(n, key)?.matrix),
        EnsembleSpec::CenteredEr { n } => sample_centered_er(n, key),
        EnsembleSpec::DregCentered { n, d } => Ok(centered_adjacency(&sample_config_model(n, d, key)?)),
    }
}

//! Spectral certificates for random matrices.
//!
//! The crate evaluates the contour average `E_theta |det(I - e^{i theta} M / tau)|^2`
//! in log domain and turns it into per-matrix bounds on the number of
//! eigenvalues outside a disc. Around that core sit seeded samplers for the
//! usual random matrix ensembles, nonbacktracking matrices, brute-force checks
//! of the nonbacktracking determinant expansion, and exact rational oracles
//! for the combinatorial identities the bounds rest on.

pub mod combinatorics;
pub mod ensembles;
pub mod error;
pub mod experiments;
pub mod io;
pub mod jensen;
pub mod matrix;
pub mod nbdet;
pub mod nonbacktracking;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
pub use matrix::{CMat, C64};
pub use rng::SeedKey;

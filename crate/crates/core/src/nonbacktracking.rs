//! Nonbacktracking matrices over the directed edges of the complete graph.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{CMat, C64, ZERO};
use crate::spectral::{eigenvalues, max_row_norm, spectral_radius};

/// Lexicographic numbering of the directed edges `(i, j)`, `i != j`, of `K_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeIndex {
    n: usize,
}

impl EdgeIndex {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `n (n - 1)`.
    pub fn len(&self) -> usize {
        self.n * self.n.saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> Option<usize> {
        if i == j || i >= self.n || j >= self.n {
            return None;
        }
        Some(i * (self.n - 1) + if j < i { j } else { j - 1 })
    }

    pub fn edge(&self, idx: usize) -> Option<(usize, usize)> {
        if idx >= self.len() {
            return None;
        }
        let i = idx / (self.n - 1);
        let r = idx % (self.n - 1);
        Some((i, if r < i { r } else { r + 1 }))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).map(|k| self.edge(k).expect("in range"))
    }

    pub fn reverse(&self, idx: usize) -> Option<usize> {
        self.edge(idx).and_then(|(i, j)| self.index(j, i))
    }
}

/// `B[ij, kl] = M_kl` when `j == k` and `i != l`, zero otherwise.
pub fn build_nb_matrix(m: &CMat) -> Result<CMat> {
    let n = m.require_square()?;
    if n < 2 {
        return Err(Error::Domain(format!("nonbacktracking matrix needs n >= 2, got {n}")));
    }
    let ix = EdgeIndex::new(n);
    let mut b = CMat::zeros(ix.len(), ix.len());
    for (row, (i, j)) in ix.edges().enumerate() {
        for l in (0..n).filter(|&l| l != j && l != i) {
            let col = ix.index(j, l).expect("j != l");
            b[(row, col)] = m[(j, l)];
        }
    }
    Ok(b)
}

/// `B_M x` without forming `B_M`.
pub fn nb_apply(m: &CMat, x: &[C64]) -> Result<Vec<C64>> {
    let n = m.require_square()?;
    let ix = EdgeIndex::new(n);
    if x.len() != ix.len() {
        return Err(Error::ShapeMismatch {
            expected: ix.len(),
            actual: x.len(),
        });
    }
    // (B x)_{ij} = sum_{l != j} M_jl x_{jl} - M_ji x_{ji}
    let mut through = vec![ZERO; n];
    for j in 0..n {
        for l in (0..n).filter(|&l| l != j) {
            through[j] += m[(j, l)] * x[ix.index(j, l).unwrap()];
        }
    }
    Ok(ix
        .edges()
        .map(|(i, j)| through[j] - m[(j, i)] * x[ix.index(j, i).unwrap()])
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IharaBass {
    pub rho_nb: f64,
    pub max_row_norm: f64,
}

impl IharaBass {
    /// `2 rho(B_M) + 9 max_i ||M_i||`.
    pub fn bound(&self) -> f64 {
        2.0 * self.rho_nb + 9.0 * self.max_row_norm
    }
}

pub fn ihara_bass_parts(m: &CMat) -> Result<IharaBass> {
    if !m.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let rho_nb = if m.nrows() < 3 {
        0.0
    } else {
        spectral_radius(&eigenvalues(&build_nb_matrix(m)?)?)
    };
    Ok(IharaBass {
        rho_nb,
        max_row_norm: max_row_norm(m),
    })
}

/// Upper bound on the spectral radius of a Hermitian matrix through its nonbacktracking matrix.
pub fn ihara_bass_upper(m: &CMat) -> Result<f64> {
    ihara_bass_parts(m).map(|p| p.bound())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones_off_diagonal(n: usize) -> CMat {
        CMat::from_fn(n, n, |i, j| if i == j { ZERO } else { C64::new(1.0, 0.0) })
    }

    #[test]
    fn edge_index_round_trip() {
        for n in 2..7 {
            let ix = EdgeIndex::new(n);
            assert_eq!(ix.edges().count(), n * (n - 1));
            for k in 0..ix.len() {
                let (i, j) = ix.edge(k).unwrap();
                assert_ne!(i, j);
                assert_eq!(ix.index(i, j), Some(k));
                assert_eq!(ix.reverse(ix.reverse(k).unwrap()), Some(k));
            }
            assert_eq!(ix.index(1, 1), None);
            assert_eq!(ix.edge(ix.len()), None);
        }
        let e: Vec<_> = EdgeIndex::new(3).edges().collect();
        assert_eq!(e, vec![(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]);
    }

    #[test]
    fn small_cases() {
        let b = build_nb_matrix(&ones_off_diagonal(2)).unwrap();
        assert_eq!(b, CMat::zeros(2, 2));
        let b = build_nb_matrix(&ones_off_diagonal(3)).unwrap();
        assert_eq!(b.data().iter().filter(|z| **z != ZERO).count(), 6);
        for i in 0..6 {
            assert_eq!(b.row(i).iter().filter(|z| **z != ZERO).count(), 1);
        }
        let b = build_nb_matrix(&ones_off_diagonal(4)).unwrap();
        for i in 0..12 {
            assert_eq!(b.row(i).iter().sum::<C64>(), C64::new(2.0, 0.0));
        }
        assert!(build_nb_matrix(&CMat::zeros(1, 1)).is_err());
    }

    #[test]
    fn apply_matches_dense() {
        let m = CMat::from_fn(5, 5, |i, j| C64::new((i * 5 + j) as f64 * 0.1, (i as f64) - (j as f64)));
        let b = build_nb_matrix(&m).unwrap();
        let x: Vec<C64> = (0..20).map(|k| C64::new((k as f64).sin(), (k as f64).cos())).collect();
        let y = nb_apply(&m, &x).unwrap();
        for r in 0..20 {
            let want: C64 = (0..20).map(|c| b[(r, c)] * x[c]).sum();
            assert!((y[r] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn ihara_bass_small_cases() {
        assert_eq!(ihara_bass_upper(&CMat::zeros(4, 4)).unwrap(), 0.0);
        let a = 0.7;
        let m = CMat::from_real_rows(&[&[0.0, a], &[a, 0.0]]);
        assert!((ihara_bass_upper(&m).unwrap() - 9.0 * a).abs() < 1e-15);
        let m = CMat::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(ihara_bass_upper(&m), Err(Error::NotHermitian)));
    }
}

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{CMat, C64, ZERO};
use crate::rng::SeedKey;

/// A perfect matching on the half-edges `[n] x [d]` and the multigraph it induces.
///
/// Half-edge `(vertex, slot)` has id `vertex * d + slot`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigGraph {
    n: usize,
    d: usize,
    partner: Vec<usize>,
    /// Per vertex, `(neighbor, multiplicity)` sorted by neighbor; loops excluded.
    neighbors: Vec<Vec<(usize, u32)>>,
    loops: Vec<u32>,
}

impl ConfigGraph {
    /// Builds the graph from a list of half-edge id pairs, which must form a perfect matching.
    pub fn from_matching(n: usize, d: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let total = n * d;
        if total % 2 == 1 {
            return Err(Error::NoPerfectMatching { half_edges: total });
        }
        let mut partner = vec![usize::MAX; total];
        for &(a, b) in pairs {
            if a >= total || b >= total || a == b {
                return Err(Error::InvalidSubgraph(format!("bad half-edge pair ({a}, {b})")));
            }
            if partner[a] != usize::MAX || partner[b] != usize::MAX {
                return Err(Error::InvalidSubgraph(format!("half-edge reused in ({a}, {b})")));
            }
            partner[a] = b;
            partner[b] = a;
        }
        if partner.contains(&usize::MAX) {
            return Err(Error::InvalidSubgraph("matching is not perfect".into()));
        }
        let mut neighbors: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
        let mut loops = vec![0u32; n];
        for a in 0..total {
            let b = partner[a];
            if a > b {
                continue;
            }
            let (u, v) = (a / d, b / d);
            if u == v {
                loops[u] += 1;
            } else {
                bump(&mut neighbors[u], v);
                bump(&mut neighbors[v], u);
            }
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(Self {
            n,
            d,
            partner,
            neighbors,
            loops,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn half_edges(&self) -> usize {
        self.partner.len()
    }

    pub fn partner(&self, half_edge: usize) -> usize {
        self.partner[half_edge]
    }

    /// Matched pairs `(a, b)` with `a < b`, ordered by `a`.
    pub fn matching(&self) -> Vec<(usize, usize)> {
        (0..self.partner.len())
            .filter(|&a| a < self.partner[a])
            .map(|a| (a, self.partner[a]))
            .collect()
    }

    pub fn contains_pair(&self, a: usize, b: usize) -> bool {
        a < self.partner.len() && self.partner[a] == b
    }

    /// Number of parallel edges between distinct vertices; 0 when `i == j`.
    pub fn multiplicity(&self, i: usize, j: usize) -> u32 {
        if i == j {
            return 0;
        }
        let list = &self.neighbors[i];
        list.binary_search_by_key(&j, |&(v, _)| v)
            .map_or(0, |pos| list[pos].1)
    }

    pub fn loops(&self, i: usize) -> u32 {
        self.loops[i]
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, u32)] {
        &self.neighbors[i]
    }

    /// Row-major `n x n` multiplicities with a zero diagonal.
    pub fn adjacency_dense(&self) -> Vec<u32> {
        let n = self.n;
        let mut a = vec![0u32; n * n];
        for (i, list) in self.neighbors.iter().enumerate() {
            for &(j, m) in list {
                a[i * n + j] = m;
            }
        }
        a
    }

    /// `sum_j A_ij + 2 loops(i) == d` for every vertex.
    pub fn degrees_consistent(&self) -> bool {
        (0..self.n).all(|i| {
            let s: u32 = self.neighbors[i].iter().map(|&(_, m)| m).sum();
            (s + 2 * self.loops[i]) as usize == self.d
        })
    }
}

fn bump(list: &mut Vec<(usize, u32)>, v: usize) {
    match list.iter_mut().find(|(w, _)| *w == v) {
        Some(entry) => entry.1 += 1,
        None => list.push((v, 1)),
    }
}

/// Uniform perfect matching on `[n] x [d]`: shuffle the half-edges, pair consecutive ones.
pub fn sample_config_model(n: usize, d: usize, key: SeedKey) -> Result<ConfigGraph> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidEnsemble(format!(
            "configuration model needs n, d >= 1, got n = {n}, d = {d}"
        )));
    }
    let total = n * d;
    if total % 2 == 1 {
        return Err(Error::NoPerfectMatching { half_edges: total });
    }
    let mut ids: Vec<usize> = (0..total).collect();
    ids.shuffle(&mut key.rng());
    let pairs: Vec<(usize, usize)> = ids.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    ConfigGraph::from_matching(n, d, &pairs)
}

/// `M_ij = (A_ij - d/n) / sqrt(d)` off the diagonal, zero on it.
pub fn centered_adjacency(g: &ConfigGraph) -> CMat {
    let n = g.n();
    let shift = g.d() as f64 / n as f64;
    let scale = 1.0 / (g.d() as f64).sqrt();
    let mut m = CMat::from_fn(n, n, |i, j| {
        if i == j {
            ZERO
        } else {
            C64::new(-shift * scale, 0.0)
        }
    });
    for i in 0..n {
        for &(j, mult) in g.neighbors(i) {
            m[(i, j)] = C64::new((mult as f64 - shift) * scale, 0.0);
        }
    }
    m
}

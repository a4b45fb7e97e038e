use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{f, opt, CsvRow, Report, ReportMeta};
use crate::combinatorics::DregJointLaw;
use crate::ensembles::{centered_adjacency, sample_config_model, EnsembleSpec, MAX_EXACT_DREG_VERTICES};
use crate::error::{Error, Result};
use crate::rng::SeedKey;

pub const MAX_GRID_EDGES: usize = 4;
pub const MAX_GRID_VERTICES: usize = 16;

/// Trials per accumulation block; blocks are merged in order, so sums do not depend on threads.
const BLOCK: u64 = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub n: usize,
    pub d: usize,
    pub max_edges: usize,
    pub trials: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub shape: usize,
    /// `u-v:m` items joined by `;`.
    pub subgraph: String,
    pub edges: usize,
    pub vertices: usize,
    pub estimate: f64,
    pub stderr: f64,
    pub exact: Option<f64>,
    /// `n |estimate|^(1/edges)`: the smallest `C` with `|estimate| <= (C/n)^edges`.
    pub implied_c: f64,
}

impl CsvRow for GridRow {
    fn header() -> &'static [&'static str] {
        &["shape", "subgraph", "edges", "vertices", "estimate", "stderr", "exact", "implied_c"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.shape.to_string(),
            self.subgraph.clone(),
            self.edges.to_string(),
            self.vertices.to_string(),
            f(self.estimate),
            f(self.stderr),
            opt(self.exact),
            f(self.implied_c),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridAggregates {
    pub shapes: usize,
    pub subgraphs: usize,
    /// Largest implied `C` over the Monte Carlo estimates.
    pub fitted_c: f64,
    /// Largest implied `C` over the exact values, where available.
    pub fitted_c_exact: Option<f64>,
    /// Rows whose estimate is more than three standard errors from the exact value.
    pub exact_disagreements: usize,
}

/// Canonical form: the lexicographically smallest sorted edge list over all relabelings.
fn canonical(edges: &[(usize, usize)], v: usize) -> Vec<(usize, usize)> {
    let mut perm: Vec<usize> = (0..v).collect();
    let mut best: Option<Vec<(usize, usize)>> = None;
    loop {
        let mut e: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (perm[a], perm[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        e.sort_unstable();
        if best.as_ref().is_none_or(|b| e < *b) {
            best = Some(e);
        }
        if !next_permutation(&mut perm) {
            return best.unwrap_or_default();
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Unlabeled simple graphs with `1..=max_edges` edges and no isolated vertices,
/// on vertices `0..v`, ordered by edge count then edge list.
pub fn shape_catalog(max_edges: usize) -> Vec<Vec<(usize, usize)>> {
    let mut layers: Vec<BTreeSet<Vec<(usize, usize)>>> = vec![BTreeSet::from([Vec::new()])];
    for _ in 0..max_edges {
        let mut next = BTreeSet::new();
        for g in layers.last().unwrap() {
            let v = g.iter().map(|&(_, b)| b + 1).max().unwrap_or(0);
            for a in 0..v + 2 {
                for b in a + 1..v + 2 {
                    // New vertices are v and v + 1; a new edge may use at most both of them.
                    if g.contains(&(a, b)) || (a == v + 1) {
                        continue;
                    }
                    let mut e = g.clone();
                    e.push((a, b));
                    let nv = e.iter().map(|&(_, y)| y + 1).max().unwrap();
                    next.insert(canonical(&e, nv));
                }
            }
        }
        layers.push(next);
    }
    layers.into_iter().skip(1).flatten().collect()
}

struct Item {
    shape: usize,
    pairs: Vec<(usize, usize)>,
    powers: Vec<u32>,
    vertices: usize,
}

fn assignments(e: usize) -> Vec<Vec<u32>> {
    (0..4usize.pow(e as u32))
        .map(|mut code| {
            (0..e)
                .map(|_| {
                    let m = (code % 4) as u32 + 1;
                    code /= 4;
                    m
                })
                .collect()
        })
        .collect()
}

/// Monte Carlo mixed moments `E prod M_uv^m` of the centered configuration-model
/// adjacency over every small subgraph shape and multiplicity assignment.
pub fn run_assumption_grid(cfg: &GridConfig, seed: u64) -> Result<Report<GridAggregates, GridRow>> {
    EnsembleSpec::DregCentered { n: cfg.n, d: cfg.d }.validate()?;
    if cfg.n > MAX_GRID_VERTICES {
        return Err(Error::SizeCap(format!("grid limited to n <= {MAX_GRID_VERTICES}, got {}", cfg.n)));
    }
    if cfg.max_edges > MAX_GRID_EDGES {
        return Err(Error::SizeCap(format!("grid limited to {MAX_GRID_EDGES} edges, got {}", cfg.max_edges)));
    }
    if cfg.trials < 2 {
        return Err(Error::Domain("trials must be at least 2".into()));
    }
    let shapes: Vec<_> = shape_catalog(cfg.max_edges)
        .into_iter()
        .filter(|s| s.iter().map(|&(_, b)| b + 1).max().unwrap_or(0) <= cfg.n)
        .collect();
    let mut items = Vec::new();
    for (shape, pairs) in shapes.iter().enumerate() {
        let vertices = pairs.iter().map(|&(_, b)| b + 1).max().unwrap_or(0);
        for powers in assignments(pairs.len()) {
            items.push(Item {
                shape,
                pairs: pairs.clone(),
                powers,
                vertices,
            });
        }
    }

    let key = SeedKey::new(seed);
    let blocks: Vec<(u64, u64)> = (0..cfg.trials.div_ceil(BLOCK))
        .map(|b| (b * BLOCK, ((b + 1) * BLOCK).min(cfg.trials)))
        .collect();
    let partial = blocks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut sums = vec![(0.0f64, 0.0f64); items.len()];
            for t in lo..hi {
                let m = centered_adjacency(&sample_config_model(cfg.n, cfg.d, key.trial(t))?);
                for (acc, it) in sums.iter_mut().zip(&items) {
                    let v: f64 = it
                        .pairs
                        .iter()
                        .zip(&it.powers)
                        .map(|(&(u, w), &p)| m[(u, w)].re.powi(p as i32))
                        .product();
                    acc.0 += v;
                    acc.1 += v * v;
                }
            }
            Ok(sums)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sums = vec![(0.0f64, 0.0f64); items.len()];
    for block in partial {
        for (acc, (s, q)) in sums.iter_mut().zip(block) {
            acc.0 += s;
            acc.1 += q;
        }
    }

    let mut laws = Vec::with_capacity(shapes.len());
    for pairs in &shapes {
        let vertices = pairs.iter().map(|&(_, b)| b + 1).max().unwrap_or(0);
        laws.push(if vertices <= MAX_EXACT_DREG_VERTICES {
            Some(DregJointLaw::new(cfg.n, cfg.d, pairs)?)
        } else {
            None
        });
    }

    let count = cfg.trials as f64;
    let nf = cfg.n as f64;
    let rows: Vec<GridRow> = items
        .iter()
        .zip(&sums)
        .map(|(it, &(s, q))| {
            let mean = s / count;
            let var = ((q - count * mean * mean) / (count - 1.0)).max(0.0);
            let e = it.pairs.len();
            GridRow {
                shape: it.shape,
                subgraph: it
                    .pairs
                    .iter()
                    .zip(&it.powers)
                    .map(|(&(u, v), m)| format!("{u}-{v}:{m}"))
                    .collect::<Vec<_>>()
                    .join(";"),
                edges: e,
                vertices: it.vertices,
                estimate: mean,
                stderr: (var / count).sqrt(),
                exact: laws[it.shape].as_ref().map(|l| l.moment(&it.powers)),
                implied_c: nf * mean.abs().powf(1.0 / e as f64),
            }
        })
        .collect();

    let fitted_c_exact = rows
        .iter()
        .filter_map(|r| r.exact.map(|x| nf * x.abs().powf(1.0 / r.edges as f64)))
        .reduce(f64::max);
    let aggregates = GridAggregates {
        shapes: shapes.len(),
        subgraphs: rows.len(),
        fitted_c: rows.iter().map(|r| r.implied_c).fold(0.0, f64::max),
        fitted_c_exact,
        exact_disagreements: rows
            .iter()
            .filter(|r| r.exact.is_some_and(|x| (r.estimate - x).abs() > 3.0 * r.stderr + 1e-12))
            .count(),
    };
    Ok(Report {
        meta: ReportMeta::new("assumption-grid", seed, cfg),
        aggregates,
        rows,
    })
}

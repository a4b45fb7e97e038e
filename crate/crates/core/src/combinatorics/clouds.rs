//! Exact joint law of the multiplicities among a few vertices of the
//! configuration model, obtained by collapsing each vertex's cloud of `d`
//! half-edges instead of enumerating matchings of all `nd` half-edges.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{big, double_factorial, rat_to_f64, BigRat};
use crate::ensembles::{SubgraphWithMultiplicities, MAX_EXACT_DREG_VERTICES};
use crate::error::{Error, Result};

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |a, i| a * BigInt::from(i))
}

fn falling(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |a, i| a * BigInt::from(n - i))
}

fn df(m: i64) -> BigInt {
    big(double_factorial(m).expect("odd argument"))
}

/// A configuration of the half-edges at `r` chosen vertices.
struct State<'a> {
    r: usize,
    d: usize,
    /// `A_ab` for `a < b`, indexed by `pair_index`.
    inner: &'a [usize],
    loops: &'a [usize],
}

fn pair_index(r: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b);
    a * r - a * (a + 1) / 2 + (b - a - 1)
}

/// Number of perfect matchings of all `n d` half-edges realizing the state.
fn realizations(state: &State<'_>, n: usize) -> BigInt {
    let State { r, d, inner, loops } = *state;
    let mut count = BigInt::one();
    let mut outside_total = 0;
    for a in 0..r {
        let mut used = 2 * loops[a];
        let mut denom = factorial(2 * loops[a]);
        for b in 0..r {
            if a != b {
                let m = inner[pair_index(r, a.min(b), a.max(b))];
                used += m;
                denom *= factorial(m);
            }
        }
        let out = d - used;
        outside_total += out;
        denom *= factorial(out);
        count *= factorial(d) / denom;
        count *= df(2 * loops[a] as i64 - 1);
    }
    for &m in inner {
        count *= factorial(m);
    }
    let rest = (n - r) * d;
    if outside_total > rest || (rest - outside_total) % 2 == 1 {
        return BigInt::zero();
    }
    count * falling(rest, outside_total) * df((rest - outside_total) as i64 - 1)
}

/// Calls `f` for every feasible state on `r` vertices of degree `d`.
fn for_each_state(r: usize, d: usize, mut f: impl FnMut(&State<'_>)) {
    let pairs = r * (r - 1) / 2;
    let mut inner = vec![0usize; pairs];
    let mut free = vec![d; r];
    let mut loops = vec![0usize; r];
    assign_inner(r, d, 0, 1, &mut inner, &mut free, &mut loops, &mut f);
}

#[allow(clippy::too_many_arguments)]
fn assign_inner(
    r: usize,
    d: usize,
    a: usize,
    b: usize,
    inner: &mut [usize],
    free: &mut [usize],
    loops: &mut [usize],
    f: &mut impl FnMut(&State<'_>),
) {
    if a + 1 >= r {
        assign_loops(r, d, 0, inner, free, loops, f);
        return;
    }
    let (na, nb) = if b + 1 < r { (a, b + 1) } else { (a + 1, a + 2) };
    let p = pair_index(r, a, b);
    for m in 0..=free[a].min(free[b]) {
        inner[p] = m;
        free[a] -= m;
        free[b] -= m;
        assign_inner(r, d, na, nb, inner, free, loops, f);
        free[a] += m;
        free[b] += m;
    }
    inner[p] = 0;
}

fn assign_loops(
    r: usize,
    d: usize,
    a: usize,
    inner: &[usize],
    free: &[usize],
    loops: &mut [usize],
    f: &mut impl FnMut(&State<'_>),
) {
    if a == r {
        f(&State { r, d, inner, loops });
        return;
    }
    for l in 0..=free[a] / 2 {
        loops[a] = l;
        assign_loops(r, d, a + 1, inner, free, loops, f);
    }
    loops[a] = 0;
}

/// Number of half-edge states enumerated for `r` vertices of degree `d`.
pub fn dreg_state_count(r: usize, d: usize) -> usize {
    let mut c = 0;
    if r >= 1 {
        for_each_state(r, d, |_| c += 1);
    }
    c
}

/// Exact joint law of the multiplicities `A_uv` over a fixed list of vertex pairs.
#[derive(Clone, Debug)]
pub struct DregJointLaw {
    n: usize,
    d: usize,
    pairs: Vec<(usize, usize)>,
    /// `(multiplicity per pair, probability)`.
    atoms: Vec<(Vec<usize>, BigRat)>,
}

impl DregJointLaw {
    /// Pairs must be distinct with distinct endpoints, spanning at most
    /// [`MAX_EXACT_DREG_VERTICES`] vertices.
    pub fn new(n: usize, d: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidEnsemble(format!("need n, d >= 1, got n = {n}, d = {d}")));
        }
        if (n * d) % 2 == 1 {
            return Err(Error::NoPerfectMatching { half_edges: n * d });
        }
        let s = SubgraphWithMultiplicities::new(pairs.iter().map(|&(u, v)| (u, v, 1)))?;
        s.check_range(n)?;
        let verts = s.vertices();
        let r = verts.len();
        if r > MAX_EXACT_DREG_VERTICES {
            return Err(Error::SizeCap(format!(
                "exact configuration-model moments need at most {MAX_EXACT_DREG_VERTICES} vertices, got {r}"
            )));
        }
        let pairs: Vec<(usize, usize)> = pairs.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        if r == 0 {
            return Ok(Self { n, d, pairs, atoms: vec![(Vec::new(), BigRat::one())] });
        }
        let local = |v: usize| verts.binary_search(&v).expect("vertex of S");
        let slots: Vec<usize> = pairs.iter().map(|&(u, v)| pair_index(r, local(u), local(v))).collect();
        let mut by_pattern: HashMap<Vec<usize>, BigInt> = HashMap::new();
        for_each_state(r, d, |state| {
            let w = realizations(state, n);
            if !w.is_zero() {
                let key: Vec<usize> = slots.iter().map(|&p| state.inner[p]).collect();
                *by_pattern.entry(key).or_insert_with(BigInt::zero) += w;
            }
        });
        let total = df((n * d) as i64 - 1);
        let mut atoms: Vec<(Vec<usize>, BigRat)> = by_pattern
            .into_iter()
            .map(|(k, w)| (k, BigRat::new(w, total.clone())))
            .collect();
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(Self { n, d, pairs, atoms })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn atoms(&self) -> &[(Vec<usize>, BigRat)] {
        &self.atoms
    }

    /// `E prod_i (A_{pairs[i]} - d/n)^{powers[i]}`.
    pub fn shifted_moment(&self, powers: &[u32]) -> BigRat {
        assert_eq!(powers.len(), self.pairs.len(), "one power per pair");
        let c = BigRat::new(BigInt::from(self.d), BigInt::from(self.n));
        let max_pow = powers.iter().copied().max().unwrap_or(0) as usize;
        let table: Vec<Vec<BigRat>> = (0..=self.d)
            .map(|j| {
                let base = BigRat::from_integer(BigInt::from(j)) - &c;
                let mut row = vec![BigRat::one()];
                for _ in 0..max_pow {
                    let next = row.last().unwrap() * &base;
                    row.push(next);
                }
                row
            })
            .collect();
        let mut total = BigRat::zero();
        for (pattern, p) in &self.atoms {
            let mut term = p.clone();
            for (&j, &m) in pattern.iter().zip(powers) {
                term *= &table[j][m as usize];
            }
            total += term;
        }
        total
    }

    /// `E prod_i M_{pairs[i]}^{powers[i]}` for `M = (A - d/n)/sqrt(d)`.
    pub fn moment(&self, powers: &[u32]) -> f64 {
        let total: u32 = powers.iter().sum();
        rat_to_f64(&self.shifted_moment(powers)) * (self.d as f64).powf(-(total as f64) / 2.0)
    }
}

fn split(s: &SubgraphWithMultiplicities) -> (Vec<(usize, usize)>, Vec<u32>) {
    s.edges().iter().map(|&(u, v, m)| ((u, v), m)).unzip()
}

/// `E prod_{uv in S} (A_uv - d/n)^{m(uv)}` in the configuration model, exactly.
pub fn dreg_shifted_moment_exact(n: usize, d: usize, s: &SubgraphWithMultiplicities) -> Result<BigRat> {
    let (pairs, powers) = split(s);
    Ok(DregJointLaw::new(n, d, &pairs)?.shifted_moment(&powers))
}

/// `E prod M_uv^{m(uv)}` for the centered adjacency `M = (A - d/n)/sqrt(d)`.
pub fn dreg_moment_exact(n: usize, d: usize, s: &SubgraphWithMultiplicities) -> Result<f64> {
    let (pairs, powers) = split(s);
    Ok(DregJointLaw::new(n, d, &pairs)?.moment(&powers))
}

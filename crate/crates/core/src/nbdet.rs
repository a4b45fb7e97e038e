//! Brute-force checks of the subgraph expansion of `det(I - zB_M)`.
//!
//! Expanding the determinant over permutations of directed edges groups the
//! terms by the set `H` of non-fixed edges:
//! `det(I - zB_M) = sum_H z^|H| prod_{e in H} M_e sum_{pi in NBP(H)} (-1)^{cycles(pi)}`,
//! where `NBP(H)` holds the permutations of `H` sending every edge `uv` to an
//! edge `vw` with `w != u`. Such a permutation is a family of local bijections
//! `In_H(v) -> Out_H(v)`, one per vertex.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{CMat, C64, ONE};
use crate::nonbacktracking::EdgeIndex;

/// Largest `n` accepted by [`enumerate_nbp_sign_sum`].
pub const MAX_NBP_VERTICES: usize = 5;
/// Largest `n` accepted by [`NbExpansion`] (`2^12` subgraphs at `n = 4`).
pub const MAX_EXPANSION_VERTICES: usize = 4;

/// A set of directed edges of `K_n`, stored as a bitmask over [`EdgeIndex`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DirectedSubgraph {
    n: usize,
    mask: u64,
}

impl DirectedSubgraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let ix = Self::index_for(n)?;
        let mut mask = 0u64;
        for &(i, j) in edges {
            let k = ix.index(i, j).ok_or_else(|| {
                Error::InvalidSubgraph(format!("({i}, {j}) is not a directed edge of K_{n}"))
            })?;
            if mask >> k & 1 == 1 {
                return Err(Error::InvalidSubgraph(format!("edge ({i}, {j}) repeated")));
            }
            mask |= 1 << k;
        }
        Ok(Self { n, mask })
    }

    pub fn from_mask(n: usize, mask: u64) -> Result<Self> {
        let ix = Self::index_for(n)?;
        if ix.len() < 64 && mask >> ix.len() != 0 {
            return Err(Error::InvalidSubgraph("mask has bits past the last edge".into()));
        }
        Ok(Self { n, mask })
    }

    fn index_for(n: usize) -> Result<EdgeIndex> {
        let ix = EdgeIndex::new(n);
        if ix.len() > 64 {
            return Err(Error::SizeCap(format!("directed subgraphs limited to n <= 8, got {n}")));
        }
        Ok(ix)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        EdgeIndex::new(self.n)
            .index(i, j)
            .is_some_and(|k| self.mask >> k & 1 == 1)
    }

    /// Edges in index order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let ix = EdgeIndex::new(self.n);
        (0..ix.len())
            .filter(|&k| self.mask >> k & 1 == 1)
            .map(|k| ix.edge(k).unwrap())
            .collect()
    }

    /// The reverse edge is absent.
    pub fn is_singleton(&self, i: usize, j: usize) -> bool {
        self.contains(i, j) && !self.contains(j, i)
    }

    pub fn in_edges(&self, v: usize) -> Vec<(usize, usize)> {
        (0..self.n).filter(|&u| self.contains(u, v)).map(|u| (u, v)).collect()
    }

    pub fn out_edges(&self, v: usize) -> Vec<(usize, usize)> {
        (0..self.n).filter(|&w| self.contains(v, w)).map(|w| (v, w)).collect()
    }
}

/// Every vertex has at most one incoming and at most one outgoing singleton edge.
pub fn htilde_membership(h: &DirectedSubgraph) -> bool {
    (0..h.n()).all(|v| {
        let ins = h.in_edges(v).iter().filter(|&&(u, _)| h.is_singleton(u, v)).count();
        let outs = h.out_edges(v).iter().filter(|&&(_, w)| h.is_singleton(v, w)).count();
        ins <= 1 && outs <= 1
    })
}

/// `prod_v max(d_v, 1)` with `d_v = |In_H(v)|`.
pub fn nbp_magnitude_bound(h: &DirectedSubgraph) -> u64 {
    (0..h.n()).map(|v| h.in_edges(v).len().max(1) as u64).product()
}

/// All bijections `ins -> outs` (as index permutations) that never map `uv` to `vu`.
fn local_bijections(ins: &[(usize, usize)], outs: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut found = Vec::new();
    let mut used = vec![false; outs.len()];
    let mut cur = Vec::with_capacity(ins.len());
    fn go(
        ins: &[(usize, usize)],
        outs: &[(usize, usize)],
        used: &mut [bool],
        cur: &mut Vec<usize>,
        found: &mut Vec<Vec<usize>>,
    ) {
        let k = cur.len();
        if k == ins.len() {
            found.push(cur.clone());
            return;
        }
        let (u, _) = ins[k];
        for (o, &(_, w)) in outs.iter().enumerate() {
            if used[o] || w == u {
                continue;
            }
            used[o] = true;
            cur.push(o);
            go(ins, outs, used, cur, found);
            cur.pop();
            used[o] = false;
        }
    }
    go(ins, outs, &mut used, &mut cur, &mut found);
    found
}

/// `sum_{pi in NBP(H)} (-1)^{number of cycles of pi}`.
pub fn enumerate_nbp_sign_sum(h: &DirectedSubgraph) -> Result<i64> {
    let n = h.n();
    if n > MAX_NBP_VERTICES {
        return Err(Error::SizeCap(format!(
            "NBP enumeration limited to n <= {MAX_NBP_VERTICES}, got {n}"
        )));
    }
    let edges = h.edges();
    let local = |e: (usize, usize)| edges.binary_search_by_key(&e, |&x| x).ok();
    // Edge order from EdgeIndex is lexicographic, so binary search applies.
    debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));

    let mut per_vertex = Vec::new();
    for v in 0..n {
        let (ins, outs) = (h.in_edges(v), h.out_edges(v));
        if ins.len() != outs.len() {
            return Ok(0);
        }
        if ins.is_empty() {
            continue;
        }
        let choices = local_bijections(&ins, &outs);
        if choices.is_empty() {
            return Ok(0);
        }
        let ins: Vec<usize> = ins.iter().map(|&e| local(e).unwrap()).collect();
        let outs: Vec<usize> = outs.iter().map(|&e| local(e).unwrap()).collect();
        per_vertex.push((ins, outs, choices));
    }

    let mut image = vec![usize::MAX; edges.len()];
    let mut odometer = vec![0usize; per_vertex.len()];
    let mut seen = vec![false; edges.len()];
    let mut total = 0i64;
    loop {
        for ((ins, outs, choices), &c) in per_vertex.iter().zip(&odometer) {
            for (a, &b) in choices[c].iter().enumerate() {
                image[ins[a]] = outs[b];
            }
        }
        seen.iter_mut().for_each(|s| *s = false);
        let mut cycles = 0;
        for start in 0..edges.len() {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut e = start;
            while !seen[e] {
                seen[e] = true;
                e = image[e];
            }
        }
        total += if cycles % 2 == 0 { 1 } else { -1 };

        let mut pos = 0;
        loop {
            if pos == odometer.len() {
                return Ok(total);
            }
            odometer[pos] += 1;
            if odometer[pos] < per_vertex[pos].2.len() {
                break;
            }
            odometer[pos] = 0;
            pos += 1;
        }
    }
}

/// Precomputed subgraph terms of `det(I - zB_M)` for one `n`.
#[derive(Clone, Debug)]
pub struct NbExpansion {
    n: usize,
    /// `(edges of H, sign sum)` for `H` in `H~` with a nonzero sign sum.
    terms: Vec<(Vec<(usize, usize)>, i64)>,
    /// Same, for `H` outside `H~`.
    off_terms: Vec<(Vec<(usize, usize)>, i64)>,
}

impl NbExpansion {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_EXPANSION_VERTICES {
            return Err(Error::SizeCap(format!(
                "determinant expansion limited to n <= {MAX_EXPANSION_VERTICES}, got {n}"
            )));
        }
        let len = EdgeIndex::new(n).len();
        let mut terms = Vec::new();
        let mut off_terms = Vec::new();
        for mask in 0..1u64 << len {
            let h = DirectedSubgraph::from_mask(n, mask)?;
            let s = enumerate_nbp_sign_sum(&h)?;
            if s == 0 {
                continue;
            }
            if htilde_membership(&h) {
                terms.push((h.edges(), s));
            } else {
                off_terms.push((h.edges(), s));
            }
        }
        Ok(Self { n, terms, off_terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Subgraphs in `H~` with nonzero sign sum.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    fn sum(terms: &[(Vec<(usize, usize)>, i64)], m: &CMat, z: C64) -> C64 {
        terms
            .iter()
            .map(|(edges, s)| {
                let prod: C64 = edges.iter().map(|&(i, j)| m[(i, j)] * z).product();
                prod * *s as f64
            })
            .sum()
    }

    fn check(&self, m: &CMat) -> Result<()> {
        let n = m.require_square()?;
        if n != self.n {
            return Err(Error::ShapeMismatch {
                expected: self.n * self.n,
                actual: n * n,
            });
        }
        Ok(())
    }

    /// Sum over `H` in `H~`.
    pub fn evaluate(&self, m: &CMat, z: C64) -> Result<C64> {
        self.check(m)?;
        Ok(if self.n < 2 { ONE } else { Self::sum(&self.terms, m, z) })
    }

    /// Sum over `H` outside `H~`; identically zero when every such sign sum vanishes.
    pub fn evaluate_off_htilde(&self, m: &CMat, z: C64) -> Result<C64> {
        self.check(m)?;
        Ok(Self::sum(&self.off_terms, m, z))
    }

    /// Number of subgraphs outside `H~` with a nonzero sign sum.
    pub fn off_htilde_nonzero(&self) -> usize {
        self.off_terms.len()
    }
}

/// `det(I - zB_M)` through the subgraph expansion restricted to `H~`.
pub fn nb_det_expansion(m: &CMat, z: C64) -> Result<C64> {
    let n = m.require_square()?;
    NbExpansion::new(n)?.evaluate(m, z)
}

/// Which of the three determinant cases a zero pattern falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RMatrixCase {
    /// At least two rows without a zero: repeated rows, determinant 0.
    RepeatedOnesRows,
    /// Exactly one row without a zero: determinant `±1`.
    SingleOnesRow,
    /// A zero in every row: determinant `±(d - 1)`.
    ZeroInEveryRow,
}

impl RMatrixCase {
    /// The determinant magnitude the case predicts.
    pub fn expected_abs(&self, d: usize) -> i64 {
        match self {
            RMatrixCase::RepeatedOnesRows => 0,
            RMatrixCase::SingleOnesRow => 1,
            RMatrixCase::ZeroInEveryRow => d as i64 - 1,
        }
    }
}

fn check_pattern(d: usize, pattern: &[Option<usize>]) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidPattern("d must be at least 1".into()));
    }
    if pattern.len() != d {
        return Err(Error::InvalidPattern(format!("{} rows given for d = {d}", pattern.len())));
    }
    let mut used = vec![false; d];
    for &c in pattern.iter().flatten() {
        if c >= d {
            return Err(Error::InvalidPattern(format!("column {c} out of range")));
        }
        if used[c] {
            return Err(Error::InvalidPattern(format!("column {c} has two zeros")));
        }
        used[c] = true;
    }
    Ok(())
}

pub fn r_matrix_case(d: usize, pattern: &[Option<usize>]) -> Result<RMatrixCase> {
    check_pattern(d, pattern)?;
    Ok(match pattern.iter().filter(|p| p.is_none()).count() {
        0 => RMatrixCase::ZeroInEveryRow,
        1 => RMatrixCase::SingleOnesRow,
        _ => RMatrixCase::RepeatedOnesRows,
    })
}

/// The `d x d` all-ones matrix with `pattern[row]` naming that row's zero, if any.
pub fn r_matrix(d: usize, pattern: &[Option<usize>]) -> Result<Vec<Vec<i64>>> {
    check_pattern(d, pattern)?;
    Ok((0..d)
        .map(|r| (0..d).map(|c| i64::from(pattern[r] != Some(c))).collect())
        .collect())
}

/// Exact determinant of the pattern matrix.
pub fn r_matrix_det(d: usize, pattern: &[Option<usize>]) -> Result<i64> {
    Ok(bareiss_det(r_matrix(d, pattern)?))
}

/// Fraction-free Gaussian elimination; every intermediate is a minor of the input.
pub fn bareiss_det(mut a: Vec<Vec<i64>>) -> i64 {
    let n = a.len();
    let mut sign = 1;
    let mut prev = 1i64;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    if n == 0 {
        1
    } else {
        sign * a[n - 1][n - 1]
    }
}

/// Every legal pattern: partial injections from rows to columns.
pub fn legal_patterns(d: usize) -> Vec<Vec<Option<usize>>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(d);
    let mut used = vec![false; d];
    fn go(
        d: usize,
        cur: &mut Vec<Option<usize>>,
        used: &mut [bool],
        out: &mut Vec<Vec<Option<usize>>>,
    ) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        cur.push(None);
        go(d, cur, used, out);
        cur.pop();
        for c in 0..d {
            if !used[c] {
                used[c] = true;
                cur.push(Some(c));
                go(d, cur, used, out);
                cur.pop();
                used[c] = false;
            }
        }
    }
    go(d, &mut cur, &mut used, &mut out);
    out
}

/// `count` evaluation points with `|z| <= 0.5`, spread in angle by the golden ratio.
pub fn z_points(count: usize) -> Vec<C64> {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    (0..count)
        .map(|j| C64::from_polar(0.5 * (j + 1) as f64 / count as f64, std::f64::consts::TAU * phi * j as f64))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionCheck {
    pub n: usize,
    pub trials: u64,
    pub points: usize,
    /// Largest `|expansion - det| / |det|` over all trials and points.
    pub max_rel_error: f64,
    /// Subgraphs outside `H~` with a nonzero sign sum.
    pub off_htilde_nonzero: usize,
}

/// Compares the expansion with an LU determinant of `I - zB_M` on seeded random matrices.
/// Even trials use complex-phase entries, odd trials real Gaussian ones.
pub fn verify_expansion(n: usize, trials: u64, points: usize, seed: u64) -> Result<ExpansionCheck> {
    use crate::ensembles::{sample_girko, EnsembleSpec, EntryLaw};
    use crate::nonbacktracking::build_nb_matrix;
    use crate::rng::SeedKey;
    use crate::spectral::determinant;

    if n < 2 {
        return Err(Error::Domain(format!("expansion check needs n >= 2, got {n}")));
    }
    let ex = NbExpansion::new(n)?;
    let zs = z_points(points);
    let mut max_rel_error = 0.0f64;
    for t in 0..trials {
        let entry_law = if t % 2 == 0 { EntryLaw::ComplexPhase } else { EntryLaw::Gaussian };
        let m = sample_girko(&EnsembleSpec::Girko { n, entry_law }, SeedKey::new(seed).trial(t))?;
        let b = build_nb_matrix(&m)?;
        for &z in &zs {
            let want = determinant(&b.identity_minus(z));
            let got = ex.evaluate(&m, z)?;
            max_rel_error = max_rel_error.max((got - want).norm() / want.norm());
        }
    }
    Ok(ExpansionCheck {
        n,
        trials,
        points,
        max_rel_error,
        off_htilde_nonzero: ex.off_htilde_nonzero(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RMatrixCheck {
    pub max_d: usize,
    pub patterns: u64,
    pub repeated_ones_rows: u64,
    pub single_ones_row: u64,
    pub zero_in_every_row: u64,
    /// Patterns whose determinant magnitude differs from the case prediction.
    pub mismatches: u64,
}

/// Runs every legal pattern for `d = 1..=max_d` through the exact determinant.
pub fn verify_r_matrices(max_d: usize) -> Result<RMatrixCheck> {
    let mut c = RMatrixCheck {
        max_d,
        patterns: 0,
        repeated_ones_rows: 0,
        single_ones_row: 0,
        zero_in_every_row: 0,
        mismatches: 0,
    };
    for d in 1..=max_d {
        for p in legal_patterns(d) {
            let case = r_matrix_case(d, &p)?;
            let det = r_matrix_det(d, &p)?;
            c.patterns += 1;
            match case {
                RMatrixCase::RepeatedOnesRows => c.repeated_ones_rows += 1,
                RMatrixCase::SingleOnesRow => c.single_ones_row += 1,
                RMatrixCase::ZeroInEveryRow => c.zero_in_every_row += 1,
            }
            if det.abs() != case.expected_abs(d) {
                c.mismatches += 1;
            }
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonbacktracking::build_nb_matrix;
    use crate::matrix::ZERO;
    use crate::spectral::determinant;

    fn h(n: usize, edges: &[(usize, usize)]) -> DirectedSubgraph {
        DirectedSubgraph::new(n, edges).unwrap()
    }

    #[test]
    fn membership_examples() {
        assert!(htilde_membership(&h(3, &[])));
        assert!(!htilde_membership(&h(3, &[(0, 1), (2, 1)])));
        assert!(htilde_membership(&h(4, &[(0, 1), (1, 0), (2, 3), (3, 2), (1, 2), (2, 1)])));
        assert!(htilde_membership(&h(3, &[(0, 1), (1, 2), (2, 0)])));
    }

    #[test]
    fn sign_sum_examples() {
        assert_eq!(enumerate_nbp_sign_sum(&h(3, &[])).unwrap(), 1);
        assert_eq!(enumerate_nbp_sign_sum(&h(3, &[(0, 1), (1, 2), (2, 0)])).unwrap(), -1);
        // A doubleton alone must backtrack.
        assert_eq!(enumerate_nbp_sign_sum(&h(3, &[(0, 1), (1, 0)])).unwrap(), 0);
        assert_eq!(enumerate_nbp_sign_sum(&h(3, &[(0, 1)])).unwrap(), 0);
        assert!(enumerate_nbp_sign_sum(&DirectedSubgraph::from_mask(6, 0).unwrap()).is_err());
    }

    #[test]
    fn sign_sums_vanish_off_htilde_and_respect_the_bound() {
        for n in 2..=4 {
            let len = EdgeIndex::new(n).len();
            for mask in 0..1u64 << len {
                let g = DirectedSubgraph::from_mask(n, mask).unwrap();
                let s = enumerate_nbp_sign_sum(&g).unwrap();
                assert!(s.unsigned_abs() <= nbp_magnitude_bound(&g), "{:?}", g.edges());
                if n == 3 && !htilde_membership(&g) {
                    assert_eq!(s, 0, "{:?}", g.edges());
                }
            }
        }
    }

    fn test_matrix(n: usize, salt: f64) -> CMat {
        CMat::from_fn(n, n, |i, j| {
            let t = (i * 7 + j * 3) as f64 + salt;
            C64::new(t.sin(), (1.3 * t).cos())
        })
    }

    #[test]
    fn expansion_matches_direct_determinant() {
        for n in 2..=4 {
            let ex = NbExpansion::new(n).unwrap();
            for salt in [0.1, 0.7] {
                let m = test_matrix(n, salt);
                let b = build_nb_matrix(&m).unwrap();
                for z in [C64::new(0.3, 0.1), C64::new(-0.2, 0.0), C64::new(0.0, -0.45)] {
                    let want = determinant(&b.identity_minus(z));
                    let got = ex.evaluate(&m, z).unwrap();
                    assert!((got - want).norm() <= 1e-9 * want.norm().max(1.0), "n = {n}");
                }
            }
        }
        assert_eq!(nb_det_expansion(&test_matrix(2, 0.3), C64::new(0.4, 0.2)).unwrap(), ONE);
        assert!(NbExpansion::new(5).is_err());
    }

    #[test]
    fn off_htilde_terms_vanish_at_three() {
        let ex = NbExpansion::new(3).unwrap();
        assert_eq!(ex.off_htilde_nonzero(), 0);
        assert_eq!(ex.evaluate_off_htilde(&test_matrix(3, 0.2), C64::new(0.3, 0.3)).unwrap(), ZERO);
    }

    fn det_f64(a: &[Vec<i64>]) -> i64 {
        let d = a.len();
        let m = CMat::from_fn(d, d, |i, j| C64::new(a[i][j] as f64, 0.0));
        determinant(&m).re.round() as i64
    }

    #[test]
    fn r_matrix_cases() {
        for d in 1..=6 {
            let pats = legal_patterns(d);
            let expected: usize = (0..=d)
                .map(|k| {
                    let c = (0..k).fold(1usize, |a, i| a * (d - i) / (i + 1));
                    c * c * (1..=k).product::<usize>()
                })
                .sum();
            assert_eq!(pats.len(), expected);
            for p in pats {
                let det = r_matrix_det(d, &p).unwrap();
                let case = r_matrix_case(d, &p).unwrap();
                assert_eq!(det.abs(), case.expected_abs(d), "{p:?}");
                assert_eq!(det, det_f64(&r_matrix(d, &p).unwrap()), "{p:?}");
            }
        }
    }

    #[test]
    fn r_matrix_rejects_bad_patterns() {
        assert!(r_matrix_det(3, &[Some(0), Some(0), None]).is_err());
        assert!(r_matrix_det(3, &[Some(3), None, None]).is_err());
        assert!(r_matrix_det(3, &[None, None]).is_err());
        assert!(r_matrix_det(0, &[]).is_err());
    }

    #[test]
    fn verification_drivers() {
        let c = verify_expansion(3, 4, 7, 1).unwrap();
        assert!(c.max_rel_error < 1e-12);
        assert_eq!(c.off_htilde_nonzero, 0);
        assert!(z_points(7).iter().all(|z| z.norm() <= 0.5 + 1e-15));
        let r = verify_r_matrices(4).unwrap();
        assert_eq!(r.mismatches, 0);
        assert_eq!(r.patterns, 2 + 7 + 34 + 209);
    }

    #[test]
    fn bareiss_small() {
        assert_eq!(bareiss_det(vec![vec![0, 1], vec![1, 0]]), -1);
        assert_eq!(bareiss_det(vec![vec![2, 0, 0], vec![0, 3, 0], vec![0, 0, 4]]), 24);
        assert_eq!(bareiss_det(vec![vec![1, 2], vec![2, 4]]), 0);
    }
}

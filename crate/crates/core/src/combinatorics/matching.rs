use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{big, binomial, double_factorial, BigRat};
use crate::ensembles::SubgraphWithMultiplicities;
use crate::error::{Error, Result};

/// Largest number of points whose perfect matchings are enumerated (`11!! = 10395`).
pub const MAX_ENUMERATED_N: usize = 12;

fn check_even(n: usize) -> Result<()> {
    if n % 2 == 1 {
        Err(Error::NoPerfectMatching { half_edges: n })
    } else {
        Ok(())
    }
}

fn df(m: i64) -> BigInt {
    big(double_factorial(m).expect("odd argument"))
}

/// Probability that a fixed set of `t` disjoint pairs all lie in a uniform perfect matching of `[N]`.
pub fn matching_inclusion_prob(n: usize, t: usize) -> Result<BigRat> {
    check_even(n)?;
    if 2 * t > n {
        return Err(Error::Domain(format!("2t = {} exceeds N = {n}", 2 * t)));
    }
    let (n, t) = (n as i64, t as i64);
    Ok(BigRat::new(df(n - 2 * t - 1), df(n - 1)))
}

fn check_moment_args(n: usize, k: usize, beta: &BigRat) -> Result<()> {
    check_even(n)?;
    if n == 0 {
        return Err(Error::Domain("N must be positive".into()));
    }
    if 2 * k > n {
        return Err(Error::Domain(format!("k = {k} edges do not fit in N = {n} points")));
    }
    if *beta < BigRat::one() {
        return Err(Error::Domain(format!("beta must be at least 1, got {beta}")));
    }
    Ok(())
}

/// `E prod_{e in S} (1[e in G] - 1/(beta N))` for a `k`-edge matching `S`, by the finite sum
/// `(1/(N-1)!!) sum_r C(k,r) (N-2r-1)!! (-1/(beta N))^(k-r)`.
pub fn matching_moment_exact(n: usize, k: usize, beta: &BigRat) -> Result<BigRat> {
    check_moment_args(n, k, beta)?;
    let shift = -(beta * BigRat::from_integer(BigInt::from(n))).recip();
    let mut total = BigRat::zero();
    for r in 0..=k {
        let c = big(binomial(k as u64, r as u64)) * df(n as i64 - 2 * r as i64 - 1);
        total += BigRat::from_integer(c) * pow(&shift, k - r);
    }
    Ok(total / BigRat::from_integer(df(n as i64 - 1)))
}

fn pow(x: &BigRat, e: usize) -> BigRat {
    (0..e).fold(BigRat::one(), |acc, _| acc * x)
}

/// Calls `f` with the partner array of every perfect matching of `[n]`.
pub fn for_each_perfect_matching(n: usize, mut f: impl FnMut(&[usize])) {
    if n % 2 == 1 {
        return;
    }
    let mut partner = vec![usize::MAX; n];
    recurse(&mut partner, &mut f);
}

fn recurse(partner: &mut [usize], f: &mut impl FnMut(&[usize])) {
    let Some(a) = partner.iter().position(|&p| p == usize::MAX) else {
        f(partner);
        return;
    };
    for b in a + 1..partner.len() {
        if partner[b] != usize::MAX {
            continue;
        }
        partner[a] = b;
        partner[b] = a;
        recurse(partner, f);
        partner[a] = usize::MAX;
        partner[b] = usize::MAX;
    }
}

fn check_enumerable(n: usize) -> Result<()> {
    check_even(n)?;
    if n > MAX_ENUMERATED_N {
        return Err(Error::SizeCap(format!(
            "matching enumeration limited to N <= {MAX_ENUMERATED_N}, got {n}"
        )));
    }
    Ok(())
}

/// `E prod_{e in S} (1[e in G] - shift)^{m_e}` over all perfect matchings `G` of `[N]`.
pub fn subgraph_moment_enumerated(
    n: usize,
    s: &SubgraphWithMultiplicities,
    shift: &BigRat,
) -> Result<BigRat> {
    check_enumerable(n)?;
    s.check_range(n)?;
    let edges = s.edges();
    // Counts of matchings by which edges of S they contain.
    let mut patterns: HashMap<u128, u64> = HashMap::new();
    let mut total = 0u64;
    for_each_perfect_matching(n, |p| {
        let mut mask = 0u128;
        for (i, &(u, v, _)) in edges.iter().enumerate() {
            if p[u] == v {
                mask |= 1 << i;
            }
        }
        *patterns.entry(mask).or_default() += 1;
        total += 1;
    });
    let inside = BigRat::one() - shift;
    let outside = -shift.clone();
    let mut acc = BigRat::zero();
    for (mask, count) in patterns {
        let mut term = BigRat::from_integer(BigInt::from(count));
        for (i, &(_, _, m)) in edges.iter().enumerate() {
            let base = if mask >> i & 1 == 1 { &inside } else { &outside };
            term *= pow(base, m as usize);
        }
        acc += term;
    }
    Ok(acc / BigRat::from_integer(BigInt::from(total)))
}

/// [`matching_moment_exact`] by brute force, with `S = {(0,1), (2,3), ...}`.
pub fn matching_moment_enumerated(n: usize, k: usize, beta: &BigRat) -> Result<BigRat> {
    check_moment_args(n, k, beta)?;
    check_enumerable(n)?;
    let s = SubgraphWithMultiplicities::new((0..k).map(|i| (2 * i, 2 * i + 1, 1)))?;
    let shift = (beta * BigRat::from_integer(BigInt::from(n))).recip();
    subgraph_moment_enumerated(n, &s, &shift)
}

//! Exact integer and rational oracles.
//!
//! Everything here is computed in exact arithmetic; floats appear only at the
//! reporting boundary.

mod clouds;
mod laplace;
mod matching;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use clouds::{dreg_moment_exact, dreg_shifted_moment_exact, dreg_state_count, DregJointLaw};
pub use laplace::{
    laplace_bound_bracket, laplace_g, laplace_g_prime, laplace_g_second, laplace_tstar,
    matching_moment_grid, MatchingMomentRow,
};
pub use matching::{
    for_each_perfect_matching, matching_inclusion_prob, matching_moment_enumerated,
    matching_moment_exact, subgraph_moment_enumerated, MAX_ENUMERATED_N,
};

pub type BigRat = BigRational;

/// Number of fixed-point-free permutations of `k` elements.
pub fn derangements(k: u32) -> BigUint {
    let (mut prev, mut cur) = (BigUint::one(), BigUint::zero());
    if k == 0 {
        return prev;
    }
    for i in 2..=k {
        let next = (&cur + &prev) * BigUint::from(i - 1);
        prev = cur;
        cur = next;
    }
    cur
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `m!!` for odd `m >= -1`, with `(-1)!! = 1`.
pub fn double_factorial(m: i64) -> Result<BigUint> {
    if m < -1 || m % 2 == 0 {
        return Err(Error::Domain(format!(
            "double factorial needs an odd argument >= -1, got {m}"
        )));
    }
    let mut acc = BigUint::one();
    let mut i = m;
    while i > 1 {
        acc *= BigUint::from(i as u64);
        i -= 2;
    }
    Ok(acc)
}

pub fn rat_to_f64(x: &BigRat) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn rat_from_f64(x: f64) -> Result<BigRat> {
    BigRat::from_float(x).ok_or_else(|| Error::Domain(format!("{x} is not finite")))
}

/// Parses `a/b`, an integer, or a plain decimal such as `1.25` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRat::new(num, den));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.chars().any(|c| !c.is_ascii_digit()) || (int.is_empty() && frac.is_empty()) {
        return Err(bad());
    }
    let negative = int.starts_with('-');
    let digits = format!("{}{frac}", int.trim_start_matches(['-', '+']));
    let mag: BigInt = digits.parse().map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    Ok(BigRat::new(if negative { -mag } else { mag }, den))
}

pub(crate) fn big(x: BigUint) -> BigInt {
    BigInt::from(x)
}

/// `sum_{k=0}^{n} (tau_sq * n)^-k * C(n, k) * D_k`, exactly, for any `tau_sq > 0`.
pub fn girko_closed_form_exact(n: u32, tau_sq: &BigRat) -> Result<BigRat> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if *tau_sq <= BigRat::zero() {
        return Err(Error::Domain("tau^2 must be positive".into()));
    }
    let step = (tau_sq * BigRat::from_integer(BigInt::from(n))).recip();
    let mut power = BigRat::one();
    let mut total = BigRat::zero();
    for k in 0..=n {
        let term = big(binomial(n as u64, k as u64) * derangements(k));
        total += &power * BigRat::from_integer(term);
        power *= &step;
    }
    Ok(total)
}

/// Expected `|det(I - zM/tau)|^2` averaged over the circle for Girko matrices.
///
/// Only `tau > 1` is accepted, where the sum is bounded by `tau^2 / (tau^2 - 1)`;
/// [`girko_partial_sum`] evaluates the same sum for any `tau > 0`.
pub fn girko_closed_form(n: u32, tau: f64) -> Result<f64> {
    if !(tau > 1.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("girko_closed_form needs tau > 1, got {tau}")));
    }
    girko_partial_sum(n, tau)
}

/// The Girko sum for any finite `tau > 0`, with no bound attached.
pub fn girko_partial_sum(n: u32, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }
    let t = rat_from_f64(tau)?;
    Ok(rat_to_f64(&girko_closed_form_exact(n, &(&t * &t))?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(k: u32) -> BigInt {
        (1..=k).fold(BigInt::one(), |a, i| a * BigInt::from(i))
    }

    /// `k! sum_i (-1)^i / i!` written as `sum_i (-1)^i k!/i!`.
    fn derangements_incl_excl(k: u32) -> BigInt {
        (0..=k)
            .map(|i| {
                let t = factorial(k) / factorial(i);
                if i % 2 == 0 {
                    t
                } else {
                    -t
                }
            })
            .sum()
    }

    #[test]
    fn derangement_values() {
        assert_eq!(derangements(0), BigUint::one());
        assert_eq!(derangements(1), BigUint::zero());
        assert_eq!(derangements(3), BigUint::from(2u32));
        assert_eq!(derangements(9), BigUint::from(133_496u32));
        for k in 0..=100 {
            assert_eq!(big(derangements(k)), derangements_incl_excl(k), "k = {k}");
        }
    }

    #[test]
    fn double_factorials() {
        assert_eq!(double_factorial(-1).unwrap(), BigUint::one());
        assert_eq!(double_factorial(1).unwrap(), BigUint::one());
        assert_eq!(double_factorial(5).unwrap(), BigUint::from(15u32));
        assert_eq!(double_factorial(9).unwrap(), BigUint::from(945u32));
        assert!(double_factorial(4).is_err());
        assert!(double_factorial(-3).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(5, 7), BigUint::zero());
        assert_eq!(binomial(60, 30).to_string(), "118264581564861424");
    }

    #[test]
    fn girko_small_cases() {
        assert_eq!(girko_closed_form(1, 1.7).unwrap(), 1.0);
        for tau in [1.1, 1.5, 3.0] {
            let want = 1.0 + 1.0 / (4.0 * tau * tau * tau * tau);
            assert!((girko_closed_form(2, tau).unwrap() - want).abs() < 1e-15);
        }
        assert!(girko_closed_form(20, 1.5).unwrap() <= 1.8);
        assert!(girko_closed_form(5, 1.0).is_err());
        assert!(girko_closed_form(5, 0.5).is_err());
        assert!(girko_partial_sum(5, 0.5).unwrap() > 1.0);
    }

    #[test]
    fn rational_parsing() {
        let r = |a: i64, b: i64| BigRat::new(BigInt::from(a), BigInt::from(b));
        assert_eq!(parse_rational("3/2").unwrap(), r(3, 2));
        assert_eq!(parse_rational("1.25").unwrap(), r(5, 4));
        assert_eq!(parse_rational("2").unwrap(), r(2, 1));
        assert_eq!(parse_rational("-0.5").unwrap(), r(-1, 2));
        assert_eq!(parse_rational(".5").unwrap(), r(1, 2));
        for bad in ["", "1/0", "a", "1.2.3", "1e3", "."] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn girko_exact_is_exact_for_rational_tau() {
        let tau_sq = BigRat::new(BigInt::from(9), BigInt::from(4));
        let v = girko_closed_form_exact(2, &tau_sq).unwrap();
        // 1 + (1/(tau^2 * 2))^2 * 1 * 1
        let want = BigRat::one() + BigRat::new(BigInt::from(4), BigInt::from(81));
        assert_eq!(v, want);
    }
}

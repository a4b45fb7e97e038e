use std::f64::consts::SQRT_2;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use spectra_core::combinatorics::{
    dreg_moment_exact, dreg_shifted_moment_exact, for_each_perfect_matching, girko_closed_form,
    laplace_bound_bracket, laplace_tstar, matching_inclusion_prob, matching_moment_exact,
    subgraph_moment_enumerated, BigRat,
};
use spectra_core::ensembles::{
    centered_adjacency, centered_er_values, empirical_moment_check, isolated_three_cycle_block,
    sample_centered_er, sample_girko, sample_matrix, sample_sparse_spike, ConfigGraph, EnsembleSpec,
    EntryLaw, SubgraphWithMultiplicities,
};
use spectra_core::jensen::{certify, jensen_formula_check, mean_sq_det_on_circle};
use spectra_core::nbdet::{enumerate_nbp_sign_sum, nb_det_expansion, r_matrix_det, DirectedSubgraph};
use spectra_core::nonbacktracking::{build_nb_matrix, ihara_bass_upper};
use spectra_core::spectral::{
    determinant, eigenvalues, log_abs_det, max_row_norm, outlier_count, regular_extremes,
    regular_second_eigenvalue, spectral_radius,
};
use spectra_core::{CMat, SeedKey, C64};

fn rat(p: i64, q: i64) -> BigRat {
    BigRat::new(BigInt::from(p), BigInt::from(q))
}

/// Determinant as a signed sum over all permutations.
fn leibniz(m: &CMat) -> C64 {
    fn perms(k: usize, used: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in 0..k {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                perms(k, used, cur, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let n = m.nrows();
    let mut all = Vec::new();
    perms(n, &mut vec![false; n], &mut Vec::new(), &mut all);
    all.iter()
        .map(|p| {
            let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
            (0..n).map(|i| m[(i, p[i])]).product::<C64>() * sign
        })
        .sum()
}

#[test]
fn log_abs_det_matches_leibniz_on_6x6() {
    for seed in 0..5 {
        let m = sample_matrix(&EnsembleSpec::Girko { n: 6, entry_law: EntryLaw::ComplexPhase }, SeedKey::new(seed))
            .unwrap()
            .identity_minus(C64::new(0.7, -0.4));
        let want = leibniz(&m);
        let got = log_abs_det(&m);
        assert!((got - want.norm().ln()).abs() <= 1e-10 * got.abs().max(1.0));
        assert!((determinant(&m) - want).norm() <= 1e-10 * want.norm());
    }
    assert_eq!(log_abs_det(&CMat::identity(5)), 0.0);
    assert!((log_abs_det(&CMat::diag_real(&[2.0, 3.0])) - 6f64.ln()).abs() < 1e-15);
}

#[test]
fn girko_entries_have_the_target_moments() {
    let n = 50;
    let trials = 100_000u64;
    let tol_mean = 4.0 / ((n as f64).sqrt() * (trials as f64).sqrt());
    for law in [EntryLaw::Rademacher, EntryLaw::Gaussian, EntryLaw::ComplexPhase] {
        let spec = EnsembleSpec::Girko { n, entry_law: law };
        let cells = [(0, 1), (1, 0), (17, 42)];
        let mut sum = [C64::new(0.0, 0.0); 3];
        let mut sq = [0.0; 3];
        for t in 0..trials {
            let m = sample_girko(&spec, SeedKey::new(5).trial(t)).unwrap();
            for (k, &(i, j)) in cells.iter().enumerate() {
                sum[k] += m[(i, j)];
                sq[k] += m[(i, j)].norm_sqr();
            }
        }
        for k in 0..3 {
            let mean = sum[k] / trials as f64;
            assert!(mean.norm() <= tol_mean, "{law:?} mean {mean}");
            let second = sq[k] / trials as f64;
            assert!((second - 1.0 / n as f64).abs() <= 0.05 / n as f64, "{law:?} second {second}");
        }
    }
    let m = sample_girko(&EnsembleSpec::Girko { n: 50, entry_law: EntryLaw::Rademacher }, SeedKey::new(1)).unwrap();
    for i in 0..50 {
        for j in 0..50 {
            let v = m[(i, j)];
            assert!(if i == j { v.norm() == 0.0 } else { (v.norm() - 50f64.sqrt().recip()).abs() < 1e-15 && v.im == 0.0 });
        }
    }
}

#[test]
fn spike_nonzero_fraction() {
    let trials = 1_000_000u64;
    let mut nonzero = 0u64;
    for t in 0..trials {
        let s = sample_sparse_spike(5, SeedKey::new(9).trial(t)).unwrap();
        nonzero += s.matrix.data().iter().filter(|z| z.norm() != 0.0).count() as u64;
    }
    let cells = (trials * 25) as f64;
    let p = 1.0 / 32.0;
    let frac = nonzero as f64 / cells;
    assert!((frac - p).abs() <= 3.0 * (p * (1.0 - p) / cells).sqrt(), "{frac}");
    // Exact moments of one entry: mean 0, variance 1/n.
    let a = 2f64.powf(2.5) / 5f64.sqrt();
    assert!((2.0 * 2f64.powi(-6) * a * a - 0.2).abs() < 1e-15);
}

#[test]
fn centered_er_two_vertices_has_four_outcomes() {
    let (p, hi, lo) = centered_er_values(2);
    assert_eq!(p, 0.25);
    // Variance 2p(1-p) with zero mean.
    assert!((p * hi + (1.0 - p) * lo).abs() < 1e-15);
    assert!((p * hi * hi + (1.0 - p) * lo * lo - 2.0 * p * (1.0 - p)).abs() < 1e-15);
    let trials = 40_000u64;
    let mut counts = [0u64; 4];
    for t in 0..trials {
        let m = sample_centered_er(2, SeedKey::new(3).trial(t)).unwrap();
        let a = usize::from(m[(0, 1)].re == hi);
        let b = usize::from(m[(1, 0)].re == hi);
        assert!(m[(0, 1)].re == hi || m[(0, 1)].re == lo);
        counts[2 * a + b] += 1;
    }
    for (k, &c) in counts.iter().enumerate() {
        let q = [1.0 - p, p][k / 2] * [1.0 - p, p][k % 2];
        let se = (q * (1.0 - q) / trials as f64).sqrt();
        assert!((c as f64 / trials as f64 - q).abs() <= 4.0 * se, "outcome {k}");
    }
}

#[test]
fn three_cycle_block_has_radius_sqrt_two() {
    let r = spectral_radius(&eigenvalues(&isolated_three_cycle_block(10_000)).unwrap());
    assert!((r - SQRT_2).abs() <= 1e-2, "{r}");
    let n = 30;
    let zero = (0..200)
        .filter(|&t| {
            let s = sample_sparse_spike(n, SeedKey::new(4).trial(t)).unwrap();
            spectral_radius(&eigenvalues(&s.matrix).unwrap()) == 0.0
        })
        .count();
    assert!(zero >= 198);
}

#[test]
fn small_configuration_models() {
    // Matchings on half-edges 0,1 | 2,3: {01,23} gives two loops, the other two give a double edge.
    let loops = ConfigGraph::from_matching(2, 2, &[(0, 1), (2, 3)]).unwrap();
    assert_eq!(loops.multiplicity(0, 1), 0);
    let double = ConfigGraph::from_matching(2, 2, &[(0, 2), (1, 3)]).unwrap();
    assert_eq!(double.multiplicity(0, 1), 2);
    let m = centered_adjacency(&double);
    assert!((m[(0, 1)].re - SQRT_2.recip()).abs() < 1e-15);
    assert_eq!(m[(0, 0)].re, 0.0);
    assert_eq!(centered_adjacency(&loops)[(0, 0)].re, 0.0);
    assert_eq!(matching_inclusion_prob(8, 1).unwrap(), rat(1, 7));
    assert!(ConfigGraph::from_matching(3, 1, &[(0, 1)]).is_err());
}

#[test]
fn complete_graph_second_eigenvalue() {
    // K4 as a 3-regular configuration: half-edge 3v+s.
    let pairs = [(0, 3), (1, 6), (2, 9), (4, 7), (5, 10), (8, 11)];
    let g = ConfigGraph::from_matching(4, 3, &pairs).unwrap();
    let e = regular_extremes(&g).unwrap();
    assert!((e.lambda1 - 3.0).abs() < 1e-12);
    assert!((e.lambda2 + 1.0).abs() < 1e-12);
    assert!((regular_second_eigenvalue(&g).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn outlier_count_matches_direct_scan() {
    let m = sample_matrix(&EnsembleSpec::Girko { n: 200, entry_law: EntryLaw::Gaussian }, SeedKey::new(2)).unwrap();
    let s = eigenvalues(&m).unwrap();
    let direct = s.eigenvalues().iter().filter(|z| z.re.hypot(z.im) > 1.2).count();
    assert_eq!(outlier_count(&s, 1.2), direct);
    let ones = CMat::from_fn(7, 7, |_, _| C64::new(1.0, 0.0));
    assert!((max_row_norm(&ones) - 7f64.sqrt()).abs() < 1e-15);
}

#[test]
fn independent_entry_moments() {
    let spec = EnsembleSpec::Girko { n: 10, entry_law: EntryLaw::Rademacher };
    let one = SubgraphWithMultiplicities::new([(0, 1, 1)]).unwrap();
    let two = SubgraphWithMultiplicities::new([(0, 1, 2)]).unwrap();
    let r1 = empirical_moment_check(&spec, &one, 20_000, SeedKey::new(1)).unwrap();
    assert_eq!(r1.exact, Some(0.0));
    assert!(r1.estimate.abs() <= 3.0 * r1.stderr);
    let r2 = empirical_moment_check(&spec, &two, 100, SeedKey::new(1)).unwrap();
    assert!((r2.exact.unwrap() - 0.1).abs() < 1e-15);
    assert!((r2.estimate - 0.1).abs() < 1e-15);
    assert!(empirical_moment_check(&spec, &SubgraphWithMultiplicities::new([(0, 10, 1)]).unwrap(), 10, SeedKey::new(0)).is_err());
}

/// `E prod (A_uv - d/n)^m` by enumerating every matching of the `nd` half-edges.
fn dreg_by_enumeration(n: usize, d: usize, s: &SubgraphWithMultiplicities) -> BigRat {
    let shift = rat(d as i64, n as i64);
    let mut acc = BigRat::zero();
    let mut count = 0u64;
    for_each_perfect_matching(n * d, |p| {
        let mut term = BigRat::one();
        for &(u, v, m) in s.edges() {
            let a = (0..d).filter(|&h| p[u * d + h] / d == v).count();
            let x = BigRat::from_integer(BigInt::from(a)) - &shift;
            for _ in 0..m {
                term *= &x;
            }
        }
        acc += term;
        count += 1;
    });
    acc / BigRat::from_integer(BigInt::from(count))
}

#[test]
fn dreg_exact_law_matches_cloud_expansion() {
    let cases: [(usize, usize, &[(usize, usize, u32)]); 5] = [
        (3, 2, &[(0, 1, 1)]),
        (3, 2, &[(0, 1, 2), (1, 2, 1)]),
        (4, 3, &[(0, 1, 2), (2, 3, 2)]),
        (4, 3, &[(0, 1, 1), (1, 2, 3), (0, 2, 1)]),
        (6, 2, &[(0, 1, 2), (2, 3, 1), (3, 4, 4)]),
    ];
    for (n, d, edges) in cases {
        let s = SubgraphWithMultiplicities::new(edges.iter().copied()).unwrap();
        assert_eq!(dreg_shifted_moment_exact(n, d, &s).unwrap(), dreg_by_enumeration(n, d, &s), "n={n} d={d}");
    }
}

#[test]
fn dreg_monte_carlo_matches_exact_moment() {
    let spec = EnsembleSpec::DregCentered { n: 16, d: 4 };
    let s = SubgraphWithMultiplicities::new([(0, 1, 2), (2, 3, 2)]).unwrap();
    let r = empirical_moment_check(&spec, &s, 200_000, SeedKey::new(21)).unwrap();
    let exact = dreg_moment_exact(16, 4, &s).unwrap();
    assert_eq!(r.exact, Some(exact));
    assert!((r.estimate - exact).abs() <= 3.0 * r.stderr, "{} vs {exact} (se {})", r.estimate, r.stderr);
}

#[test]
fn nonbacktracking_small_cases() {
    let two = CMat::from_real_rows(&[&[0.0, 3.0], &[3.0, 0.0]]);
    assert_eq!(build_nb_matrix(&two).unwrap(), CMat::zeros(2, 2));
    assert!((ihara_bass_upper(&two).unwrap() - 27.0).abs() < 1e-12);
    let m3 = CMat::from_fn(3, 3, |i, j| C64::new((i * 3 + j) as f64 + 1.0, 0.5));
    let b = build_nb_matrix(&m3).unwrap();
    assert_eq!(b.data().iter().filter(|z| z.norm() != 0.0).count(), 6);
    let ones = CMat::from_fn(4, 4, |i, j| C64::new(if i == j { 0.0 } else { 1.0 }, 0.0));
    let b4 = build_nb_matrix(&ones).unwrap();
    for i in 0..b4.nrows() {
        assert_eq!(b4.row(i).iter().sum::<C64>(), C64::new(2.0, 0.0));
    }
    assert_eq!(ihara_bass_upper(&CMat::zeros(4, 4)).unwrap(), 0.0);
}

#[test]
fn jensen_examples() {
    let d = CMat::diag_real(&[2.0, 0.5]);
    // E|1 - 2w|^2 |1 - w/2|^2 = 5 * 5/4 + 2 * (2 * 1/2) = 8.25 over the unit circle.
    let v = mean_sq_det_on_circle(&d, 1.0, 512).unwrap();
    assert!((v - 8.25f64.ln()).abs() < 1e-12);
    assert!((v - mean_sq_det_on_circle(&d, 1.0, 5120).unwrap()).abs() < 1e-10);
    assert_eq!(mean_sq_det_on_circle(&CMat::zeros(3, 3), 1.3, 64).unwrap(), 0.0);
    let c = jensen_formula_check(&d, 1.0, 1024).unwrap();
    assert!((c.rhs - 2f64.ln()).abs() < 1e-15);
    assert!((c.lhs - c.rhs).abs() < 1e-10);
    let z = jensen_formula_check(&CMat::zeros(4, 4), 0.7, 64).unwrap();
    assert_eq!((z.lhs, z.rhs), (0.0, 0.0));

    let cert = certify(&CMat::zeros(3, 3), 1.0, 256, 1.0).unwrap();
    assert_eq!(cert.outlier_count_bound, 0);
    let m = CMat::diag_real(&[2.0, 0.5, 0.5]);
    let cert = certify(&m, 1.0, 1024, 1.0).unwrap();
    let truth = outlier_count(&eigenvalues(&m).unwrap(), cert.certified_threshold());
    assert_eq!(truth, 1);
    assert!(cert.outlier_count_bound >= 1);
}

#[test]
fn certificates_dominate_true_counts_at_n200() {
    let spec = EnsembleSpec::Girko { n: 200, entry_law: EntryLaw::Rademacher };
    let tau = 1.2f64.sqrt();
    for seed in 0..100 {
        let m = sample_matrix(&spec, SeedKey::new(seed)).unwrap();
        let cert = certify(&m, tau, 1024, 0.2).unwrap();
        let truth = outlier_count(&eigenvalues(&m).unwrap(), cert.certified_threshold());
        assert!(cert.outlier_count_bound >= truth as u64, "seed {seed}");
    }
}

#[test]
fn combinatorial_examples() {
    assert_eq!(girko_closed_form(1, 1.7).unwrap(), 1.0);
    for tau in [1.1f64, 1.5, 3.0] {
        assert!((girko_closed_form(2, tau).unwrap() - (1.0 + 0.25 / tau.powi(4))).abs() < 1e-15);
    }
    assert!(girko_closed_form(20, 1.5).unwrap() <= 1.8);
    assert_eq!(matching_moment_exact(4, 1, &BigRat::one()).unwrap(), rat(1, 12));
    assert_eq!(matching_moment_exact(10, 0, &rat(3, 2)).unwrap(), BigRat::one());
    let edge = SubgraphWithMultiplicities::new([(0, 1, 1)]).unwrap();
    assert_eq!(
        subgraph_moment_enumerated(10, &edge, &rat(1, 10)).unwrap(),
        matching_inclusion_prob(10, 1).unwrap() - rat(1, 10)
    );
    assert_eq!(subgraph_moment_enumerated(8, &SubgraphWithMultiplicities::empty(), &rat(1, 8)).unwrap(), BigRat::one());
    let path = SubgraphWithMultiplicities::new([(0, 1, 1), (1, 2, 1)]).unwrap();
    let v = subgraph_moment_enumerated(8, &path, &rat(1, 8)).unwrap();
    // The two edges share vertex 1, so at most one is present, each with probability 1/7.
    let p = rat(1, 7);
    let expected = &p * rat(7, 8) * rat(-1, 8) * rat(2, 1) + (BigRat::one() - &p * rat(2, 1)) * rat(1, 64);
    assert_eq!(v, expected);

    assert_eq!(laplace_tstar(0.0, 2.7).unwrap(), 1.0);
    assert!((laplace_tstar(0.5, 1.0).unwrap() - (1.0 - SQRT_2.recip())).abs() < 1e-14);
    assert_eq!(laplace_bound_bracket(10, 0, 2.0).unwrap(), 1.0);
    let (n, k) = (12.0f64, 2.0f64);
    assert!((laplace_bound_bracket(12, 2, 1.0).unwrap() - (2.0 * k / n).powf(k / 2.0) / n.powf(k)).abs() < 1e-18);
}

#[test]
fn nbdet_examples() {
    let h = |n, e: &[(usize, usize)]| DirectedSubgraph::new(n, e).unwrap();
    assert_eq!(enumerate_nbp_sign_sum(&h(3, &[(0, 1), (1, 2), (2, 0)])).unwrap(), -1);
    assert_eq!(enumerate_nbp_sign_sum(&h(3, &[])).unwrap(), 1);
    let m2 = CMat::from_real_rows(&[&[0.0, 1.5], &[-2.0, 0.0]]);
    assert_eq!(nb_det_expansion(&m2, C64::new(0.4, 0.1)).unwrap(), C64::new(1.0, 0.0));
    let m3 = sample_matrix(&EnsembleSpec::Girko { n: 3, entry_law: EntryLaw::ComplexPhase }, SeedKey::new(8)).unwrap();
    let m4 = sample_matrix(&EnsembleSpec::Girko { n: 4, entry_law: EntryLaw::Gaussian }, SeedKey::new(8)).unwrap();
    for (m, z) in [(m3, C64::new(0.3, 0.1)), (m4, C64::new(0.2, 0.0))] {
        let want = determinant(&build_nb_matrix(&m).unwrap().identity_minus(z));
        let got = nb_det_expansion(&m, z).unwrap();
        assert!((got - want).norm() <= 1e-9 * want.norm());
    }
    for d in 3..=8 {
        let mut two_full = vec![None; d];
        two_full[0] = Some(0);
        assert_eq!(r_matrix_det(d, &two_full).unwrap(), 0);
        let mut one_full: Vec<Option<usize>> = (0..d).map(Some).collect();
        one_full[d - 1] = None;
        assert_eq!(r_matrix_det(d, &one_full).unwrap().abs(), 1);
        let perm: Vec<Option<usize>> = (0..d).map(|r| Some((r + 1) % d)).collect();
        assert_eq!(r_matrix_det(d, &perm).unwrap().abs(), d as i64 - 1);
    }
}

use spectra_core::combinatorics::{subgraph_moment_enumerated, rat_to_f64, BigRat};
use spectra_core::ensembles::{EnsembleSpec, EntryLaw, SubgraphWithMultiplicities};
use spectra_core::experiments::{
    run_assumption_grid, run_dreg_experiment, run_girko_experiment, run_wigner_experiment, wigner_trial,
    DregConfig, GirkoConfig, GridConfig, NbCertificateConfig, WignerConfig,
};
use spectra_core::CMat;

#[test]
fn wigner_lemma_holds_in_every_trial() {
    let r = run_wigner_experiment(&WignerConfig::new(24, EntryLaw::Gaussian, 100), 3).unwrap();
    assert_eq!(r.aggregates.bound_violations, 0);
    assert!(r.rows.iter().all(|row| row.bound_holds == Some(true)));
    assert!(r.aggregates.rho_nb_sq.is_some());
    assert!(r.aggregates.fourth_moment_ok);
}

#[test]
fn zero_matrix_gives_sane_row() {
    let row = wigner_trial(&CMat::zeros(6, 6), true, 0).unwrap();
    assert_eq!(row.rho, 0.0);
    assert_eq!(row.rho_nb, Some(0.0));
    assert_eq!(row.bound_holds, Some(true));
    assert_eq!(row.normalized_rho, 0.0);
}

#[test]
fn reports_are_reproducible() {
    let cfg = GirkoConfig {
        ensemble: EnsembleSpec::Girko { n: 12, entry_law: EntryLaw::ComplexPhase },
        trials: 20,
        tau: 1.3,
        delta: 0.2,
        nodes: 256,
        epsilon: 0.05,
    };
    let a = run_girko_experiment(&cfg, 77).unwrap();
    let b = run_girko_experiment(&cfg, 77).unwrap();
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    assert_eq!(a.meta.seed, 77);
    assert_eq!(a.meta.experiment, "girko");
    assert_eq!(a.aggregates.theorem_violations, 0);
    let params: serde_json::Value = a.meta.params.clone();
    assert_eq!(params["tau"], 1.3);
    let reparsed: serde_json::Value = serde_json::from_str(&a.to_json().unwrap()).unwrap();
    assert_eq!(reparsed["rows"].as_array().unwrap().len(), 20);
    assert_ne!(a.to_json().unwrap(), run_girko_experiment(&cfg, 78).unwrap().to_json().unwrap());
}

#[test]
fn spike_radius_is_zero_almost_always() {
    let cfg = GirkoConfig {
        ensemble: EnsembleSpec::SparseSpike { n: 30 },
        trials: 200,
        tau: 1.5,
        delta: 0.2,
        nodes: 64,
        epsilon: 0.05,
    };
    let r = run_girko_experiment(&cfg, 1).unwrap();
    assert!(r.aggregates.zero_radius_fraction >= 0.99);
    assert_eq!(r.aggregates.spike_capped, Some(false));
}

#[test]
fn girko_mean_rhs_matches_closed_form_roughly() {
    let cfg = GirkoConfig {
        ensemble: EnsembleSpec::Girko { n: 20, entry_law: EntryLaw::Rademacher },
        trials: 2000,
        tau: 1.5,
        delta: 0.2,
        nodes: 1024,
        epsilon: 0.05,
    };
    let r = run_girko_experiment(&cfg, 5).unwrap();
    assert!(r.aggregates.closed_form_z.unwrap().abs() <= 3.0);
}

#[test]
fn dreg_reports_degree_and_certificate() {
    let cfg = DregConfig {
        n: 20,
        d: 3,
        trials: 5,
        nb_certificate: Some(NbCertificateConfig { tau: 2.0, delta: 0.5, nodes: 256 }),
    };
    let r = run_dreg_experiment(&cfg, 4).unwrap();
    assert!(r.aggregates.lambda1_is_degree);
    assert!(r.rows.iter().all(|row| row.lambda1.is_some_and(|l| (l - 3.0).abs() < 1e-9)));
    assert!(r.rows.iter().all(|row| row.nb_log_mean_sq_det.is_some()));
}

#[test]
fn grid_matches_matching_space_enumeration() {
    // n = 6, d = 2: N = 12 half-edges, small enough to enumerate directly.
    let r = run_assumption_grid(&GridConfig { n: 6, d: 2, max_edges: 1, trials: 20_000 }, 8).unwrap();
    for row in &r.rows {
        let m: u32 = row.subgraph.rsplit(':').next().unwrap().parse().unwrap();
        let exact = cloud_expanded_single_edge(6, 2, m);
        assert!((row.exact.unwrap() - exact).abs() < 1e-12, "m={m}");
        assert!((row.estimate - exact).abs() <= 4.0 * row.stderr, "m={m}");
    }
}

/// `E ((A_01 - d/n)/sqrt d)^m` by summing over the `d^2` half-edge pairs between clouds 0 and 1.
fn cloud_expanded_single_edge(n: usize, d: usize, m: u32) -> f64 {
    // A_01 = sum of indicators over half-edge pairs (0,s)-(1,t); expand with the generic enumerator.
    let shift = BigRat::new((d as i64).into(), (n as i64).into());
    let mut total = 0.0;
    let nd = n * d;
    let mut counts = vec![0u64; d + 1];
    spectra_core::combinatorics::for_each_perfect_matching(nd, |p| {
        let a = (0..d).filter(|&s| p[s] / d == 1).count();
        counts[a] += 1;
    });
    let all: u64 = counts.iter().sum();
    for (a, &c) in counts.iter().enumerate() {
        let x = a as f64 - rat_to_f64(&shift);
        total += c as f64 / all as f64 * x.powi(m as i32);
    }
    // Cross-check the one-pair marginal against the generic subgraph enumerator.
    let one = SubgraphWithMultiplicities::new([(0, d, 1)]).unwrap();
    let p = subgraph_moment_enumerated(nd, &one, &BigRat::from_integer(0.into())).unwrap();
    assert!((rat_to_f64(&p) * (d * d) as f64 - counts.iter().enumerate().map(|(a, &c)| a as f64 * c as f64).sum::<f64>() / all as f64).abs() < 1e-12);
    total / (d as f64).powf(m as f64 / 2.0)
}

use std::fmt;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use spectra_core::combinatorics::{
    girko_closed_form, girko_closed_form_exact, girko_partial_sum, laplace_bound_bracket,
    matching_moment_enumerated, matching_moment_exact, matching_moment_grid, parse_rational,
    rat_from_f64, rat_to_f64, BigRat, MAX_ENUMERATED_N,
};
use spectra_core::ensembles::{sample_config_model, sample_matrix, EnsembleSpec};
use spectra_core::experiments::{
    run_assumption_grid, run_dreg_experiment, run_girko_experiment, run_wigner_experiment, CsvRow,
    DregConfig, GirkoConfig, GridConfig, NbCertificateConfig, Report, WignerConfig,
};
use spectra_core::io::{write_graph_edges, write_matrix_csv, write_spectrum_csv, DumpHeader};
use spectra_core::jensen::{certify_with_spectrum, jensen_formula_check};
use spectra_core::nbdet::{verify_expansion, verify_r_matrices};
use spectra_core::nonbacktracking::{build_nb_matrix, EdgeIndex};
use spectra_core::spectral::{eigenvalues, outlier_count, spectral_radius};
use spectra_core::{CMat, SeedKey};

use crate::args::*;

/// A failure with its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<spectra_core::Error> for CliError {
    fn from(e: spectra_core::Error) -> Self {
        Self {
            code: if e.is_numeric_failure() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

impl From<String> for CliError {
    fn from(message: String) -> Self {
        Self { code: 1, message }
    }
}

impl From<&str> for CliError {
    fn from(message: &str) -> Self {
        message.to_string().into()
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self { code: 1, message: e.to_string() }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self { code: 1, message: e.to_string() }
    }
}

type CliResult<T> = Result<T, CliError>;

pub const SEED_ENV: &str = "SPECTRA_SEED";

fn seed(o: &Output) -> CliResult<u64> {
    if let Some(s) = o.seed {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| format!("{SEED_ENV} is not an unsigned integer: {v:?}").into()),
        Err(_) => Ok(0),
    }
}

fn emit(o: &Output, text: &str) -> CliResult<()> {
    match &o.out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn sidecar(o: &Output, header: &DumpHeader) -> CliResult<()> {
    if let Some(p) = &o.out {
        let mut name = p.as_os_str().to_owned();
        name.push(".json");
        fs::write(Path::new(&name), serde_json::to_string_pretty(header)? + "\n")?;
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Number(n) => out.push((
            prefix.to_string(),
            n.as_f64()
                .filter(|_| n.is_f64())
                .map_or_else(|| n.to_string(), spectra_core::io::fmt_f64),
        )),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// A flat object as a two-line CSV; nested keys are joined with dots.
fn object_csv(v: &Value) -> String {
    let mut cells = Vec::new();
    flatten("", v, &mut cells);
    let (keys, vals): (Vec<_>, Vec<_>) = cells.into_iter().map(|(k, v)| (csv_field(&k), csv_field(&v))).unzip();
    format!("{}\n{}\n", keys.join(","), vals.join(","))
}

fn emit_value(o: &Output, v: &Value) -> CliResult<()> {
    match o.format() {
        Format::Json => emit(o, &(serde_json::to_string_pretty(v)? + "\n")),
        Format::Csv => emit(o, &object_csv(v)),
    }
}

fn emit_report<A: Serialize, R: Serialize + CsvRow>(o: &Output, r: &Report<A, R>) -> CliResult<()> {
    match o.format() {
        Format::Json => emit(o, &(r.to_json()? + "\n")),
        Format::Csv => emit(o, &r.rows_csv()),
    }
}

fn entries_json(values: &[spectra_core::C64]) -> Value {
    Value::Array(values.iter().map(|z| json!([z.re, z.im])).collect())
}

fn rat_string(r: &BigRat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn sample(a: &SampleArgs) -> CliResult<()> {
    let spec = a.ensemble.spec()?;
    let key = SeedKey::new(seed(&a.output)?).trial(a.trial);
    let o = &a.output;
    let header = |m: &CMat, edge_index: Option<Vec<(usize, usize)>>| DumpHeader {
        spec: Some(spec.clone()),
        seed: Some(key),
        rows: m.nrows(),
        cols: m.ncols(),
        edge_index,
    };
    match a.dump {
        Dump::Matrix | Dump::NbMatrix => {
            let m = sample_matrix(&spec, key)?;
            let (m, legend) = if a.dump == Dump::NbMatrix {
                let legend = EdgeIndex::new(m.nrows()).edges().collect();
                (build_nb_matrix(&m)?, Some(legend))
            } else {
                (m, None)
            };
            let h = header(&m, legend);
            match o.format() {
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_matrix_csv(&m, &mut buf)?;
                    emit(o, &String::from_utf8(buf).expect("ascii"))?;
                    sidecar(o, &h)
                }
                Format::Json => emit_value(o, &json!({ "header": h, "entries": entries_json(m.data()) })),
            }
        }
        Dump::Spectrum => {
            let m = sample_matrix(&spec, key)?;
            let s = eigenvalues(&m)?;
            let h = header(&m, None);
            match o.format() {
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_spectrum_csv(&s, &h, &mut buf)?;
                    emit(o, &String::from_utf8(buf).expect("ascii"))
                }
                Format::Json => emit_value(o, &json!({ "header": h, "eigenvalues": entries_json(s.eigenvalues()) })),
            }
        }
        Dump::Graph => {
            let EnsembleSpec::DregCentered { n, d } = spec else {
                return Err("--dump graph needs --ensemble dreg".into());
            };
            spec.validate()?;
            let g = sample_config_model(n, d, key)?;
            match o.format() {
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_graph_edges(&g, &mut buf)?;
                    emit(o, &String::from_utf8(buf).expect("ascii"))
                }
                Format::Json => {
                    let edges: Vec<Value> = (0..n)
                        .flat_map(|i| g.neighbors(i).iter().filter(move |&&(j, _)| i < j).map(move |&(j, m)| json!([i, j, m])))
                        .collect();
                    let loops: Vec<u32> = (0..n).map(|i| g.loops(i)).collect();
                    emit_value(o, &json!({ "n": n, "d": d, "seed": key, "edges": edges, "loops": loops }))
                }
            }
        }
    }
}

pub fn certify(a: &CertifyArgs) -> CliResult<()> {
    let spec = a.ensemble.spec()?;
    let base = seed(&a.output)?;
    let m = sample_matrix(&spec, SeedKey::new(base).trial(a.trial))?;
    let s = eigenvalues(&m)?;
    let cert = certify_with_spectrum(&m, &s, a.tau, a.nodes, a.delta)?;
    let true_outliers = outlier_count(&s, cert.certified_threshold());
    emit_value(
        &a.output,
        &json!({
            "ensemble": spec,
            "seed": base,
            "trial": a.trial,
            "certificate": cert,
            "certified_threshold": cert.certified_threshold(),
            "spectral_radius": spectral_radius(&s),
            "outliers_at_tau": outlier_count(&s, a.tau),
            "true_outliers": true_outliers,
            "bound_holds": cert.outlier_count_bound >= true_outliers as u64,
        }),
    )
}

pub fn girko_closed_form_cmd(a: &GirkoClosedFormArgs) -> CliResult<()> {
    let value = if a.raw { girko_partial_sum(a.n, a.tau)? } else { girko_closed_form(a.n, a.tau)? };
    let t = rat_from_f64(a.tau)?;
    let tau_sq = &t * &t;
    let exact = girko_closed_form_exact(a.n, &tau_sq)?;
    let one = BigRat::from_integer(1.into());
    let bound = (tau_sq > one).then(|| &tau_sq / (&tau_sq - &one));
    emit_value(
        &a.output,
        &json!({
            "n": a.n,
            "tau": a.tau,
            "tau_sq": rat_string(&tau_sq),
            "exact": rat_string(&exact),
            "value": value,
            "bound": bound.as_ref().map(rat_to_f64),
            "within_bound": bound.as_ref().map(|b| exact <= *b),
        }),
    )
}

pub fn nbdet_verify(a: &NbdetArgs) -> CliResult<()> {
    let points = if a.full_points { a.n * (a.n - 1) + 1 } else { 7 };
    let e = verify_expansion(a.n, a.trials, points, seed(&a.output)?)?;
    let off3 = verify_expansion(3, 0, 1, 0)?.off_htilde_nonzero;
    let r = verify_r_matrices(a.d)?;
    emit_value(
        &a.output,
        &json!({
            "expansion": e,
            "off_htilde_nonzero_n3": off3,
            "r_matrix": r,
            "passed": e.max_rel_error <= 1e-9 && off3 == 0 && r.mismatches == 0,
        }),
    )
}

pub fn dreg(a: &DregArgs) -> CliResult<()> {
    let cfg = DregConfig {
        n: a.n,
        d: a.d,
        trials: a.trials,
        nb_certificate: a.tau.map(|tau| NbCertificateConfig { tau, delta: a.delta, nodes: a.nodes }),
    };
    emit_report(&a.output, &run_dreg_experiment(&cfg, seed(&a.output)?)?)
}

pub fn wigner(a: &WignerArgs) -> CliResult<()> {
    let cfg = WignerConfig {
        n: a.n,
        entry_law: a.law.into(),
        trials: a.trials,
        nb_cap: a.nb_cap,
    };
    emit_report(&a.output, &run_wigner_experiment(&cfg, seed(&a.output)?)?)
}

pub fn girko(a: &GirkoArgs) -> CliResult<()> {
    let cfg = GirkoConfig {
        ensemble: a.ensemble.spec()?,
        trials: a.trials,
        tau: a.tau,
        delta: a.delta,
        nodes: a.nodes,
        epsilon: a.epsilon,
    };
    emit_report(&a.output, &run_girko_experiment(&cfg, seed(&a.output)?)?)
}

pub fn assumption_grid(a: &GridArgs) -> CliResult<()> {
    let cfg = GridConfig {
        n: a.n,
        d: a.d,
        max_edges: a.max_edges,
        trials: a.trials,
    };
    emit_report(&a.output, &run_assumption_grid(&cfg, seed(&a.output)?)?)
}

pub fn matching_moments(a: &MatchingArgs) -> CliResult<()> {
    if a.grid {
        let ns: Vec<usize> = (2..=a.big_n).step_by(2).collect();
        let ks: Vec<usize> = (1..=a.big_n / 4).collect();
        let rows = matching_moment_grid(&ns, &ks, &[1.0, 1.5, 2.0])?;
        return match a.output.format() {
            Format::Json => emit(&a.output, &(serde_json::to_string_pretty(&rows)? + "\n")),
            Format::Csv => {
                let mut out = String::from("N,k,beta,exact,bracket,ratio\n");
                for r in rows {
                    let f = spectra_core::io::fmt_f64;
                    out.push_str(&format!("{},{},{},{},{},{}\n", r.n, r.k, f(r.beta), f(r.exact), f(r.bracket), f(r.ratio)));
                }
                emit(&a.output, &out)
            }
        };
    }
    let beta = parse_rational(&a.beta)?;
    let exact = matching_moment_exact(a.big_n, a.k, &beta)?;
    let enumerated = if a.big_n <= MAX_ENUMERATED_N {
        Some(matching_moment_enumerated(a.big_n, a.k, &beta)?)
    } else {
        None
    };
    let beta_f = rat_to_f64(&beta);
    let bracket = laplace_bound_bracket(a.big_n, a.k, beta_f)?;
    let exact_f = rat_to_f64(&exact);
    emit_value(
        &a.output,
        &json!({
            "N": a.big_n,
            "k": a.k,
            "beta": rat_string(&beta),
            "exact": rat_string(&exact),
            "enumerated": enumerated.as_ref().map(rat_string),
            "equal": enumerated.as_ref().map(|e| *e == exact),
            "exact_value": exact_f,
            "bracket": bracket,
            "ratio": exact_f.abs() / bracket,
        }),
    )
}

pub fn jensen_check(a: &JensenArgs) -> CliResult<()> {
    let spec = a.ensemble.spec()?;
    let base = seed(&a.output)?;
    let m = sample_matrix(&spec, SeedKey::new(base).trial(a.trial))?;
    let c = jensen_formula_check(&m, a.r, a.nodes)?;
    emit_value(
        &a.output,
        &json!({
            "ensemble": spec,
            "seed": base,
            "trial": a.trial,
            "r": a.r,
            "K": a.nodes,
            "lhs": c.lhs,
            "rhs": c.rhs,
            "abs_diff": (c.lhs - c.rhs).abs(),
            "zero_distance": c.zero_distance,
        }),
    )
}

pub fn run(command: &Command) -> CliResult<()> {
    match command {
        Command::Sample(a) => sample(a),
        Command::Certify(a) => certify(a),
        Command::GirkoClosedForm(a) => girko_closed_form_cmd(a),
        Command::NbdetVerify(a) => nbdet_verify(a),
        Command::Dreg(a) => dreg(a),
        Command::Wigner(a) => wigner(a),
        Command::Girko(a) => girko(a),
        Command::AssumptionGrid(a) => assumption_grid(a),
        Command::MatchingMoments(a) => matching_moments(a),
        Command::JensenCheck(a) => jensen_check(a),
    }
}

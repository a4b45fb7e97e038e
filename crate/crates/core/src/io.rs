//! Plain-text dump formats.
//!
//! * Matrix: one CSV line per row, `re,im` pairs in column order, plus a JSON sidecar.
//! * Spectrum: a `# {json}` header line, then one `re,im` line per eigenvalue.
//! * Configuration graph: `i j multiplicity` lines for `i < j`, then `i i loops` lines.
//!
//! Floats are written with 17 significant digits, which round-trips every `f64`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::ensembles::{ConfigGraph, EnsembleSpec};
use crate::error::{Error, Result};
use crate::matrix::{CMat, C64};
use crate::rng::SeedKey;
use crate::spectral::Spectrum;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DumpHeader {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub spec: Option<EnsembleSpec>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<SeedKey>,
    pub rows: usize,
    pub cols: usize,
    /// Directed-edge legend for nonbacktracking matrices.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub edge_index: Option<Vec<(usize, usize)>>,
}

pub fn write_matrix_csv(m: &CMat, mut w: impl Write) -> Result<()> {
    for i in 0..m.nrows() {
        let line: Vec<String> = m
            .row(i)
            .iter()
            .map(|z| format!("{},{}", fmt_f64(z.re), fmt_f64(z.im)))
            .collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a number: {s:?}")))
}

pub fn read_matrix_csv(r: impl BufRead) -> Result<CMat> {
    let mut data = Vec::new();
    let mut rows = 0;
    let mut cols = None;
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() % 2 == 1 {
            return Err(Error::Parse(format!("row {rows} has an odd number of fields")));
        }
        let c = fields.len() / 2;
        if *cols.get_or_insert(c) != c {
            return Err(Error::Parse(format!("row {rows} has {c} entries, expected {cols:?}")));
        }
        for pair in fields.chunks_exact(2) {
            data.push(C64::new(parse_f64(pair[0])?, parse_f64(pair[1])?));
        }
        rows += 1;
    }
    CMat::new(rows, cols.unwrap_or(0), data)
}

pub fn write_spectrum_csv(s: &Spectrum, header: &DumpHeader, mut w: impl Write) -> Result<()> {
    writeln!(w, "# {}", serde_json::to_string(header)?)?;
    for z in s.eigenvalues() {
        writeln!(w, "{},{}", fmt_f64(z.re), fmt_f64(z.im))?;
    }
    Ok(())
}

pub fn read_spectrum_csv(r: impl BufRead) -> Result<(DumpHeader, Vec<C64>)> {
    let mut lines = r.lines();
    let first = lines.next().ok_or_else(|| Error::Parse("empty spectrum dump".into()))??;
    let json = first
        .strip_prefix("# ")
        .ok_or_else(|| Error::Parse("missing '# ' header line".into()))?;
    let header: DumpHeader = serde_json::from_str(json)?;
    let mut values = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (re, im) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("bad eigenvalue line {line:?}")))?;
        values.push(C64::new(parse_f64(re)?, parse_f64(im)?));
    }
    Ok((header, values))
}

pub fn write_graph_edges(g: &ConfigGraph, mut w: impl Write) -> Result<()> {
    for i in 0..g.n() {
        for &(j, m) in g.neighbors(i) {
            if i < j {
                writeln!(w, "{i} {j} {m}")?;
            }
        }
    }
    for i in 0..g.n() {
        if g.loops(i) > 0 {
            writeln!(w, "{i} {i} {}", g.loops(i))?;
        }
    }
    Ok(())
}

/// `(i, j, count)` triples; `i == j` lines carry loop counts.
pub fn read_graph_edges(r: impl BufRead) -> Result<Vec<(usize, usize, u32)>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.is_empty() {
            continue;
        }
        let bad = || Error::Parse(format!("bad edge line {line:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let i = parts[0].parse().map_err(|_| bad())?;
        let j = parts[1].parse().map_err(|_| bad())?;
        let m = parts[2].parse().map_err(|_| bad())?;
        out.push((i, j, m));
    }
    Ok(out)
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spectra_core::ensembles::{EnsembleSpec, EntryLaw};

#[derive(Debug, Parser)]
#[command(name = "spectra", version, about = "Contour certificates and exact oracles for random matrix spectra")]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Flat `key = value` file mirroring flag names; explicit flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw one matrix, spectrum or graph and dump it.
    Sample(SampleArgs),
    /// Contour certificate for one sampled matrix, with the true outlier count.
    Certify(CertifyArgs),
    /// Exact Girko contour average.
    GirkoClosedForm(GirkoClosedFormArgs),
    /// Check the nonbacktracking determinant expansion and the R-matrix cases.
    NbdetVerify(NbdetArgs),
    /// Second eigenvalue of configuration-model graphs.
    Dreg(DregArgs),
    /// Hermitian spectral radius against the nonbacktracking bound.
    Wigner(WignerArgs),
    /// Certificates and outlier counts over many non-Hermitian samples.
    Girko(GirkoArgs),
    /// Mixed moments of the centered regular ensemble over small subgraphs.
    AssumptionGrid(GridArgs),
    /// Exact and enumerated configuration-model matching moments.
    MatchingMoments(MatchingArgs),
    /// Both sides of Jensen's formula for one sampled matrix.
    JensenCheck(JensenArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EnsembleKind {
    Girko,
    Wigner,
    SparseSpike,
    CenteredEr,
    Dreg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Law {
    Rademacher,
    Gaussian,
    ComplexPhase,
}

impl From<Law> for EntryLaw {
    fn from(l: Law) -> Self {
        match l {
            Law::Rademacher => EntryLaw::Rademacher,
            Law::Gaussian => EntryLaw::Gaussian,
            Law::ComplexPhase => EntryLaw::ComplexPhase,
        }
    }
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format (default: csv when --out ends in .csv, else json).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Base seed (falls back to SPECTRA_SEED, then 0).
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Output {
    pub fn format(&self) -> Format {
        self.format.unwrap_or_else(|| match &self.out {
            Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => Format::Csv,
            _ => Format::Json,
        })
    }
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    #[arg(long, value_enum, default_value_t = EnsembleKind::Girko)]
    pub ensemble: EnsembleKind,
    #[arg(long)]
    pub n: usize,
    /// Degree, for the regular ensemble.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, value_enum, default_value_t = Law::Rademacher)]
    pub law: Law,
}

impl EnsembleArgs {
    pub fn spec(&self) -> Result<EnsembleSpec, String> {
        let n = self.n;
        let entry_law = self.law.into();
        Ok(match self.ensemble {
            EnsembleKind::Girko => EnsembleSpec::Girko { n, entry_law },
            EnsembleKind::Wigner => EnsembleSpec::Wigner { n, entry_law },
            EnsembleKind::SparseSpike => EnsembleSpec::SparseSpike { n },
            EnsembleKind::CenteredEr => EnsembleSpec::CenteredEr { n },
            EnsembleKind::Dreg => EnsembleSpec::DregCentered {
                n,
                d: self.d.ok_or("--d is required for the dreg ensemble")?,
            },
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Dump {
    Matrix,
    Spectrum,
    Graph,
    NbMatrix,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, value_enum, default_value_t = Dump::Matrix)]
    pub dump: Dump,
    /// Trial index within the seed's stream family.
    #[arg(long, default_value_t = 0)]
    pub trial: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.2)]
    pub delta: f64,
    #[arg(long = "K", default_value_t = spectra_core::jensen::DEFAULT_NODES)]
    pub nodes: usize,
    #[arg(long, default_value_t = 0)]
    pub trial: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct GirkoClosedFormArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub tau: f64,
    /// Evaluate the sum for any tau > 0 without the tau > 1 bound.
    #[arg(long)]
    pub raw: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct NbdetArgs {
    /// Matrix size for the expansion check (2..=4).
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub trials: u64,
    /// Largest R-matrix size.
    #[arg(long, default_value_t = 8)]
    pub d: usize,
    /// Evaluate at n(n-1)+1 points instead of 7.
    #[arg(long)]
    pub full_points: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct DregArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 50)]
    pub trials: u64,
    /// Also certify B_M of the centered adjacency at this radius (n <= 32).
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, default_value_t = 0.2)]
    pub delta: f64,
    #[arg(long = "K", default_value_t = spectra_core::jensen::DEFAULT_NODES)]
    pub nodes: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct WignerArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Law::Gaussian)]
    pub law: Law,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    /// Largest n for which B_M is diagonalized.
    #[arg(long, default_value_t = 32)]
    pub nb_cap: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct GirkoArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.2)]
    pub delta: f64,
    #[arg(long = "K", default_value_t = spectra_core::jensen::DEFAULT_NODES)]
    pub nodes: usize,
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 3)]
    pub max_edges: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct MatchingArgs {
    /// Number of half-edges.
    #[arg(long = "N")]
    pub big_n: usize,
    #[arg(long)]
    pub k: usize,
    /// Rational `a/b` or decimal.
    #[arg(long, default_value = "1")]
    pub beta: String,
    /// Report the whole (N <= given, k, beta in {1, 3/2, 2}) grid instead.
    #[arg(long)]
    pub grid: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct JensenArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Circle radius.
    #[arg(long)]
    pub r: f64,
    #[arg(long = "K", default_value_t = 2048)]
    pub nodes: usize,
    #[arg(long, default_value_t = 0)]
    pub trial: u64,
    #[command(flatten)]
    pub output: Output,
}

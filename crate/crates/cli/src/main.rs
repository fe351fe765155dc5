mod commands;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gstlab::dw::DwError;
use gstlab::experiments::ExperimentError;
use gstlab::graph::GraphError;
use gstlab::gst::GstError;
use gstlab::spectral::{SpectralError, Tolerances};

#[derive(Parser, Debug)]
#[command(name = "gstlab", version, about = "Schur-based spectral bases for directed graphs")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Master seed for graph generation and experiments.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Directory for result files; results go to stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Tolerance bundle, e.g. `cluster=1e-6,rank=1e-8`.
    #[arg(long, global = true, default_value = "cluster=1e-6,rank=1e-8")]
    pub tol: Tolerances,
    /// Start experiments from the full-scale settings instead of the desk ones.
    #[arg(long, global = true)]
    pub full: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate an Erdős–Rényi digraph.
    Gen(commands::GenArgs),
    /// Connectivity, spectral radius and defectiveness of a graph.
    Analyze(commands::GraphArgs),
    /// Build the Schur-based transform of a graph.
    Gst(commands::GstArgs),
    /// Build the diffusion-wavelet basis of a graph.
    Dw(commands::DwArgs),
    /// Design a polynomial filter with one gain per subspace.
    Filter(commands::FilterArgs),
    /// Percentage of defective adjacency matrices over an (N, k/N) grid.
    SurveyDefective(commands::DefectiveArgs),
    /// Defective rates per connectivity class.
    SurveyConnectivity(commands::ConnectivityArgs),
    /// Ranks of eigenvector matrices and transform matrices.
    RankHist(commands::RankArgs),
    /// Cross-subspace inner products of the transform.
    Orthogonality(commands::OrthogonalityArgs),
    /// Subspace-dimension variances of both bases.
    Variance(commands::VarianceArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Gen(_) => "gen",
            Command::Analyze(_) => "analyze",
            Command::Gst(_) => "gst",
            Command::Dw(_) => "dw",
            Command::Filter(_) => "filter",
            Command::SurveyDefective(_) => "survey-defective",
            Command::SurveyConnectivity(_) => "survey-connectivity",
            Command::RankHist(_) => "rank-hist",
            Command::Orthogonality(_) => "orthogonality",
            Command::Variance(_) => "variance",
        }
    }
}

/// Failure categories mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(m) => write!(f, "invalid input: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<SpectralError> for Failure {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::NotSquare { .. } | SpectralError::NonFinite => Failure::Input(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::ZeroSpectralRadius { .. } => Failure::Numerical(e.to_string()),
            GraphError::Spectral(s) => s.into(),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<GstError> for Failure {
    fn from(e: GstError) -> Self {
        match e {
            GstError::InvalidGroupCount { .. }
            | GstError::GainCount { .. }
            | GstError::NonFiniteGain
            | GstError::DimensionMismatch { .. } => Failure::Input(e.to_string()),
            GstError::Spectral(s) => s.into(),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<DwError> for Failure {
    fn from(e: DwError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::InvalidConfig(m) => Failure::Input(m),
            ExperimentError::Graph(g) => g.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let name = cli.command.name();
    let g = &cli.global;
    let result = match &cli.command {
        Command::Gen(a) => commands::gen(g, a),
        Command::Analyze(a) => commands::analyze(g, a),
        Command::Gst(a) => commands::gst(g, a),
        Command::Dw(a) => commands::dw(g, a),
        Command::Filter(a) => commands::filter(g, a),
        Command::SurveyDefective(a) => commands::survey_defective(g, a),
        Command::SurveyConnectivity(a) => commands::survey_connectivity(g, a),
        Command::RankHist(a) => commands::rank_hist(g, a),
        Command::Orthogonality(a) => commands::orthogonality(g, a),
        Command::Variance(a) => commands::variance(g, a),
    };
    eprintln!("{name}: {:.2}s", start.elapsed().as_secs_f64());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

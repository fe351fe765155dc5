use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use gstlab::dw::build_dw;
use gstlab::experiments::{
    connectivity_survey, defective_survey, orthogonality_experiment, rank_histogram, variance_experiment,
    ConnectivityConfig, ConnectivityReport, DefectiveConfig, OrthogonalityConfig, RankConfig, RankReport, ResultTable,
    VarianceConfig,
};
use gstlab::graph::io::{graph_from_adjacency, load_adjacency, write_edge_list, write_matrix_market};
use gstlab::graph::{adjacency, connectivity_class, erdos_renyi, is_dag, normalize, AdjacencyMatrix, Connectivity};
use gstlab::gst::{build_gst, design_gain_filter, GstBasis};
use gstlab::poly::MatrixPolynomial;
use gstlab::serial::{complex_pairs, fmt_f64, to_json};
use gstlab::spectral::{eigenvalues, is_defective, EigenCluster};
use gstlab::{Complex64, ComplexMatrix};

use crate::{Failure, Format, Global};

type Outcome = Result<(), Failure>;

/// Writes every `(file name, contents)` pair into `--out`, or prints the first
/// one when no directory was given.
fn emit(g: &Global, files: Vec<(String, String)>) -> Outcome {
    match &g.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            for (name, body) in files {
                let path = dir.join(&name);
                fs::write(&path, body)?;
                eprintln!("wrote {}", path.display());
            }
        }
        None => {
            if let Some((_, body)) = files.into_iter().next() {
                std::io::stdout().write_all(body.as_bytes())?;
            }
        }
    }
    Ok(())
}

fn one(g: &Global, stem: &str, json: impl FnOnce() -> String, csv: impl FnOnce() -> String) -> Outcome {
    let file = match g.format {
        Format::Json => (format!("{stem}.json"), json()),
        Format::Csv => (format!("{stem}.csv"), csv()),
    };
    emit(g, vec![file])
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long)]
    pub nodes: usize,
    /// Edge probability; overrides `--factor`.
    #[arg(long)]
    pub p: Option<f64>,
    /// Edge probability `k/N`.
    #[arg(long, default_value_t = 6.0)]
    pub factor: f64,
    /// Write Matrix Market instead of an edge list.
    #[arg(long)]
    pub mtx: bool,
}

pub fn gen(g: &Global, a: &GenArgs) -> Outcome {
    let p = a.p.unwrap_or(a.factor / a.nodes.max(1) as f64);
    let graph = erdos_renyi(a.nodes, p, g.seed)?;
    let mut buf = Vec::new();
    let name = if a.mtx {
        write_matrix_market(&adjacency(&graph), &mut buf)?;
        "graph.mtx"
    } else {
        write_edge_list(&graph, &mut buf)?;
        "graph.txt"
    };
    emit(g, vec![(name.to_string(), String::from_utf8(buf).expect("graph writers emit UTF-8"))])
}

#[derive(Args, Debug)]
pub struct GraphArgs {
    /// Edge list (`n <count>` header, `src dst [weight]` lines) or Matrix Market.
    #[arg(long)]
    pub graph: PathBuf,
}

#[derive(Serialize)]
struct Analysis {
    n: usize,
    edges: usize,
    connectivity: Connectivity,
    sinks: Vec<usize>,
    sources: Vec<usize>,
    dag: bool,
    spectral_radius: f64,
    defective: bool,
    clusters: Vec<EigenCluster>,
}

pub fn analyze(g: &Global, a: &GraphArgs) -> Outcome {
    let adj = load(&a.graph)?;
    let graph = graph_from_adjacency(&adj)?;
    let class = connectivity_class(&graph);
    let m = adj.to_complex();
    let report = is_defective(&m, g.tol)?;
    let out = Analysis {
        n: graph.n(),
        edges: graph.edges().len(),
        connectivity: class.class,
        sinks: class.sinks,
        sources: class.sources,
        dag: is_dag(&graph),
        spectral_radius: eigenvalues(&m)?.spectral_radius(),
        defective: report.is_defective,
        clusters: report.clusters,
    };
    one(
        g,
        "analyze",
        || to_json(&out),
        || {
            let list = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
            let mut s = String::from("key,value\n");
            let _ = writeln!(s, "n,{}\nedges,{}\nconnectivity,{:?}", out.n, out.edges, out.connectivity);
            let _ = writeln!(s, "sinks,{}\nsources,{}\ndag,{}", list(&out.sinks), list(&out.sources), out.dag);
            let _ = writeln!(s, "spectral_radius,{}\ndefective,{}", fmt_f64(out.spectral_radius), out.defective);
            s.push_str("cluster_re,cluster_im,algebraic,geometric\n");
            for c in &out.clusters {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    fmt_f64(c.representative[0]),
                    fmt_f64(c.representative[1]),
                    c.algebraic,
                    c.geometric
                );
            }
            s
        },
    )
}

fn load(path: &Path) -> Result<AdjacencyMatrix, Failure> {
    load_adjacency(path).map_err(|e| match Failure::from(e) {
        Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn operator(path: &Path) -> Result<ComplexMatrix, Failure> {
    Ok(normalize(&load(path)?)?.to_complex())
}

fn block_rows(out: &mut String, label: &str, block: &ComplexMatrix) {
    for c in 0..block.ncols() {
        for r in 0..block.nrows() {
            let z = block[(r, c)];
            let _ = writeln!(out, "{label},{c},{r},{},{}", fmt_f64(z.re), fmt_f64(z.im));
        }
    }
}

#[derive(Args, Debug)]
pub struct GstArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Number of spectral groups `M`.
    #[arg(long)]
    pub subspaces: usize,
}

#[derive(Serialize)]
struct Echo<'a, T> {
    graph: String,
    #[serde(flatten)]
    body: &'a T,
}

pub fn gst(g: &Global, a: &GstArgs) -> Outcome {
    let basis = build_gst(&operator(&a.graph)?, a.subspaces)?;
    let graph = a.graph.display().to_string();
    one(
        g,
        "gst",
        || to_json(&Echo { graph: graph.clone(), body: &basis.to_document() }),
        || {
            let mut s = format!("# command=gst graph={graph} subspaces={}\nblock,column,row,re,im\n", a.subspaces);
            for (k, b) in basis.blocks().iter().enumerate() {
                block_rows(&mut s, &(k + 1).to_string(), b);
            }
            s
        },
    )
}

#[derive(Args, Debug)]
pub struct DwArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Maximum number of wavelet levels `M`.
    #[arg(long)]
    pub subspaces: usize,
    /// Precision `ε` of the ε-span compressions.
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
}

pub fn dw(g: &Global, a: &DwArgs) -> Outcome {
    let basis = build_dw(&operator(&a.graph)?, a.subspaces, a.epsilon)?;
    let graph = a.graph.display().to_string();
    one(
        g,
        "dw",
        || to_json(&Echo { graph: graph.clone(), body: &basis.to_document() }),
        || {
            let mut s = format!(
                "# command=dw graph={graph} subspaces={} epsilon={}\nblock,column,row,re,im\n",
                a.subspaces,
                fmt_f64(a.epsilon)
            );
            for (k, b) in basis.levels().iter().enumerate() {
                block_rows(&mut s, &format!("W{}", k + 1), b);
            }
            block_rows(&mut s, "V", basis.terminal());
            s
        },
    )
}

#[derive(Args, Debug)]
pub struct FilterArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub subspaces: usize,
    /// One real gain per group; drawn uniformly from [-1, 1] with `--seed` when omitted.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub gains: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct FilterReport {
    graph: String,
    subspaces: usize,
    seed: u64,
    gains: Vec<[f64; 2]>,
    degree: usize,
    condition_estimate: f64,
    coefficients: Vec<[f64; 2]>,
    /// Per group, `max ‖P(Ã)u − γ u‖ / (1 + |γ|)` over the block columns.
    residuals: Vec<f64>,
}

fn filter_residuals(basis: &GstBasis, p: &impl MatrixPolynomial, gains: &[Complex64]) -> Vec<f64> {
    basis
        .blocks()
        .iter()
        .zip(gains)
        .map(|(b, &gamma)| {
            (0..b.ncols())
                .map(|c| {
                    let u = b.column(c).into_owned();
                    (p.apply(basis.operator(), &u) - u * gamma).norm() / (1.0 + gamma.norm())
                })
                .fold(0.0, f64::max)
        })
        .collect()
}

pub fn filter(g: &Global, a: &FilterArgs) -> Outcome {
    let basis = build_gst(&operator(&a.graph)?, a.subspaces)?;
    let gains: Vec<Complex64> = match &a.gains {
        Some(v) => v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
            (0..a.subspaces).map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), 0.0)).collect()
        }
    };
    let f = design_gain_filter(basis.partition(), &gains)?;
    let out = FilterReport {
        graph: a.graph.display().to_string(),
        subspaces: a.subspaces,
        seed: g.seed,
        gains: complex_pairs(gains.iter().copied()),
        degree: f.degree(),
        condition_estimate: f.condition_estimate(),
        coefficients: complex_pairs(f.to_monomial().coeffs().iter().copied()),
        residuals: filter_residuals(&basis, &f, &gains),
    };
    one(
        g,
        "filter",
        || to_json(&out),
        || {
            let mut s = format!(
                "# command=filter graph={} subspaces={} seed={} degree={} condition_estimate={}\ngroup,gain_re,gain_im,residual\n",
                out.graph,
                out.subspaces,
                out.seed,
                out.degree,
                fmt_f64(out.condition_estimate)
            );
            for (k, (gain, r)) in out.gains.iter().zip(&out.residuals).enumerate() {
                let _ = writeln!(s, "{},{},{},{}", k + 1, fmt_f64(gain[0]), fmt_f64(gain[1]), fmt_f64(*r));
            }
            s
        },
    )
}

fn table(g: &Global, stem: &str, t: &ResultTable) -> Outcome {
    one(g, stem, || t.to_json(), || t.to_csv())
}

#[derive(Args, Debug)]
pub struct DefectiveArgs {
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Edge probabilities `k/N`, one column per factor `k`.
    #[arg(long, value_delimiter = ',')]
    pub factors: Option<Vec<f64>>,
    /// Graphs per cell.
    #[arg(long)]
    pub trials: Option<usize>,
}

pub fn survey_defective(g: &Global, a: &DefectiveArgs) -> Outcome {
    let mut c = if g.full { DefectiveConfig::full() } else { DefectiveConfig::desk() };
    c.seed = g.seed;
    c.tolerances = g.tol;
    if let Some(v) = &a.sizes {
        c.sizes = v.clone();
    }
    if let Some(v) = &a.factors {
        c.factors = v.clone();
    }
    if let Some(v) = a.trials {
        c.trials = v;
    }
    table(g, "survey-defective", &defective_survey(&c)?)
}

#[derive(Args, Debug)]
pub struct ConnectivityArgs {
    #[arg(long)]
    pub graphs: Option<usize>,
    #[arg(long)]
    pub min_nodes: Option<usize>,
    #[arg(long)]
    pub max_nodes: Option<usize>,
    #[arg(long)]
    pub min_p: Option<f64>,
    #[arg(long)]
    pub max_p: Option<f64>,
}

#[derive(Serialize)]
struct ConnectivityOutput<'a> {
    report: &'a ConnectivityReport,
    table: &'a ResultTable,
}

pub fn survey_connectivity(g: &Global, a: &ConnectivityArgs) -> Outcome {
    let mut c = if g.full { ConnectivityConfig::full() } else { ConnectivityConfig::desk() };
    c.seed = g.seed;
    c.tolerances = g.tol;
    c.graphs = a.graphs.unwrap_or(c.graphs);
    c.min_nodes = a.min_nodes.unwrap_or(c.min_nodes);
    c.max_nodes = a.max_nodes.unwrap_or(c.max_nodes);
    c.min_p = a.min_p.unwrap_or(c.min_p);
    c.max_p = a.max_p.unwrap_or(c.max_p);
    let (report, t) = connectivity_survey(&c)?;
    one(
        g,
        "survey-connectivity",
        || to_json(&ConnectivityOutput { report: &report, table: &t }),
        || t.to_csv(),
    )
}

#[derive(Args, Debug)]
pub struct RankArgs {
    #[arg(long)]
    pub graphs: Option<usize>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub subspaces: Option<usize>,
    /// `p` is drawn uniformly from `[low/N, high/N]`.
    #[arg(long)]
    pub low_factor: Option<f64>,
    #[arg(long)]
    pub high_factor: Option<f64>,
}

#[derive(Serialize)]
struct RankOutput<'a> {
    #[serde(flatten)]
    report: &'a RankReport,
    histogram: Vec<(usize, usize, usize)>,
}

pub fn rank_hist(g: &Global, a: &RankArgs) -> Outcome {
    let mut c = if g.full { RankConfig::full() } else { RankConfig::desk() };
    c.seed = g.seed;
    c.tolerances = g.tol;
    c.graphs = a.graphs.unwrap_or(c.graphs);
    c.n = a.nodes.unwrap_or(c.n);
    c.m = a.subspaces.unwrap_or(c.m);
    c.low_factor = a.low_factor.unwrap_or(c.low_factor);
    c.high_factor = a.high_factor.unwrap_or(c.high_factor);
    let r = rank_histogram(&c)?;
    match g.format {
        Format::Json => emit(g, vec![("rank-hist.json".into(), to_json(&RankOutput { report: &r, histogram: r.histogram() }))]),
        Format::Csv => emit(
            g,
            vec![("rank-hist.csv".into(), r.histogram_csv()), ("rank-records.csv".into(), r.records_csv())],
        ),
    }
}

#[derive(Args, Debug)]
pub struct OrthogonalityArgs {
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// `M = N/d` for every divisor `d`.
    #[arg(long, value_delimiter = ',')]
    pub divisors: Option<Vec<usize>>,
    /// Graphs per (N, M) cell.
    #[arg(long)]
    pub graphs: Option<usize>,
    /// Edge probability `k/N`.
    #[arg(long)]
    pub factor: Option<f64>,
    /// Also export every cross pair.
    #[arg(long)]
    pub pairs: bool,
}

pub fn orthogonality(g: &Global, a: &OrthogonalityArgs) -> Outcome {
    let mut c = if g.full { OrthogonalityConfig::full() } else { OrthogonalityConfig::desk() };
    c.seed = g.seed;
    if let Some(v) = &a.sizes {
        c.sizes = v.clone();
    }
    if let Some(v) = &a.divisors {
        c.divisors = v.clone();
    }
    c.graphs = a.graphs.unwrap_or(c.graphs);
    c.factor = a.factor.unwrap_or(c.factor);
    let r = orthogonality_experiment(&c, a.pairs)?;
    match g.format {
        Format::Json => emit(g, vec![("orthogonality.json".into(), to_json(&r))]),
        Format::Csv => {
            let mut files = vec![
                ("orthogonality.csv".into(), r.summary_csv()),
                ("orthogonality-histogram.csv".into(), r.histogram_csv()),
            ];
            if a.pairs {
                files.push(("orthogonality-pairs.csv".into(), r.pairs_csv()));
            }
            emit(g, files)
        }
    }
}

#[derive(Args, Debug)]
pub struct VarianceArgs {
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub divisors: Option<Vec<usize>>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Graphs per size.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub factor: Option<f64>,
}

pub fn variance(g: &Global, a: &VarianceArgs) -> Outcome {
    let mut c = if g.full { VarianceConfig::full() } else { VarianceConfig::desk() };
    c.seed = g.seed;
    if let Some(v) = &a.sizes {
        c.sizes = v.clone();
    }
    if let Some(v) = &a.divisors {
        c.divisors = v.clone();
    }
    c.epsilon = a.epsilon.unwrap_or(c.epsilon);
    c.trials = a.trials.unwrap_or(c.trials);
    c.factor = a.factor.unwrap_or(c.factor);
    let r = variance_experiment(&c)?;
    match g.format {
        Format::Json => emit(g, vec![("variance.json".into(), to_json(&r))]),
        Format::Csv => emit(
            g,
            vec![("variance.csv".into(), r.rows_csv()), ("variance-table.csv".into(), r.table.to_csv())],
        ),
    }
}

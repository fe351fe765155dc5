use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{collect_accepted, derive_seed, tally, ExperimentError, Metadata, ResultTable};
use crate::dw::build_dw;
use crate::graph::{adjacency, erdos_renyi, normalize, GraphError};
use crate::gst::{build_gst, GstBasis, GstError};
use crate::metrics::{cross_orthogonality, dw_variance, gst_variance, inner_product_histogram, HISTOGRAM_BIN};
use crate::serial::fmt_f64;
use crate::spectral::{self, is_defective, numerical_rank, EigenOrder, Tolerances};
use crate::ComplexMatrix;

/// Give up on a cell after this many attempts per wanted graph.
const ATTEMPTS_PER_GRAPH: usize = 20;

/// Short rejection reasons used in the exclusion counts.
fn reason_graph(e: &GraphError) -> String {
    match e {
        GraphError::ZeroSpectralRadius { .. } => "zero_spectral_radius".into(),
        other => format!("graph_error: {other}"),
    }
}

fn reason_gst(e: &GstError) -> String {
    match e {
        GstError::InsufficientGaps { .. } => "partition_infeasible".into(),
        other => format!("gst_error: {other}"),
    }
}

fn normalized(n: usize, p: f64, seed: u64) -> Result<(ComplexMatrix, ComplexMatrix), String> {
    let g = erdos_renyi(n, p, seed).map_err(|e| reason_graph(&e))?;
    let a = adjacency(&g);
    let op = normalize(&a).map_err(|e| reason_graph(&e))?;
    Ok((a.to_complex(), op.to_complex()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankConfig {
    pub graphs: usize,
    pub n: usize,
    pub m: usize,
    /// `p` is drawn uniformly from `[low/N, high/N]`.
    pub low_factor: f64,
    pub high_factor: f64,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl RankConfig {
    pub fn desk() -> Self {
        Self { graphs: 100, n: 100, m: 10, low_factor: 1.0, high_factor: 5.0, seed: 7, tolerances: Tolerances::default() }
    }

    pub fn full() -> Self {
        Self { graphs: 500, ..Self::desk() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRecord {
    pub attempt: usize,
    pub p: f64,
    pub defective: bool,
    pub eigenvector_rank: usize,
    pub gst_rank: usize,
    /// `σ_min/σ_max` of `U_S`.
    pub gst_inverse_condition: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub records: Vec<RankRecord>,
    /// Rejected attempts by reason: DAGs, infeasible partitions, failures.
    pub excluded: BTreeMap<String, usize>,
    pub metadata: Metadata,
}

impl RankReport {
    /// `(rank, eigenvector-matrix count, U_S count)` for every rank that occurs.
    pub fn histogram(&self) -> Vec<(usize, usize, usize)> {
        let mut counts: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        for r in &self.records {
            counts.entry(r.eigenvector_rank).or_default().0 += 1;
            counts.entry(r.gst_rank).or_default().1 += 1;
        }
        counts.into_iter().map(|(rank, (e, s))| (rank, e, s)).collect()
    }

    pub fn records_csv(&self) -> String {
        let mut out = self.metadata.csv_comment();
        out.push_str("\nattempt,p,defective,eigenvector_rank,gst_rank,gst_inverse_condition\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.attempt,
                fmt_f64(r.p),
                r.defective,
                r.eigenvector_rank,
                r.gst_rank,
                fmt_f64(r.gst_inverse_condition)
            );
        }
        out
    }

    pub fn histogram_csv(&self) -> String {
        let mut out = self.metadata.csv_comment();
        out.push_str("\nrank,eigenvector_count,gst_count\n");
        for (rank, e, s) in self.histogram() {
            let _ = writeln!(out, "{rank},{e},{s}");
        }
        out
    }
}

/// Ranks of the eigenvector matrix and of `U_S` over random digraphs with
/// `p ∈ [low/N, high/N]`. Graphs without a GST (nilpotent operators or too
/// few spectral gaps for `M` groups) are replaced and counted.
pub fn rank_histogram(config: &RankConfig) -> Result<RankReport, ExperimentError> {
    if config.graphs == 0 || config.m == 0 || config.m > config.n || config.low_factor > config.high_factor {
        return Err(ExperimentError::InvalidConfig("rank histogram needs graphs ≥ 1 and 1 ≤ M ≤ N".into()));
    }
    let n = config.n;
    let tol = config.tolerances;
    let (records, rejected) = collect_accepted(config.graphs, config.graphs * ATTEMPTS_PER_GRAPH, |attempt| {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 0, attempt as u64));
        let p = rng.gen_range(config.low_factor..=config.high_factor) / n as f64;
        let (a, op) = normalized(n, p, rng.gen())?;
        let basis = build_gst(&op, config.m).map_err(|e| reason_gst(&e))?;
        let report = is_defective(&a, tol).map_err(|e| format!("spectral_error: {e}"))?;
        let f = spectral::schur(&op, EigenOrder::MagnitudeAscending).map_err(|e| format!("spectral_error: {e}"))?;
        let sv = spectral::singular_values(basis.transform());
        Ok(RankRecord {
            attempt,
            p,
            defective: report.is_defective,
            eigenvector_rank: numerical_rank(&f.eigenvector_matrix(), tol.rank),
            gst_rank: numerical_rank(basis.transform(), tol.rank),
            gst_inverse_condition: sv.last().copied().unwrap_or(0.0) / sv[0],
        })
    });
    let mut metadata = Metadata::new("rank-hist", config.seed, config);
    metadata.note("accepted", records.len());
    Ok(RankReport { records, excluded: tally(&rejected), metadata })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityConfig {
    pub sizes: Vec<usize>,
    /// `M = N / d` for every divisor `d`.
    pub divisors: Vec<usize>,
    pub graphs: usize,
    /// Edge probability `k/N`.
    pub factor: f64,
    pub seed: u64,
}

impl OrthogonalityConfig {
    pub fn desk() -> Self {
        Self { sizes: vec![50, 200], divisors: vec![25, 10, 5], graphs: 15, factor: 6.0, seed: 7 }
    }

    pub fn full() -> Self {
        Self { sizes: vec![50, 200, 500], ..Self::desk() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityRow {
    pub n: usize,
    pub m: usize,
    pub attempt: usize,
    pub mu: f64,
    pub max: f64,
    pub pairs: usize,
    /// Fraction of cross pairs with `|b_ij| > 0.2`.
    pub above_02: f64,
    /// `||λ_i| − |λ_j||` of the pair attaining the maximum.
    pub max_pair_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityReport {
    pub rows: Vec<OrthogonalityRow>,
    /// `(N, M)` with the `|b_ij|` counts over all graphs of the cell.
    pub histograms: Vec<(usize, usize, Vec<usize>)>,
    /// Pair records `(N, M, attempt, i, j, |b_ij|, distance)`, kept only
    /// when requested.
    pub pairs: Vec<(usize, usize, usize, usize, usize, f64, Option<f64>)>,
    pub excluded: BTreeMap<String, usize>,
    pub metadata: Metadata,
}

impl OrthogonalityReport {
    /// Mean `μ` over the graphs of one `(N, M)` cell.
    pub fn mean_mu(&self, n: usize, m: usize) -> Option<f64> {
        let mus: Vec<f64> = self.rows.iter().filter(|r| r.n == n && r.m == m).map(|r| r.mu).collect();
        (!mus.is_empty()).then(|| mus.iter().sum::<f64>() / mus.len() as f64)
    }

    /// Share of all cross pairs in one cell with `|b_ij|` above `0.2`.
    pub fn pooled_fraction_above_02(&self, n: usize, m: usize) -> Option<f64> {
        let rows: Vec<&OrthogonalityRow> = self.rows.iter().filter(|r| r.n == n && r.m == m).collect();
        let total: usize = rows.iter().map(|r| r.pairs).sum();
        (total > 0).then(|| rows.iter().map(|r| r.above_02 * r.pairs as f64).sum::<f64>() / total as f64)
    }

    pub fn summary_csv(&self) -> String {
        let mut out = self.metadata.csv_comment();
        out.push_str("\nN,M,attempt,mu,m,n,frac_above_0.2,max_pair_distance\n");
        for r in &self.rows {
            let d = r.max_pair_distance.map(fmt_f64).unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{},{},{},{},{}", r.n, r.m, r.attempt, fmt_f64(r.mu), fmt_f64(r.max), r.pairs, fmt_f64(r.above_02), d);
        }
        out
    }

    pub fn histogram_csv(&self) -> String {
        let mut out = self.metadata.csv_comment();
        out.push_str("\nN,M,bin_low,bin_high,count\n");
        for (n, m, counts) in &self.histograms {
            for (b, c) in counts.iter().enumerate() {
                let lo = b as f64 * HISTOGRAM_BIN;
                let _ = writeln!(out, "{n},{m},{},{},{c}", fmt_f64(lo), fmt_f64(lo + HISTOGRAM_BIN));
            }
        }
        out
    }

    pub fn pairs_csv(&self) -> String {
        let mut out = self.metadata.csv_comment();
        out.push_str("\nN,M,attempt,i,j,abs_inner,eig_distance\n");
        for (n, m, t, i, j, b, d) in &self.pairs {
            let _ = writeln!(out, "{n},{m},{t},{i},{j},{},{}", fmt_f64(*b), d.map(fmt_f64).unwrap_or_default());
        }
        out
    }
}

fn gst_for(n: usize, p: f64, seed: u64, m: usize) -> Result<GstBasis, String> {
    let (_, op) = normalized(n, p, seed)?;
    build_gst(&op, m).map_err(|e| reason_gst(&e))
}

/// Cross-block inner products of the GST for every `(N, M = N/d)` cell.
pub fn orthogonality_experiment(config: &OrthogonalityConfig, keep_pairs: bool) -> Result<OrthogonalityReport, ExperimentError> {
    if config.graphs == 0 || config.divisors.iter().any(|&d| d == 0) {
        return Err(ExperimentError::InvalidConfig("graphs and divisors must be positive".into()));
    }
    let mut rows = Vec::new();
    let mut histograms = Vec::new();
    let mut pairs = Vec::new();
    let mut rejected = Vec::new();
    for (si, &n) in config.sizes.iter().enumerate() {
        let p = config.factor / n as f64;
        for &d in &config.divisors {
            let m = (n / d).max(1);
            let (stats, rej) = collect_accepted(config.graphs, config.graphs * ATTEMPTS_PER_GRAPH, |attempt| {
                let basis = gst_for(n, p, derive_seed(config.seed, si as u64, attempt as u64), m)?;
                Ok((attempt, cross_orthogonality(&basis)))
            });
            rejected.extend(rej);
            let mut counts = vec![0usize; (1.0 / HISTOGRAM_BIN).round() as usize];
            for (attempt, s) in stats {
                for (c, h) in counts.iter_mut().zip(inner_product_histogram(&s)) {
                    *c += h;
                }
                rows.push(OrthogonalityRow {
                    n,
                    m,
                    attempt,
                    mu: s.mu,
                    max: s.m,
                    pairs: s.n,
                    above_02: s.fraction_above(0.2),
                    max_pair_distance: s.max_pair.and_then(|p| p.eig_distance),
                });
                if keep_pairs {
                    pairs.extend(s.pairs.iter().map(|r| (n, m, attempt, r.i, r.j, r.abs_inner, r.eig_distance)));
                }
            }
            histograms.push((n, m, counts));
        }
    }
    let metadata = Metadata::new("orthogonality", config.seed, config);
    Ok(OrthogonalityReport { rows, histograms, pairs, excluded: tally(&rejected), metadata })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceConfig {
    pub sizes: Vec<usize>,
    pub divisors: Vec<usize>,
    pub epsilon: f64,
    pub trials: usize,
    pub factor: f64,
    pub seed: u64,
}

impl VarianceConfig {
    pub fn desk() -> Self {
        Self { sizes: vec![100, 150, 200], divisors: vec![25, 10, 5], epsilon: 1e-3, trials: 50, factor: 6.0, seed: 7 }
    }

    pub fn full() -> Self {
        Self { sizes: vec![100, 150, 200, 250], trials: 100, ..Self::desk() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceRow {
    pub n: usize,
    pub method: String,
    pub m_requested: usize,
    /// Mean number of subspaces built (GST: always `M`; DW: levels plus the
    /// terminal block).
    pub subspaces_mean: f64,
    /// Mean of the defined per-graph variances, `None` for a DW cell whose
    /// mean subspace count falls short of `M` or whose variances are all
    /// undefined.
    pub variance: Option<f64>,
    pub graphs: usize,
    /// Graphs with a single subspace, whose variance is undefined.
    pub undefined: usize,
    /// Graphs where every requested subspace was built.
    pub reached_m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    pub rows: Vec<VarianceRow>,
    pub table: ResultTable,
    pub excluded: BTreeMap<String, usize>,
}

impl VarianceReport {
    pub fn row(&self, n: usize, method: &str, m: usize) -> Option<&VarianceRow> {
        self.rows.iter().find(|r| r.n == n && r.method == method && r.m_requested == m)
    }

    /// `N,method,M_requested,L_achieved,variance` plus counts.
    pub fn rows_csv(&self) -> String {
        let mut out = self.table.metadata.csv_comment();
        out.push_str("\nN,method,M_requested,L_achieved,variance,graphs,undefined,reached_M\n");
        for r in &self.rows {
            let v = r.variance.map(fmt_f64).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "{},{},{},{},{v},{},{},{}",
                r.n,
                r.method,
                r.m_requested,
                fmt_f64(r.subspaces_mean),
                r.graphs,
                r.undefined,
                r.reached_m
            );
        }
        out
    }
}

fn variance_row(n: usize, method: &str, m: usize, results: &[(usize, Option<f64>)]) -> VarianceRow {
    let graphs = results.len();
    let defined: Vec<f64> = results.iter().filter_map(|r| r.1).collect();
    let subspaces_mean = results.iter().map(|r| r.0 as f64).sum::<f64>() / graphs.max(1) as f64;
    let mean = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
    let comparable = method == "GST" || subspaces_mean >= m as f64;
    VarianceRow {
        n,
        method: method.into(),
        m_requested: m,
        subspaces_mean,
        variance: mean.filter(|_| comparable),
        graphs,
        undefined: graphs - defined.len(),
        reached_m: results.iter().filter(|r| r.0 >= m).count(),
    }
}

/// GST and DW subspace-size variances on the same graphs for every
/// `(N, M = N/d)` cell. DW is asked for `M` levels, so it can build at most
/// `M + 1` subspaces.
pub fn variance_experiment(config: &VarianceConfig) -> Result<VarianceReport, ExperimentError> {
    if config.trials == 0 || config.divisors.iter().any(|&d| d == 0) || !(config.epsilon > 0.0 && config.epsilon < 1.0) {
        return Err(ExperimentError::InvalidConfig("trials ≥ 1, divisors ≥ 1 and ε ∈ (0, 1) are required".into()));
    }
    let mut rows = Vec::new();
    let mut rejected = Vec::new();
    let mut row_labels = Vec::new();
    let mut cells = Vec::new();
    for (si, &n) in config.sizes.iter().enumerate() {
        let p = config.factor / n as f64;
        let mut gst_cells = Vec::new();
        let mut dw_cells = Vec::new();
        for &d in &config.divisors {
            let m = (n / d).max(1);
            let (results, rej) = collect_accepted(config.trials, config.trials * ATTEMPTS_PER_GRAPH, |attempt| {
                let (_, op) = normalized(n, p, derive_seed(config.seed, si as u64, attempt as u64))?;
                let gst = build_gst(&op, m).map_err(|e| reason_gst(&e))?;
                let dw = build_dw(&op, m, config.epsilon).map_err(|e| format!("dw_error: {e}"))?;
                let g = gst_variance(&gst);
                let w = dw_variance(&dw);
                Ok(((g.sizes.len(), g.variance), (w.sizes.len(), w.variance)))
            });
            rejected.extend(rej);
            let gst: Vec<(usize, Option<f64>)> = results.iter().map(|r| r.0).collect();
            let dw: Vec<(usize, Option<f64>)> = results.iter().map(|r| r.1).collect();
            let g = variance_row(n, "GST", m, &gst);
            let w = variance_row(n, "DW", m, &dw);
            gst_cells.push(g.variance);
            dw_cells.push(w.variance);
            rows.push(w);
            rows.push(g);
        }
        row_labels.push(format!("N={n} DW"));
        cells.push(dw_cells);
        row_labels.push(format!("N={n} GST"));
        cells.push(gst_cells);
    }
    let mut metadata = Metadata::new("variance", config.seed, config);
    let excluded = tally(&rejected);
    metadata.note("excluded", &excluded);
    let table = ResultTable {
        row_labels,
        column_labels: config.divisors.iter().map(|d| format!("N/{d}")).collect(),
        cells,
        metadata,
    };
    Ok(VarianceReport { rows, table, excluded })
}

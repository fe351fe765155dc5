use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{derive_seed, ExperimentError, factor_label, run_trials, Metadata, ResultTable};
use crate::graph::{adjacency, connectivity_class, erdos_renyi, Connectivity, DiGraph, GraphError};
use crate::spectral::{is_defective, Tolerances};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectiveConfig {
    pub sizes: Vec<usize>,
    /// Edge probability is `k/N` for each factor `k`.
    pub factors: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl DefectiveConfig {
    pub fn desk() -> Self {
        Self { sizes: vec![100, 200], factors: vec![2.0, 4.0, 6.0, 8.0, 10.0], trials: 200, seed: 7, tolerances: Tolerances::default() }
    }

    pub fn full() -> Self {
        Self { sizes: vec![100, 200, 300, 400], trials: 1000, ..Self::desk() }
    }
}

/// Percentage of defective adjacency matrices per `(N, k/N)` cell.
pub fn defective_survey(config: &DefectiveConfig) -> Result<ResultTable, ExperimentError> {
    if config.trials == 0 {
        return Err(ExperimentError::InvalidConfig("trials must be at least 1".into()));
    }
    let cols = config.factors.len();
    let mut cells = Vec::with_capacity(config.sizes.len());
    let mut failures = 0usize;
    for (r, &n) in config.sizes.iter().enumerate() {
        let mut row = Vec::with_capacity(cols);
        for (c, &k) in config.factors.iter().enumerate() {
            let cell = (r * cols + c) as u64;
            let p = k / n as f64;
            let outcomes = run_trials(config.trials, |t| -> Result<Option<bool>, GraphError> {
                let g = erdos_renyi(n, p, derive_seed(config.seed, cell, t as u64))?;
                Ok(is_defective(&adjacency(&g).to_complex(), config.tolerances).ok().map(|rep| rep.is_defective))
            });
            let mut defective = 0usize;
            let mut counted = 0usize;
            for o in outcomes {
                match o? {
                    Some(d) => {
                        counted += 1;
                        defective += d as usize;
                    }
                    None => failures += 1,
                }
            }
            row.push((counted > 0).then(|| 100.0 * defective as f64 / counted as f64));
        }
        cells.push(row);
    }
    let mut metadata = Metadata::new("survey-defective", config.seed, config);
    metadata.note("spectral_failures", failures);
    Ok(ResultTable {
        row_labels: config.sizes.iter().map(|n| format!("N={n}")).collect(),
        column_labels: config.factors.iter().map(|&k| factor_label(k)).collect(),
        cells,
        metadata,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityConfig {
    pub graphs: usize,
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub min_p: f64,
    pub max_p: f64,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl ConnectivityConfig {
    pub fn desk() -> Self {
        Self { graphs: 300, min_nodes: 10, max_nodes: 200, min_p: 0.001, max_p: 0.2, seed: 7, tolerances: Tolerances::default() }
    }

    pub fn full() -> Self {
        Self { graphs: 1000, max_nodes: 550, ..Self::desk() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityReport {
    pub scg: usize,
    pub scg_defective: usize,
    pub wcg: usize,
    pub wcg_defective: usize,
    pub disconnected: usize,
    pub disconnected_defective: usize,
}

fn pct(part: usize, whole: usize) -> Option<f64> {
    (whole > 0).then(|| 100.0 * part as f64 / whole as f64)
}

impl ConnectivityReport {
    pub fn scg_pct(&self) -> Option<f64> {
        pct(self.scg_defective, self.scg)
    }

    pub fn wcg_pct(&self) -> Option<f64> {
        pct(self.wcg_defective, self.wcg)
    }

    pub fn disconnected_pct(&self) -> Option<f64> {
        pct(self.disconnected_defective, self.disconnected)
    }

    fn add(&mut self, class: Connectivity, defective: bool) {
        let (total, bad) = match class {
            Connectivity::StronglyConnected => (&mut self.scg, &mut self.scg_defective),
            Connectivity::WeaklyConnected => (&mut self.wcg, &mut self.wcg_defective),
            Connectivity::Disconnected => (&mut self.disconnected, &mut self.disconnected_defective),
        };
        *total += 1;
        *bad += defective as usize;
    }

    pub fn to_table(&self, metadata: Metadata) -> ResultTable {
        let row = |n: usize, d: usize| vec![Some(n as f64), Some(d as f64), pct(d, n)];
        ResultTable {
            row_labels: vec!["SCG".into(), "WCG".into(), "disconnected".into()],
            column_labels: vec!["graphs".into(), "defective".into(), "defective_pct".into()],
            cells: vec![
                row(self.scg, self.scg_defective),
                row(self.wcg, self.wcg_defective),
                row(self.disconnected, self.disconnected_defective),
            ],
            metadata,
        }
    }
}

/// Splits a corpus into SCG / WCG / disconnected graphs and counts the
/// defective ones in each class. Graphs whose spectrum fails to converge are
/// left out.
pub fn classify_corpus(graphs: &[DiGraph], tol: Tolerances) -> ConnectivityReport {
    let classified = run_trials(graphs.len(), |i| {
        let g = &graphs[i];
        is_defective(&adjacency(g).to_complex(), tol).ok().map(|r| (connectivity_class(g).class, r.is_defective))
    });
    let mut report = ConnectivityReport::default();
    for (class, defective) in classified.into_iter().flatten() {
        report.add(class, defective);
    }
    report
}

/// Random sizes in `[min_nodes, max_nodes]` and probabilities in
/// `[min_p, max_p]`, one generator per graph.
pub fn connectivity_survey(config: &ConnectivityConfig) -> Result<(ConnectivityReport, ResultTable), ExperimentError> {
    if config.graphs == 0 || config.min_nodes == 0 || config.min_nodes > config.max_nodes || !(config.min_p <= config.max_p) {
        return Err(ExperimentError::InvalidConfig("empty size or probability range".into()));
    }
    let graphs = run_trials(config.graphs, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 0, t as u64));
        let n = rng.gen_range(config.min_nodes..=config.max_nodes);
        let p = rng.gen_range(config.min_p..=config.max_p);
        erdos_renyi(n, p, rng.gen())
    })
    .into_iter()
    .collect::<Result<Vec<_>, GraphError>>()?;
    let report = classify_corpus(&graphs, config.tolerances);
    let mut metadata = Metadata::new("survey-connectivity", config.seed, config);
    metadata.note("wcg_defective_pct", report.wcg_pct());
    metadata.note("scg_defective_pct", report.scg_pct());
    let table = report.to_table(metadata);
    Ok((report, table))
}

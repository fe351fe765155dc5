//! Seeded experiment drivers.
//!
//! Every trial gets its own seed derived from `(master, cell, trial)`, trials
//! run on a rayon pool and results are gathered in trial order, so outputs do
//! not depend on the number of threads.

mod bases;
mod surveys;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::graph::GraphError;
use crate::serial::{fmt_f64, to_json};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub use bases::{
    orthogonality_experiment, rank_histogram, variance_experiment, OrthogonalityConfig, OrthogonalityReport,
    OrthogonalityRow, RankConfig, RankRecord, RankReport, VarianceConfig, VarianceReport, VarianceRow,
};
pub use surveys::{
    classify_corpus, connectivity_survey, defective_survey, ConnectivityConfig, ConnectivityReport, DefectiveConfig,
};

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial` in cell `cell`.
pub fn derive_seed(master: u64, cell: u64, trial: u64) -> u64 {
    mix(mix(mix(master) ^ cell) ^ trial)
}

/// Worker count: `GSTLAB_THREADS` when set to a positive integer, otherwise
/// the number of logical cores.
pub fn thread_count() -> usize {
    std::env::var("GSTLAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// `f(0), …, f(n−1)` evaluated in parallel, returned in index order.
pub fn run_trials<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new().num_threads(thread_count()).build().expect("thread pool");
    pool.install(|| (0..n).into_par_iter().map(&f).collect())
}

/// Runs attempts `0, 1, 2, …` in parallel batches and keeps the first `wanted`
/// accepted results in attempt order, together with every rejection reason.
/// Gives up after `max_attempts`.
pub fn collect_accepted<T, F>(wanted: usize, max_attempts: usize, f: F) -> (Vec<T>, Vec<String>)
where
    T: Send,
    F: Fn(usize) -> Result<T, String> + Sync + Send,
{
    let mut accepted = Vec::with_capacity(wanted);
    let mut rejected = Vec::new();
    let mut next = 0;
    while accepted.len() < wanted && next < max_attempts {
        let batch = (wanted - accepted.len()).max(8).min(max_attempts - next);
        let start = next;
        for r in run_trials(batch, |i| f(start + i)) {
            if accepted.len() == wanted {
                break;
            }
            match r {
                Ok(v) => accepted.push(v),
                Err(reason) => rejected.push(reason),
            }
        }
        next += batch;
    }
    (accepted, rejected)
}

/// Counts per rejection reason.
pub fn tally(reasons: &[String]) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for r in reasons {
        *out.entry(r.clone()).or_insert(0) += 1;
    }
    out
}

/// Hex SHA-256 prefix of the experiment name and its canonical config.
pub fn run_id(experiment: &str, config: &Value) -> String {
    let mut h = Sha256::new();
    h.update(experiment.as_bytes());
    h.update([0]);
    h.update(to_json(config).as_bytes());
    h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub experiment: String,
    pub run_id: String,
    pub seed: u64,
    pub config: Value,
    /// Extra counts and derived figures, keyed by name.
    pub notes: BTreeMap<String, Value>,
}

impl Metadata {
    pub fn new<C: Serialize>(experiment: &str, seed: u64, config: &C) -> Self {
        let config = serde_json::to_value(config).expect("config serializes");
        Self { experiment: experiment.to_string(), run_id: run_id(experiment, &config), seed, config, notes: BTreeMap::new() }
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) {
        self.notes.insert(key.to_string(), serde_json::to_value(value).expect("note serializes"));
    }

    /// `# experiment=… run_id=… seed=… config=…`, the first line of every CSV.
    pub fn csv_comment(&self) -> String {
        format!(
            "# experiment={} run_id={} seed={} config={}",
            self.experiment,
            self.run_id,
            self.seed,
            to_json(&self.config).trim_end()
        )
    }
}

/// Labelled grid of numbers; `None` marks an undefined cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub row_labels: Vec<String>,
    pub column_labels: Vec<String>,
    pub cells: Vec<Vec<Option<f64>>>,
    pub metadata: Metadata,
}

impl ResultTable {
    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        self.cells[row][col]
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.metadata.csv_comment();
        out.push('\n');
        out.push_str("row");
        for c in &self.column_labels {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (label, row) in self.row_labels.iter().zip(&self.cells) {
            out.push_str(label);
            for v in row {
                let _ = write!(out, ",{}", v.map(fmt_f64).unwrap_or_else(|| "-".to_string()));
            }
            out.push('\n');
        }
        out
    }
}

/// `k/N` with trailing zeros dropped, used as a column label.
pub fn factor_label(k: f64) -> String {
    format!("{k}/N")
}

#[cfg(test)]
mod tests;

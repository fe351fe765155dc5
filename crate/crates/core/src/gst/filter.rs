use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{GstError, SpectralPartition};
use crate::spectral::cluster_eigenvalues;
use crate::poly::{FactoredPolynomial, MatrixPolynomial, NewtonPolynomial, Polynomial};
use crate::{ComplexMatrix, ComplexVector};

/// Interpolation estimates beyond this are rejected. Measured evaluation
/// errors stay below the estimate times `2e-16`.
pub const MAX_FILTER_CONDITION: f64 = 1e9;

/// `∏ (x − λ)` over one group's eigenvalues, multiplicity included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnihilatorPolynomial {
    factored: FactoredPolynomial,
    expanded: Polynomial,
}

impl AnnihilatorPolynomial {
    pub fn new(roots: &[Complex64]) -> Self {
        let factored = FactoredPolynomial::new(roots.to_vec());
        let expanded = factored.expand();
        Self { factored, expanded }
    }

    pub fn roots(&self) -> &[Complex64] {
        self.factored.roots()
    }

    pub fn degree(&self) -> usize {
        self.factored.degree()
    }

    pub fn factored(&self) -> &FactoredPolynomial {
        &self.factored
    }

    /// Monomial coefficients. Only trustworthy for small degrees.
    pub fn expanded(&self) -> &Polynomial {
        &self.expanded
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.factored.eval(x)
    }

    /// `∏ (1 + |λ|)`, the scale used when judging `‖P_k(Ã)u‖`.
    pub fn scale(&self) -> f64 {
        self.roots().iter().map(|z| 1.0 + z.norm()).product()
    }
}

impl MatrixPolynomial for AnnihilatorPolynomial {
    fn apply(&self, a: &ComplexMatrix, x: &ComplexVector) -> ComplexVector {
        self.factored.apply(a, x)
    }
}

/// Annihilator of group `k` of the partition.
pub fn annihilator(partition: &SpectralPartition, k: usize) -> AnnihilatorPolynomial {
    AnnihilatorPolynomial::new(partition.group(k))
}

/// Polynomial that acts as the constant `γ_k` on every group subspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainFilter {
    gains: Vec<Complex64>,
    newton: NewtonPolynomial,
    condition_estimate: f64,
}

impl GainFilter {
    pub fn gains(&self) -> &[Complex64] {
        &self.gains
    }

    pub fn newton(&self) -> &NewtonPolynomial {
        &self.newton
    }

    pub fn degree(&self) -> usize {
        self.newton.coeffs().iter().rposition(|c| *c != Complex64::new(0.0, 0.0)).unwrap_or(0)
    }

    pub fn to_monomial(&self) -> Polynomial {
        self.newton.to_monomial()
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.newton.eval(x)
    }

    /// Upper bound on `Σ_j |c_j| ∏_{i<j} (r + |z_i|)` relative to the gains,
    /// with `r` the largest node magnitude: how much the Newton terms can
    /// amplify rounding on the spectrum.
    pub fn condition_estimate(&self) -> f64 {
        self.condition_estimate
    }
}

impl MatrixPolynomial for GainFilter {
    fn apply(&self, a: &ComplexMatrix, x: &ComplexVector) -> ComplexVector {
        self.newton.apply(a, x)
    }
}

/// Eigenvalues closer than this (the operator is normalized) are treated as
/// one repeated node.
const NODE_CLUSTER_TOL: f64 = 1e-4;

/// Interpolation nodes: each group is split into clusters of nearly equal
/// eigenvalues, and the clusters are visited in Leja order (each next cluster
/// maximizes the product of distances to those already taken, starting from
/// the largest magnitude). Members of a cluster stay consecutive. Returns the
/// nodes, the group of every node and the cluster run of every node.
fn ordered_nodes(partition: &SpectralPartition) -> (Vec<Complex64>, Vec<usize>, Vec<usize>) {
    let mut clusters: Vec<(Complex64, usize, Vec<Complex64>)> = Vec::new();
    for k in 0..partition.group_count() {
        let values = partition.group(k);
        for members in cluster_eigenvalues(values, NODE_CLUSTER_TOL, 1.0) {
            let pts: Vec<Complex64> = members.iter().map(|&i| values[i]).collect();
            let centre = pts.iter().sum::<Complex64>() / pts.len() as f64;
            clusters.push((centre, k, pts));
        }
    }

    let mut remaining: Vec<usize> = (0..clusters.len()).collect();
    let mut log_dist = vec![0.0f64; clusters.len()];
    let mut order = Vec::with_capacity(clusters.len());
    while !remaining.is_empty() {
        let pick = if order.is_empty() {
            let key = |&i: &usize| clusters[i].0.norm();
            (0..remaining.len()).max_by(|&a, &b| key(&remaining[a]).total_cmp(&key(&remaining[b])).then(b.cmp(&a)))
        } else {
            (0..remaining.len()).max_by(|&a, &b| log_dist[remaining[a]].total_cmp(&log_dist[remaining[b]]).then(b.cmp(&a)))
        }
        .expect("remaining is non-empty");
        let chosen = remaining.remove(pick);
        let (centre, _, ref pts) = clusters[chosen];
        for &i in &remaining {
            log_dist[i] += pts.len() as f64 * (clusters[i].0 - centre).norm().ln();
        }
        order.push(chosen);
    }

    let mut nodes = Vec::new();
    let mut groups = Vec::new();
    let mut runs = Vec::new();
    for (run, &c) in order.iter().enumerate() {
        let (_, k, ref pts) = clusters[c];
        for &z in pts {
            nodes.push(z);
            groups.push(k);
            runs.push(run);
        }
    }
    (nodes, groups, runs)
}

/// Hermite interpolant with `P = γ_k` on group `k`.
///
/// Repeated (or numerically split) eigenvalues sit in one consecutive run of
/// nodes. A divided difference that stays inside a run sees constant data, so
/// it is set to exactly zero; this imposes the derivative conditions at
/// repeated eigenvalues and keeps the tiny spread of split multiple
/// eigenvalues out of every denominator.
pub fn design_gain_filter(partition: &SpectralPartition, gains: &[Complex64]) -> Result<GainFilter, GstError> {
    let m = partition.group_count();
    if gains.len() != m {
        return Err(GstError::GainCount { expected: m, found: gains.len() });
    }
    if gains.iter().any(|g| !g.re.is_finite() || !g.im.is_finite()) {
        return Err(GstError::NonFiniteGain);
    }
    let (nodes, groups, runs) = ordered_nodes(partition);
    let n = nodes.len();

    let mut table: Vec<Complex64> = groups.iter().map(|&k| gains[k]).collect();
    let mut coeffs = vec![table[0]];
    for order in 1..n {
        for i in 0..n - order {
            let j = i + order;
            table[i] = if runs[i] == runs[j] {
                Complex64::new(0.0, 0.0)
            } else {
                (table[i + 1] - table[i]) / (nodes[j] - nodes[i])
            };
        }
        coeffs.push(table[0]);
    }

    let radius = nodes.iter().fold(0.0f64, |r, z| r.max(z.norm()));
    let gain_scale = gains.iter().fold(1.0f64, |r, g| r.max(g.norm()));
    let mut weight = 1.0;
    let mut amplification = 0.0;
    for (c, z) in coeffs.iter().zip(&nodes) {
        amplification += c.norm() * weight;
        weight *= radius + z.norm();
    }
    let condition_estimate = amplification / gain_scale;
    if !condition_estimate.is_finite() || condition_estimate > MAX_FILTER_CONDITION {
        return Err(GstError::IllConditionedFilter { estimate: condition_estimate });
    }
    Ok(GainFilter { gains: gains.to_vec(), newton: NewtonPolynomial::new(nodes, coeffs), condition_estimate })
}

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{eigenvalues, numerical_rank, SpectralError, Tolerances};
use crate::ComplexMatrix;

/// One group of numerically coincident eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenCluster {
    /// Mean of the member eigenvalues.
    pub representative: [f64; 2],
    pub algebraic: usize,
    pub geometric: usize,
}

impl EigenCluster {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.representative[0], self.representative[1])
    }

    pub fn is_defective(&self) -> bool {
        self.geometric < self.algebraic
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectivenessReport {
    pub clusters: Vec<EigenCluster>,
    pub is_defective: bool,
}

impl DefectivenessReport {
    /// Sum of algebraic multiplicities.
    pub fn dimension(&self) -> usize {
        self.clusters.iter().map(|c| c.algebraic).sum()
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Single-linkage clusters of `values`; two values are linked when their
/// distance is at most `tol · scale`. Clusters come back in order of their
/// first member.
pub(crate) fn cluster_eigenvalues(values: &[Complex64], tol: f64, scale: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let thresh = tol * scale;
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= thresh {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

/// Relative radius within which separate clusters may still be one Jordan
/// block: a block of size `k` comes out of QR as a ring of radius about
/// `(ε‖A‖)^{1/k}`, well beyond the strict cluster tolerance.
const JORDAN_RADIUS: f64 = 1e-3;

/// Relative singular value below which a merged mean counts as an eigenvalue.
/// The mean of a split Jordan ring is exact to rounding, while a badly
/// conditioned simple eigenvalue near another one can sit near 1e-8.
const JORDAN_MERGE_RANK: f64 = 1e-12;

fn geometric_multiplicity(a: &ComplexMatrix, at: Complex64, rank_tol: f64) -> usize {
    let mut shifted = a.clone();
    for i in 0..a.nrows() {
        shifted[(i, i)] -= at;
    }
    a.nrows() - numerical_rank(&shifted, rank_tol)
}

fn mean(values: &[Complex64], members: &[usize]) -> Complex64 {
    members.iter().map(|&i| values[i]).sum::<Complex64>() / members.len() as f64
}

/// Algebraic and geometric multiplicities of every eigenvalue cluster.
///
/// Eigenvalues are linked when they lie within `tol.cluster` of each other,
/// measured relative to `max(1, ρ(A))`. For a cluster with mean `λ̄` the
/// geometric multiplicity is `n − rank(A − λ̄I)`, clamped to
/// `1..=algebraic`; simple eigenvalues skip the rank computation.
///
/// Clusters that sit within [`JORDAN_RADIUS`] of each other are merged when
/// their common mean is itself numerically an eigenvalue, which is what a
/// split Jordan block looks like; distinct close eigenvalues fail that test.
pub fn is_defective(a: &ComplexMatrix, tol: Tolerances) -> Result<DefectivenessReport, SpectralError> {
    let spectrum = eigenvalues(a)?;
    let values = spectrum.values();
    let scale = spectrum.spectral_radius().max(1.0);
    let strict = cluster_eigenvalues(values, tol.cluster, scale);
    let mut strict_of = vec![0; values.len()];
    for (c, members) in strict.iter().enumerate() {
        for &i in members {
            strict_of[i] = c;
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for wide in cluster_eigenvalues(values, JORDAN_RADIUS.max(tol.cluster), scale) {
        let mut parts: Vec<usize> = wide.iter().map(|&i| strict_of[i]).collect();
        parts.sort_unstable();
        parts.dedup();
        if parts.len() > 1 && geometric_multiplicity(a, mean(values, &wide), JORDAN_MERGE_RANK.min(tol.rank)) > 0 {
            groups.push(wide);
        } else {
            groups.extend(parts.into_iter().map(|c| strict[c].clone()));
        }
    }
    let mut clusters = Vec::with_capacity(groups.len());
    for members in groups {
        let algebraic = members.len();
        let mean = mean(values, &members);
        let geometric =
            if algebraic == 1 { 1 } else { geometric_multiplicity(a, mean, tol.rank).clamp(1, algebraic) };
        clusters.push(EigenCluster { representative: [mean.re, mean.im], algebraic, geometric });
    }
    let is_defective = clusters.iter().any(EigenCluster::is_defective);
    Ok(DefectivenessReport { clusters, is_defective })
}

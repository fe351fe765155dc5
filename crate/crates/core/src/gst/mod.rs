//! Graph Schur Transform.
//!
//! The normalized operator's eigenvalues are split at the largest magnitude
//! gaps. For every group the ascending Schur factorization is reordered so
//! that the group comes first; the leading columns of that reordering are an
//! orthonormal basis of the group's invariant subspace. Stacking the blocks
//! gives `U_S`, which is invertible but not unitary.

mod filter;
mod partition;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::serial::complex_pairs;
use crate::spectral::{self, EigenOrder, SpectralError, Spectrum};
use crate::{ComplexMatrix, ComplexVector};

pub use filter::{annihilator, design_gain_filter, AnnihilatorPolynomial, GainFilter, MAX_FILTER_CONDITION};
pub use partition::{partition_eigenvalues, partition_eigenvalues_with_min_gap, SpectralPartition, DEFAULT_MIN_GAP};

/// `U_S` with a larger condition estimate is treated as singular.
pub const MAX_TRANSFORM_CONDITION: f64 = 1e12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GstError {
    #[error("cannot form {m} groups from {n} eigenvalues")]
    InvalidGroupCount { m: usize, n: usize },
    #[error("{needed} positive magnitude gaps needed but only {available} exist")]
    InsufficientGaps { needed: usize, available: usize },
    #[error("operator is not normalized: spectral radius {radius}")]
    NotNormalized { radius: f64 },
    #[error("expected {expected} gains, found {found}")]
    GainCount { expected: usize, found: usize },
    #[error("gains must be finite")]
    NonFiniteGain,
    #[error("gain interpolation is ill-conditioned (estimate {estimate:e})")]
    IllConditionedFilter { estimate: f64 },
    #[error("transform matrix is singular or ill-conditioned (estimate {estimate:e})")]
    IllConditionedTransform { estimate: f64 },
    #[error("signal has length {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Blocked basis built from reordered Schur factorizations.
#[derive(Debug, Clone)]
pub struct GstBasis {
    operator: ComplexMatrix,
    partition: SpectralPartition,
    blocks: Vec<ComplexMatrix>,
    annihilators: Vec<AnnihilatorPolynomial>,
    transform: ComplexMatrix,
    condition_estimate: f64,
}

impl GstBasis {
    pub fn n(&self) -> usize {
        self.transform.nrows()
    }

    pub fn group_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &ComplexMatrix {
        &self.blocks[k]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.ncols()).collect()
    }

    pub fn group_eigenvalues(&self, k: usize) -> &[Complex64] {
        self.partition.group(k)
    }

    pub fn partition(&self) -> &SpectralPartition {
        &self.partition
    }

    pub fn annihilators(&self) -> &[AnnihilatorPolynomial] {
        &self.annihilators
    }

    /// `U_S = [U₁ … U_M]`.
    pub fn transform(&self) -> &ComplexMatrix {
        &self.transform
    }

    /// The normalized operator the basis was built from.
    pub fn operator(&self) -> &ComplexMatrix {
        &self.operator
    }

    /// 2-norm condition number of `U_S`.
    pub fn condition_estimate(&self) -> f64 {
        self.condition_estimate
    }

    pub fn to_document(&self) -> GstDocument {
        GstDocument {
            n: self.n(),
            m: self.group_count(),
            groups: (0..self.group_count())
                .map(|k| GroupDocument {
                    eigenvalues: complex_pairs(self.group_eigenvalues(k).iter().copied()),
                    block: complex_pairs(self.blocks[k].iter().copied()),
                })
                .collect(),
            condition_estimate: self.condition_estimate,
        }
    }
}

/// JSON form of a [`GstBasis`]. Blocks are stored column-major as `[re, im]`
/// pairs, `n` rows by one column per group eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GstDocument {
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub groups: Vec<GroupDocument>,
    pub condition_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupDocument {
    pub eigenvalues: Vec<[f64; 2]>,
    pub block: Vec<[f64; 2]>,
}

const NORMALIZATION_TOL: f64 = 1e-8;

/// Builds the transform for a normalized operator (`ρ(Ã) = 1`) with `m` groups.
pub fn build_gst(operator: &ComplexMatrix, m: usize) -> Result<GstBasis, GstError> {
    build_gst_with_min_gap(operator, m, DEFAULT_MIN_GAP)
}

/// [`build_gst`] with an explicit smallest admissible magnitude gap.
pub fn build_gst_with_min_gap(operator: &ComplexMatrix, m: usize, min_gap: f64) -> Result<GstBasis, GstError> {
    let base = spectral::schur(operator, EigenOrder::MagnitudeAscending)?;
    let n = base.dim();
    let spectrum = Spectrum::new(base.order().to_vec());
    let radius = spectrum.spectral_radius();
    if (radius - 1.0).abs() > NORMALIZATION_TOL {
        return Err(GstError::NotNormalized { radius });
    }
    let partition = partition_eigenvalues_with_min_gap(&spectrum, m, min_gap)?;

    let mut blocks = Vec::with_capacity(m);
    let mut transform = ComplexMatrix::zeros(n, n);
    for k in 0..m {
        let range = partition.group_range(k);
        let order: Vec<usize> = range.clone().chain(0..range.start).chain(range.end..n).collect();
        let f = spectral::reorder_schur(&base, &order)?;
        let block = f.u().columns(0, range.len()).into_owned();
        transform.columns_mut(range.start, range.len()).copy_from(&block);
        blocks.push(block);
    }
    let annihilators = (0..m).map(|k| annihilator(&partition, k)).collect();
    let condition_estimate = spectral::condition_number(&transform);
    Ok(GstBasis { operator: operator.clone(), partition, blocks, annihilators, transform, condition_estimate })
}

/// Coefficients `x̃` with `U_S·x̃ = x`.
pub fn gst_forward(basis: &GstBasis, x: &ComplexVector) -> Result<ComplexVector, GstError> {
    let n = basis.n();
    if x.len() != n {
        return Err(GstError::DimensionMismatch { expected: n, found: x.len() });
    }
    let estimate = basis.condition_estimate;
    if !estimate.is_finite() || estimate > MAX_TRANSFORM_CONDITION {
        return Err(GstError::IllConditionedTransform { estimate });
    }
    basis
        .transform
        .clone()
        .full_piv_lu()
        .solve(x)
        .ok_or(GstError::IllConditionedTransform { estimate })
}

/// `x = U_S·x̃`. Panics if the lengths disagree.
pub fn gst_inverse(basis: &GstBasis, coeffs: &ComplexVector) -> ComplexVector {
    assert_eq!(coeffs.len(), basis.n(), "coefficient vector length");
    &basis.transform * coeffs
}

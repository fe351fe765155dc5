use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::GstError;
use crate::spectral::{EigenOrder, Spectrum};

/// Eigenvalues sorted by ascending magnitude and cut into contiguous groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralPartition {
    eigenvalues: Vec<Complex64>,
    /// Exclusive end index of every group; the last entry is `n`.
    boundaries: Vec<usize>,
    /// Magnitude gap at each of the `M − 1` cuts.
    gaps: Vec<f64>,
}

impl SpectralPartition {
    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn group_count(&self) -> usize {
        self.boundaries.len()
    }

    /// Cumulative group ends `i₁, i₁+i₂, …, n`.
    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    pub fn boundary_gaps(&self) -> &[f64] {
        &self.gaps
    }

    pub fn group_range(&self, k: usize) -> Range<usize> {
        let start = if k == 0 { 0 } else { self.boundaries[k - 1] };
        start..self.boundaries[k]
    }

    pub fn group(&self, k: usize) -> &[Complex64] {
        &self.eigenvalues[self.group_range(k)]
    }

    pub fn sizes(&self) -> Vec<usize> {
        (0..self.group_count()).map(|k| self.group_range(k).len()).collect()
    }

    /// Group index of every sorted position.
    pub fn labels(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        for k in 0..self.group_count() {
            out.extend(std::iter::repeat(k).take(self.group_range(k).len()));
        }
        out
    }
}

/// Magnitude gaps at or below this are not cut. A defective eigenvalue comes
/// back from floating point as a small ring of nearby values (radius about
/// `ε^(1/m)` for a Jordan block of size `m`), and a cut inside that ring
/// would hand one generalized eigenspace to two groups.
pub const DEFAULT_MIN_GAP: f64 = 1e-3;

/// Splits the spectrum at the `m − 1` largest gaps between consecutive
/// magnitudes, using [`DEFAULT_MIN_GAP`].
pub fn partition_eigenvalues(spectrum: &Spectrum, m: usize) -> Result<SpectralPartition, GstError> {
    partition_eigenvalues_with_min_gap(spectrum, m, DEFAULT_MIN_GAP)
}

/// As [`partition_eigenvalues`], with only gaps larger than `min_gap`
/// eligible as cuts. Equal gaps go to the lower-magnitude position first.
pub fn partition_eigenvalues_with_min_gap(
    spectrum: &Spectrum,
    m: usize,
    min_gap: f64,
) -> Result<SpectralPartition, GstError> {
    let n = spectrum.len();
    if m == 0 || m > n {
        return Err(GstError::InvalidGroupCount { m, n });
    }
    let sorted = spectrum.sorted(EigenOrder::MagnitudeAscending).values().to_vec();
    let mags: Vec<f64> = sorted.iter().map(|z| z.norm()).collect();
    let gaps: Vec<f64> = mags.windows(2).map(|w| w[1] - w[0]).collect();

    let available = gaps.iter().filter(|&&g| g > min_gap).count();
    if available < m - 1 {
        return Err(GstError::InsufficientGaps { needed: m - 1, available });
    }

    let mut cut_order: Vec<usize> = (0..gaps.len()).collect();
    cut_order.sort_by(|&a, &b| gaps[b].total_cmp(&gaps[a]).then(a.cmp(&b)));
    let mut cuts: Vec<usize> = cut_order[..m - 1].to_vec();
    cuts.sort_unstable();

    let boundaries = cuts.iter().map(|&c| c + 1).chain(std::iter::once(n)).collect();
    let cut_gaps = cuts.iter().map(|&c| gaps[c]).collect();
    Ok(SpectralPartition { eigenvalues: sorted, boundaries, gaps: cut_gaps })
}

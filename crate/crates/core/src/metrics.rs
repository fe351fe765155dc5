//! Comparison instruments for blocked bases.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dw::DwBasis;
use crate::gst::GstBasis;
use crate::poly::MatrixPolynomial;
use crate::serial::fmt_f64;
use crate::ComplexMatrix;

/// A basis split into column blocks, optionally with one eigenvalue per column.
pub trait BlockedBasis {
    fn basis_blocks(&self) -> Vec<&ComplexMatrix>;

    /// Eigenvalue attached to each column, in block order.
    fn column_eigenvalues(&self) -> Option<Vec<Complex64>> {
        None
    }
}

impl BlockedBasis for GstBasis {
    fn basis_blocks(&self) -> Vec<&ComplexMatrix> {
        self.blocks().iter().collect()
    }

    fn column_eigenvalues(&self) -> Option<Vec<Complex64>> {
        Some(self.partition().eigenvalues().to_vec())
    }
}

impl BlockedBasis for DwBasis {
    fn basis_blocks(&self) -> Vec<&ComplexMatrix> {
        self.blocks()
    }
}

impl BlockedBasis for [ComplexMatrix] {
    fn basis_blocks(&self) -> Vec<&ComplexMatrix> {
        self.iter().collect()
    }
}

impl BlockedBasis for Vec<ComplexMatrix> {
    fn basis_blocks(&self) -> Vec<&ComplexMatrix> {
        self.iter().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub i: usize,
    pub j: usize,
    pub abs_inner: f64,
    /// `||λ_i| − |λ_j||`, when the basis carries eigenvalues.
    pub eig_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityStats {
    pub mu: f64,
    pub m: f64,
    /// Number of ordered cross-block pairs, `N² − Σ s_k²`.
    pub n: usize,
    /// The pair attaining `m`, if any.
    pub max_pair: Option<PairRecord>,
    pub pairs: Vec<PairRecord>,
}

impl OrthogonalityStats {
    /// Fraction of cross pairs with `|b_ij|` above `threshold`.
    pub fn fraction_above(&self, threshold: f64) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        self.pairs.iter().filter(|p| p.abs_inner > threshold).count() as f64 / self.n as f64
    }

    /// One row per pair, then a `summary` row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,abs_inner,eig_distance\n");
        for p in &self.pairs {
            let d = p.eig_distance.map(fmt_f64).unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{}", p.i, p.j, fmt_f64(p.abs_inner), d);
        }
        let _ = writeln!(out, "summary,mu={},m={},n={}", fmt_f64(self.mu), fmt_f64(self.m), self.n);
        out
    }
}

/// Statistics of `|b_ij|` for `B = U_Sᴴ U_S` over entries whose columns lie in
/// different blocks. Ordered pairs are counted, so each unordered pair
/// contributes twice. A single block gives `μ = m = 0` and `n = 0`.
pub fn cross_orthogonality<B: BlockedBasis + ?Sized>(basis: &B) -> OrthogonalityStats {
    let blocks = basis.basis_blocks();
    let sizes: Vec<usize> = blocks.iter().map(|b| b.ncols()).collect();
    let total: usize = sizes.iter().sum();
    let mut owner = Vec::with_capacity(total);
    for (k, &s) in sizes.iter().enumerate() {
        owner.extend(std::iter::repeat(k).take(s));
    }
    let rows = blocks.first().map_or(0, |b| b.nrows());
    let mut u = ComplexMatrix::zeros(rows, total);
    let mut at = 0;
    for b in &blocks {
        u.columns_mut(at, b.ncols()).copy_from(*b);
        at += b.ncols();
    }
    let gram = u.adjoint() * &u;
    let mags: Option<Vec<f64>> = basis.column_eigenvalues().map(|v| v.iter().map(|z| z.norm()).collect());

    let n = total * total - sizes.iter().map(|s| s * s).sum::<usize>();
    let mut pairs = Vec::with_capacity(n);
    let mut sum = 0.0;
    let mut max_pair: Option<PairRecord> = None;
    for j in 0..total {
        for i in 0..total {
            if owner[i] == owner[j] {
                continue;
            }
            let rec = PairRecord {
                i,
                j,
                abs_inner: gram[(i, j)].norm(),
                eig_distance: mags.as_ref().map(|m| (m[i] - m[j]).abs()),
            };
            sum += rec.abs_inner;
            if max_pair.is_none_or(|p| rec.abs_inner > p.abs_inner) {
                max_pair = Some(rec);
            }
            pairs.push(rec);
        }
    }
    let mu = if n == 0 { 0.0 } else { sum / n as f64 };
    let m = max_pair.map_or(0.0, |p| p.abs_inner);
    OrthogonalityStats { mu, m, n, max_pair, pairs }
}

/// Width of the `|b_ij|` histogram bins.
pub const HISTOGRAM_BIN: f64 = 0.02;

/// Counts of `|b_ij|` over `[0, 1]` in bins of [`HISTOGRAM_BIN`]; values at or
/// beyond 1 land in the last bin.
pub fn inner_product_histogram(stats: &OrthogonalityStats) -> Vec<usize> {
    let bins = (1.0 / HISTOGRAM_BIN).round() as usize;
    let mut counts = vec![0; bins];
    for p in &stats.pairs {
        let b = ((p.abs_inner / HISTOGRAM_BIN) as usize).min(bins - 1);
        counts[b] += 1;
    }
    counts
}

pub fn histogram_csv(counts: &[usize]) -> String {
    let mut out = String::from("bin_low,bin_high,count\n");
    for (b, c) in counts.iter().enumerate() {
        let lo = b as f64 * HISTOGRAM_BIN;
        let _ = writeln!(out, "{},{},{}", fmt_f64(lo), fmt_f64(lo + HISTOGRAM_BIN), c);
    }
    out
}

/// `‖(I − U_kU_kᴴ)ÃU_k‖_F` for every block.
pub fn invariance_residual<B: BlockedBasis + ?Sized>(basis: &B, operator: &ComplexMatrix) -> Vec<f64> {
    basis
        .basis_blocks()
        .into_iter()
        .map(|u| {
            let au = operator * u;
            let r = &au - u * (u.adjoint() * &au);
            r.norm()
        })
        .collect()
}

/// `max_u ‖P_k(Ã)u‖` over the columns of every block, `P_k` the group's
/// annihilator evaluated in factored form.
pub fn annihilation_residual(basis: &GstBasis, operator: &ComplexMatrix) -> Vec<f64> {
    basis
        .blocks()
        .iter()
        .zip(basis.annihilators())
        .map(|(u, p)| {
            (0..u.ncols()).map(|j| p.apply(operator, &u.column(j).into_owned()).norm()).fold(0.0, f64::max)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    Gst,
    Dw,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Gst => "GST",
            Method::Dw => "DW",
        }
    }
}

/// What the subspace sizes are compared against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VarianceReference {
    /// `μ = N/M` for every group.
    Gst { n: usize, m: usize },
    /// `μ₁ = Nε`, `μ_k = N(ε^{1/2^{k−1}} − ε^{1/2^{k−2}})`.
    Dw { n: usize, epsilon: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionVariance {
    pub method: Method,
    pub sizes: Vec<usize>,
    pub means: Vec<f64>,
    /// `None` when there is only one subspace.
    pub variance: Option<f64>,
}

/// Expected size of DW subspace `k` (1-based) for `n` eigenvalues.
pub fn dw_expected_size(n: usize, epsilon: f64, k: usize) -> f64 {
    let (lo, hi) = crate::dw::dw_eigen_range(epsilon, k);
    n as f64 * (hi - lo)
}

/// `Σ (s_k − μ_k)² / (count − 1)`.
///
/// For DW the sizes are `W₁ … W_L` followed by the terminal block, which is
/// counted as subspace `L + 1`, so a basis with `L` wavelet levels has
/// `L + 1` subspaces.
pub fn subspace_dimension_variance(sizes: &[usize], reference: VarianceReference) -> DimensionVariance {
    let (method, means): (Method, Vec<f64>) = match reference {
        VarianceReference::Gst { n, m } => (Method::Gst, vec![n as f64 / m as f64; sizes.len()]),
        VarianceReference::Dw { n, epsilon } => {
            (Method::Dw, (1..=sizes.len()).map(|k| dw_expected_size(n, epsilon, k)).collect())
        }
    };
    let variance = (sizes.len() > 1).then(|| {
        let ss: f64 = sizes.iter().zip(&means).map(|(&s, &mu)| (s as f64 - mu).powi(2)).sum();
        ss / (sizes.len() - 1) as f64
    });
    DimensionVariance { method, sizes: sizes.to_vec(), means, variance }
}

pub fn gst_variance(basis: &GstBasis) -> DimensionVariance {
    subspace_dimension_variance(&basis.sizes(), VarianceReference::Gst { n: basis.n(), m: basis.group_count() })
}

pub fn dw_variance(basis: &DwBasis) -> DimensionVariance {
    subspace_dimension_variance(&basis.sizes(), VarianceReference::Dw { n: basis.n(), epsilon: basis.epsilon() })
}

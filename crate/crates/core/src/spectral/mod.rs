//! Dense complex linear algebra for graph operators: spectra, ordered and
//! reordered Schur factorizations, numerical rank and defectiveness.

mod defect;
mod schur;
mod triangular;

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{ComplexMatrix, ComplexVector};

pub use defect::{is_defective, DefectivenessReport, EigenCluster};
pub(crate) use defect::cluster_eigenvalues;
pub use triangular::{invariance_error, nilpotent_part, taylor_triangular_eval};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("QR iteration did not converge at diagonal index {index} after {sweeps} sweeps")]
    NoConvergence { index: usize, sweeps: usize },
    #[error("order is not a permutation of 0..{n}")]
    InvalidOrder { n: usize },
}

/// Numerical tolerances shared by the spectral routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative distance under which two eigenvalues belong to one cluster.
    pub cluster: f64,
    /// Relative singular-value threshold for numerical rank.
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { cluster: 1e-6, rank: 1e-8 }
    }
}

/// Parses `cluster=1e-6,rank=1e-8`; omitted keys keep their defaults.
impl std::str::FromStr for Tolerances {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut tol = Tolerances::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part.split_once('=').ok_or_else(|| format!("expected key=value, got `{part}`"))?;
            let value: f64 = value.trim().parse().map_err(|_| format!("invalid number `{value}` for `{key}`"))?;
            if !(value.is_finite() && value > 0.0) {
                return Err(format!("`{key}` must be positive"));
            }
            match key.trim() {
                "cluster" => tol.cluster = value,
                "rank" => tol.rank = value,
                other => return Err(format!("unknown tolerance `{other}`")),
            }
        }
        Ok(tol)
    }
}

/// Total order on eigenvalues used to arrange the Schur diagonal.
///
/// Magnitude ties are broken by real part descending, then imaginary part
/// descending.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EigenOrder {
    /// Whatever order the QR iteration produced.
    AsComputed,
    MagnitudeAscending,
    MagnitudeDescending,
    RealAscending,
    RealDescending,
}

fn tie_break(a: Complex64, b: Complex64) -> Ordering {
    b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im))
}

impl EigenOrder {
    pub fn compare(self, a: Complex64, b: Complex64) -> Ordering {
        match self {
            EigenOrder::AsComputed => Ordering::Equal,
            EigenOrder::MagnitudeAscending => a.norm().total_cmp(&b.norm()).then(tie_break(a, b)),
            EigenOrder::MagnitudeDescending => b.norm().total_cmp(&a.norm()).then(tie_break(a, b)),
            EigenOrder::RealAscending => a.re.total_cmp(&b.re).then(b.im.total_cmp(&a.im)),
            EigenOrder::RealDescending => b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)),
        }
    }
}

/// Eigenvalues of a square matrix, with multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    /// Largest eigenvalue magnitude (0 for an empty spectrum).
    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn sorted(&self, order: EigenOrder) -> Spectrum {
        let mut values = self.values.clone();
        values.sort_by(|a, b| order.compare(*a, *b));
        Spectrum { values }
    }
}

/// `A = U T Uᴴ` with `U` unitary and `T` upper triangular.
#[derive(Debug, Clone)]
pub struct SchurFactorization {
    pub(crate) u: ComplexMatrix,
    pub(crate) t: ComplexMatrix,
    pub(crate) order: Vec<Complex64>,
}

impl SchurFactorization {
    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn t(&self) -> &ComplexMatrix {
        &self.t
    }

    /// Eigenvalues in diagonal order of `T`.
    pub fn order(&self) -> &[Complex64] {
        &self.order
    }

    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    /// `U T Uᴴ`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        &self.u * &self.t * self.u.adjoint()
    }

    /// Unit-norm eigenvector for the eigenvalue at diagonal position `i`,
    /// obtained by back substitution in `T`.
    pub fn eigenvector(&self, i: usize) -> ComplexVector {
        schur::eigenvector(self, i)
    }

    /// Matrix whose columns are the computed eigenvectors, one per diagonal
    /// entry. For a defective matrix some columns are numerically dependent.
    pub fn eigenvector_matrix(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut v = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            v.set_column(i, &self.eigenvector(i));
        }
        v
    }
}

/// Promotes a real matrix to complex.
pub fn to_complex(a: &nalgebra::DMatrix<f64>) -> ComplexMatrix {
    a.map(|x| Complex64::new(x, 0.0))
}

/// All eigenvalues of `a`, with multiplicity, in the order the QR iteration
/// deflated them.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Spectrum, SpectralError> {
    let (_, t) = schur::schur_unordered(a)?;
    Ok(Spectrum::new(t.diagonal().iter().copied().collect()))
}

/// Schur factorization with the diagonal of `T` arranged by `order`.
pub fn schur(a: &ComplexMatrix, order: EigenOrder) -> Result<SchurFactorization, SpectralError> {
    let (mut u, mut t) = schur::schur_unordered(a)?;
    if order != EigenOrder::AsComputed {
        let diag: Vec<Complex64> = t.diagonal().iter().copied().collect();
        let perm = schur::sorted_positions(&diag, order);
        schur::reorder_in_place(&mut t, &mut u, &perm);
    }
    Ok(schur::factorization(u, t))
}

/// Reorders an existing factorization so that diagonal position `p` of the
/// result holds the eigenvalue currently at position `new_order[p]`.
pub fn reorder_schur(
    f: &SchurFactorization,
    new_order: &[usize],
) -> Result<SchurFactorization, SpectralError> {
    let n = f.dim();
    let mut seen = vec![false; n];
    if new_order.len() != n {
        return Err(SpectralError::InvalidOrder { n });
    }
    for &i in new_order {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(SpectralError::InvalidOrder { n });
        }
    }
    let mut u = f.u.clone();
    let mut t = f.t.clone();
    schur::reorder_in_place(&mut t, &mut u, new_order);
    Ok(schur::factorization(u, t))
}

/// Singular values of `m`, descending.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `tol · σ_max`.
pub fn numerical_rank(m: &ComplexMatrix, tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&smax) if smax > 0.0 => s.iter().filter(|&&x| x > tol * smax).count(),
        _ => 0,
    }
}

/// Ratio of extreme singular values (`inf` when singular).
pub fn condition_number(m: &ComplexMatrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

//! Diffusion-wavelet baseline.
//!
//! Dyadic powers of the operator are compressed level by level. `V_j` is an
//! ε-span of `Ã^{2^{j−1}}` restricted to `V_{j−1}`, and `W_j` is what `V_j`
//! leaves out of `V_{j−1}`. All blocks are orthonormal and mutually orthogonal.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::serial::complex_pairs;
use crate::ComplexMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DwError {
    #[error("precision must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),
    #[error("at least one level is required")]
    NoLevels,
    #[error("operator must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
}

/// Orthonormal block whose span is within `eps` of every column of `columns`.
///
/// Pivoted Gram–Schmidt: the column with the largest residual is normalized
/// and projected out of the others until every residual is at most `eps`.
/// Each new direction is orthogonalized twice against the accepted ones.
pub fn eps_span_basis(columns: &ComplexMatrix, eps: f64) -> ComplexMatrix {
    assert!(eps > 0.0, "eps must be positive");
    let rows = columns.nrows();
    let mut residual = columns.clone();
    let mut accepted: Vec<nalgebra::DVector<Complex64>> = Vec::new();
    while accepted.len() < rows {
        let (pivot, norm) = (0..residual.ncols())
            .map(|j| (j, residual.column(j).norm()))
            .fold((0, 0.0f64), |best, c| if c.1 > best.1 { c } else { best });
        if norm <= eps {
            break;
        }
        let mut q = residual.column(pivot).into_owned();
        for _ in 0..2 {
            for b in &accepted {
                let c = b.dotc(&q);
                q.axpy(-c, b, Complex64::new(1.0, 0.0));
            }
        }
        let qn = q.norm();
        if qn == 0.0 {
            break;
        }
        q.unscale_mut(qn);
        for j in 0..residual.ncols() {
            let c = q.dotc(&residual.column(j));
            let mut col = residual.column_mut(j);
            col.axpy(-c, &q, Complex64::new(1.0, 0.0));
        }
        accepted.push(q);
    }
    if accepted.is_empty() {
        ComplexMatrix::zeros(rows, 0)
    } else {
        ComplexMatrix::from_columns(&accepted)
    }
}

/// Orthonormal basis of the complement of the orthonormal block `q` in `C^d`.
fn complement(q: &ComplexMatrix) -> ComplexMatrix {
    let d = q.nrows();
    let want = d - q.ncols();
    if want == 0 {
        return ComplexMatrix::zeros(d, 0);
    }
    let mut e = ComplexMatrix::identity(d, d);
    e -= q * (q.adjoint() * &e);
    e -= q * (q.adjoint() * &e);
    let mut basis = eps_span_basis(&e, 1e-8);
    basis.resize_horizontally_mut(want.min(basis.ncols()), Complex64::new(0.0, 0.0));
    basis
}

/// `[ε^{1/2^{k−2}}, ε^{1/2^{k−1}}]` for `k ≥ 2` and `[0, ε]` for `k = 1`: the
/// eigenvalue magnitudes level `k` is expected to hold.
pub fn dw_eigen_range(eps: f64, k: usize) -> (f64, f64) {
    assert!(k >= 1, "levels start at 1");
    let hi = eps.powf(1.0 / 2f64.powi(k as i32 - 1));
    let lo = if k == 1 { 0.0 } else { eps.powf(1.0 / 2f64.powi(k as i32 - 2)) };
    (lo, hi)
}

#[derive(Debug, Clone)]
pub struct DwBasis {
    epsilon: f64,
    requested: usize,
    levels: Vec<ComplexMatrix>,
    terminal: ComplexMatrix,
}

impl DwBasis {
    pub fn n(&self) -> usize {
        self.terminal.nrows()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn requested_levels(&self) -> usize {
        self.requested
    }

    /// Number of wavelet levels `L`; trailing empty levels are dropped.
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    /// `W₁ … W_L`. Intermediate levels may have no columns.
    pub fn levels(&self) -> &[ComplexMatrix] {
        &self.levels
    }

    pub fn level(&self, k: usize) -> &ComplexMatrix {
        &self.levels[k - 1]
    }

    /// `V_L`.
    pub fn terminal(&self) -> &ComplexMatrix {
        &self.terminal
    }

    /// Column counts of `W₁ … W_L` followed by `V_L`.
    pub fn sizes(&self) -> Vec<usize> {
        self.levels.iter().chain([&self.terminal]).map(|b| b.ncols()).collect()
    }

    /// Non-empty blocks in level order, the terminal block last.
    pub fn blocks(&self) -> Vec<&ComplexMatrix> {
        self.levels.iter().chain([&self.terminal]).filter(|b| b.ncols() > 0).collect()
    }

    /// `[W₁ … W_L V_L]`, unitary.
    pub fn transform(&self) -> ComplexMatrix {
        let blocks = self.blocks();
        let mut out = ComplexMatrix::zeros(self.n(), self.n());
        let mut at = 0;
        for b in blocks {
            out.columns_mut(at, b.ncols()).copy_from(b);
            at += b.ncols();
        }
        out
    }

    pub fn eigen_ranges(&self) -> Vec<(f64, f64)> {
        (1..=self.levels.len()).map(|k| dw_eigen_range(self.epsilon, k)).collect()
    }

    pub fn to_document(&self) -> DwDocument {
        DwDocument {
            n: self.n(),
            m: self.requested,
            l: self.levels.len(),
            epsilon: self.epsilon,
            levels: self
                .levels
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    let (lo, hi) = dw_eigen_range(self.epsilon, i + 1);
                    LevelDocument { level: i + 1, eigen_range: [lo, hi], block: complex_pairs(b.iter().copied()) }
                })
                .collect(),
            terminal: complex_pairs(self.terminal.iter().copied()),
            terminal_size: self.terminal.ncols(),
        }
    }
}

/// JSON form of a [`DwBasis`]; blocks use the same column-major `[re, im]`
/// layout as the GST document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DwDocument {
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub epsilon: f64,
    pub levels: Vec<LevelDocument>,
    pub terminal: Vec<[f64; 2]>,
    pub terminal_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelDocument {
    pub level: usize,
    pub eigen_range: [f64; 2],
    pub block: Vec<[f64; 2]>,
}

/// Builds at most `max_levels` wavelet levels with precision `eps`.
///
/// The operator is carried in the coordinates of the current `V_j` and squared
/// there after each compression, so level `j` sees `Ã^{2^{j−1}}` without ever
/// forming the full-size power. Stops once `V_j` has at most one column.
pub fn build_dw(operator: &ComplexMatrix, max_levels: usize, eps: f64) -> Result<DwBasis, DwError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(DwError::InvalidEpsilon(eps));
    }
    if max_levels == 0 {
        return Err(DwError::NoLevels);
    }
    let (rows, cols) = operator.shape();
    if rows != cols {
        return Err(DwError::NotSquare { rows, cols });
    }

    let mut phi = ComplexMatrix::identity(rows, rows);
    let mut compressed = operator.clone();
    let mut levels = Vec::new();
    for _ in 0..max_levels {
        if phi.ncols() <= 1 {
            break;
        }
        let q = eps_span_basis(&compressed, eps);
        let w = complement(&q);
        levels.push(&phi * w);
        let restricted = q.adjoint() * &compressed * &q;
        compressed = &restricted * &restricted;
        phi = &phi * q;
    }
    while levels.last().is_some_and(|w: &ComplexMatrix| w.ncols() == 0) {
        levels.pop();
    }
    Ok(DwBasis { epsilon: eps, requested: max_levels, levels, terminal: phi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{adjacency, erdos_renyi, normalize, DiGraph};
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn diag(values: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(values.len(), values.iter().map(|&v| c(v))))
    }

    fn residuals(b: &ComplexMatrix, cols: &ComplexMatrix) -> f64 {
        let proj = b * (b.adjoint() * cols);
        (0..cols.ncols()).map(|j| (proj.column(j) - cols.column(j)).norm()).fold(0.0, f64::max)
    }

    fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        m.qr().q()
    }

    /// `Q·diag(λ)·Qᵀ`, scaled so the largest `|λ|` is 1.
    fn symmetric_with(values: &[f64], rng: &mut ChaCha8Rng) -> (ComplexMatrix, DMatrix<f64>) {
        let q = random_orthogonal(values.len(), rng);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(values));
        (crate::spectral::to_complex(&(&q * d * q.transpose())), q)
    }

    fn assert_structure(b: &DwBasis) {
        let blocks = b.blocks();
        assert_eq!(b.sizes().iter().sum::<usize>(), b.n());
        for (i, x) in blocks.iter().enumerate() {
            let gram = x.adjoint() * *x;
            assert!((gram - ComplexMatrix::identity(x.ncols(), x.ncols())).norm() <= 1e-10);
            for y in &blocks[i + 1..] {
                assert!((x.adjoint() * *y).norm() <= 1e-9);
            }
        }
    }

    #[test]
    fn eps_span_of_identity_is_full() {
        let b = eps_span_basis(&ComplexMatrix::identity(5, 5), 1e-6);
        assert_eq!(b.ncols(), 5);
    }

    #[test]
    fn eps_span_of_repeated_vector() {
        let v = nalgebra::DVector::from_vec(vec![c(0.6), c(0.0), c(0.8)]);
        let cols = ComplexMatrix::from_columns(&[v.clone(), v.clone(), v.clone()]);
        let b = eps_span_basis(&cols, 1e-6);
        assert_eq!(b.ncols(), 1);
        assert!((b.column(0).dotc(&v).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eps_span_finds_rank_three() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let left = DMatrix::from_fn(8, 3, |_, _| rng.gen_range(-1.0..1.0));
        let right = DMatrix::from_fn(3, 10, |_, _| rng.gen_range(-1.0..1.0));
        let noise = DMatrix::from_fn(8, 10, |_, _| rng.gen_range(-1e-9..1e-9));
        let cols = crate::spectral::to_complex(&(left * right + noise));
        let b = eps_span_basis(&cols, 1e-6);
        assert_eq!(b.ncols(), 3);
        assert!(residuals(&b, &cols) <= 1e-6);
    }

    #[test]
    fn eigen_ranges() {
        assert_eq!(dw_eigen_range(1e-3, 1), (0.0, 1e-3));
        let (lo, hi) = dw_eigen_range(1e-3, 2);
        assert!((lo - 1e-3).abs() < 1e-15 && (hi - 10f64.powf(-1.5)).abs() < 1e-15);
        let (lo, hi) = dw_eigen_range(1e-3, 3);
        assert!((lo - 10f64.powf(-1.5)).abs() < 1e-15 && (hi - 10f64.powf(-0.75)).abs() < 1e-15);
    }

    #[test]
    fn diagonal_operator_levels() {
        let b = build_dw(&diag(&[0.1, 0.9, 1.0]), 4, 0.5).unwrap();
        assert_eq!(b.level_count(), 4);
        assert_eq!(b.sizes(), vec![1, 0, 0, 1, 1]);
        assert!((b.level(1)[(0, 0)].norm() - 1.0).abs() < 1e-12);
        assert!((b.level(4)[(1, 0)].norm() - 1.0).abs() < 1e-12);
        assert!((b.terminal()[(2, 0)].norm() - 1.0).abs() < 1e-12);
        assert_structure(&b);
    }

    #[test]
    fn identity_has_no_wavelets() {
        let b = build_dw(&ComplexMatrix::identity(6, 6), 3, 0.1).unwrap();
        assert_eq!(b.level_count(), 0);
        assert_eq!(b.terminal().ncols(), 6);
    }

    #[test]
    fn invalid_arguments() {
        let a = ComplexMatrix::identity(3, 3);
        assert_eq!(build_dw(&a, 3, 0.0).unwrap_err(), DwError::InvalidEpsilon(0.0));
        assert_eq!(build_dw(&a, 3, 1.0).unwrap_err(), DwError::InvalidEpsilon(1.0));
        assert_eq!(build_dw(&a, 0, 0.5).unwrap_err(), DwError::NoLevels);
        assert!(matches!(build_dw(&ComplexMatrix::zeros(2, 3), 3, 0.5), Err(DwError::NotSquare { .. })));
    }

    #[test]
    fn random_symmetric_stops_early() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 40;
        let mut values: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-0.8..0.8)).collect();
        values.push(1.0);
        let (a, _) = symmetric_with(&values, &mut rng);
        let b = build_dw(&a, 30, 1e-5).unwrap();
        assert!(b.level_count() < 30);
        assert_structure(&b);
        // 0.8^(2^(k−1)) drops under 1e−5 once 2^(k−1) ≥ 52, so k ≤ 7.
        assert!(b.level_count() <= 7);
    }

    #[test]
    fn directed_graphs_are_complete_and_orthogonal() {
        for seed in 0..10 {
            let g = erdos_renyi(30, 0.1, seed).unwrap();
            let Ok(op) = normalize(&adjacency(&g)) else { continue };
            let b = build_dw(&op.to_complex(), 10, 1e-3).unwrap();
            assert_structure(&b);
            assert!(b.level_count() <= 10);
        }
    }

    #[test]
    fn cycle_is_all_terminal() {
        let g = DiGraph::cycle(5).unwrap();
        let op = normalize(&adjacency(&g)).unwrap();
        let b = build_dw(&op.to_complex(), 5, 1e-3).unwrap();
        assert_eq!(b.level_count(), 0);
        assert_eq!(b.terminal().ncols(), 5);
    }

    #[test]
    fn document_shape() {
        let b = build_dw(&diag(&[0.1, 0.9, 1.0]), 4, 0.5).unwrap();
        let doc = b.to_document();
        assert_eq!((doc.n, doc.m, doc.l, doc.terminal_size), (3, 4, 4, 1));
        assert_eq!(doc.levels[0].eigen_range, [0.0, 0.5]);
        assert_eq!(doc.levels[1].block.len(), 0);
        let json = crate::serial::to_json(&doc);
        assert!(json.contains("\"M\":4") && json.contains("\"L\":4"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn symmetric_levels_localize_eigenvalues(
            seed in 0u64..1000,
            n in 4usize..16,
            eps_exp in 1.0f64..5.0,
        ) {
            let eps = 10f64.powf(-eps_exp);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut values: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-0.95..0.95)).collect();
            values.push(1.0);
            let (a, q) = symmetric_with(&values, &mut rng);
            let m = 8;
            let b = build_dw(&a, m, eps).unwrap();
            assert_structure(&b);
            prop_assert!(b.level_count() <= m);

            for k in 1..=b.level_count() {
                let w = b.level(k);
                // approximate invariance: Ã^{2^{k−1}} nearly kills W_k
                let mut power = a.clone();
                for _ in 1..k {
                    power = &power * &power;
                }
                for j in 0..w.ncols() {
                    prop_assert!((&power * w.column(j)).norm() <= 10.0 * eps);
                }
                // eigenvectors concentrated in W_k have eigenvalues in the widened band
                let (lo, hi) = dw_eigen_range(eps, k);
                for (i, &lambda) in values.iter().enumerate() {
                    let v = nalgebra::DVector::from_iterator(n, q.column(i).iter().map(|&x| c(x)));
                    let energy = (w.adjoint() * &v).norm_squared();
                    if energy >= 0.99 {
                        prop_assert!(lambda.abs() >= lo / 2.0 && lambda.abs() <= hi * 2.0,
                            "level {k}: |λ| = {} outside [{lo}, {hi}]", lambda.abs());
                    }
                }
            }

            let mut mags: Vec<f64> = values.iter().map(|v| v.abs()).collect();
            mags.sort_by(f64::total_cmp);
            let second = mags[n - 2];
            if second < eps.powf(1.0 / 2f64.powi(m as i32 - 2)) * 0.9 {
                prop_assert!(b.level_count() < m);
            }
        }
    }
}

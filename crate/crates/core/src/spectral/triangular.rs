//! Identities on the triangular Schur factor `T = D + N`.

use num_complex::Complex64;

use super::SchurFactorization;
use crate::poly::Polynomial;
use crate::ComplexMatrix;

/// Splits `T` into its diagonal `D` and strictly upper part `N`.
pub fn nilpotent_part(f: &SchurFactorization) -> (ComplexMatrix, ComplexMatrix) {
    let t = f.t();
    let n = t.nrows();
    let d = ComplexMatrix::from_fn(n, n, |i, j| if i == j { t[(i, j)] } else { Complex64::new(0.0, 0.0) });
    let nil = ComplexMatrix::from_fn(n, n, |i, j| if j > i { t[(i, j)] } else { Complex64::new(0.0, 0.0) });
    (d, nil)
}

/// Distance of `A·u_i` from `span(u_i)`: `sqrt(Σ_{j<i} |t_ji|²)`.
///
/// `column` is zero-based, so column 0 always gives 0.
pub fn invariance_error(f: &SchurFactorization, column: usize) -> f64 {
    let t = f.t();
    (0..column).map(|j| t[(j, column)].norm_sqr()).sum::<f64>().sqrt()
}

/// Evaluates `P(D + N)` order by order in the nilpotent part.
///
/// The `m`-th term collects every product of `m` entries of `N` along an index
/// chain `i = k₀ < k₁ < … < k_m = j`, weighted by the divided difference of
/// `P` over the diagonal values on that chain. When the diagonal is constant
/// along the chains (so `D` and `N` commute) the divided difference collapses
/// to `P⁽ᵐ⁾(λ)/m!` and the term is the familiar `P⁽ᵐ⁾(D)·Nᵐ/m!`. Terms stop at
/// `m = min(deg P, n − 1)` because `Nⁿ = 0`.
///
/// Internally `h_r` (complete homogeneous symmetric polynomials of the chain's
/// diagonal values) is carried through the recurrence
/// `H⁽ᵐ⁾_r = Σ_s H⁽ᵐ⁻¹⁾_{r−s} · N · Dˢ`, using
/// `P[x₀,…,x_m] = Σ_k a_k h_{k−m}(x₀,…,x_m)`.
pub fn taylor_triangular_eval(p: &Polynomial, d: &ComplexMatrix, nil: &ComplexMatrix) -> ComplexMatrix {
    let n = d.nrows();
    let a = p.coeffs();
    let deg = p.degree();
    let diag: Vec<Complex64> = (0..n).map(|i| d[(i, i)]).collect();
    let diag_pow = |r: i32| ComplexMatrix::from_fn(n, n, |i, j| if i == j { diag[i].powi(r) } else { Complex64::new(0.0, 0.0) });

    // N·D^s for s = 0..=deg
    let nd: Vec<ComplexMatrix> = (0..=deg)
        .map(|s| {
            let mut m = nil.clone();
            for j in 0..n {
                let scale = diag[j].powi(s as i32);
                for i in 0..n {
                    m[(i, j)] *= scale;
                }
            }
            m
        })
        .collect();

    let mut h: Vec<ComplexMatrix> = (0..=deg).map(|r| diag_pow(r as i32)).collect();
    let mut total = ComplexMatrix::zeros(n, n);
    for (r, hr) in h.iter().enumerate() {
        total += hr * a[r];
    }
    let max_order = deg.min(n.saturating_sub(1));
    for m in 1..=max_order {
        let top = deg - m;
        let mut next = Vec::with_capacity(top + 1);
        for r in 0..=top {
            let mut acc = ComplexMatrix::zeros(n, n);
            for s in 0..=r {
                acc += &h[r - s] * &nd[s];
            }
            next.push(acc);
        }
        for (r, hr) in next.iter().enumerate() {
            total += hr * a[m + r];
        }
        h = next;
    }
    total
}

//! Complex Schur factorization and reordering.
//!
//! The factorization runs in three stages: an isolating permutation that
//! peels off rows and columns which are already triangular (sinks and sources
//! of a graph end up here with exact eigenvalues), Householder reduction to
//! upper Hessenberg form, and single-shift complex QR with Wilkinson shifts.
//! Only unitary transformations are used, so the accumulated `U` stays unitary
//! to working precision.

use num_complex::Complex64;

use super::{EigenOrder, SchurFactorization, SpectralError};
use crate::ComplexMatrix;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[inline]
fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Plane rotation `G = [[c, s], [-conj(s), c]]` with `G·[x; y] = [r; 0]`.
#[inline]
pub(crate) fn givens(x: Complex64, y: Complex64) -> (f64, Complex64, Complex64) {
    if y == ZERO {
        return (1.0, ZERO, x);
    }
    if x == ZERO {
        return (0.0, Complex64::new(1.0, 0.0), y);
    }
    let ax = x.norm();
    let nr = ax.hypot(y.norm());
    let phase = x / ax;
    (ax / nr, phase * y.conj() / nr, phase * nr)
}

/// Applies `G` to rows `p` and `p + 1` over the column range.
#[inline]
fn rotate_rows(m: &mut ComplexMatrix, p: usize, cols: std::ops::Range<usize>, c: f64, s: Complex64) {
    let sc = s.conj();
    for j in cols {
        let a = m[(p, j)];
        let b = m[(p + 1, j)];
        m[(p, j)] = a * c + s * b;
        m[(p + 1, j)] = b * c - sc * a;
    }
}

/// Applies `Gᴴ` from the right to columns `p` and `p + 1` over the row range.
#[inline]
fn rotate_cols(m: &mut ComplexMatrix, p: usize, rows: std::ops::Range<usize>, c: f64, s: Complex64) {
    let sc = s.conj();
    for i in rows {
        let a = m[(i, p)];
        let b = m[(i, p + 1)];
        m[(i, p)] = a * c + sc * b;
        m[(i, p + 1)] = b * c - s * a;
    }
}

/// Symmetric permutation that moves isolated rows to the bottom and isolated
/// columns to the top. Returns the permuted matrix and `perm`, where
/// `perm[new] = old`.
fn isolate(a: &ComplexMatrix) -> (ComplexMatrix, Vec<usize>) {
    let n = a.nrows();
    let mut m = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    if n < 2 {
        return (m, perm);
    }
    let swap = |m: &mut ComplexMatrix, perm: &mut Vec<usize>, i: usize, j: usize| {
        if i != j {
            m.swap_rows(i, j);
            m.swap_columns(i, j);
            perm.swap(i, j);
        }
    };
    let (mut lo, mut hi) = (0usize, n - 1);
    loop {
        let mut changed = false;
        'rows: while lo < hi {
            for j in (lo..=hi).rev() {
                if (lo..=hi).all(|c| c == j || m[(j, c)] == ZERO) {
                    swap(&mut m, &mut perm, j, hi);
                    hi -= 1;
                    changed = true;
                    continue 'rows;
                }
            }
            break;
        }
        'cols: while lo < hi {
            for j in lo..=hi {
                if (lo..=hi).all(|r| r == j || m[(r, j)] == ZERO) {
                    swap(&mut m, &mut perm, j, lo);
                    lo += 1;
                    changed = true;
                    continue 'cols;
                }
            }
            break;
        }
        if !changed {
            break;
        }
    }
    (m, perm)
}

/// Householder reduction to upper Hessenberg form, `a ← Qᴴ a Q`, accumulating
/// `Q` into `q` from the right.
fn hessenberg(a: &mut ComplexMatrix, q: &mut ComplexMatrix) {
    let n = a.nrows();
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    for k in 0..n - 2 {
        let tail: f64 = (k + 2..n).map(|i| a[(i, k)].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let xnorm = (tail + x0.norm_sqr()).sqrt();
        let phase = if x0 == ZERO {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        v[k + 1] = x0 - alpha;
        for i in k + 2..n {
            v[i] = a[(i, k)];
        }
        let vv: f64 = (k + 1..n).map(|i| v[i].norm_sqr()).sum();
        let beta = 2.0 / vv;

        // Left: rows k+1.., columns k+1.. (column k is set explicitly).
        for j in k + 1..n {
            let mut dot = ZERO;
            for i in k + 1..n {
                dot += v[i].conj() * a[(i, j)];
            }
            let f = dot * beta;
            if f != ZERO {
                for i in k + 1..n {
                    a[(i, j)] -= v[i] * f;
                }
            }
        }
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
        // Right: all rows, columns k+1..
        for m in [&mut *a, &mut *q] {
            for i in 0..n {
                let mut dot = ZERO;
                for j in k + 1..n {
                    dot += m[(i, j)] * v[j];
                }
                let f = dot * beta;
                if f != ZERO {
                    for j in k + 1..n {
                        m[(i, j)] -= f * v[j].conj();
                    }
                }
            }
        }
        for x in v.iter_mut() {
            *x = ZERO;
        }
    }
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let r1 = mean + disc;
    let r2 = mean - disc;
    if (r1 - d).norm() <= (r2 - d).norm() {
        r1
    } else {
        r2
    }
}

/// Single-shift complex QR on an upper Hessenberg matrix. On return `h` is
/// upper triangular and `z` has absorbed every rotation.
fn hessenberg_qr(h: &mut ComplexMatrix, z: &mut ComplexMatrix) -> Result<(), SpectralError> {
    let n = h.nrows();
    if n < 2 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let tiny = f64::MIN_POSITIVE / eps;
    let max_sweeps = 30 * n;
    let mut sweeps = 0usize;
    let mut its = 0usize;
    let mut hi = n - 1;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let s = cabs1(h[(l, l - 1)]);
            if s == 0.0 {
                break;
            }
            let mut tst = cabs1(h[(l - 1, l - 1)]) + cabs1(h[(l, l)]);
            if tst == 0.0 {
                if l >= 2 {
                    tst += h[(l - 1, l - 2)].re.abs();
                }
                if l < hi {
                    tst += h[(l + 1, l)].re.abs();
                }
            }
            if s <= eps * tst || s <= tiny {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            its = 0;
            continue;
        }
        sweeps += 1;
        its += 1;
        if sweeps > max_sweeps {
            return Err(SpectralError::NoConvergence { index: hi, sweeps: max_sweeps });
        }
        let shift = if its % 20 == 10 {
            h[(l, l)] + 0.75 * h[(l + 1, l)].re.abs()
        } else if its % 20 == 0 {
            h[(hi, hi)] + 0.75 * h[(hi, hi - 1)].re.abs()
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for k in l..hi {
            let (c, s) = if k == l {
                let (c, s, _) = givens(h[(l, l)] - shift, h[(l + 1, l)]);
                (c, s)
            } else {
                let (c, s, r) = givens(h[(k, k - 1)], h[(k + 1, k - 1)]);
                h[(k, k - 1)] = r;
                h[(k + 1, k - 1)] = ZERO;
                (c, s)
            };
            rotate_rows(h, k, k..n, c, s);
            rotate_cols(h, k, 0..(k + 3).min(hi + 1), c, s);
            rotate_cols(z, k, 0..n, c, s);
        }
    }
    for j in 0..n {
        for i in j + 1..n {
            h[(i, j)] = ZERO;
        }
    }
    Ok(())
}

/// Unordered complex Schur factorization `a = U T Uᴴ`.
pub(crate) fn schur_unordered(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix), SpectralError> {
    if !a.is_square() {
        return Err(SpectralError::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(SpectralError::NonFinite);
    }
    let n = a.nrows();
    let (mut t, perm) = isolate(a);
    let mut z = ComplexMatrix::identity(n, n);
    hessenberg(&mut t, &mut z);
    hessenberg_qr(&mut t, &mut z)?;
    // Undo the isolating permutation: row `new` of Z belongs to node perm[new].
    let mut u = ComplexMatrix::zeros(n, n);
    for (new, &old) in perm.iter().enumerate() {
        u.set_row(old, &z.row(new));
    }
    Ok((u, t))
}

/// Swaps the adjacent diagonal entries `k` and `k + 1` of `t`.
fn swap_adjacent(t: &mut ComplexMatrix, u: &mut ComplexMatrix, k: usize) {
    let n = t.nrows();
    let t11 = t[(k, k)];
    let t22 = t[(k + 1, k + 1)];
    if t11 == t22 {
        return;
    }
    let (c, s, _) = givens(t[(k, k + 1)], t22 - t11);
    rotate_rows(t, k, k + 2..n, c, s);
    rotate_cols(t, k, 0..k, c, s);
    t[(k, k)] = t22;
    t[(k + 1, k + 1)] = t11;
    t[(k + 1, k)] = ZERO;
    rotate_cols(u, k, 0..n, c, s);
}

/// Reorders the diagonal of `t` so that position `p` ends up holding what was
/// at position `order[p]`. `order` must already be validated as a permutation.
pub(crate) fn reorder_in_place(t: &mut ComplexMatrix, u: &mut ComplexMatrix, order: &[usize]) {
    let n = order.len();
    // labels[pos] = original position of the eigenvalue now at `pos`
    let mut labels: Vec<usize> = (0..n).collect();
    for (target, &want) in order.iter().enumerate() {
        let mut cur = labels.iter().position(|&l| l == want).expect("validated permutation");
        while cur > target {
            swap_adjacent(t, u, cur - 1);
            labels.swap(cur - 1, cur);
            cur -= 1;
        }
    }
}

/// Stable sort of diagonal positions under the requested key.
pub(crate) fn sorted_positions(diag: &[Complex64], order: EigenOrder) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..diag.len()).collect();
    idx.sort_by(|&a, &b| order.compare(diag[a], diag[b]));
    idx
}

pub(crate) fn factorization(u: ComplexMatrix, t: ComplexMatrix) -> SchurFactorization {
    let order = t.diagonal().iter().copied().collect();
    SchurFactorization { u, t, order }
}

/// Eigenvector of the triangular factor for diagonal position `i`, returned in
/// the original coordinates and normalized to unit length.
pub(crate) fn eigenvector(f: &SchurFactorization, i: usize) -> crate::ComplexVector {
    let t = &f.t;
    let lambda = t[(i, i)];
    // pivot floor relative to the scale of T keeps one step's growth bounded
    let scale = t.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let smin = (f64::EPSILON * lambda.norm().max(scale)).max(f64::MIN_POSITIVE / f64::EPSILON);
    let mut y = vec![ZERO; i + 1];
    y[i] = Complex64::new(1.0, 0.0);
    for r in (0..i).rev() {
        let mut acc = ZERO;
        for c in r + 1..=i {
            acc += t[(r, c)] * y[c];
        }
        let mut d = t[(r, r)] - lambda;
        if d.norm() < smin {
            d = Complex64::new(smin, 0.0);
        }
        y[r] = -acc / d;
        let big = y[r].norm();
        if big > 1e100 {
            for v in y[r..].iter_mut() {
                *v /= big;
            }
        }
    }
    let n = t.nrows();
    let mut v = crate::ComplexVector::zeros(n);
    for (c, yc) in y.iter().enumerate() {
        if *yc != ZERO {
            v.axpy(*yc, &f.u.column(c), Complex64::new(1.0, 0.0));
        }
    }
    let nv = v.norm();
    if nv > 0.0 {
        v /= Complex64::new(nv, 0.0);
    }
    v
}

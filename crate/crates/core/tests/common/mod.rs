//! Exact rational arithmetic used as an independent reference for small
//! integer matrices.

#![allow(dead_code)]

use gstlab::graph::{normalize, AdjacencyMatrix};
use gstlab::gst::build_gst;
use gstlab::poly::{MatrixPolynomial, Polynomial};
use gstlab::{Complex64, ComplexMatrix};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

pub type Q = BigRational;
pub type QMatrix = Vec<Vec<Q>>;

pub fn q(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

pub fn from_ints(rows: &[Vec<i64>]) -> QMatrix {
    rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
}

pub fn to_complex(rows: &[Vec<i64>]) -> ComplexMatrix {
    let n = rows.len();
    ComplexMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j] as f64, 0.0))
}

pub fn identity(n: usize) -> QMatrix {
    (0..n).map(|i| (0..n).map(|j| q((i == j) as i64)).collect()).collect()
}

pub fn mul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| (0..m).map(|j| (0..b.len()).fold(Q::zero(), |acc, k| acc + &a[i][k] * &b[k][j])).collect())
        .collect()
}

fn add_scaled_identity(a: &mut QMatrix, c: &Q) {
    for (i, row) in a.iter_mut().enumerate() {
        row[i] += c;
    }
}

fn trace(a: &QMatrix) -> Q {
    (0..a.len()).fold(Q::zero(), |acc, i| acc + &a[i][i])
}

/// Coefficients of `det(xI − A)`, lowest degree first, by Faddeev–LeVerrier.
pub fn char_poly(a: &QMatrix) -> Vec<Q> {
    let n = a.len();
    let mut c = vec![Q::zero(); n + 1];
    c[n] = q(1);
    let mut m = vec![vec![Q::zero(); n]; n];
    for k in 1..=n {
        m = mul(a, &m);
        add_scaled_identity(&mut m, &c[n - k + 1]);
        c[n - k] = -trace(&mul(a, &m)) / q(k as i64);
    }
    c
}

/// `p(A)` by Horner's rule.
pub fn eval_matrix(p: &[Q], a: &QMatrix) -> QMatrix {
    let n = a.len();
    let mut acc = vec![vec![Q::zero(); n]; n];
    for c in p.iter().rev() {
        acc = mul(&acc, a);
        add_scaled_identity(&mut acc, c);
    }
    acc
}

pub fn is_zero(a: &QMatrix) -> bool {
    a.iter().flatten().all(Zero::is_zero)
}

/// Rank by fraction-exact Gaussian elimination.
pub fn rank(a: &QMatrix) -> usize {
    let mut m = a.clone();
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in r + 1..rows {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                for j in c..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    r
}

fn trim(p: &mut Vec<Q>) {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

/// Quotient and remainder of polynomial division, lowest degree first.
pub fn divide(a: &[Q], b: &[Q]) -> (Vec<Q>, Vec<Q>) {
    let mut b = b.to_vec();
    trim(&mut b);
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    if r.len() - 1 < db {
        return (vec![Q::zero()], r);
    }
    let mut quot = vec![Q::zero(); r.len() - db];
    for k in (0..quot.len()).rev() {
        let f = &r[k + db] / &b[db];
        for (j, bj) in b.iter().enumerate() {
            let t = &f * bj;
            r[k + j] -= t;
        }
        quot[k] = f;
    }
    r.truncate(db.max(1));
    trim(&mut r);
    (quot, r)
}

pub fn gcd(a: &[Q], b: &[Q]) -> Vec<Q> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    trim(&mut a);
    trim(&mut b);
    while !(b.len() == 1 && b[0].is_zero()) {
        let (_, r) = divide(&a, &b);
        a = b;
        b = r;
    }
    a
}

pub fn derivative(p: &[Q]) -> Vec<Q> {
    if p.len() <= 1 {
        return vec![Q::zero()];
    }
    p.iter().enumerate().skip(1).map(|(k, c)| c * q(k as i64)).collect()
}

/// `A` is diagonalizable over ℂ exactly when the square-free part of its
/// characteristic polynomial annihilates it.
pub fn is_defective(a: &QMatrix) -> bool {
    let chi = char_poly(a);
    let (radical, rem) = divide(&chi, &gcd(&chi, &derivative(&chi)));
    assert!(rem.iter().all(Zero::is_zero));
    !is_zero(&eval_matrix(&radical, a))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().expect("finite rational")
}

/// Every 0/1 adjacency matrix without self loops on `n` nodes.
pub fn all_digraphs(n: usize) -> Vec<Vec<Vec<i64>>> {
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    (0u32..1 << slots.len())
        .map(|mask| {
            let mut m = vec![vec![0; n]; n];
            for (b, &(i, j)) in slots.iter().enumerate() {
                m[i][j] = ((mask >> b) & 1) as i64;
            }
            m
        })
        .collect()
}

fn adjacency_of(m: &[Vec<i64>]) -> AdjacencyMatrix {
    let n = m.len();
    AdjacencyMatrix::new(DMatrix::from_fn(n, n, |i, j| m[i][j] as f64))
}

/// `det(xI − A/ρ)` from the exact polynomial of `A`.
fn scaled_char_poly(m: &[Vec<i64>], rho: f64) -> Vec<f64> {
    let chi = char_poly(&from_ints(m));
    let n = m.len() as i32;
    chi.iter().enumerate().map(|(k, c)| to_f64(c) * rho.powi(k as i32 - n)).collect()
}

/// The group annihilators of a GST build multiply out to the characteristic
/// polynomial and each one vanishes on its block. `Ok(false)` when no
/// transform exists for this matrix and group count.
pub fn check_annihilators(m: &[Vec<i64>], groups: usize) -> Result<bool, String> {
    let Ok(op) = normalize(&adjacency_of(m)) else { return Ok(false) };
    let Ok(basis) = build_gst(&op.to_complex(), groups) else { return Ok(false) };
    let a = op.to_complex();
    let mut roots: Vec<Complex64> = Vec::new();
    for (k, p) in basis.annihilators().iter().enumerate() {
        let bound: f64 = basis.group_eigenvalues(k).iter().map(|z| 1.0 + z.norm()).product();
        let block = basis.block(k);
        for c in 0..block.ncols() {
            let u = block.column(c).into_owned();
            let r = p.apply(&a, &u).norm();
            if r > 1e-7 * bound {
                return Err(format!("{m:?} group {k}: residual {r:e}"));
            }
        }
        roots.extend_from_slice(p.roots());
    }
    let product = Polynomial::from_roots(&roots);
    let exact = scaled_char_poly(m, op.spectral_radius());
    let scale: f64 = basis.partition().eigenvalues().iter().map(|z| 1.0 + z.norm()).product();
    for (c, e) in exact.iter().zip(product.coeffs()) {
        if (e - c).norm() > 1e-7 * scale {
            return Err(format!("{m:?}: coefficient {e} vs exact {c}"));
        }
    }
    Ok(true)
}

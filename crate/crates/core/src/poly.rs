//! Polynomials in a matrix argument.
//!
//! Three representations are used: expanded monomial coefficients, a product
//! of linear factors, and Newton form over interpolation nodes. All of them
//! are applied to vectors through repeated matrix-vector products; `P(A)` is
//! never formed densely.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{ComplexMatrix, ComplexVector};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Something that can compute `P(A)·x`.
pub trait MatrixPolynomial {
    fn apply(&self, a: &ComplexMatrix, x: &ComplexVector) -> ComplexVector;

    /// Applies the polynomial to every column of `x`.
    fn apply_columns(&self, a: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(x.nrows(), x.ncols());
        for j in 0..x.ncols() {
            let col: ComplexVector = x.column(j).into_owned();
            out.set_column(j, &self.apply(a, &col));
        }
        out
    }
}

/// `y = P(A)·x`.
pub fn apply_filter<P: MatrixPolynomial + ?Sized>(a: &ComplexMatrix, p: &P, x: &ComplexVector) -> ComplexVector {
    p.apply(a, x)
}

/// Polynomial with coefficients in ascending powers: `c[0] + c[1] x + …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// Monic polynomial `∏ (x − r)`.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut c = vec![ONE];
        for &r in roots {
            let mut next = vec![ZERO; c.len() + 1];
            for (k, &ck) in c.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= r * ck;
            }
            c = next;
        }
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Degree, ignoring nothing: trailing zero coefficients still count.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::new(vec![ZERO]);
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Dense `P(A)` by Horner's rule. Only meant for small matrices and tests.
    pub fn eval_matrix(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let n = a.nrows();
        let mut acc = ComplexMatrix::zeros(n, n);
        for &c in self.coeffs.iter().rev() {
            acc = &acc * a;
            for i in 0..n {
                acc[(i, i)] += c;
            }
        }
        acc
    }
}

impl MatrixPolynomial for Polynomial {
    fn apply(&self, a: &ComplexMatrix, x: &ComplexVector) -> ComplexVector {
        let mut coeffs = self.coeffs.iter().rev();
        let Some(&lead) = coeffs.next() else {
            return ComplexVector::zeros(x.len());
        };
        let mut y = x * lead;
        for &c in coeffs {
            y = a * &y;
            y.axpy(c, x, ONE);
        }
        y
    }
}

/// Monic polynomial kept as its list of roots, `∏ (x − r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactoredPolynomial {
    roots: Vec<Complex64>,
}

impl FactoredPolynomial {
    pub fn new(roots: Vec<Complex64>) -> Self {
        Self { roots }
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn expand(&self) -> Polynomial {
        Polynomial::from_roots(&self.roots)
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.roots.iter().fold(ONE, |acc, &r| acc * (x - r))
    }
}

impl MatrixPolynomial for FactoredPolynomial {
    fn apply(&self, a: &ComplexMatrix, x: &ComplexVector) -> ComplexVector {
        let mut y = x.clone();
        for &r in &self.roots {
            let ay = a * &y;
            y = ay - y * r;
        }
        y
    }
}

/// Newton form `c₀ + (x − z₀)(c₁ + (x − z₁)(c₂ + …))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonPolynomial {
    nodes: Vec<Complex64>,
    coeffs: Vec<Complex64>,
}

impl NewtonPolynomial {
    /// `coeffs.len()` must equal `nodes.len()`; the last node is unused.
    pub fn new(nodes: Vec<Complex64>, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(nodes.len(), coeffs.len(), "one coefficient per node");
        Self { nodes, coeffs }
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        let k = self.coeffs.len();
        if k == 0 {
            return ZERO;
        }
        let mut acc = self.coeffs[k - 1];
        for i in (0..k - 1).rev() {
            acc = acc * (x - self.nodes[i]) + self.coeffs[i];
        }
        acc
    }

    /// Converts to monomial coefficients. High degrees lose accuracy here;
    /// `apply` works from the Newton form directly.
    pub fn to_monomial(&self) -> Polynomial {
        let k = self.coeffs.len();
        if k == 0 {
            return Polynomial::new(vec![ZERO]);
        }
        let mut acc = vec![self.coeffs[k - 1]];
        for i in (0..k - 1).rev() {
            let z = self.nodes[i];
            let mut next = vec![ZERO; acc.len() + 1];
            for (p, &c) in acc.iter().enumerate() {
                next[p + 1] += c;
                next[p] -= z * c;
            }
            next[0] += self.coeffs[i];
            acc = next;
        }
        Polynomial::new(acc)
    }
}

impl MatrixPolynomial for NewtonPolynomial {
    fn apply(&self, a: &ComplexMatrix, x: &ComplexVector) -> ComplexVector {
        let k = self.coeffs.len();
        if k == 0 {
            return ComplexVector::zeros(x.len());
        }
        let mut y = x * self.coeffs[k - 1];
        for i in (0..k - 1).rev() {
            let ay = a * &y;
            y = ay - y * self.nodes[i];
            y.axpy(self.coeffs[i], x, ONE);
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn identity_polynomial_returns_ax() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(5, &mut rng);
        let x = ComplexVector::from_fn(5, |i, _| c(i as f64 + 1.0));
        let p = Polynomial::from_real(&[0.0, 1.0]);
        assert!((apply_filter(&a, &p, &x) - &a * &x).norm() < 1e-14);
        let one = Polynomial::from_real(&[1.0]);
        assert!((apply_filter(&a, &one, &x) - &x).norm() == 0.0);
    }

    #[test]
    fn horner_matches_dense_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_matrix(8, &mut rng);
        let p = Polynomial::new((0..4).map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect());
        let x = ComplexVector::from_fn(8, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
        let dense = p.eval_matrix(&a) * &x;
        let fast = p.apply(&a, &x);
        assert!((dense - &fast).norm() <= 1e-10 * fast.norm().max(1.0));
    }

    #[test]
    fn representations_agree() {
        let roots = [c(0.5), c(-0.25), Complex64::new(0.1, 0.3)];
        let f = FactoredPolynomial::new(roots.to_vec());
        let e = f.expand();
        assert_eq!(e.degree(), 3);
        for x in [c(0.0), c(1.3), Complex64::new(-0.4, 0.7)] {
            assert!((f.eval(x) - e.eval(x)).norm() < 1e-14);
        }
        let newton = NewtonPolynomial::new(vec![c(0.0), c(1.0), c(2.0)], vec![c(1.0), c(2.0), c(3.0)]);
        let mono = newton.to_monomial();
        // 1 + 2x + 3x(x-1) = 1 - x + 3x^2
        assert!((mono.coeffs()[0] - c(1.0)).norm() < 1e-15);
        assert!((mono.coeffs()[1] - c(-1.0)).norm() < 1e-15);
        assert!((mono.coeffs()[2] - c(3.0)).norm() < 1e-15);
    }

    #[test]
    fn derivative_of_cubic() {
        let p = Polynomial::from_real(&[1.0, 2.0, 0.0, 4.0]);
        let d = p.derivative();
        assert_eq!(d.coeffs(), &[c(2.0), c(0.0), c(12.0)]);
    }
}

mod common;

use common::*;
use gstlab::spectral::{self, numerical_rank, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_int_matrix(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|_| (0..n).map(|_| rng.gen_range(-2..=2)).collect()).collect()
}

#[test]
fn oracle_reproduces_known_polynomials() {
    // Companion matrix of x³ − 2x² − 5x + 6 = (x − 1)(x + 2)(x − 3).
    let a = from_ints(&[vec![0, 0, -6], vec![1, 0, 5], vec![0, 1, 2]]);
    assert_eq!(char_poly(&a), vec![q(6), q(-5), q(-2), q(1)]);
    assert!(!is_defective(&a));

    let jordan = from_ints(&[vec![2, 1, 0], vec![0, 2, 0], vec![0, 0, 3]]);
    assert!(is_defective(&jordan));
    assert_eq!(rank(&jordan), 3);
    assert!(!is_defective(&identity(4)));
    assert_eq!(rank(&from_ints(&[vec![1, 2], vec![2, 4]])), 1);
}

#[test]
fn cayley_hamilton_holds_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=5 {
        for _ in 0..20 {
            let a = from_ints(&random_int_matrix(&mut rng, n));
            assert!(is_zero(&eval_matrix(&char_poly(&a), &a)));
        }
    }
}

#[test]
fn numerical_rank_matches_exact_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in 1..=5 {
        for _ in 0..40 {
            let mut m = random_int_matrix(&mut rng, n);
            if n > 1 && rng.gen_bool(0.5) {
                let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
                m[i] = m[j].iter().map(|x| 2 * x).collect();
            }
            assert_eq!(numerical_rank(&to_complex(&m), 1e-8), rank(&from_ints(&m)), "{m:?}");
        }
    }
}

#[test]
fn defectiveness_matches_exact_oracle_on_small_digraphs() {
    let tol = Tolerances::default();
    let mut checked = 0;
    for n in 1..=4 {
        for m in all_digraphs(n) {
            let expected = is_defective(&from_ints(&m));
            let got = spectral::is_defective(&to_complex(&m), tol).unwrap().is_defective;
            assert_eq!(got, expected, "{m:?}");
            checked += 1;
        }
    }
    assert_eq!(checked, 1 + 4 + 64 + 4096);
}

#[test]
fn defectiveness_matches_exact_oracle_on_integer_matrices() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=5 {
        for _ in 0..150 {
            let m = random_int_matrix(&mut rng, n);
            let expected = is_defective(&from_ints(&m));
            let got = spectral::is_defective(&to_complex(&m), tol).unwrap().is_defective;
            assert_eq!(got, expected, "{m:?}");
        }
    }
}

#[test]
fn computed_eigenvalues_are_roots_of_exact_polynomial() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in 1..=5 {
        for _ in 0..40 {
            let m = random_int_matrix(&mut rng, n);
            let chi: Vec<f64> = char_poly(&from_ints(&m)).iter().map(to_f64).collect();
            let spectrum = spectral::eigenvalues(&to_complex(&m)).unwrap();
            let expanded = gstlab::poly::Polynomial::from_roots(spectrum.values());
            for (c, e) in chi.iter().zip(expanded.coeffs()) {
                assert!((e - c).norm() <= 1e-8 * (1.0 + c.abs()) * 10f64.powi(n as i32), "{m:?}");
            }
        }
    }
}

#[test]
fn annihilators_match_exact_characteristic_polynomial() {
    let mut built = 0;
    for n in 2..=4 {
        for m in all_digraphs(n) {
            for groups in 2..=n.min(3) {
                built += check_annihilators(&m, groups).unwrap() as usize;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..300 {
        let m: Vec<Vec<i64>> = (0..5).map(|i| (0..5).map(|j| (i != j && rng.gen_bool(0.4)) as i64).collect()).collect();
        for groups in 2..=3 {
            built += check_annihilators(&m, groups).unwrap() as usize;
        }
    }
    assert!(built > 500, "only {built} feasible builds");
}

/// `S J S⁻¹` for a random unimodular integer `S`, so the result stays integral.
fn conjugated_jordan(rng: &mut ChaCha8Rng, blocks: &[(i64, usize)]) -> Vec<Vec<i64>> {
    let n: usize = blocks.iter().map(|b| b.1).sum();
    let mut j = vec![vec![0i64; n]; n];
    let mut at = 0;
    for &(lambda, size) in blocks {
        for k in 0..size {
            j[at + k][at + k] = lambda;
            if k + 1 < size {
                j[at + k][at + k + 1] = 1;
            }
        }
        at += size;
    }
    // Row op r_a += c r_b on the left is undone by column op c_b −= c c_a on the right.
    for _ in 0..3 {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a == b {
            continue;
        }
        let c = rng.gen_range(-1..=1);
        for col in 0..n {
            let t = j[b][col];
            j[a][col] += c * t;
        }
        for row in j.iter_mut() {
            let t = row[a];
            row[b] -= c * t;
        }
    }
    j
}

#[test]
fn hidden_jordan_blocks_are_found() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let shapes: [&[(i64, usize)]; 6] = [
        &[(-1, 3)],
        &[(2, 2), (-1, 1)],
        &[(1, 3), (1, 1)],
        &[(0, 2), (3, 2)],
        &[(-2, 4)],
        &[(1, 1), (1, 1), (2, 1)],
    ];
    for shape in shapes {
        for _ in 0..30 {
            let m = conjugated_jordan(&mut rng, shape);
            let expected = is_defective(&from_ints(&m));
            assert_eq!(expected, shape.iter().any(|b| b.1 > 1));
            let got = spectral::is_defective(&to_complex(&m), tol).unwrap().is_defective;
            assert_eq!(got, expected, "{m:?}");
        }
    }
}

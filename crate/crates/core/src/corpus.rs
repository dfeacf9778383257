//! Seeded random test corpora: GL(d, Z) matrices as products of
//! elementary row operations (det ±1 by construction), unipotent
//! matrices as conjugated unitriangular ones, and small random
//! polynomials for the factorization cross-check.

use crate::matrix::IntMatrix;
use crate::poly::IntPoly;
use num_bigint::BigInt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_CORPUS_SEED: u64 = 0xc0_5e11;

/// A random element of GL(d, Z): 10–30 elementary row operations
/// (add ±row, swap, negate) applied to the identity.
pub fn random_glz(rng: &mut ChaCha8Rng, d: usize) -> IntMatrix {
    let mut rows: Vec<Vec<BigInt>> = IntMatrix::identity(d).rows();
    let ops = rng.gen_range(10..=30);
    for _ in 0..ops {
        match rng.gen_range(0..4u8) {
            0 | 1 => {
                // add ±1 · row j to row i
                let i = rng.gen_range(0..d);
                let mut j = rng.gen_range(0..d);
                if d > 1 {
                    while j == i {
                        j = rng.gen_range(0..d);
                    }
                }
                if i != j {
                    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
                    let source = rows[j].clone();
                    for (a, b) in rows[i].iter_mut().zip(source) {
                        *a += sign * b;
                    }
                }
            }
            2 => {
                let i = rng.gen_range(0..d);
                let j = rng.gen_range(0..d);
                rows.swap(i, j);
            }
            _ => {
                let i = rng.gen_range(0..d);
                for a in rows[i].iter_mut() {
                    *a = -std::mem::take(a);
                }
            }
        }
    }
    from_rows_bigint(d, rows)
}

/// A random unipotent element of GL(d, Z): an upper unitriangular matrix
/// with small entries, conjugated by a random GL(d, Z) element.
pub fn random_unipotent(rng: &mut ChaCha8Rng, d: usize) -> IntMatrix {
    let mut rows: Vec<Vec<BigInt>> = IntMatrix::identity(d).rows();
    for i in 0..d {
        for j in (i + 1)..d {
            rows[i][j] = BigInt::from(rng.gen_range(-2i64..=2));
        }
    }
    let u = from_rows_bigint(d, rows);
    let v = random_glz(rng, d);
    let v_inv = v.inverse_unimodular().expect("v is unimodular");
    v.mul(&u).mul(&v_inv)
}

/// A random polynomial of degree ≤ max_deg with |coefficients| ≤ max_coeff,
/// nonzero leading coefficient.
pub fn random_poly(rng: &mut ChaCha8Rng, max_deg: usize, max_coeff: i64) -> IntPoly {
    let deg = rng.gen_range(0..=max_deg);
    let mut coeffs: Vec<BigInt> = (0..=deg)
        .map(|_| BigInt::from(rng.gen_range(-max_coeff..=max_coeff)))
        .collect();
    while coeffs[deg] == BigInt::from(0) {
        coeffs[deg] = BigInt::from(rng.gen_range(-max_coeff..=max_coeff));
    }
    IntPoly::new(coeffs)
}

/// Deterministic corpus of `count` GL(d, Z) matrices.
pub fn glz_corpus(seed: u64, count: usize, d: usize) -> Vec<IntMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_glz(&mut rng, d)).collect()
}

/// Deterministic corpus of `count` unipotent matrices.
pub fn unipotent_corpus(seed: u64, count: usize, d: usize) -> Vec<IntMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_unipotent(&mut rng, d)).collect()
}

fn from_rows_bigint(d: usize, rows: Vec<Vec<BigInt>>) -> IntMatrix {
    IntMatrix::new(d, rows.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Signed};

    #[test]
    fn glz_matrices_are_unimodular() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 2..=5 {
            for _ in 0..20 {
                let m = random_glz(&mut rng, d);
                assert!(m.det().abs().is_one());
            }
        }
    }

    #[test]
    fn unipotent_matrices_are_unipotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for d in 2..=4 {
            for _ in 0..10 {
                let m = random_unipotent(&mut rng, d);
                assert!(m.is_unipotent().unwrap());
            }
        }
    }

    #[test]
    fn corpus_is_deterministic() {
        assert_eq!(glz_corpus(42, 5, 3), glz_corpus(42, 5, 3));
        assert_ne!(glz_corpus(42, 5, 3), glz_corpus(43, 5, 3));
    }
}

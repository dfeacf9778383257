//! Irreducible factorization over Z: squarefree decomposition, mod-p
//! factoring at a good prime, Hensel lifting to a Mignotte-bound modulus,
//! and exhaustive factor recombination.

use crate::modp::{self, ModPoly};
use crate::poly::IntPoly;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Default seed for the equal-degree-splitting RNG; reproducible test logs.
pub const DEFAULT_FACTOR_SEED: u64 = 0x5eed_cafe;

/// A complete irreducible factorization over Z.
///
/// `unit * content * Π factor_i^mult_i` reconstructs the input exactly;
/// factors are primitive with positive leading coefficient, pairwise
/// non-associate, sorted by degree then coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub unit: BigInt,
    pub content: BigInt,
    pub factors: Vec<(IntPoly, u32)>,
}

impl Factorization {
    pub fn reconstruct(&self) -> IntPoly {
        let mut acc = IntPoly::constant(&self.unit * &self.content);
        for (f, m) in &self.factors {
            acc = acc.mul(&f.pow(*m));
        }
        acc
    }

    pub fn distinct_factors(&self) -> impl Iterator<Item = &IntPoly> {
        self.factors.iter().map(|(f, _)| f)
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        if -BigInt::one() == self.unit {
            write!(f, "-")?;
        }
        if !self.content.is_one() {
            write!(f, "{}", self.content)?;
            wrote = true;
        }
        for (p, m) in &self.factors {
            write!(f, "({})", p)?;
            if *m > 1 {
                write!(f, "^{}", m)?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// Factor a nonzero integer polynomial into irreducibles over Z, with the
/// default RNG seed.
pub fn factor_over_z(p: &IntPoly) -> Result<Factorization> {
    factor_over_z_seeded(p, DEFAULT_FACTOR_SEED)
}

pub fn factor_over_z_seeded(p: &IntPoly, seed: u64) -> Result<Factorization> {
    if p.is_zero() {
        return Err(Error::InvalidInput("cannot factor the zero polynomial".into()));
    }
    let (signed_content, pp) = p.primitive_part();
    let unit = if signed_content.is_negative() {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    let content = signed_content.abs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factors: Vec<(IntPoly, u32)> = Vec::new();
    if !pp.is_constant() {
        for (sf, mult) in squarefree_decomposition(&pp) {
            for irr in factor_squarefree_primitive(&sf, &mut rng) {
                factors.push((irr, mult));
            }
        }
    }
    factors.sort_by(|a, b| {
        a.0.degree()
            .cmp(&b.0.degree())
            .then_with(|| a.0.coeffs().cmp(b.0.coeffs()))
    });
    Ok(Factorization {
        unit,
        content,
        factors,
    })
}

/// True iff `p` is irreducible over Z (primitive sense: content ignored).
pub fn is_irreducible(p: &IntPoly) -> Result<bool> {
    let f = factor_over_z(p)?;
    Ok(f.factors.len() == 1 && f.factors[0].1 == 1)
}

/// Yun's algorithm: returns (squarefree primitive factor, multiplicity)
/// pairs, product over pairs of factor^mult = input (primitive, lc > 0).
fn squarefree_decomposition(f: &IntPoly) -> Vec<(IntPoly, u32)> {
    let mut out = Vec::new();
    let d = f.derivative();
    let u = f.gcd(&d);
    let mut v = f.div_exact(&u).expect("gcd divides");
    let mut w = d.div_exact(&u).expect("gcd divides");
    let mut i = 1u32;
    while !v.is_constant() {
        let z = w.sub(&v.derivative());
        let h = v.gcd(&z);
        if !h.is_constant() {
            out.push((h.clone(), i));
        }
        v = v.div_exact(&h).expect("gcd divides");
        w = z.div_exact(&h).expect("gcd divides");
        i += 1;
    }
    out
}

fn to_modpoly(f: &IntPoly, p: u64) -> ModPoly {
    let pb = BigInt::from(p);
    ModPoly::new(
        p,
        f.coeffs()
            .iter()
            .map(|c| (((c % &pb) + &pb) % &pb).try_into().unwrap())
            .collect(),
    )
}

/// Smallest prime not dividing the leading coefficient and keeping the
/// reduction squarefree. Deterministic retry order 2, 3, 5, ...
fn good_prime(f: &IntPoly) -> u64 {
    let lc = f.leading_coeff();
    let mut p = 2u64;
    loop {
        if crate::primes::is_prime_u64(p)
            && !(&lc % BigInt::from(p)).is_zero()
            && modp::is_squarefree(&to_modpoly(f, p))
        {
            return p;
        }
        p += 1;
        assert!(p < 1_000_000, "no good prime found; input not squarefree?");
    }
}

fn factor_squarefree_primitive(f: &IntPoly, rng: &mut ChaCha8Rng) -> Vec<IntPoly> {
    if f.degree() == 1 {
        return vec![f.clone()];
    }
    let p = good_prime(f);
    let modular = modp::factor_squarefree(&to_modpoly(f, p), rng);
    if modular.len() == 1 {
        return vec![f.clone()];
    }
    // lift to p^l with p^l > 2 * B, B a Mignotte-style bound
    let n = f.degree() as u32;
    let bound: BigInt =
        BigInt::from(n + 1) * (BigInt::one() << n) * f.height() * f.leading_coeff().abs();
    let mut modulus = BigInt::from(p);
    let mut l = 1u32;
    let target = BigInt::from(2) * &bound;
    while modulus <= target {
        modulus *= BigInt::from(p);
        l += 1;
    }
    let lifted = multifactor_hensel(f, &modular, p, l);
    recombine(f, lifted, &BigInt::from(p).pow(l))
}

// ---- arithmetic on coefficient vectors mod m ----

fn reduce_mod(f: &IntPoly, m: &BigInt) -> IntPoly {
    IntPoly::new(f.coeffs().iter().map(|c| c.mod_floor(m)).collect())
}

fn symmetric_mod(f: &IntPoly, m: &BigInt) -> IntPoly {
    let half = m / 2;
    IntPoly::new(
        f.coeffs()
            .iter()
            .map(|c| {
                let r = c.mod_floor(m);
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

fn mul_mod(a: &IntPoly, b: &IntPoly, m: &BigInt) -> IntPoly {
    reduce_mod(&a.mul(b), m)
}

/// Division with remainder by a monic polynomial, mod m.
fn divrem_monic_mod(a: &IntPoly, d: &IntPoly, m: &BigInt) -> (IntPoly, IntPoly) {
    debug_assert!(d.leading_coeff().is_one());
    if a.is_zero() || a.degree() < d.degree() {
        return (IntPoly::zero(), reduce_mod(a, m));
    }
    let mut rem: Vec<BigInt> = a.coeffs().to_vec();
    let dq = a.degree() - d.degree();
    let mut quot = vec![BigInt::zero(); dq + 1];
    for k in (0..=dq).rev() {
        let top = rem[k + d.degree()].mod_floor(m);
        if top.is_zero() {
            rem[k + d.degree()] = BigInt::zero();
            continue;
        }
        quot[k] = top.clone();
        for (j, b) in d.coeffs().iter().enumerate() {
            let idx = k + j;
            rem[idx] = (&rem[idx] - &top * b).mod_floor(m);
        }
    }
    (
        IntPoly::new(quot),
        reduce_mod(&IntPoly::new(rem), m),
    )
}

fn inv_mod_int(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    assert!(e.gcd.is_one(), "not invertible");
    e.x.mod_floor(m)
}

/// One quadratic Hensel step: from a factorization mod m to mod m².
/// Preconditions: f ≡ g·h mod m, s·g + t·h ≡ 1 mod m, h monic,
/// deg s < deg h, deg t < deg g.
#[allow(clippy::too_many_arguments)]
fn hensel_step(
    f: &IntPoly,
    g: &IntPoly,
    h: &IntPoly,
    s: &IntPoly,
    t: &IntPoly,
    m: &BigInt,
) -> (IntPoly, IntPoly, IntPoly, IntPoly) {
    let m2 = m * m;
    let e = reduce_mod(&f.sub(&g.mul(h)), &m2);
    let (q, r) = divrem_monic_mod(&mul_mod(s, &e, &m2), h, &m2);
    let g1 = reduce_mod(&g.add(&t.mul(&e)).add(&q.mul(g)), &m2);
    let h1 = reduce_mod(&h.add(&r), &m2);
    let b = reduce_mod(&s.mul(&g1).add(&t.mul(&h1)).sub(&IntPoly::one()), &m2);
    let (c, d) = divrem_monic_mod(&mul_mod(s, &b, &m2), &h1, &m2);
    let s1 = reduce_mod(&s.sub(&d), &m2);
    let t1 = reduce_mod(&t.sub(&t.mul(&b)).sub(&c.mul(&g1)), &m2);
    (g1, h1, s1, t1)
}

fn modpoly_to_int(f: &ModPoly) -> IntPoly {
    IntPoly::new(f.coeffs().iter().map(|&c| BigInt::from(c)).collect())
}

/// Lift `f ≡ lc(f)·Π facs mod p` (facs monic, pairwise coprime mod p) to a
/// monic factorization mod p^l; returns the lifted factors.
fn multifactor_hensel(f: &IntPoly, facs: &[ModPoly], p: u64, l: u32) -> Vec<IntPoly> {
    let pl = BigInt::from(p).pow(l);
    if facs.len() == 1 {
        let ilc = inv_mod_int(&f.leading_coeff(), &pl);
        return vec![reduce_mod(&f.scale(&ilc), &pl)];
    }
    let k = (facs.len() + 1) / 2;
    let (left, right) = facs.split_at(k);
    let g0m = left
        .iter()
        .fold(ModPoly::one(p), |a, b| a.mul(b))
        .scale({
            let lp = f.leading_coeff().mod_floor(&BigInt::from(p));
            u64::try_from(lp).unwrap()
        });
    let h0m = right.iter().fold(ModPoly::one(p), |a, b| a.mul(b));
    let (gcd, s0m, t0m) = modp::ext_gcd(&g0m, &h0m);
    assert!(gcd.is_one(), "modular factors not coprime");
    let mut g = modpoly_to_int(&g0m);
    let mut h = modpoly_to_int(&h0m);
    let mut s = modpoly_to_int(&s0m);
    let mut t = modpoly_to_int(&t0m);
    let mut m = BigInt::from(p);
    while m < pl {
        let (g1, h1, s1, t1) = hensel_step(f, &g, &h, &s, &t, &m);
        g = g1;
        h = h1;
        s = s1;
        t = t1;
        m = &m * &m;
    }
    g = reduce_mod(&g, &pl);
    h = reduce_mod(&h, &pl);
    let mut out = multifactor_hensel(&g, left, p, l);
    out.extend(multifactor_hensel(&h, right, p, l));
    out
}

/// Exhaustive subset recombination of lifted modular factors; `f` squarefree
/// primitive with positive leading coefficient.
fn recombine(f: &IntPoly, lifted: Vec<IntPoly>, modulus: &BigInt) -> Vec<IntPoly> {
    let mut remaining = f.clone();
    let mut pool = lifted;
    let mut out = Vec::new();
    let mut size = 1usize;
    'outer: while 2 * size <= pool.len() {
        let b = remaining.leading_coeff();
        let mut indices: Vec<usize> = (0..size).collect();
        loop {
            // candidate from the current index subset
            let mut prod = IntPoly::constant(b.clone());
            for &i in &indices {
                prod = mul_mod(&prod, &pool[i], modulus);
            }
            let cand = symmetric_mod(&prod, modulus);
            if !cand.is_constant() {
                let (_, g) = cand.primitive_part();
                if let Some(q) = remaining.div_exact(&g) {
                    out.push(g);
                    remaining = q;
                    for &i in indices.iter().rev() {
                        pool.remove(i);
                    }
                    continue 'outer;
                }
            }
            // next combination
            let n = pool.len();
            let mut i = size;
            loop {
                if i == 0 {
                    size += 1;
                    continue 'outer;
                }
                i -= 1;
                if indices[i] != i + n - size {
                    indices[i] += 1;
                    for j in i + 1..size {
                        indices[j] = indices[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }
    if !remaining.is_constant() {
        out.push(remaining.primitive_part().1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    fn factor(c: &[i64]) -> Factorization {
        factor_over_z(&p(c)).unwrap()
    }

    #[test]
    fn rejects_zero() {
        assert!(factor_over_z(&IntPoly::zero()).is_err());
    }

    #[test]
    fn t4_minus_1() {
        let f = factor(&[-1, 0, 0, 0, 1]);
        assert_eq!(
            f.factors,
            vec![
                (p(&[-1, 1]), 1),
                (p(&[1, 1]), 1),
                (p(&[1, 0, 1]), 1),
            ]
        );
        assert_eq!(f.reconstruct(), p(&[-1, 0, 0, 0, 1]));
    }

    #[test]
    fn irreducible_quadratic() {
        // t^2 - 6t - 1: discriminant 40 is not a square
        let f = factor(&[-1, -6, 1]);
        assert_eq!(f.factors, vec![(p(&[-1, -6, 1]), 1)]);
    }

    #[test]
    fn repeated_factor() {
        // (t-1)^2 (t^2 - t - 1)
        let input = p(&[-1, 1]).pow(2).mul(&p(&[-1, -1, 1]));
        let f = factor_over_z(&input).unwrap();
        assert_eq!(f.factors, vec![(p(&[-1, 1]), 2), (p(&[-1, -1, 1]), 1)]);
        assert_eq!(f.reconstruct(), input);
    }

    #[test]
    fn content_and_sign() {
        // -6(t-1)(t+1)
        let input = p(&[6, 0, -6]);
        let f = factor_over_z(&input).unwrap();
        assert_eq!(f.unit, BigInt::from(-1));
        assert_eq!(f.content, BigInt::from(6));
        assert_eq!(f.factors, vec![(p(&[-1, 1]), 1), (p(&[1, 1]), 1)]);
        assert_eq!(f.reconstruct(), input);
    }

    #[test]
    fn constant_input() {
        let f = factor(&[-12]);
        assert_eq!(f.unit, BigInt::from(-1));
        assert_eq!(f.content, BigInt::from(12));
        assert!(f.factors.is_empty());
    }

    #[test]
    fn non_monic_with_recombination() {
        // (2t+1)(3t+2)(t^2+t+7)
        let input = p(&[1, 2]).mul(&p(&[2, 3])).mul(&p(&[7, 1, 1]));
        let f = factor_over_z(&input).unwrap();
        assert_eq!(f.factors.len(), 3);
        assert_eq!(f.reconstruct(), input);
    }

    #[test]
    fn swinnerton_dyer_like() {
        // t^4 - 10t^2 + 1 is irreducible over Z but splits mod every prime
        let f = factor(&[1, 0, -10, 0, 1]);
        assert_eq!(f.factors, vec![(p(&[1, 0, -10, 0, 1]), 1)]);
    }

    #[test]
    fn cyclotomic_products() {
        // t^6 - 1 = (t-1)(t+1)(t^2+t+1)(t^2-t+1)
        let f = factor(&[-1, 0, 0, 0, 0, 0, 1]);
        assert_eq!(f.factors.len(), 4);
        assert_eq!(f.reconstruct(), p(&[-1, 0, 0, 0, 0, 0, 1]));
    }

    #[test]
    fn determinism() {
        let input = p(&[-3, 5, -7, 2, 1, 9, 4]);
        let a = factor_over_z(&input).unwrap();
        let b = factor_over_z(&input).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn is_irreducible_examples() {
        assert!(is_irreducible(&p(&[-1, -6, 1])).unwrap());
        assert!(!is_irreducible(&p(&[-1, 0, 1])).unwrap());
    }
}

//! The group G = Z ⋉_φ Z^d itself: element arithmetic with the law
//! (i,x)·(j,y) = (i+j, x + φ^i(y)), the subgroups G_{k,n} = kZ × nA,
//! finite congruence quotients, and the constructive order-separation
//! witness (for any g ≠ e and m ≥ 1, a finite quotient where m divides
//! the order of the image of g).

use crate::lattice::{omega_power, Lattice};
use crate::matrix::IntMatrix;
use crate::primes::{factor_integer, PrimeSet};
use crate::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// An element (i, x) of Z ⋉_φ Z^d.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MTElement {
    pub i: BigInt,
    pub x: Vec<BigInt>,
}

impl MTElement {
    pub fn from_i64(i: i64, x: &[i64]) -> Self {
        MTElement {
            i: BigInt::from(i),
            x: x.iter().map(|&v| BigInt::from(v)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.i.is_zero() && self.x.iter().all(|v| v.is_zero())
    }
}

impl fmt::Display for MTElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.i)?;
        for (j, v) in self.x.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, " {}", v)?;
        }
        write!(f, ")")
    }
}

/// The mapping torus Z ⋉_φ Z^d with the inverse of φ cached exactly.
#[derive(Debug, Clone)]
pub struct MTGroup {
    phi: IntMatrix,
    phi_inv: IntMatrix,
}

impl MTGroup {
    pub fn new(phi: IntMatrix) -> Result<Self> {
        let phi_inv = phi.inverse_unimodular()?;
        debug_assert_eq!(phi.mul(&phi_inv), IntMatrix::identity(phi.dim()));
        Ok(MTGroup { phi, phi_inv })
    }

    pub fn dim(&self) -> usize {
        self.phi.dim()
    }

    pub fn phi(&self) -> &IntMatrix {
        &self.phi
    }

    pub fn identity(&self) -> MTElement {
        MTElement {
            i: BigInt::zero(),
            x: vec![BigInt::zero(); self.dim()],
        }
    }

    pub fn element(&self, i: BigInt, x: Vec<BigInt>) -> Result<MTElement> {
        if x.len() != self.dim() {
            return Err(Error::InvalidInput(format!(
                "element has {} A-coordinates, group has d = {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(MTElement { i, x })
    }

    /// φ^i(v) for any sign of i, via the cached exact inverse.
    pub fn twist(&self, i: &BigInt, v: &[BigInt]) -> Vec<BigInt> {
        let e = i.magnitude().to_u64().expect("exponent exceeds u64");
        let base = if i.is_negative() { &self.phi_inv } else { &self.phi };
        base.pow(e).apply(v)
    }

    pub fn multiply(&self, g: &MTElement, h: &MTElement) -> MTElement {
        let twisted = self.twist(&g.i, &h.x);
        MTElement {
            i: &g.i + &h.i,
            x: g.x.iter().zip(twisted).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn inverse(&self, g: &MTElement) -> MTElement {
        let neg_i = -&g.i;
        let x = self
            .twist(&neg_i, &g.x)
            .into_iter()
            .map(|v| -v)
            .collect();
        MTElement { i: neg_i, x }
    }

    /// [g, h] = g^{-1} h^{-1} g h.
    pub fn commutator(&self, g: &MTElement, h: &MTElement) -> MTElement {
        let gi = self.inverse(g);
        let hi = self.inverse(h);
        self.multiply(&self.multiply(&gi, &hi), &self.multiply(g, h))
    }

    /// Membership in G_{k,n} = kZ × nA.
    pub fn in_gkn(&self, g: &MTElement, k: u64, n: u64) -> bool {
        let kb = BigInt::from(k);
        let nb = BigInt::from(n);
        g.i.mod_floor(&kb).is_zero() && g.x.iter().all(|v| v.mod_floor(&nb).is_zero())
    }

    /// The isomorphism Z ⋉_{φ^k} Z^d → G_{k,n} ≤ G, (i, a) ↦ (ki, na).
    pub fn iso_to_gkn(&self, g: &MTElement, k: u64, n: u64) -> MTElement {
        let kb = BigInt::from(k);
        let nb = BigInt::from(n);
        MTElement {
            i: &g.i * &kb,
            x: g.x.iter().map(|v| v * &nb).collect(),
        }
    }

    /// The (i, a) ↦ (ki, na) map at n = 1.
    pub fn iso_to_gk1(&self, g: &MTElement, k: u64) -> MTElement {
        self.iso_to_gkn(g, k, 1)
    }
}

/// Finite quotient (i, x) ↦ (i mod r, x mod k), well defined whenever
/// φ^r ≡ I mod k; the group has order r·k^d.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteQuotient {
    pub d: usize,
    pub k: u64,
    pub r: u64,
    phi_mod: Vec<Vec<u64>>,
    /// Some(p) when r·k^d is a power of the prime p
    pub p_group: Option<u64>,
}

/// An element (i mod r, x mod k) of a finite quotient.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QElement {
    pub i: u64,
    pub x: Vec<u64>,
}

impl FiniteQuotient {
    fn new(d: usize, k: u64, r: u64, phi_mod: Vec<Vec<u64>>) -> Self {
        let p_group = p_power_base(&group_order_of(d, k, r));
        FiniteQuotient {
            d,
            k,
            r,
            phi_mod,
            p_group,
        }
    }

    pub fn group_order(&self) -> BigUint {
        group_order_of(self.d, self.k, self.r)
    }

    pub fn identity(&self) -> QElement {
        QElement {
            i: 0,
            x: vec![0; self.d],
        }
    }

    pub fn project(&self, g: &MTElement) -> QElement {
        let rb = BigInt::from(self.r);
        let kb = BigInt::from(self.k);
        QElement {
            i: g.i.mod_floor(&rb).to_u64().unwrap(),
            x: g
                .x
                .iter()
                .map(|v| v.mod_floor(&kb).to_u64().unwrap())
                .collect(),
        }
    }

    pub fn multiply(&self, a: &QElement, b: &QElement) -> QElement {
        let pow = mat_pow_mod(&self.phi_mod, a.i, self.k);
        let twisted = mat_apply_mod(&pow, &b.x, self.k);
        QElement {
            i: (a.i + b.i) % self.r,
            x: a
                .x
                .iter()
                .zip(twisted)
                .map(|(u, v)| (u + v) % self.k.max(1))
                .collect(),
        }
    }

    /// Order by direct iteration; the quotient is finite so this terminates.
    pub fn element_order(&self, g: &QElement) -> u64 {
        let id = self.identity();
        let mut acc = g.clone();
        let mut n = 1u64;
        while acc != id {
            acc = self.multiply(&acc, g);
            n += 1;
        }
        n
    }
}

fn group_order_of(d: usize, k: u64, r: u64) -> BigUint {
    BigUint::from(r) * BigUint::from(k).pow(d as u32)
}

/// Some(p) iff n is a positive power of the prime p.
fn p_power_base(n: &BigUint) -> Option<u64> {
    if *n <= BigUint::one() {
        return None;
    }
    let facs = factor_integer(n);
    if facs.len() == 1 {
        facs[0].0.to_u64()
    } else {
        None
    }
}

fn reduce_matrix_mod(m: &IntMatrix, k: u64) -> Vec<Vec<u64>> {
    let kb = BigInt::from(k);
    m.rows()
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| v.mod_floor(&kb).to_u64().unwrap())
                .collect()
        })
        .collect()
}

fn mat_identity_mod(d: usize, k: u64) -> Vec<Vec<u64>> {
    let mut m = vec![vec![0u64; d]; d];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1 % k.max(1);
    }
    m
}

fn mat_mul_mod(a: &[Vec<u64>], b: &[Vec<u64>], k: u64) -> Vec<Vec<u64>> {
    let d = a.len();
    let k128 = k.max(1) as u128;
    let mut out = vec![vec![0u64; d]; d];
    for i in 0..d {
        for j in 0..d {
            let mut acc = 0u128;
            for l in 0..d {
                acc = (acc + a[i][l] as u128 * b[l][j] as u128) % k128;
            }
            out[i][j] = acc as u64;
        }
    }
    out
}

fn mat_pow_mod(m: &[Vec<u64>], mut e: u64, k: u64) -> Vec<Vec<u64>> {
    let mut base = m.to_vec();
    let mut acc = mat_identity_mod(m.len(), k);
    while e > 0 {
        if e & 1 == 1 {
            acc = mat_mul_mod(&acc, &base, k);
        }
        base = mat_mul_mod(&base, &base, k);
        e >>= 1;
    }
    acc
}

fn mat_apply_mod(m: &[Vec<u64>], v: &[u64], k: u64) -> Vec<u64> {
    let k128 = k.max(1) as u128;
    m.iter()
        .map(|row| {
            let mut acc = 0u128;
            for (a, b) in row.iter().zip(v) {
                acc = (acc + *a as u128 * *b as u128) % k128;
            }
            acc as u64
        })
        .collect()
}

const ORDER_ITER_CAP: u64 = 10_000_000;

/// Multiplicative order of φ in GL(d, Z/k).
pub fn order_mod(phi: &IntMatrix, k: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidInput("modulus k must be positive".into()));
    }
    let d = phi.dim();
    let m = reduce_matrix_mod(phi, k);
    let id = mat_identity_mod(d, k);
    let mut acc = m.clone();
    let mut n = 1u64;
    while acc != id {
        acc = mat_mul_mod(&acc, &m, k);
        n += 1;
        if n > ORDER_ITER_CAP {
            return Err(Error::OrderCap(format!(
                "order of matrix mod {} exceeds {}",
                k, ORDER_ITER_CAP
            )));
        }
    }
    Ok(n)
}

/// The quotient (i, x) ↦ (i mod r, x mod k) with r the exact order of
/// φ mod k, flagged as a p-group when its order r·k^d is a prime power.
pub fn congruence_quotient(group: &MTGroup, k: u64) -> Result<FiniteQuotient> {
    let r = order_mod(group.phi(), k)?;
    Ok(FiniteQuotient::new(
        group.dim(),
        k,
        r,
        reduce_matrix_mod(group.phi(), k),
    ))
}

/// A finite quotient together with the image of the separated element
/// and that image's order (always a multiple of the requested m).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationWitness {
    pub quotient: FiniteQuotient,
    pub image: QElement,
    pub image_order: u64,
}

/// For g ≠ e and m ≥ 1, build a finite quotient of G in which m divides
/// the order of the image of g. Two cases: if g = (i, x) with i ≠ 0 the
/// cyclic quotient Z/(m·|i|) already works (the A-part is killed); if
/// i = 0 take the congruence quotient at k = m·gcd(x), where the image
/// of x in (Z/k)^d has order exactly m.
pub fn separating_quotient_with_order(
    group: &MTGroup,
    g: &MTElement,
    m: u64,
) -> Result<SeparationWitness> {
    if m == 0 {
        return Err(Error::InvalidInput("m must be positive".into()));
    }
    if g.is_identity() {
        return Err(Error::InvalidInput(
            "cannot separate the identity element".into(),
        ));
    }
    let quotient = if !g.i.is_zero() {
        let abs_i = g.i.magnitude().to_u64().ok_or_else(|| {
            Error::InvalidInput("Z-coordinate too large for a separation witness".into())
        })?;
        FiniteQuotient::new(
            group.dim(),
            1,
            m * abs_i,
            mat_identity_mod(group.dim(), 1),
        )
    } else {
        let mut c = BigInt::zero();
        for v in &g.x {
            c = c.gcd(v);
        }
        let k = m * c.to_u64().ok_or_else(|| {
            Error::InvalidInput("A-coordinates too large for a separation witness".into())
        })?;
        congruence_quotient(group, k)?
    };
    let image = quotient.project(g);
    let image_order = quotient.element_order(&image);
    if image_order % m != 0 {
        return Err(Error::Inconsistency(format!(
            "separation contract violated: image order {} not divisible by {}",
            image_order, m
        )));
    }
    Ok(SeparationWitness {
        quotient,
        image,
        image_order,
    })
}

/// The sandwich (lower, upper) = (ω^n A, ω^{n-1} A) after π-saturation;
/// γ^π_{n+1}(G) ∩ A lies between the two.
pub fn gamma_pi_lattice(group: &MTGroup, n: u32, pi: &PrimeSet) -> Result<(Lattice, Lattice)> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    let lower = omega_power(group.phi(), n)?.pi_saturate(pi);
    let upper = omega_power(group.phi(), n - 1)?.pi_saturate(pi);
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heis() -> MTGroup {
        MTGroup::new(IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]])).unwrap()
    }

    fn fib() -> MTGroup {
        MTGroup::new(IntMatrix::from_rows(&[vec![0, 1], vec![1, 1]])).unwrap()
    }

    #[test]
    fn group_law_examples() {
        let g = heis();
        let a = MTElement::from_i64(1, &[0, 0]);
        let b = MTElement::from_i64(1, &[1, 0]);
        assert_eq!(g.multiply(&a, &b), MTElement::from_i64(2, &[1, 0]));
        let c = MTElement::from_i64(3, &[2, -5]);
        assert!(g.multiply(&c, &g.inverse(&c)).is_identity());
        assert!(g.multiply(&g.inverse(&c), &c).is_identity());
    }

    #[test]
    fn associativity_spot_checks() {
        let g = fib();
        let xs = [
            MTElement::from_i64(2, &[1, -3]),
            MTElement::from_i64(-1, &[0, 4]),
            MTElement::from_i64(3, &[-2, 2]),
        ];
        let lhs = g.multiply(&g.multiply(&xs[0], &xs[1]), &xs[2]);
        let rhs = g.multiply(&xs[0], &g.multiply(&xs[1], &xs[2]));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn commutator_lands_in_omega() {
        // [g, a] = (0, (I - φ^{-1}) a) for g = (1, 0), a ∈ A
        let g = heis();
        let t = MTElement::from_i64(1, &[0, 0]);
        let a = MTElement::from_i64(0, &[0, 1]);
        let c = g.commutator(&t, &a);
        assert_eq!(c, MTElement::from_i64(0, &[1, 0]));
        let omega1 = omega_power(g.phi(), 1).unwrap();
        assert!(omega1.contains(&c.x));
    }

    #[test]
    fn gkn_membership_and_iso() {
        let g = heis();
        assert!(g.in_gkn(&MTElement::from_i64(4, &[2, 2]), 2, 2));
        assert!(!g.in_gkn(&MTElement::from_i64(3, &[0, 0]), 2, 1));
        assert_eq!(
            g.iso_to_gk1(&MTElement::from_i64(1, &[1, 0]), 2),
            MTElement::from_i64(2, &[1, 0])
        );
        // homomorphism: (i,a) ↦ (ki, a) from Z⋉_{φ^k} into G
        let k = 2u64;
        let phi_k = g.phi().pow(k);
        let gk = MTGroup::new(phi_k).unwrap();
        let u = MTElement::from_i64(1, &[2, -1]);
        let v = MTElement::from_i64(-2, &[0, 3]);
        let lhs = g.iso_to_gk1(&gk.multiply(&u, &v), k);
        let rhs = g.multiply(&g.iso_to_gk1(&u, k), &g.iso_to_gk1(&v, k));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn congruence_quotient_examples() {
        let q = congruence_quotient(&heis(), 2).unwrap();
        assert_eq!(q.r, 2);
        assert_eq!(q.group_order(), BigUint::from(8u32));
        assert_eq!(q.p_group, Some(2));

        let q = congruence_quotient(&heis(), 1).unwrap();
        assert_eq!(q.group_order(), BigUint::from(1u32));
        assert_eq!(q.p_group, None);

        let a6 = MTGroup::new(IntMatrix::from_rows(&[vec![0, 1], vec![1, 6]])).unwrap();
        let q = congruence_quotient(&a6, 3).unwrap();
        assert_eq!(q.r, 2);
        assert_eq!(q.group_order(), BigUint::from(18u32));
        assert_eq!(q.p_group, None);
    }

    #[test]
    fn projection_is_morphism() {
        let g = fib();
        let q = congruence_quotient(&g, 4).unwrap();
        let u = MTElement::from_i64(3, &[7, -2]);
        let v = MTElement::from_i64(-5, &[1, 9]);
        assert_eq!(
            q.project(&g.multiply(&u, &v)),
            q.multiply(&q.project(&u), &q.project(&v))
        );
    }

    #[test]
    fn separation_examples() {
        let g = heis();
        let w =
            separating_quotient_with_order(&g, &MTElement::from_i64(1, &[0, 0]), 5).unwrap();
        assert_eq!(w.quotient.r, 5);
        assert_eq!(w.image_order, 5);

        let w =
            separating_quotient_with_order(&g, &MTElement::from_i64(0, &[2, 0]), 3).unwrap();
        assert_eq!(w.quotient.k, 6);
        assert_eq!(w.image_order, 3);

        let w =
            separating_quotient_with_order(&g, &MTElement::from_i64(2, &[0, 0]), 4).unwrap();
        assert_eq!(w.quotient.r, 8);
        assert_eq!(w.image_order, 4);

        assert!(separating_quotient_with_order(&g, &g.identity(), 2).is_err());
    }

    #[test]
    fn gamma_pi_examples() {
        let g = heis();
        let (lo, hi) = gamma_pi_lattice(&g, 2, &PrimeSet::Empty).unwrap();
        assert!(lo.is_zero());
        assert_eq!(hi.rank(), 1);

        // ω^0 A = A always, so the upper bound at n = 1 is the full lattice
        let id = MTGroup::new(IntMatrix::identity(2)).unwrap();
        let (lo, hi) = gamma_pi_lattice(&id, 1, &PrimeSet::All).unwrap();
        assert!(lo.is_zero());
        assert!(hi.is_full());

        let f = fib();
        let (lo, hi) = gamma_pi_lattice(&f, 1, &PrimeSet::Empty).unwrap();
        assert_eq!(hi, Lattice::full(2));
        assert_eq!(lo, omega_power(f.phi(), 1).unwrap());
    }
}

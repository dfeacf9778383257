//! Polynomial arithmetic and factorization over the prime field F_p.
//!
//! Coefficients live in u64 with u128 intermediates; the primes used here
//! are the small "good primes" chosen for mod-p factoring.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Dense polynomial over F_p; trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModPoly {
    pub p: u64,
    c: Vec<u64>,
}

impl ModPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        ModPoly { p, c }
    }

    pub fn zero(p: u64) -> Self {
        ModPoly { p, c: vec![] }
    }

    pub fn one(p: u64) -> Self {
        ModPoly { p, c: vec![1] }
    }

    pub fn x(p: u64) -> Self {
        ModPoly { p, c: vec![0, 1] }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn lc(&self) -> u64 {
        *self.c.last().unwrap_or(&0)
    }

    pub fn add(&self, o: &ModPoly) -> ModPoly {
        let n = self.c.len().max(o.c.len());
        let mut out = vec![0u64; n];
        for i in 0..n {
            let a = self.c.get(i).copied().unwrap_or(0);
            let b = o.c.get(i).copied().unwrap_or(0);
            out[i] = (a + b) % self.p;
        }
        ModPoly::new(self.p, out)
    }

    pub fn sub(&self, o: &ModPoly) -> ModPoly {
        let n = self.c.len().max(o.c.len());
        let mut out = vec![0u64; n];
        for i in 0..n {
            let a = self.c.get(i).copied().unwrap_or(0);
            let b = o.c.get(i).copied().unwrap_or(0);
            out[i] = (a + self.p - b) % self.p;
        }
        ModPoly::new(self.p, out)
    }

    pub fn mul(&self, o: &ModPoly) -> ModPoly {
        if self.is_zero() || o.is_zero() {
            return ModPoly::zero(self.p);
        }
        let mut out = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(a, b, self.p)) % self.p;
            }
        }
        ModPoly::new(self.p, out)
    }

    pub fn scale(&self, k: u64) -> ModPoly {
        ModPoly::new(self.p, self.c.iter().map(|&a| mul_mod(a, k, self.p)).collect())
    }

    pub fn make_monic(&self) -> ModPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(inv_mod(self.lc(), self.p))
    }

    pub fn divrem(&self, d: &ModPoly) -> (ModPoly, ModPoly) {
        assert!(!d.is_zero());
        if self.degree() < d.degree() || self.is_zero() {
            return (ModPoly::zero(self.p), self.clone());
        }
        let p = self.p;
        let ilc = inv_mod(d.lc(), p);
        let mut rem = self.c.clone();
        let dq = self.c.len() - d.c.len();
        let mut quot = vec![0u64; dq + 1];
        for k in (0..=dq).rev() {
            let top = rem[k + d.degree()];
            if top == 0 {
                continue;
            }
            let q = mul_mod(top, ilc, p);
            quot[k] = q;
            for (j, &b) in d.c.iter().enumerate() {
                rem[k + j] = (rem[k + j] + p - mul_mod(q, b, p)) % p;
            }
        }
        (ModPoly::new(p, quot), ModPoly::new(p, rem))
    }

    pub fn rem(&self, d: &ModPoly) -> ModPoly {
        self.divrem(d).1
    }

    pub fn gcd(&self, o: &ModPoly) -> ModPoly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.make_monic()
    }

    pub fn derivative(&self) -> ModPoly {
        if self.c.len() <= 1 {
            return ModPoly::zero(self.p);
        }
        ModPoly::new(
            self.p,
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &a)| mul_mod(a, i as u64 % self.p, self.p))
                .collect(),
        )
    }

    /// self^e mod m, with arbitrary-precision exponent.
    pub fn pow_mod(&self, e: &BigUint, m: &ModPoly) -> ModPoly {
        let mut base = self.rem(m);
        let mut acc = ModPoly::one(self.p);
        let mut e = e.clone();
        while !e.is_zero() {
            if e.bit(0) {
                acc = acc.mul(&base).rem(m);
            }
            e >>= 1;
            if !e.is_zero() {
                base = base.mul(&base).rem(m);
            }
        }
        acc
    }
}

/// Extended Euclid: returns (g, s, t) with s·a + t·b = g, g monic.
pub fn ext_gcd(a: &ModPoly, b: &ModPoly) -> (ModPoly, ModPoly, ModPoly) {
    let p = a.p;
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (ModPoly::one(p), ModPoly::zero(p));
    let (mut t0, mut t1) = (ModPoly::zero(p), ModPoly::one(p));
    while !r1.is_zero() {
        let (q, r) = r0.divrem(&r1);
        let s = s0.sub(&q.mul(&s1));
        let t = t0.sub(&q.mul(&t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
        t0 = t1;
        t1 = t;
    }
    if r0.is_zero() {
        return (r0, s0, t0);
    }
    let ilc = inv_mod(r0.lc(), p);
    (r0.scale(ilc), s0.scale(ilc), t0.scale(ilc))
}

/// Squarefree check over F_p: gcd(f, f') = 1.
pub fn is_squarefree(f: &ModPoly) -> bool {
    let d = f.derivative();
    if d.is_zero() {
        return f.degree() == 0;
    }
    f.gcd(&d).is_one()
}

/// Distinct-degree factorization of a monic squarefree polynomial:
/// returns (product of irreducibles of degree d, d) pairs.
fn distinct_degree(f: &ModPoly) -> Vec<(ModPoly, usize)> {
    let p = f.p;
    let mut out = Vec::new();
    let mut f = f.clone();
    let mut h = ModPoly::x(p); // x^{p^i} mod f, running
    let mut d = 0usize;
    while f.degree() >= 1 {
        d += 1;
        if f.degree() < 2 * d {
            // what remains is irreducible
            out.push((f.clone(), f.degree()));
            break;
        }
        h = h.pow_mod(&BigUint::from(p), &f);
        let g = f.gcd(&h.sub(&ModPoly::x(p)));
        if !g.is_one() {
            out.push((g.clone(), d));
            f = f.divrem(&g).0;
            h = h.rem(&f);
        }
    }
    out
}

/// Equal-degree splitting (Cantor–Zassenhaus) of a monic squarefree product
/// of irreducibles all of degree d.
fn equal_degree<R: Rng>(f: &ModPoly, d: usize, rng: &mut R, out: &mut Vec<ModPoly>) {
    if f.degree() == d {
        out.push(f.clone());
        return;
    }
    let p = f.p;
    let split = loop {
        let a = random_poly(p, f.degree().saturating_sub(1).max(1), rng);
        if a.degree() == 0 {
            continue;
        }
        let g = f.gcd(&a);
        if !g.is_one() && g.degree() < f.degree() {
            break g;
        }
        let b = if p == 2 {
            // trace map a + a^2 + a^4 + ... over F_2
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..d {
                t = t.mul(&t).rem(f);
                acc = acc.add(&t);
            }
            acc
        } else {
            // a^((p^d - 1)/2) - 1
            let e = (BigUint::from(p).pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
            a.pow_mod(&e, f).sub(&ModPoly::one(p))
        };
        let g = f.gcd(&b);
        if !g.is_one() && g.degree() < f.degree() {
            break g;
        }
    };
    let rest = f.divrem(&split).0;
    equal_degree(&split, d, rng, out);
    equal_degree(&rest, d, rng, out);
}

fn random_poly<R: Rng>(p: u64, max_deg: usize, rng: &mut R) -> ModPoly {
    let deg = rng.gen_range(1..=max_deg.max(1));
    let mut c: Vec<u64> = (0..=deg).map(|_| rng.gen_range(0..p)).collect();
    if c[deg] == 0 {
        c[deg] = 1;
    }
    ModPoly::new(p, c)
}

/// Factor a squarefree polynomial over F_p into monic irreducibles,
/// sorted by (degree, coefficients) for determinism.
pub fn factor_squarefree<R: Rng>(f: &ModPoly, rng: &mut R) -> Vec<ModPoly> {
    let f = f.make_monic();
    let mut out = Vec::new();
    for (g, d) in distinct_degree(&f) {
        equal_degree(&g, d, rng, &mut out);
    }
    out.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.coeffs().cmp(b.coeffs())));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn divrem_roundtrip() {
        let p = 7;
        let a = ModPoly::new(p, vec![3, 1, 4, 1, 5]);
        let b = ModPoly::new(p, vec![2, 0, 1]);
        let (q, r) = a.divrem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree() < b.degree() || r.is_zero());
    }

    #[test]
    fn gcd_of_common_factor() {
        let p = 5;
        let f = ModPoly::new(p, vec![1, 1]); // x+1
        let a = f.mul(&ModPoly::new(p, vec![2, 1]));
        let b = f.mul(&ModPoly::new(p, vec![3, 1]));
        assert_eq!(a.gcd(&b), f.make_monic());
    }

    #[test]
    fn factor_mod_5() {
        // x^4 - 1 mod 5 = (x-1)(x+1)(x-2)(x+2)
        let p = 5;
        let f = ModPoly::new(p, vec![4, 0, 0, 0, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let fs = factor_squarefree(&f, &mut rng);
        assert_eq!(fs.len(), 4);
        let prod = fs.iter().fold(ModPoly::one(p), |a, b| a.mul(b));
        assert_eq!(prod, f.make_monic());
    }

    #[test]
    fn factor_mod_2() {
        // x^4 + x + 1 is irreducible over F_2
        let p = 2;
        let f = ModPoly::new(p, vec![1, 1, 0, 0, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let fs = factor_squarefree(&f, &mut rng);
        assert_eq!(fs, vec![f]);
        // x^2 + x = x(x+1)
        let g = ModPoly::new(p, vec![0, 1, 1]);
        let gs = factor_squarefree(&g, &mut rng);
        assert_eq!(gs.len(), 2);
    }

    #[test]
    fn factor_irreducible_quadratic() {
        // x^2+1 mod 3 is irreducible
        let f = ModPoly::new(3, vec![1, 0, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let fs = factor_squarefree(&f, &mut rng);
        assert_eq!(fs.len(), 1);
    }

    #[test]
    fn squarefree_detection() {
        let p = 3;
        let f = ModPoly::new(p, vec![1, 1]); // x+1
        assert!(is_squarefree(&f));
        assert!(!is_squarefree(&f.mul(&f)));
        // x^3 - x has zero derivative trap avoided: derivative is -1 != 0 mod 3
        let g = ModPoly::new(p, vec![0, 2, 0, 1]);
        assert!(is_squarefree(&g) || !is_squarefree(&g)); // just must not panic
    }
}

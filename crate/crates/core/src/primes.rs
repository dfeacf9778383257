//! Prime sets, π-numbers, and exact integer factorization.
//!
//! A `PrimeSet` is a symbolic set of primes: empty, a finite list, the
//! complement of a finite list, or all primes. Membership is decidable for
//! every prime, which is all the decision procedures need.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A symbolic set of prime numbers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrimeSet {
    Empty,
    /// Nonempty, sorted, distinct.
    Finite(Vec<BigUint>),
    /// All primes except the listed ones; list nonempty, sorted, distinct.
    Cofinite(Vec<BigUint>),
    All,
}

impl PrimeSet {
    /// Finite set from a list of primes; collapses the empty list to `Empty`.
    pub fn finite<I: IntoIterator<Item = u64>>(primes: I) -> Self {
        let mut v: Vec<BigUint> = primes.into_iter().map(BigUint::from).collect();
        v.sort();
        v.dedup();
        if v.is_empty() {
            PrimeSet::Empty
        } else {
            PrimeSet::Finite(v)
        }
    }

    /// All primes except the given ones; collapses the empty list to `All`.
    pub fn cofinite<I: IntoIterator<Item = u64>>(excluded: I) -> Self {
        let mut v: Vec<BigUint> = excluded.into_iter().map(BigUint::from).collect();
        v.sort();
        v.dedup();
        if v.is_empty() {
            PrimeSet::All
        } else {
            PrimeSet::Cofinite(v)
        }
    }

    /// All primes except `p`; the paper's π_p.
    pub fn all_but(p: u64) -> Self {
        PrimeSet::cofinite([p])
    }

    pub fn contains(&self, p: &BigUint) -> bool {
        match self {
            PrimeSet::Empty => false,
            PrimeSet::Finite(v) => v.binary_search(p).is_ok(),
            PrimeSet::Cofinite(v) => v.binary_search(p).is_err(),
            PrimeSet::All => true,
        }
    }

    pub fn contains_u64(&self, p: u64) -> bool {
        self.contains(&BigUint::from(p))
    }

    /// Set inclusion, decidable for the four symbolic shapes.
    pub fn is_subset_of(&self, other: &PrimeSet) -> bool {
        match (self, other) {
            (PrimeSet::Empty, _) => true,
            (_, PrimeSet::All) => true,
            (PrimeSet::All, _) => matches!(other, PrimeSet::All),
            (PrimeSet::Finite(v), _) => v.iter().all(|p| other.contains(p)),
            (PrimeSet::Cofinite(_), PrimeSet::Empty) => false,
            (PrimeSet::Cofinite(_), PrimeSet::Finite(_)) => false,
            (PrimeSet::Cofinite(a), PrimeSet::Cofinite(b)) => {
                // all-but-a ⊆ all-but-b iff b ⊆ a
                b.iter().all(|p| a.binary_search(p).is_ok())
            }
        }
    }
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeSet::Empty => write!(f, "none"),
            PrimeSet::All => write!(f, "all"),
            PrimeSet::Finite(v) => {
                write!(f, "{{")?;
                for (i, p) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", p)?;
                }
                write!(f, "}}")
            }
            PrimeSet::Cofinite(v) => {
                write!(f, "all-{{")?;
                for (i, p) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", p)?;
                }
                write!(f, "}}")
            }
        }
    }
}

/// True iff `k` is nonzero and every prime divisor of `|k|` lies in `π`.
///
/// ±1 is a π-number for every π; 0 never is. None of the four variants
/// needs a general factorization: `Finite` divides out the listed primes,
/// `Cofinite` only checks divisibility by the excluded primes.
pub fn is_pi_number(k: &BigInt, pi: &PrimeSet) -> bool {
    if k.is_zero() {
        return false;
    }
    let mut n = k.abs().to_biguint().unwrap();
    match pi {
        PrimeSet::All => true,
        PrimeSet::Empty => n.is_one(),
        PrimeSet::Cofinite(excluded) => excluded.iter().all(|p| !(&n % p).is_zero()),
        PrimeSet::Finite(allowed) => {
            for p in allowed {
                loop {
                    let (q, r) = n.div_rem(p);
                    if r.is_zero() {
                        n = q;
                    } else {
                        break;
                    }
                }
            }
            n.is_one()
        }
    }
}

/// Sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return vec![];
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&i| sieve[i]).map(|i| i as u64).collect()
}

/// Deterministic Miller–Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // these witnesses decide primality for all n < 2^64
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod_u64(r, b, m);
        }
        b = mul_mod_u64(b, b, m);
        e >>= 1;
    }
    r
}

/// Miller–Rabin for arbitrary-precision integers, deterministic for inputs
/// fitting in u64, otherwise with a fixed witness set (adequate here since
/// Pollard rho re-verifies cofactors by splitting them).
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(m) = n.to_u64() {
        return is_prime_u64(m);
    }
    let two = BigUint::from(2u32);
    if (n % &two).is_zero() {
        return false;
    }
    let n_minus_1 = n - 1u32;
    let mut d = n_minus_1.clone();
    let mut s = 0u32;
    while (&d % &two).is_zero() {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let a = BigUint::from(a);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Complete prime factorization of a positive integer: sorted (prime,
/// multiplicity) pairs. Trial division by small primes, then Pollard rho
/// on the remaining cofactor.
pub fn factor_integer(n: &BigUint) -> Vec<(BigUint, u32)> {
    assert!(!n.is_zero(), "factor_integer: zero input");
    let mut factors: Vec<BigUint> = Vec::new();
    let mut n = n.clone();
    for p in 2u64..=997 {
        if !is_prime_u64(p) {
            continue;
        }
        let pb = BigUint::from(p);
        loop {
            let (q, r) = n.div_rem(&pb);
            if r.is_zero() {
                factors.push(pb.clone());
                n = q;
            } else {
                break;
            }
        }
        if n.is_one() {
            break;
        }
    }
    if !n.is_one() {
        split_into_primes(&n, &mut factors);
    }
    factors.sort();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    for f in factors {
        match out.last_mut() {
            Some((p, m)) if *p == f => *m += 1,
            _ => out.push((f, 1)),
        }
    }
    out
}

fn split_into_primes(n: &BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if is_prime(n) {
        out.push(n.clone());
        return;
    }
    let d = pollard_rho(n);
    split_into_primes(&d, out);
    split_into_primes(&(n / &d), out);
}

/// Brent-cycle Pollard rho; returns a nontrivial divisor of composite `n`.
fn pollard_rho(n: &BigUint) -> BigUint {
    let two = BigUint::from(2u32);
    if (n % &two).is_zero() {
        return two;
    }
    let mut c = BigUint::from(1u32);
    loop {
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut d = BigUint::one();
        while d.is_one() {
            x = (&x * &x + &c) % n;
            y = (&y * &y + &c) % n;
            y = (&y * &y + &c) % n;
            let diff = if x > y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                break;
            }
            d = diff.gcd(n);
        }
        if !d.is_one() && &d != n {
            return d;
        }
        c += 1u32;
    }
}

/// Euler totient of a small integer.
pub fn euler_phi(n: u64) -> u64 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

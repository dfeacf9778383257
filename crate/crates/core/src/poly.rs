//! Dense univariate polynomials with arbitrary-precision integer
//! coefficients.
//!
//! Coefficient index i is the coefficient of t^i; the zero polynomial is the
//! empty coefficient vector. All arithmetic is exact.

use crate::primes::{euler_phi, is_pi_number, PrimeSet};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        IntPoly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        IntPoly::new(vec![c])
    }

    /// The monomial t^n.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] = BigInt::one();
        IntPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree; 0 for constants including the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn leading_coeff(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff().is_one()
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        IntPoly::new(out)
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - other.coeff(i));
        }
        IntPoly::new(out)
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, mut e: u32) -> IntPoly {
        let mut base = self.clone();
        let mut acc = IntPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact division; `None` if `other` does not divide `self` over Z.
    pub fn div_exact(&self, other: &IntPoly) -> Option<IntPoly> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        if self.degree() < other.degree() {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let dq = self.coeffs.len() - other.coeffs.len();
        let mut quot = vec![BigInt::zero(); dq + 1];
        let lc = other.leading_coeff();
        for k in (0..=dq).rev() {
            let top = rem[k + other.degree()].clone();
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(&lc);
            if !r.is_zero() {
                return None;
            }
            quot[k] = q.clone();
            for (j, b) in other.coeffs.iter().enumerate() {
                rem[k + j] -= &q * b;
            }
        }
        if rem.iter().all(|c| c.is_zero()) {
            Some(IntPoly::new(quot))
        } else {
            None
        }
    }

    pub fn divides(&self, other: &IntPoly) -> bool {
        other.div_exact(self).is_some()
    }

    pub fn derivative(&self) -> IntPoly {
        if self.coeffs.len() <= 1 {
            return IntPoly::zero();
        }
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// gcd of the coefficients, nonnegative; 0 for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Content removed and leading coefficient made positive.
    /// Returns (unit·content, primitive part) with unit·content · pp = self.
    pub fn primitive_part(&self) -> (BigInt, IntPoly) {
        if self.is_zero() {
            return (BigInt::zero(), IntPoly::zero());
        }
        let mut c = self.content();
        if self.leading_coeff().is_negative() {
            c = -c;
        }
        let pp = IntPoly::new(self.coeffs.iter().map(|a| a / &c).collect());
        (c, pp)
    }

    /// Largest absolute value among the coefficients.
    pub fn height(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Primitive gcd of two integer polynomials (positive leading
    /// coefficient), via the primitive PRS.
    pub fn gcd(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() {
            return other.primitive_part().1.abs_lc();
        }
        if other.is_zero() {
            return self.primitive_part().1.abs_lc();
        }
        let (_, mut a) = self.primitive_part();
        let (_, mut b) = other.primitive_part();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part().1;
        }
        let cg = self.content().gcd(&other.content());
        a.scale(&cg).abs_lc()
    }

    fn abs_lc(self) -> IntPoly {
        if self.leading_coeff().is_negative() {
            self.neg()
        } else {
            self
        }
    }

    /// Pseudo-remainder: lc(b)^(deg a - deg b + 1) · a mod b.
    pub fn pseudo_rem(&self, b: &IntPoly) -> IntPoly {
        assert!(!b.is_zero());
        if self.degree() < b.degree() {
            return self.clone();
        }
        let mut r = self.clone();
        let lc = b.leading_coeff();
        let steps = self.degree() - b.degree() + 1;
        for _ in 0..steps {
            if r.is_zero() || r.degree() < b.degree() {
                r = r.scale(&lc);
                continue;
            }
            let k = r.degree() - b.degree();
            let top = r.leading_coeff();
            // r <- lc*r - top * t^k * b
            let shifted = IntPoly::monomial(k).mul(b).scale(&top);
            r = r.scale(&lc).sub(&shifted);
        }
        r
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let abs = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            match i {
                0 => write!(f, "{}", abs)?,
                _ => {
                    if !abs.is_one() {
                        write!(f, "{}*", abs)?;
                    }
                    if i == 1 {
                        write!(f, "t")?;
                    } else {
                        write!(f, "t^{}", i)?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// The augmentation ε: sum of the coefficients (evaluation at t = 1).
pub fn eval_at_one(p: &IntPoly) -> BigInt {
    p.coeffs().iter().sum()
}

/// True iff ε(P) is a π-number.
pub fn in_s_pi(p: &IntPoly, pi: &PrimeSet) -> bool {
    is_pi_number(&eval_at_one(p), pi)
}

/// The n-th cyclotomic polynomial, by the recursive quotient
/// t^n − 1 = Π_{d|n} Φ_d.
pub fn cyclotomic(n: u64) -> IntPoly {
    assert!(n >= 1);
    let mut num = IntPoly::monomial(n as usize).sub(&IntPoly::one());
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic(d);
            num = num.div_exact(&phi_d).expect("cyclotomic division is exact");
        }
    }
    num
}

/// If `p` equals some cyclotomic polynomial Φ_n, returns n.
///
/// Candidates are the finitely many n with euler_phi(n) = deg p; for n > 6,
/// phi(n) ≥ sqrt(n/2), so n ≤ max(6, 2·deg²) bounds the search.
pub fn is_cyclotomic(p: &IntPoly) -> Result<Option<u64>> {
    if !p.is_monic() {
        return Err(Error::InvalidInput(
            "is_cyclotomic requires a monic polynomial".into(),
        ));
    }
    if p.is_constant() {
        return Err(Error::InvalidInput(
            "is_cyclotomic requires a nonconstant polynomial".into(),
        ));
    }
    let d = p.degree() as u64;
    let bound = (2 * d * d).max(6);
    for n in 1..=bound {
        if euler_phi(n) == d && &cyclotomic(n) == p {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

//! Polynomials over Q and Smith normal form over the Euclidean ring Q[t].
//!
//! Used for the invariant factors of tI − φ; inputs are desk scale so the
//! textbook pivoting algorithm is enough.

use crate::poly::IntPoly;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPoly {
    c: Vec<BigRational>,
}

impl QPoly {
    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().map_or(false, |x| x.is_zero()) {
            c.pop();
        }
        QPoly { c }
    }

    pub fn zero() -> Self {
        QPoly { c: vec![] }
    }

    pub fn one() -> Self {
        QPoly {
            c: vec![BigRational::one()],
        }
    }

    pub fn from_int(p: &IntPoly) -> Self {
        QPoly::new(
            p.coeffs()
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }

    /// Converts back to an integer polynomial; `None` if any coefficient
    /// has a nontrivial denominator.
    pub fn to_int(&self) -> Option<IntPoly> {
        let mut out = Vec::with_capacity(self.c.len());
        for x in &self.c {
            if !x.denom().is_one() {
                return None;
            }
            out.push(x.numer().clone());
        }
        Some(IntPoly::new(out))
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lc(&self) -> BigRational {
        self.c.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.c.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, o: &QPoly) -> QPoly {
        let n = self.c.len().max(o.c.len());
        QPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &QPoly) -> QPoly {
        let n = self.c.len().max(o.c.len());
        QPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    pub fn scale(&self, k: &BigRational) -> QPoly {
        QPoly::new(self.c.iter().map(|a| a * k).collect())
    }

    pub fn monic(&self) -> QPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lc().recip())
    }

    pub fn divrem(&self, d: &QPoly) -> (QPoly, QPoly) {
        assert!(!d.is_zero());
        if self.is_zero() || self.degree() < d.degree() {
            return (QPoly::zero(), self.clone());
        }
        let mut rem = self.c.clone();
        let dq = self.c.len() - d.c.len();
        let mut quot = vec![BigRational::zero(); dq + 1];
        let ilc = d.lc().recip();
        for k in (0..=dq).rev() {
            let top = rem[k + d.degree()].clone();
            if top.is_zero() {
                continue;
            }
            let q = top * &ilc;
            quot[k] = q.clone();
            for (j, b) in d.c.iter().enumerate() {
                rem[k + j] -= &q * b;
            }
        }
        (QPoly::new(quot), QPoly::new(rem))
    }
}

/// Smith normal form over Q[t]: returns the diagonal entries, monic,
/// satisfying the divisibility chain d_1 | d_2 | ... (zeros last).
pub fn snf_qpoly(mut m: Vec<Vec<QPoly>>) -> Vec<QPoly> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let n = rows.min(cols);
    let mut diag = Vec::with_capacity(n);
    let mut t = 0usize;
    while t < n {
        // pivot: nonzero entry of minimal degree in the remaining block
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !m[i][j].is_zero()
                    && pivot.map_or(true, |(pi, pj)| m[i][j].degree() < m[pi][pj].degree())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if m[i][t].is_zero() {
                    continue;
                }
                let (q, r) = m[i][t].divrem(&m[t][t]);
                for j in t..cols {
                    let v = m[i][j].sub(&q.mul(&m[t][j]));
                    m[i][j] = v;
                }
                if !r.is_zero() {
                    m.swap(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let (q, r) = m[t][j].divrem(&m[t][t]);
                for i in t..rows {
                    let v = m[i][j].sub(&q.mul(&m[i][t]));
                    m[i][j] = v;
                }
                if !r.is_zero() {
                    for row in m.iter_mut() {
                        row.swap(t, j);
                    }
                    dirty = true;
                }
            }
            if !dirty
                && (t + 1..rows).all(|i| m[i][t].is_zero())
                && (t + 1..cols).all(|j| m[t][j].is_zero())
            {
                break;
            }
        }
        // enforce pivot | every remaining entry
        let mut fixed = true;
        'scan: for i in t + 1..rows {
            for j in t + 1..cols {
                if !m[i][j].divrem(&m[t][t]).1.is_zero() {
                    // pull the offending row up and redo this pivot
                    for jj in t..cols {
                        let v = m[t][jj].add(&m[i][jj]);
                        m[t][jj] = v;
                    }
                    fixed = false;
                    break 'scan;
                }
            }
        }
        if fixed {
            diag.push(m[t][t].monic());
            t += 1;
        }
    }
    while diag.len() < n {
        diag.push(QPoly::zero());
    }
    diag
}

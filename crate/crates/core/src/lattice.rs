//! Sublattices of Z^d in canonical Hermite normal form, with the ω-power
//! chain (φ−I)^n Z^d, π-saturation, intersections, and the torsion kernel
//! of the residual-nilpotence criterion.

use crate::matrix::IntMatrix;
use crate::poly::eval_at_one;
use crate::primes::{is_pi_number, PrimeSet};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// A subgroup of Z^d: `basis` is a rank × ambient matrix in row Hermite
/// normal form (upper echelon, positive pivots, entries above each pivot
/// reduced into [0, pivot)), which makes equality structural.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    ambient: usize,
    basis: Vec<Vec<BigInt>>,
}

impl Lattice {
    pub fn zero(ambient: usize) -> Self {
        Lattice {
            ambient,
            basis: vec![],
        }
    }

    pub fn full(ambient: usize) -> Self {
        Lattice {
            ambient,
            basis: (0..ambient)
                .map(|i| {
                    (0..ambient)
                        .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_generators(gens: &[Vec<BigInt>], ambient: usize) -> Self {
        for g in gens {
            assert_eq!(g.len(), ambient, "generator length mismatch");
        }
        Lattice {
            ambient,
            basis: hnf(gens.to_vec(), ambient),
        }
    }

    pub fn from_generators_i64(gens: &[Vec<i64>], ambient: usize) -> Self {
        let gens: Vec<Vec<BigInt>> = gens
            .iter()
            .map(|g| g.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Lattice::from_generators(&gens, ambient)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self == &Lattice::full(self.ambient)
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    /// Membership by forward substitution on the echelon basis.
    pub fn contains(&self, x: &[BigInt]) -> bool {
        assert_eq!(x.len(), self.ambient);
        let mut x = x.to_vec();
        for row in &self.basis {
            let c = pivot_col(row).expect("basis rows are nonzero");
            if x[c].is_zero() {
                continue;
            }
            let (q, r) = x[c].div_rem(&row[c]);
            if !r.is_zero() {
                return false;
            }
            for j in 0..self.ambient {
                x[j] -= &q * &row[j];
            }
        }
        x.iter().all(|v| v.is_zero())
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis.iter().all(|row| self.contains(row))
    }

    /// L1 ∩ L2, via the integer kernel of the stacked relation
    /// a·B1 − b·B2 = 0.
    pub fn intersect(&self, other: &Lattice) -> Result<Lattice> {
        if self.ambient != other.ambient {
            return Err(Error::InvalidInput(format!(
                "ambient dimension mismatch: {} vs {}",
                self.ambient, other.ambient
            )));
        }
        if self.is_zero() || other.is_zero() {
            return Ok(Lattice::zero(self.ambient));
        }
        let r1 = self.rank();
        let r2 = other.rank();
        // rows of the constraint matrix: one per ambient coordinate
        let mut a = vec![vec![BigInt::zero(); r1 + r2]; self.ambient];
        for (k, row) in self.basis.iter().enumerate() {
            for j in 0..self.ambient {
                a[j][k] = row[j].clone();
            }
        }
        for (k, row) in other.basis.iter().enumerate() {
            for j in 0..self.ambient {
                a[j][r1 + k] = -row[j].clone();
            }
        }
        let kernel = integer_kernel(&a);
        let gens: Vec<Vec<BigInt>> = kernel
            .iter()
            .map(|ab| {
                let mut v = vec![BigInt::zero(); self.ambient];
                for (k, row) in self.basis.iter().enumerate() {
                    for j in 0..self.ambient {
                        v[j] += &ab[k] * &row[j];
                    }
                }
                v
            })
            .collect();
        Ok(Lattice::from_generators(&gens, self.ambient))
    }

    /// Z^d ∩ span_Q(L): the full saturation.
    pub fn saturate_full(&self) -> Lattice {
        if self.is_zero() {
            return self.clone();
        }
        // orthogonal relations: y with B·y = 0
        let relations = integer_kernel(&self.basis.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
        if relations.is_empty() {
            return Lattice::full(self.ambient);
        }
        let sat = integer_kernel(&relations);
        Lattice {
            ambient: self.ambient,
            basis: hnf(sat, self.ambient),
        }
    }

    /// {x ∈ Z^d : kx ∈ L for some π-number k}: strip the π-parts of the
    /// elementary divisors of L inside its saturation.
    pub fn pi_saturate(&self, pi: &PrimeSet) -> Lattice {
        if self.is_zero() {
            return self.clone();
        }
        match pi {
            PrimeSet::Empty => return self.clone(),
            PrimeSet::All => return self.saturate_full(),
            _ => {}
        }
        let sat = self.saturate_full();
        let r = self.rank();
        debug_assert_eq!(sat.rank(), r);
        // solve B = X · S with X integral
        let x = solve_integral(&self.basis, &sat.basis);
        let (diag, v) = snf_with_right_transform(x);
        // rows d_i' * (V·S)_i with stripped divisors
        let mut gens = Vec::with_capacity(r);
        for i in 0..r {
            let d_stripped = strip_pi_part(&diag[i], pi);
            let mut row = vec![BigInt::zero(); self.ambient];
            for k in 0..r {
                if v[i][k].is_zero() {
                    continue;
                }
                for j in 0..self.ambient {
                    row[j] += &v[i][k] * &sat.basis[k][j];
                }
            }
            for e in row.iter_mut() {
                *e *= &d_stripped;
            }
            gens.push(row);
        }
        Lattice::from_generators(&gens, self.ambient)
    }
}

fn pivot_col(row: &[BigInt]) -> Option<usize> {
    row.iter().position(|x| !x.is_zero())
}

/// Row Hermite normal form: echelon with positive pivots and reduced
/// entries above each pivot; zero rows dropped. Idempotent and canonical.
pub fn hnf(mut rows: Vec<Vec<BigInt>>, ambient: usize) -> Vec<Vec<BigInt>> {
    let pivots = hnf_limited(&mut rows, ambient);
    rows.truncate(pivots);
    rows
}

/// In-place HNF where pivots are only sought in the first `cols` columns;
/// rows that are zero on those columns end up at the bottom, untouched
/// beyond column `cols`. Returns the number of pivot rows.
fn hnf_limited(rows: &mut Vec<Vec<BigInt>>, cols: usize) -> usize {
    let mut pivot_row = 0usize;
    for col in 0..cols {
        // gcd-reduce all candidate rows in this column down to one
        loop {
            let mut candidates: Vec<usize> = (pivot_row..rows.len())
                .filter(|&i| !rows[i][col].is_zero())
                .collect();
            if candidates.len() <= 1 {
                break;
            }
            candidates.sort_by(|&a, &b| rows[a][col].abs().cmp(&rows[b][col].abs()));
            let min = candidates[0];
            for &i in &candidates[1..] {
                let q = rows[i][col].div_floor(&rows[min][col]);
                for j in 0..rows[i].len() {
                    let v = &rows[i][j] - &q * &rows[min][j];
                    rows[i][j] = v;
                }
            }
        }
        if let Some(i) = (pivot_row..rows.len()).find(|&i| !rows[i][col].is_zero()) {
            rows.swap(pivot_row, i);
            if rows[pivot_row][col].is_negative() {
                for v in rows[pivot_row].iter_mut() {
                    *v = -&*v;
                }
            }
            // reduce entries above the pivot into [0, pivot)
            for i in 0..pivot_row {
                let q = rows[i][col].div_floor(&rows[pivot_row][col]);
                if q.is_zero() {
                    continue;
                }
                for j in 0..rows[i].len() {
                    let v = &rows[i][j] - &q * &rows[pivot_row][j];
                    rows[i][j] = v;
                }
            }
            pivot_row += 1;
        }
    }
    // drop rows that are zero across the pivot column range entirely
    pivot_row
}

/// Basis (as rows) of {x ∈ Z^n : A·x = 0} for an integer matrix given as
/// `rows` of length n. The result is automatically saturated.
pub fn integer_kernel(a: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    if a.is_empty() {
        return vec![];
    }
    let m = a.len();
    let n = a[0].len();
    // augmented rows (column j of A | e_j)
    let mut rows: Vec<Vec<BigInt>> = (0..n)
        .map(|j| {
            let mut r: Vec<BigInt> = (0..m).map(|i| a[i][j].clone()).collect();
            for k in 0..n {
                r.push(if k == j { BigInt::one() } else { BigInt::zero() });
            }
            r
        })
        .collect();
    let pivots = hnf_limited(&mut rows, m);
    rows[pivots..]
        .iter()
        .map(|r| r[m..].to_vec())
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect()
}

/// Solve B = X·S for integral X, where S is a basis of a lattice
/// containing the rows of B. Panics if the system is not integral, which
/// cannot happen for a saturation basis.
fn solve_integral(b: &[Vec<BigInt>], s: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let r = s.len();
    let n = s[0].len();
    b.iter()
        .map(|row| {
            // forward substitution against the echelon rows of S over Q
            let mut x: Vec<BigRational> = row
                .iter()
                .map(|v| BigRational::from_integer(v.clone()))
                .collect();
            let mut coeffs = vec![BigInt::zero(); r];
            for (k, srow) in s.iter().enumerate() {
                let c = pivot_col(srow).expect("saturation basis rows nonzero");
                if x[c].is_zero() {
                    continue;
                }
                let q = &x[c] / BigRational::from_integer(srow[c].clone());
                for j in 0..n {
                    x[j] -= &q * BigRational::from_integer(srow[j].clone());
                }
                assert!(q.denom().is_one(), "non-integral coordinates in sublattice");
                coeffs[k] = q.numer().clone();
            }
            assert!(x.iter().all(|v| v.is_zero()), "row outside spanning lattice");
            coeffs
        })
        .collect()
}

/// Smith normal form of a square integer matrix X = U·D·V with V tracked:
/// returns (diagonal of D, V). Row operations are untracked.
fn snf_with_right_transform(mut m: Vec<Vec<BigInt>>) -> (Vec<BigInt>, Vec<Vec<BigInt>>) {
    let n = m.len();
    let mut v: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let col_add = |m: &mut Vec<Vec<BigInt>>, v: &mut Vec<Vec<BigInt>>, i: usize, j: usize, k: &BigInt| {
        // col_i += k * col_j; inverse op on the rows of V
        for row in m.iter_mut() {
            let val = &row[i] + k * &row[j];
            row[i] = val;
        }
        for c in 0..v[0].len() {
            let val = &v[j][c] - k * &v[i][c];
            v[j][c] = val;
        }
    };
    let mut t = 0usize;
    while t < n {
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..n {
            for j in t..n {
                if !m[i][j].is_zero()
                    && pivot.map_or(true, |(pi, pj)| m[i][j].abs() < m[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(t, pi);
        if pj != t {
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
            v.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..n {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = m[i][t].div_floor(&m[t][t]);
                for j in 0..n {
                    let val = &m[i][j] - &q * &m[t][j];
                    m[i][j] = val;
                }
                if !m[i][t].is_zero() {
                    m.swap(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..n {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = m[t][j].div_floor(&m[t][t]);
                col_add(&mut m, &mut v, j, t, &(-q));
                if !m[t][j].is_zero() {
                    for row in m.iter_mut() {
                        row.swap(t, j);
                    }
                    v.swap(t, j);
                    dirty = true;
                }
            }
            if !dirty
                && (t + 1..n).all(|i| m[i][t].is_zero())
                && (t + 1..n).all(|j| m[t][j].is_zero())
            {
                break;
            }
        }
        // pivot must divide the remaining block
        let mut fixed = true;
        'scan: for i in t + 1..n {
            for j in t + 1..n {
                if !(&m[i][j] % &m[t][t]).is_zero() {
                    for jj in 0..n {
                        let val = &m[t][jj] + &m[i][jj];
                        m[t][jj] = val;
                    }
                    fixed = false;
                    break 'scan;
                }
            }
        }
        if fixed {
            if m[t][t].is_negative() {
                for row in m.iter_mut() {
                    row[t] = -&row[t];
                }
                for c in 0..n {
                    v[t][c] = -&v[t][c];
                }
            }
            t += 1;
        }
    }
    let diag = (0..n).map(|i| m[i][i].clone()).collect();
    (diag, v)
}

/// Remove from |d| all prime factors lying in π.
fn strip_pi_part(d: &BigInt, pi: &PrimeSet) -> BigInt {
    let mut n = d.abs();
    assert!(!n.is_zero(), "elementary divisor is nonzero");
    match pi {
        PrimeSet::Empty => n,
        PrimeSet::All => BigInt::one(),
        PrimeSet::Finite(list) => {
            for p in list {
                let p = BigInt::from(p.clone());
                while (&n % &p).is_zero() {
                    n /= &p;
                }
            }
            n
        }
        PrimeSet::Cofinite(excluded) => {
            // keep exactly the parts at the excluded primes
            let mut keep = BigInt::one();
            for p in excluded {
                let p = BigInt::from(p.clone());
                let mut m = n.clone();
                while (&m % &p).is_zero() {
                    m /= &p;
                    keep *= &p;
                }
            }
            keep
        }
    }
}

/// Canonical HNF lattice generated by the given vectors.
pub fn hnf_from_generators(gens: &[Vec<BigInt>], ambient: usize) -> Lattice {
    Lattice::from_generators(gens, ambient)
}

/// The image lattice (φ − I)^n Z^d, in HNF. n = 0 gives Z^d.
pub fn omega_power(phi: &IntMatrix, n: u32) -> Result<Lattice> {
    if !phi.is_automorphism() {
        return Err(Error::NotAutomorphism(phi.det().to_string()));
    }
    let d = phi.dim();
    if n == 0 {
        return Ok(Lattice::full(d));
    }
    let m = phi.sub(&IntMatrix::identity(d)).pow(n as u64);
    // columns of m generate the image
    let gens: Vec<Vec<BigInt>> = (0..d)
        .map(|j| (0..d).map(|i| m.get(i, j).clone()).collect())
        .collect();
    Ok(Lattice::from_generators(&gens, d))
}

/// N_π = Z^d ∩ Σ_P ker_Q P(φ)^{m_P}, the sum over irreducible factors P of
/// the characteristic polynomial whose augmentation is a π-number.
/// N_π = 0 iff no irreducible factor lies in S_π.
pub fn torsion_kernel(phi: &IntMatrix, pi: &PrimeSet) -> Result<Lattice> {
    if !phi.is_automorphism() {
        return Err(Error::NotAutomorphism(phi.det().to_string()));
    }
    let d = phi.dim();
    let fact = crate::factor::factor_over_z(&phi.char_poly())?;
    let mut gens: Vec<Vec<BigInt>> = Vec::new();
    for (p, mult) in &fact.factors {
        if !is_pi_number(&eval_at_one(p), pi) {
            continue;
        }
        let mat = phi.eval_poly(&p.pow(*mult));
        gens.extend(integer_kernel(&mat.rows()));
    }
    Ok(Lattice::from_generators(&gens, d).saturate_full())
}

/// Convenience wrapper around `torsion_kernel`, keeping the π-tf-nilpotence
/// criterion of the decision layer honest: used as its independent oracle.
pub fn torsion_kernel_is_zero(phi: &IntMatrix, pi: &PrimeSet) -> Result<bool> {
    Ok(torsion_kernel(phi, pi)?.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::IntMatrix;

    fn lat(gens: &[Vec<i64>], d: usize) -> Lattice {
        Lattice::from_generators_i64(gens, d)
    }

    #[test]
    fn hnf_examples() {
        let l = lat(&[vec![2, 0], vec![0, 2], vec![1, 1]], 2);
        assert_eq!(
            l.basis(),
            &[
                vec![BigInt::from(1), BigInt::from(1)],
                vec![BigInt::from(0), BigInt::from(2)]
            ]
        );
        assert_eq!(lat(&[], 2), Lattice::zero(2));
        assert_eq!(lat(&[vec![0, 1], vec![1, 0]], 2), Lattice::full(2));
    }

    #[test]
    fn hnf_idempotent() {
        let l = lat(&[vec![4, 6, 1], vec![2, 2, 2], vec![0, 0, 8]], 3);
        let again = Lattice::from_generators(&l.basis().to_vec(), 3);
        assert_eq!(l, again);
    }

    #[test]
    fn membership() {
        let l = lat(&[vec![2, 0], vec![0, 3]], 2);
        assert!(l.contains(&[BigInt::from(4), BigInt::from(-3)]));
        assert!(!l.contains(&[BigInt::from(1), BigInt::from(0)]));
        assert!(Lattice::zero(2).contains(&[BigInt::zero(), BigInt::zero()]));
    }

    #[test]
    fn kernel_basic() {
        // kernel of [1, 1, 1] is rank 2
        let a = vec![vec![BigInt::one(), BigInt::one(), BigInt::one()]];
        let k = integer_kernel(&a);
        assert_eq!(k.len(), 2);
        for row in &k {
            let s: BigInt = row.iter().sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn intersect_examples() {
        let two = lat(&[vec![2, 0], vec![0, 2]], 2);
        let three = lat(&[vec![3, 0], vec![0, 3]], 2);
        let six = lat(&[vec![6, 0], vec![0, 6]], 2);
        assert_eq!(two.intersect(&three).unwrap(), six);
        assert_eq!(two.intersect(&two).unwrap(), two);
        let l1 = lat(&[vec![1, 1]], 2);
        let l2 = lat(&[vec![1, -1]], 2);
        assert_eq!(l1.intersect(&l2).unwrap(), Lattice::zero(2));
        assert!(l1.intersect(&lat(&[vec![1, 0, 0]], 3)).is_err());
    }

    #[test]
    fn saturation() {
        let l = lat(&[vec![2, 0], vec![0, 6]], 2);
        assert_eq!(l.pi_saturate(&PrimeSet::All), Lattice::full(2));
        assert_eq!(l.pi_saturate(&PrimeSet::Empty), l);
        // all-but-2: keep exactly the 2-parts (2 and 2)
        let s = l.pi_saturate(&PrimeSet::all_but(2));
        assert_eq!(s, lat(&[vec![2, 0], vec![0, 2]], 2));
    }

    #[test]
    fn saturation_partial_rank() {
        let l = lat(&[vec![2, 4]], 2);
        let s = l.saturate_full();
        assert_eq!(s, lat(&[vec![1, 2]], 2));
        assert!(s.contains_lattice(&l));
    }

    #[test]
    fn pi_saturate_idempotent_and_monotone() {
        let l = lat(&[vec![4, 2], vec![0, 18]], 2);
        for pi in [
            PrimeSet::Empty,
            PrimeSet::finite([2]),
            PrimeSet::all_but(3),
            PrimeSet::All,
        ] {
            let s = l.pi_saturate(&pi);
            assert_eq!(s.pi_saturate(&pi), s, "idempotence for {}", pi);
            assert!(s.contains_lattice(&l), "contains L for {}", pi);
        }
        let small = l.pi_saturate(&PrimeSet::finite([2]));
        let big = l.pi_saturate(&PrimeSet::finite([2, 3]));
        assert!(big.contains_lattice(&small));
    }

    #[test]
    fn omega_powers_shear() {
        let phi = IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]]);
        assert_eq!(omega_power(&phi, 0).unwrap(), Lattice::full(2));
        assert_eq!(omega_power(&phi, 1).unwrap(), lat(&[vec![1, 0]], 2));
        assert_eq!(omega_power(&phi, 2).unwrap(), Lattice::zero(2));
    }

    #[test]
    fn omega_chain_decreasing() {
        let phi = IntMatrix::from_rows(&[vec![0, 1], vec![1, 6]]);
        let mut prev = omega_power(&phi, 0).unwrap();
        for n in 1..6 {
            let cur = omega_power(&phi, n).unwrap();
            assert!(prev.contains_lattice(&cur));
            prev = cur;
        }
    }

    #[test]
    fn torsion_kernel_shear() {
        let phi = IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]]);
        for pi in [PrimeSet::Empty, PrimeSet::All, PrimeSet::all_but(2)] {
            assert!(torsion_kernel(&phi, &pi).unwrap().is_zero());
        }
    }

    #[test]
    fn torsion_kernel_fibonacci() {
        let phi = IntMatrix::from_rows(&[vec![0, 1], vec![1, 1]]);
        // ε(t^2-t-1) = -1 is a π-number for every π
        assert_eq!(torsion_kernel(&phi, &PrimeSet::Empty).unwrap(), Lattice::full(2));
    }

    #[test]
    fn torsion_kernel_block() {
        let phi = IntMatrix::from_rows(&[
            vec![1, 1, 0, 0],
            vec![0, 1, 0, 0],
            vec![0, 0, 0, 1],
            vec![0, 0, 1, 1],
        ]);
        let n = torsion_kernel(&phi, &PrimeSet::All).unwrap();
        assert_eq!(n.rank(), 2);
        assert_eq!(
            n,
            lat(&[vec![0, 0, 1, 0], vec![0, 0, 0, 1]], 4)
        );
    }
}

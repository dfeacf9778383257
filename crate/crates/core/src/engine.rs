//! The decision layer: residually-p and residual-nilpotence criteria from
//! the characteristic polynomial, mod-p analysis, Sol detection, and the
//! aggregated report with independent-oracle cross-checks.

use crate::factor::{factor_over_z, Factorization};
use crate::lattice::torsion_kernel;
use crate::matrix::IntMatrix;
use crate::poly::{eval_at_one, IntPoly};
use crate::primes::{factor_integer, is_pi_number, PrimeSet};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// True iff every irreducible factor P of the characteristic polynomial
/// satisfies ε(P) ≡ 0 mod p (so the group Z⋉_φZ^d is residually p).
pub fn residually_p(phi: &IntMatrix, p: u64) -> Result<bool> {
    check_automorphism(phi)?;
    let fact = factor_over_z(&phi.char_poly())?;
    let pb = BigInt::from(p);
    let ok = fact
        .distinct_factors()
        .all(|f| eval_at_one(f).mod_floor(&pb).is_zero());
    Ok(ok)
}

/// The exact set {p : residually_p(φ, p)}, computed from the gcd of the
/// nonzero augmentation values of the distinct irreducible factors.
pub fn good_primes(phi: &IntMatrix) -> Result<PrimeSet> {
    check_automorphism(phi)?;
    let fact = factor_over_z(&phi.char_poly())?;
    let mut gcd = BigInt::zero();
    for f in fact.distinct_factors() {
        let v = eval_at_one(f);
        gcd = gcd.gcd(&v);
        if gcd.is_one() {
            return Ok(PrimeSet::Empty);
        }
    }
    if gcd.is_zero() {
        // every factor has ε = 0: residually p for all p
        return Ok(PrimeSet::All);
    }
    let mut primes: Vec<_> = factor_integer(&gcd.to_biguint().unwrap())
        .into_iter()
        .map(|(p, _)| p)
        .collect();
    primes.sort();
    Ok(PrimeSet::Finite(primes))
}

/// ε(P) ≠ ±1 for every irreducible factor of P_φ.
pub fn residually_nilpotent(phi: &IntMatrix) -> Result<bool> {
    residually_pi_tf_nilpotent(phi, &PrimeSet::Empty)
}

/// P_φ is a power of t − 1.
pub fn residually_tf_nilpotent(phi: &IntMatrix) -> Result<bool> {
    check_automorphism(phi)?;
    let d = phi.dim() as u32;
    Ok(phi.char_poly() == IntPoly::from_i64(&[-1, 1]).pow(d))
}

/// No irreducible factor of P_φ lies in S_π.
pub fn residually_pi_tf_nilpotent(phi: &IntMatrix, pi: &PrimeSet) -> Result<bool> {
    check_automorphism(phi)?;
    let fact = factor_over_z(&phi.char_poly())?;
    let hit = fact
        .distinct_factors()
        .any(|f| is_pi_number(&eval_at_one(f), pi));
    Ok(!hit)
}

/// For unipotent φ: the sandwich bound [max(n0,1), n0+1] on the nilpotency
/// class of the group, with n0 = min{n ≥ 0 : (φ−I)^n = 0}. Absent when φ
/// is not unipotent; hi ≤ d+1 always.
pub fn nilpotency_class_interval(phi: &IntMatrix) -> Result<Option<(u32, u32)>> {
    check_automorphism(phi)?;
    if !phi.is_unipotent()? {
        return Ok(None);
    }
    let d = phi.dim();
    let nil = phi.sub(&IntMatrix::identity(d));
    let mut n0 = 0u32;
    let mut acc = IntMatrix::identity(d);
    while !acc.is_zero() {
        acc = acc.mul(&nil);
        n0 += 1;
        assert!(n0 as usize <= d, "nilpotency degree exceeds dimension");
    }
    Ok(Some((n0.max(1), n0 + 1)))
}

/// Per-prime comparison of G with its mod-p shadow Ḡ = Z⋉_φ̄ F_p^d.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModPAnalysis {
    pub p: u64,
    /// order of φ̄ in GL(d, p)
    pub order: u64,
    pub unipotent_mod_p: bool,
    /// Ḡ is residually p iff φ̄ is unipotent
    pub gbar_residually_p: bool,
    /// G residually p but Ḡ not: the implication Ḡ res p ⇒ G res p
    /// does not reverse here
    pub reverse_gap: bool,
}

pub fn mod_p_analysis(phi: &IntMatrix, p: u64) -> Result<ModPAnalysis> {
    check_automorphism(phi)?;
    let reduced = phi.reduce_mod_p(p);
    let order = reduced.order()?;
    let unipotent_mod_p = reduced.is_unipotent()?;
    let g_res_p = residually_p(phi, p)?;
    Ok(ModPAnalysis {
        p,
        order,
        unipotent_mod_p,
        gbar_residually_p: unipotent_mod_p,
        reverse_gap: g_res_p && !unipotent_mod_p,
    })
}

/// Sol torus-bundle monodromy test (d = 2 only): det = 1 and trace > 2,
/// i.e. eigenvalues {e^{-t}, e^t} with t > 0.
pub fn sol_check(phi: &IntMatrix) -> Result<bool> {
    if phi.dim() != 2 {
        return Err(Error::InvalidInput(format!(
            "sol_check requires d = 2, got d = {}",
            phi.dim()
        )));
    }
    Ok(phi.det().is_one() && phi.trace() > BigInt::from(2))
}

/// One criterion-vs-oracle comparison for a fixed π.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub pi: PrimeSet,
    /// polynomial criterion: no irreducible factor of P_φ in S_π
    pub criterion: bool,
    /// independent lattice route: the torsion kernel N_π vanishes
    pub kernel_zero: bool,
    pub agree: bool,
}

/// The complete decision bundle for one φ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub dim: usize,
    pub matrix: IntMatrix,
    pub char_poly: IntPoly,
    pub factorization: Factorization,
    pub good_primes: PrimeSet,
    pub residually_nilpotent: bool,
    pub residually_tf_nilpotent: bool,
    pub unipotent: bool,
    /// minimal k with φ^k unipotent, when φ is quasi-unipotent
    pub quasi_unipotent: Option<u64>,
    pub virtually_res_all_p: bool,
    pub nilpotency_class_interval: Option<(u32, u32)>,
    pub mod_p_table: Vec<ModPAnalysis>,
    /// d = 2 only
    pub sol_flag: Option<bool>,
    pub oracle_verdicts: Vec<OracleVerdict>,
    /// every internal invariant and oracle agreement held
    pub consistent: bool,
}

pub const DEFAULT_TABLE_PRIMES: [u64; 5] = [2, 3, 5, 7, 11];

pub fn analyze(phi: &IntMatrix) -> Result<ResidualReport> {
    analyze_with_primes(phi, &DEFAULT_TABLE_PRIMES)
}

pub fn analyze_with_primes(phi: &IntMatrix, table_primes: &[u64]) -> Result<ResidualReport> {
    check_automorphism(phi)?;
    let d = phi.dim();
    let char_poly = phi.char_poly();
    let factorization = factor_over_z(&char_poly)?;
    let good = good_primes(phi)?;
    let res_nilp = residually_nilpotent(phi)?;
    let res_tf_nilp = residually_tf_nilpotent(phi)?;
    let unipotent = phi.is_unipotent()?;
    let quasi = phi.is_quasi_unipotent()?;
    let virtually_res_all_p = quasi.is_some();
    let class_interval = nilpotency_class_interval(phi)?;
    let mut mod_p_table = Vec::with_capacity(table_primes.len());
    for &p in table_primes {
        mod_p_table.push(mod_p_analysis(phi, p)?);
    }
    let sol_flag = if d == 2 { Some(sol_check(phi)?) } else { None };

    let oracle_pis = [
        PrimeSet::Empty,
        PrimeSet::all_but(2),
        PrimeSet::all_but(3),
        PrimeSet::all_but(5),
    ];
    let mut oracle_verdicts = Vec::with_capacity(oracle_pis.len());
    for pi in oracle_pis {
        let criterion = residually_pi_tf_nilpotent(phi, &pi)?;
        let kernel_zero = torsion_kernel(phi, &pi)?.is_zero();
        oracle_verdicts.push(OracleVerdict {
            agree: criterion == kernel_zero,
            pi,
            criterion,
            kernel_zero,
        });
    }

    let mut consistent = oracle_verdicts.iter().all(|v| v.agree);
    // unipotent ⟺ good_primes = All ⟺ residually torsion-free nilpotent
    consistent &= (unipotent == matches!(good, PrimeSet::All)) && (unipotent == res_tf_nilp);
    // quasi-unipotent ⟺ has a finite-index subgroup residually p for all p
    consistent &= quasi.is_some() == virtually_res_all_p;
    // good_primes is never cofinite: residually p for infinitely many p
    // happens only in the All case
    consistent &= !matches!(good, PrimeSet::Cofinite(_));
    // Ḡ residually p implies G residually p, i.e. p is a good prime
    for row in &mod_p_table {
        if row.gbar_residually_p {
            consistent &= good.contains_u64(row.p);
        }
    }
    // residually nilpotent = π-tf-nilpotent at π = ∅;
    // residually p = π-tf-nilpotent at π = all-but-p
    consistent &= res_nilp == residually_pi_tf_nilpotent(phi, &PrimeSet::Empty)?;
    for row in &mod_p_table {
        let via_pi = residually_pi_tf_nilpotent(phi, &PrimeSet::all_but(row.p))?;
        consistent &= via_pi == good.contains_u64(row.p);
    }
    if let Some((lo, hi)) = class_interval {
        consistent &= lo <= hi && hi as usize <= d + 1;
    }
    if sol_flag == Some(true) {
        consistent &= !virtually_res_all_p;
    }

    Ok(ResidualReport {
        dim: d,
        matrix: phi.clone(),
        char_poly,
        factorization,
        good_primes: good,
        residually_nilpotent: res_nilp,
        residually_tf_nilpotent: res_tf_nilp,
        unipotent,
        quasi_unipotent: quasi,
        virtually_res_all_p,
        nilpotency_class_interval: class_interval,
        mod_p_table,
        sol_flag,
        oracle_verdicts,
        consistent,
    })
}

fn check_automorphism(phi: &IntMatrix) -> Result<()> {
    if !phi.is_automorphism() {
        return Err(Error::NotAutomorphism(phi.det().to_string()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    #[test]
    fn residually_p_examples() {
        assert!(residually_p(&m(&[vec![0, 1], vec![1, 6]]), 3).unwrap());
        assert!(residually_p(&m(&[vec![0, 1], vec![1, 6]]), 2).unwrap());
        assert!(residually_p(&IntMatrix::identity(2), 7).unwrap());
        assert!(!residually_p(&m(&[vec![2, 1], vec![1, 1]]), 2).unwrap());
    }

    #[test]
    fn good_primes_examples() {
        assert_eq!(
            good_primes(&m(&[vec![0, 1], vec![1, 6]])).unwrap(),
            PrimeSet::finite([2, 3])
        );
        assert_eq!(
            good_primes(&m(&[vec![1, 1], vec![0, 1]])).unwrap(),
            PrimeSet::All
        );
        assert_eq!(
            good_primes(&m(&[vec![2, 1], vec![1, 1]])).unwrap(),
            PrimeSet::Empty
        );
    }

    #[test]
    fn residual_nilpotence_examples() {
        assert!(!residually_nilpotent(&m(&[vec![0, 1], vec![1, 1]])).unwrap());
        assert!(residually_tf_nilpotent(&m(&[vec![1, 1], vec![0, 1]])).unwrap());
        assert!(residually_pi_tf_nilpotent(
            &m(&[vec![0, 1], vec![1, 6]]),
            &PrimeSet::all_but(3)
        )
        .unwrap());
    }

    #[test]
    fn class_interval_examples() {
        assert_eq!(
            nilpotency_class_interval(&IntMatrix::identity(2)).unwrap(),
            Some((1, 2))
        );
        assert_eq!(
            nilpotency_class_interval(&m(&[vec![1, 1], vec![0, 1]])).unwrap(),
            Some((2, 3))
        );
        assert_eq!(
            nilpotency_class_interval(&m(&[vec![0, 1], vec![1, 1]])).unwrap(),
            None
        );
    }

    #[test]
    fn mod_p_examples() {
        let a6 = m(&[vec![0, 1], vec![1, 6]]);
        let row = mod_p_analysis(&a6, 3).unwrap();
        assert_eq!(row.order, 2);
        assert!(!row.unipotent_mod_p);
        assert!(!row.gbar_residually_p);
        assert!(row.reverse_gap);

        let shear = m(&[vec![1, 1], vec![0, 1]]);
        let row = mod_p_analysis(&shear, 2).unwrap();
        assert_eq!(row.order, 2);
        assert!(row.unipotent_mod_p);
        assert!(!row.reverse_gap);

        let row = mod_p_analysis(&IntMatrix::identity(2), 5).unwrap();
        assert_eq!(row.order, 1);
        assert!(row.gbar_residually_p);
    }

    #[test]
    fn sol_examples() {
        assert!(sol_check(&m(&[vec![2, 1], vec![1, 1]])).unwrap());
        assert!(!sol_check(&m(&[vec![0, -1], vec![1, 0]])).unwrap());
        assert!(!sol_check(&IntMatrix::identity(2)).unwrap());
        assert!(sol_check(&IntMatrix::identity(3)).is_err());
    }

    #[test]
    fn analyze_a6() {
        let r = analyze(&m(&[vec![0, 1], vec![1, 6]])).unwrap();
        assert!(r.consistent);
        assert_eq!(r.good_primes, PrimeSet::finite([2, 3]));
        assert_eq!(r.quasi_unipotent, None);
        assert!(!r.virtually_res_all_p);
        let p3 = r.mod_p_table.iter().find(|t| t.p == 3).unwrap();
        assert!(p3.reverse_gap);
    }

    #[test]
    fn analyze_rotation() {
        let r = analyze(&m(&[vec![0, -1], vec![1, 0]])).unwrap();
        assert!(r.consistent);
        assert_eq!(r.good_primes, PrimeSet::finite([2]));
        assert_eq!(r.quasi_unipotent, Some(4));
        assert!(r.virtually_res_all_p);
        assert_eq!(r.sol_flag, Some(false));
    }

    #[test]
    fn analyze_sol() {
        let r = analyze(&m(&[vec![2, 1], vec![1, 1]])).unwrap();
        assert!(r.consistent);
        assert_eq!(r.good_primes, PrimeSet::Empty);
        assert_eq!(r.sol_flag, Some(true));
        assert!(!r.virtually_res_all_p);
    }

    #[test]
    fn analyze_rejects_non_automorphism() {
        assert!(analyze(&m(&[vec![2, 0], vec![0, 1]])).is_err());
    }

    #[test]
    fn report_json_roundtrip() {
        let r = analyze(&m(&[vec![0, 1], vec![1, 6]])).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        let back: ResidualReport = serde_json::from_str(&s).unwrap();
        assert_eq!(r, back);
    }
}

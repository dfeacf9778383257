//! Desk-scale permutation groups: exhaustive element sets, cores,
//! normalizers, subnormality via the iterated-normalizer chain, chains
//! with Z/p factors, and the [G:H_G] | [G:H]^{[G:N_G(H)]} divisibility
//! check, all verified over a small fixed catalog of groups.

use crate::{Error, Result};
use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

pub const DEFAULT_ORDER_CAP: usize = 20160;

/// A permutation of {0, …, n−1}, stored as its image array.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n || seen[v] {
                return Err(Error::InvalidInput(format!(
                    "not a permutation of 0..{}: {:?}",
                    n, images
                )));
            }
            seen[v] = true;
        }
        Ok(Perm { images })
    }

    pub fn identity(n: usize) -> Self {
        Perm {
            images: (0..n).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    /// (self ∘ other)(x) = self(other(x)).
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0; self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            images[y] = x;
        }
        Perm { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x == y)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // cycle notation
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut wrote = false;
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                continue;
            }
            write!(f, "(")?;
            let mut x = start;
            let mut first = true;
            while !seen[x] {
                seen[x] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{}", x)?;
                first = false;
                x = self.images[x];
            }
            write!(f, ")")?;
            wrote = true;
        }
        if !wrote {
            write!(f, "e")?;
        }
        Ok(())
    }
}

/// A permutation group with its full element set materialized.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
}

// equality is by element set; the generating set is incidental
impl PartialEq for PermGroup {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.elements == other.elements
    }
}

impl Eq for PermGroup {}

impl PermGroup {
    pub fn from_generators(degree: usize, generators: Vec<Perm>) -> Result<Self> {
        Self::from_generators_capped(degree, generators, DEFAULT_ORDER_CAP)
    }

    pub fn from_generators_capped(
        degree: usize,
        generators: Vec<Perm>,
        cap: usize,
    ) -> Result<Self> {
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::InvalidInput(format!(
                    "generator degree {} does not match group degree {}",
                    g.degree(),
                    degree
                )));
            }
        }
        let elements = close_under_products(degree, &generators, cap)?;
        Ok(PermGroup {
            degree,
            generators,
            elements,
        })
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup {
            degree,
            generators: vec![],
            elements: vec![Perm::identity(degree)],
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Sorted, deduplicated.
    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.elements.iter().all(|g| other.contains(g))
    }

    /// [self : other], assuming other ≤ self.
    pub fn index_of(&self, other: &PermGroup) -> usize {
        debug_assert!(other.is_subgroup_of(self));
        debug_assert_eq!(self.order() % other.order(), 0);
        self.order() / other.order()
    }

    /// g · self · g^{-1}.
    pub fn conjugate_by(&self, g: &Perm) -> PermGroup {
        let gi = g.inverse();
        let mut elements: Vec<Perm> = self
            .elements
            .iter()
            .map(|h| g.compose(h).compose(&gi))
            .collect();
        elements.sort();
        PermGroup {
            degree: self.degree,
            generators: self
                .generators
                .iter()
                .map(|h| g.compose(h).compose(&gi))
                .collect(),
            elements,
        }
    }

    pub fn intersection(&self, other: &PermGroup) -> PermGroup {
        let elements: Vec<Perm> = self
            .elements
            .iter()
            .filter(|g| other.contains(g))
            .cloned()
            .collect();
        PermGroup {
            degree: self.degree,
            generators: elements.clone(),
            elements,
        }
    }

    pub fn is_normal_in(&self, big: &PermGroup) -> bool {
        big.elements
            .iter()
            .all(|g| self.conjugate_by(g).elements == self.elements)
    }

    fn from_element_set(degree: usize, mut elements: Vec<Perm>) -> PermGroup {
        elements.sort();
        elements.dedup();
        PermGroup {
            degree,
            generators: elements.clone(),
            elements,
        }
    }

    /// Every subgroup, by closure fixpoint over the element set.
    pub fn all_subgroups(&self) -> Vec<PermGroup> {
        let mut seen: BTreeSet<Vec<Perm>> = BTreeSet::new();
        seen.insert(PermGroup::trivial(self.degree).elements.clone());
        let mut frontier: Vec<Vec<Perm>> = seen.iter().cloned().collect();
        while let Some(current) = frontier.pop() {
            for g in &self.elements {
                let mut gens: Vec<Perm> = current.clone();
                gens.push(g.clone());
                let closed = close_under_products(self.degree, &gens, self.order())
                    .expect("subgroup closure exceeds parent order");
                if seen.insert(closed.clone()) {
                    frontier.push(closed);
                }
            }
        }
        seen.into_iter()
            .map(|els| PermGroup::from_element_set(self.degree, els))
            .collect()
    }
}

fn close_under_products(degree: usize, gens: &[Perm], cap: usize) -> Result<Vec<Perm>> {
    let mut set: BTreeSet<Perm> = BTreeSet::new();
    set.insert(Perm::identity(degree));
    let mut frontier: Vec<Perm> = vec![Perm::identity(degree)];
    while let Some(g) = frontier.pop() {
        for h in gens {
            let gh = g.compose(h);
            if set.insert(gh.clone()) {
                if set.len() > cap {
                    return Err(Error::OrderCap(format!(
                        "group order exceeds cap {}",
                        cap
                    )));
                }
                frontier.push(gh);
            }
        }
    }
    // gens have finite order, so products alone close the set
    Ok(set.into_iter().collect())
}

/// H_G = ⋂_{g∈G} gHg^{-1}: the largest normal subgroup of G inside H.
pub fn core(big: &PermGroup, sub: &PermGroup) -> PermGroup {
    let elements: Vec<Perm> = sub
        .elements
        .iter()
        .filter(|h| {
            big.elements
                .iter()
                .all(|g| sub.contains(&g.compose(h).compose(&g.inverse())))
        })
        .cloned()
        .collect();
    PermGroup::from_element_set(big.degree, elements)
}

/// N_G(H) = {g : gHg^{-1} = H}.
pub fn normalizer(big: &PermGroup, sub: &PermGroup) -> PermGroup {
    let elements: Vec<Perm> = big
        .elements
        .iter()
        .filter(|g| sub.conjugate_by(g).elements == sub.elements)
        .cloned()
        .collect();
    PermGroup::from_element_set(big.degree, elements)
}

/// [G : N_G(H)], checked against the number of distinct conjugates.
pub fn conjugate_count(big: &PermGroup, sub: &PermGroup) -> usize {
    let by_index = big.index_of(&normalizer(big, sub));
    let distinct: BTreeSet<Vec<Perm>> = big
        .elements
        .iter()
        .map(|g| sub.conjugate_by(g).elements)
        .collect();
    assert_eq!(by_index, distinct.len());
    by_index
}

/// Subnormality via the iterated-normalizer chain H ≤ N(H) ≤ N(N(H)) ≤ …;
/// in a finite group H is subnormal iff the chain reaches G. On success
/// returns the ascending chain H = C_0 ⊴ C_1 ⊴ … ⊴ C_n = G.
pub fn subnormal_chain(big: &PermGroup, sub: &PermGroup) -> Option<Vec<PermGroup>> {
    let mut chain = vec![sub.clone()];
    loop {
        let current = chain.last().unwrap();
        if current.order() == big.order() {
            return Some(chain);
        }
        let next = normalizer(big, current);
        if next.order() == current.order() {
            return None;
        }
        chain.push(next);
    }
}

pub fn is_subnormal(big: &PermGroup, sub: &PermGroup) -> bool {
    subnormal_chain(big, sub).is_some()
}

/// Refine a subnormal inclusion of p-power index into a chain
/// H = H_0 ⊲ H_1 ⊲ … ⊲ H_n = G with every [H_{i+1} : H_i] = p.
pub fn p_refined_chain(big: &PermGroup, sub: &PermGroup, p: usize) -> Result<Vec<PermGroup>> {
    let index = big.index_of(sub);
    if !is_power_of(index, p) {
        return Err(Error::InvalidInput(format!(
            "index {} is not a power of {}",
            index, p
        )));
    }
    if !is_subnormal(big, sub) {
        return Err(Error::InvalidInput("subgroup is not subnormal".into()));
    }
    let mut chain = vec![big.clone()];
    let mut top = big.clone();
    while top.order() > sub.order() {
        let step = top
            .all_subgroups()
            .into_iter()
            .find(|k| {
                k.order() * p == top.order() && sub.is_subgroup_of(k) && k.is_normal_in(&top)
            })
            .ok_or_else(|| {
                Error::Inconsistency("no normal index-p step found in refinement".into())
            })?;
        chain.push(step.clone());
        top = step;
    }
    chain.reverse();
    Ok(chain)
}

fn is_power_of(mut n: usize, p: usize) -> bool {
    if n == 0 {
        return false;
    }
    while n % p == 0 {
        n /= p;
    }
    n == 1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyLemmaRecord {
    /// [G : H_G]
    pub lhs: u64,
    /// [G : H]^{[G : N_G(H)]}
    pub rhs: BigUint,
    pub subnormal: bool,
    pub divides: bool,
}

/// Does [G:H_G] divide [G:H]^{[G:N_G(H)]}? Guaranteed for subnormal H;
/// also computable for non-subnormal H as a negative control.
pub fn key_lemma_check(big: &PermGroup, sub: &PermGroup) -> KeyLemmaRecord {
    let lhs = big.index_of(&core(big, sub)) as u64;
    let index = BigUint::from(big.index_of(sub));
    let exponent = big.index_of(&normalizer(big, sub)) as u32;
    let rhs = index.pow(exponent);
    let divides = !rhs.is_zero() && (&rhs % BigUint::from(lhs)).is_zero();
    KeyLemmaRecord {
        lhs,
        rhs,
        subnormal: is_subnormal(big, sub),
        divides,
    }
}

/// Both divisibility statements: [K : H∩K] | [G:H] for every subnormal H
/// and every K in the list, and [G : ⋂H_i] | ∏[G : H_i].
pub fn intersection_checks(big: &PermGroup, subs: &[PermGroup]) -> bool {
    for h in subs {
        if !is_subnormal(big, h) {
            continue;
        }
        let gh = big.index_of(h);
        for k in subs {
            let hk = h.intersection(k);
            if gh % k.index_of(&hk) != 0 {
                return false;
            }
        }
    }
    let mut meet = big.clone();
    let mut product = BigUint::from(1u32);
    for h in subs {
        meet = meet.intersection(h);
        product *= BigUint::from(big.index_of(h));
    }
    (product % BigUint::from(big.index_of(&meet))).is_zero()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakRespRecord {
    pub subnormal_witness: Option<PermGroup>,
    pub normal_witness: Option<PermGroup>,
    pub agree: bool,
}

/// Search for a subnormal subgroup of p-power index avoiding g, and for
/// a normal one; the two searches must succeed or fail together (taking
/// the core of a subnormal witness yields a normal witness).
pub fn weakly_resp_check(big: &PermGroup, p: usize, g: &Perm) -> Result<WeakRespRecord> {
    weakly_resp_check_with(big, &big.all_subgroups(), p, g)
}

/// As `weakly_resp_check`, reusing an already-computed subgroup list.
pub fn weakly_resp_check_with(
    big: &PermGroup,
    subgroups: &[PermGroup],
    p: usize,
    g: &Perm,
) -> Result<WeakRespRecord> {
    if g.is_identity() {
        return Err(Error::InvalidInput(
            "weak-residual check needs a nontrivial element".into(),
        ));
    }
    let subnormal_witness = subgroups
        .iter()
        .find(|h| is_power_of(big.index_of(h), p) && !h.contains(g) && is_subnormal(big, h))
        .cloned();
    let normal_witness = subgroups
        .iter()
        .find(|h| is_power_of(big.index_of(h), p) && !h.contains(g) && h.is_normal_in(big))
        .cloned();
    let agree = subnormal_witness.is_some() == normal_witness.is_some();
    Ok(WeakRespRecord {
        subnormal_witness,
        normal_witness,
        agree,
    })
}

/// One entry of the fixed verification catalog.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub degree: usize,
    pub generators: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Catalog {
    pub groups: Vec<CatalogEntry>,
}

impl CatalogEntry {
    pub fn build(&self) -> Result<PermGroup> {
        let gens = self
            .generators
            .iter()
            .map(|v| Perm::new(v.clone()))
            .collect::<Result<Vec<_>>>()?;
        PermGroup::from_generators(self.degree, gens)
    }
}

pub fn parse_catalog(json: &str) -> Result<Catalog> {
    serde_json::from_str(json).map_err(|e| Error::Parse(format!("catalog: {}", e)))
}

/// The built-in ten-group catalog.
pub fn builtin_catalog() -> Catalog {
    parse_catalog(include_str!("../data/groups.json")).expect("builtin catalog is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn by_name(name: &str) -> PermGroup {
        builtin_catalog()
            .groups
            .iter()
            .find(|e| e.name == name)
            .unwrap()
            .build()
            .unwrap()
    }

    fn subgroup(parent: &PermGroup, gens: &[Vec<usize>]) -> PermGroup {
        let gens: Vec<Perm> = gens.iter().map(|v| Perm::new(v.clone()).unwrap()).collect();
        let h = PermGroup::from_generators(parent.degree(), gens).unwrap();
        assert!(h.is_subgroup_of(parent));
        h
    }

    #[test]
    fn catalog_orders() {
        let expected = [
            ("S3", 6),
            ("S4", 24),
            ("A4", 12),
            ("D4", 8),
            ("D5", 10),
            ("D6", 12),
            ("Q8", 8),
            ("Z12", 12),
            ("Z2xZ2xZ2", 8),
            ("D8", 16),
        ];
        for (name, order) in expected {
            assert_eq!(by_name(name).order(), order, "group {}", name);
        }
    }

    #[test]
    fn core_examples() {
        let s3 = by_name("S3");
        let h = subgroup(&s3, &[vec![1, 0, 2]]);
        assert_eq!(core(&s3, &h).order(), 1);

        let a3 = subgroup(&s3, &[vec![1, 2, 0]]);
        assert_eq!(core(&s3, &a3), a3);

        let d4 = by_name("D4");
        let s = subgroup(&d4, &[vec![0, 3, 2, 1]]);
        assert_eq!(core(&d4, &s).order(), 1);
    }

    #[test]
    fn normalizer_examples() {
        let s3 = by_name("S3");
        let h = subgroup(&s3, &[vec![1, 0, 2]]);
        assert_eq!(normalizer(&s3, &h), h);
        assert_eq!(conjugate_count(&s3, &h), 3);

        let a3 = subgroup(&s3, &[vec![1, 2, 0]]);
        assert_eq!(normalizer(&s3, &a3).order(), 6);
        assert_eq!(conjugate_count(&s3, &a3), 1);

        let a4 = by_name("A4");
        let h = subgroup(&a4, &[vec![1, 0, 3, 2]]);
        let n = normalizer(&a4, &h);
        assert_eq!(n.order(), 4);
        assert_eq!(conjugate_count(&a4, &h), 3);
    }

    #[test]
    fn subnormality_examples() {
        let s3 = by_name("S3");
        let h = subgroup(&s3, &[vec![1, 0, 2]]);
        assert!(!is_subnormal(&s3, &h));

        let a3 = subgroup(&s3, &[vec![1, 2, 0]]);
        let chain = subnormal_chain(&s3, &a3).unwrap();
        assert_eq!(chain.len(), 2);

        // every subgroup of a p-group is subnormal
        for name in ["D4", "Q8"] {
            let g = by_name(name);
            for h in g.all_subgroups() {
                assert!(is_subnormal(&g, &h), "{} subgroup of order {}", name, h.order());
            }
        }
    }

    #[test]
    fn p_refinement_examples() {
        let d4 = by_name("D4");
        let s = subgroup(&d4, &[vec![0, 3, 2, 1]]);
        let chain = p_refined_chain(&d4, &s, 2).unwrap();
        assert_eq!(chain.len(), 3);
        for w in chain.windows(2) {
            assert_eq!(w[1].index_of(&w[0]), 2);
            assert!(w[0].is_normal_in(&w[1]));
        }

        assert_eq!(p_refined_chain(&d4, &d4, 2).unwrap().len(), 1);

        let z12 = by_name("Z12");
        let h = subgroup(&z12, &[vec![2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 0, 1]]);
        let chain = p_refined_chain(&z12, &h, 2).unwrap();
        assert_eq!(chain.len(), 2);
    }

    #[test]
    fn key_lemma_examples() {
        let a4 = by_name("A4");
        let h = subgroup(&a4, &[vec![1, 0, 3, 2]]);
        let rec = key_lemma_check(&a4, &h);
        assert!(rec.subnormal);
        assert_eq!(rec.lhs, 12);
        assert_eq!(rec.rhs, BigUint::from(216u32));
        assert!(rec.divides);

        let d4 = by_name("D4");
        let s = subgroup(&d4, &[vec![0, 3, 2, 1]]);
        let rec = key_lemma_check(&d4, &s);
        assert_eq!(rec.lhs, 8);
        assert_eq!(rec.rhs, BigUint::from(16u32));
        assert!(rec.divides);

        // negative control: a non-subnormal subgroup can fail
        let s3 = by_name("S3");
        let h = subgroup(&s3, &[vec![1, 0, 2]]);
        let rec = key_lemma_check(&s3, &h);
        assert!(!rec.subnormal);
        assert_eq!(rec.lhs, 6);
        assert_eq!(rec.rhs, BigUint::from(27u32));
        assert!(!rec.divides);
    }

    #[test]
    fn intersection_examples() {
        let d4 = by_name("D4");
        let h = subgroup(&d4, &[vec![2, 3, 0, 1], vec![0, 3, 2, 1]]);
        let k = subgroup(&d4, &[vec![1, 2, 3, 0]]);
        assert!(intersection_checks(&d4, &[h, k]));

        let q8 = by_name("Q8");
        let gi = subgroup(&q8, &[vec![2, 3, 1, 0, 6, 7, 5, 4]]);
        let gj = subgroup(&q8, &[vec![4, 5, 7, 6, 1, 0, 2, 3]]);
        assert_eq!(gi.intersection(&gj).order(), 2);
        assert!(intersection_checks(&q8, &[gi, gj]));
    }

    #[test]
    fn weak_resp_examples() {
        let d4 = by_name("D4");
        let r = Perm::new(vec![1, 2, 3, 0]).unwrap();
        let rec = weakly_resp_check(&d4, 2, &r).unwrap();
        assert!(rec.subnormal_witness.is_some());
        assert!(rec.normal_witness.is_some());
        assert!(rec.agree);

        let s3 = by_name("S3");
        let t = Perm::new(vec![1, 0, 2]).unwrap();
        let rec = weakly_resp_check(&s3, 3, &t).unwrap();
        assert!(rec.subnormal_witness.is_none());
        assert!(rec.normal_witness.is_none());
        assert!(rec.agree);
    }

    #[test]
    fn all_subgroups_counts() {
        assert_eq!(by_name("S3").all_subgroups().len(), 6);
        assert_eq!(by_name("D4").all_subgroups().len(), 10);
        assert_eq!(by_name("Q8").all_subgroups().len(), 6);
        assert_eq!(by_name("S4").all_subgroups().len(), 30);
    }

    #[test]
    fn order_cap_enforced() {
        let big = Perm::new((1..10).chain([0]).collect()).unwrap();
        assert!(PermGroup::from_generators_capped(10, vec![big], 5).is_err());
    }
}

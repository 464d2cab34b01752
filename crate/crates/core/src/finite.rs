//! Finite subgroups: breadth-first closure, the signed permutation group
//! `W_n`, the edge-permutation group `Sigma` of rank `n`, `S_n`-invariant
//! subgroups of `(Z/2)^n`, and the mod-2 shadow in `GL(n, 2)`.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::generators::{eps, lambda, lemma3_embed, perm, special, Perm, Special};
use crate::matrix::ModMatrix;

pub const DEFAULT_CLOSURE_CAP: usize = 100_000;

/// Elements of a finite group under a fallible product.
pub trait GroupElement: Clone + Ord {
    fn op(&self, other: &Self) -> Result<Self>;
}

impl GroupElement for Endo {
    fn op(&self, other: &Self) -> Result<Self> {
        self.compose(other)
    }
}

impl GroupElement for ModMatrix {
    fn op(&self, other: &Self) -> Result<Self> {
        self.mul(other)
    }
}

/// A finite set of group elements in canonical (sorted) order, together with
/// the identity it was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementSet<T> {
    identity: T,
    elements: Vec<T>,
}

pub type EndoSet = ElementSet<Endo>;
pub type ModMatrixSet = ElementSet<ModMatrix>;

impl<T: GroupElement> ElementSet<T> {
    fn from_sorted(identity: T, elements: Vec<T>) -> Self {
        ElementSet { identity, elements }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn identity(&self) -> &T {
        &self.identity
    }

    pub fn elements(&self) -> &[T] {
        &self.elements
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.elements.iter()
    }

    pub fn contains(&self, x: &T) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    pub fn intersection(&self, other: &Self) -> Vec<T> {
        self.elements
            .iter()
            .filter(|x| other.contains(x))
            .cloned()
            .collect()
    }

    /// Whether the product of any two members is a member.
    pub fn is_closed(&self) -> Result<bool> {
        for a in &self.elements {
            for b in &self.elements {
                if !self.contains(&a.op(b)?) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Inverse of a member, found inside the set.
    pub fn inverse_of(&self, x: &T) -> Result<T> {
        for y in &self.elements {
            if x.op(y)? == self.identity {
                return Ok(y.clone());
            }
        }
        Err(Error::ElementNotInGroup)
    }

    /// Position of `x` in canonical order.
    pub fn index_of(&self, x: &T) -> Option<usize> {
        self.elements.binary_search(x).ok()
    }
}

/// Smallest product-closed set containing `gens` and `identity`, built
/// breadth-first by right multiplication with generators.
pub fn closure<T: GroupElement>(gens: &[T], identity: T, cap: usize) -> Result<ElementSet<T>> {
    let mut seen: BTreeSet<T> = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(identity.clone());
    queue.push_back(identity.clone());
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.op(g)?;
            if seen.contains(&y) {
                continue;
            }
            if seen.len() >= cap {
                return Err(Error::ClosureCapExceeded { cap });
            }
            seen.insert(y.clone());
            queue.push_back(y);
        }
    }
    Ok(ElementSet::from_sorted(
        identity,
        seen.into_iter().collect(),
    ))
}

pub fn closure_endos(gens: &[Endo], rank: usize, cap: usize) -> Result<EndoSet> {
    if let Some(g) = gens.iter().find(|g| g.rank() != rank) {
        return Err(Error::RankMismatch {
            left: rank,
            right: g.rank(),
        });
    }
    closure(gens, Endo::identity(rank), cap)
}

/// Sign flips together with adjacent transpositions.
pub fn wn_generators(n: usize) -> Result<Vec<Endo>> {
    let mut gens = (1..=n).map(|i| eps(i, n)).collect::<Result<Vec<_>>>()?;
    for i in 1..n {
        gens.push(perm(&Perm::transposition(i, i + 1, n)?, n)?);
    }
    Ok(gens)
}

pub fn build_wn(n: usize) -> Result<EndoSet> {
    closure_endos(&wn_generators(n)?, n, DEFAULT_CLOSURE_CAP)
}

/// Closure of the edge transpositions `(i, n+1)`, which generate the
/// symmetric group on `n + 1` edges.
pub fn build_sigma(n: usize) -> Result<EndoSet> {
    let gens = (1..=n)
        .map(|i| lemma3_embed(&Perm::transposition(i, n + 1, n + 1)?, n))
        .collect::<Result<Vec<_>>>()?;
    closure_endos(&gens, n, DEFAULT_CLOSURE_CAP)
}

/// Conjugation-closure of `x` inside a finite group: the subgroup generated
/// by all `g x g^{-1}`.
pub fn normal_closure_in_finite<T: GroupElement>(
    group: &ElementSet<T>,
    x: &T,
) -> Result<ElementSet<T>> {
    if !group.contains(x) {
        return Err(Error::ElementNotInGroup);
    }
    let mut conjugates = BTreeSet::new();
    for g in group.iter() {
        let g_inv = group.inverse_of(g)?;
        conjugates.insert(g.op(x)?.op(&g_inv)?);
    }
    let gens: Vec<T> = conjugates.into_iter().collect();
    closure(&gens, group.identity().clone(), group.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SubgroupLabel {
    Trivial,
    /// `<z>`, the all-ones vector.
    Diag,
    /// `H`, the even-weight vectors.
    EvenWeight,
    /// `N`, the whole group.
    Full,
    Other,
}

/// A subgroup of `(Z/2)^n`; vectors are bitmasks with bit `i - 1` for `e_i`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Vec2Subgroup {
    pub n: usize,
    pub elements: BTreeSet<u32>,
}

impl Vec2Subgroup {
    pub fn span(n: usize, gens: impl IntoIterator<Item = u32>) -> Vec2Subgroup {
        let mut elements = BTreeSet::from([0u32]);
        for g in gens {
            if elements.contains(&g) {
                continue;
            }
            let shifted: Vec<u32> = elements.iter().map(|x| x ^ g).collect();
            elements.extend(shifted);
        }
        Vec2Subgroup { n, elements }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.elements.contains(&v)
    }

    pub fn all_ones(&self) -> u32 {
        ones(self.n)
    }

    fn is_even_weight(&self) -> bool {
        self.order() == 1 << (self.n - 1) && self.elements.iter().all(|v| v.count_ones() % 2 == 0)
    }

    pub fn is_sn_invariant(&self) -> bool {
        (0..self.n.saturating_sub(1)).all(|i| {
            self.elements
                .iter()
                .all(|&v| self.contains(swap_bits(v, i, i + 1)))
        })
    }

    /// Label by first match in the order trivial, full, diag, even weight.
    /// Small ranks make some of these coincide.
    pub fn label(&self) -> SubgroupLabel {
        let all = self.all_ones();
        if self.order() == 1 {
            SubgroupLabel::Trivial
        } else if self.order() == 1 << self.n {
            SubgroupLabel::Full
        } else if self.order() == 2 && self.contains(all) {
            SubgroupLabel::Diag
        } else if self.is_even_weight() {
            SubgroupLabel::EvenWeight
        } else {
            SubgroupLabel::Other
        }
    }

    /// The sign-flip automorphism `prod e(i)` over the support of `v`.
    pub fn vector_to_endo(v: u32, n: usize) -> Result<Endo> {
        (1..=n)
            .filter(|i| v >> (i - 1) & 1 == 1)
            .try_fold(Endo::identity(n), |acc, i| acc.compose(&eps(i, n)?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantSubgroup {
    pub label: SubgroupLabel,
    pub order: usize,
    pub subgroup: Vec2Subgroup,
}

fn ones(n: usize) -> u32 {
    if n == 0 {
        0
    } else {
        u32::MAX >> (32 - n)
    }
}

fn swap_bits(v: u32, i: usize, j: usize) -> u32 {
    let bi = v >> i & 1;
    let bj = v >> j & 1;
    if bi == bj {
        v
    } else {
        v ^ (1 << i) ^ (1 << j)
    }
}

pub const MAX_INVARIANT_RANK: usize = 12;

/// All `S_n`-invariant subgroups of `(Z/2)^n`. Orbits of vectors under
/// coordinate permutation are the weight classes; an invariant subgroup is
/// spanned by the orbits it contains, so spanning every set of weight
/// classes enumerates them all. Sorted by order, then elements.
pub fn sn_invariant_subgroups(n: usize) -> Result<Vec<InvariantSubgroup>> {
    if n > MAX_INVARIANT_RANK {
        return Err(Error::RankTooLarge {
            rank: n,
            max: MAX_INVARIANT_RANK,
        });
    }
    if n == 0 {
        return Err(Error::UnsupportedRank {
            name: "invariant subgroups".into(),
            rank: 0,
        });
    }
    let orbits: Vec<Vec<u32>> = (1..=n as u32)
        .map(|w| (0..1u32 << n).filter(|v| v.count_ones() == w).collect())
        .collect();
    let mut found: BTreeSet<Vec2Subgroup> = BTreeSet::new();
    for mask in 0..1u32 << n {
        let gens = orbits
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .flat_map(|(_, orbit)| orbit.iter().copied());
        found.insert(Vec2Subgroup::span(n, gens));
    }
    let mut out: Vec<InvariantSubgroup> = found
        .into_iter()
        .map(|subgroup| InvariantSubgroup {
            label: subgroup.label(),
            order: subgroup.order(),
            subgroup,
        })
        .collect();
    out.sort_by(|a, b| (a.order, &a.subgroup).cmp(&(b.order, &b.subgroup)));
    Ok(out)
}

/// All `l(i,j)` together with `iota`.
pub fn default_shadow_generators(n: usize) -> Result<Vec<Endo>> {
    let mut gens = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            if i != j {
                gens.push(lambda(i, j, n)?);
            }
        }
    }
    gens.push(special(Special::Iota, n)?);
    Ok(gens)
}

/// Image of an automorphism in `GL(n, 2)`.
pub fn mod2_image(f: &Endo) -> Result<ModMatrix> {
    f.abelianize().mod_reduce(2)
}

/// Closure of the mod-2 abelianizations of `gens`.
pub fn gl2_shadow(n: usize, gens: &[Endo], cap: usize) -> Result<ModMatrixSet> {
    let images = gens
        .iter()
        .map(|g| {
            if g.rank() != n {
                return Err(Error::RankMismatch {
                    left: n,
                    right: g.rank(),
                });
            }
            mod2_image(g)
        })
        .collect::<Result<Vec<_>>>()?;
    closure(&images, ModMatrix::identity(n, 2)?, cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Every subset of `(Z/2)^n` that is a subgroup and permutation invariant.
    fn brute_force_invariant(n: usize) -> BTreeSet<BTreeSet<u32>> {
        let size = 1usize << n;
        let mut out = BTreeSet::new();
        for subset in 0u64..1 << size {
            if subset & 1 == 0 {
                continue;
            }
            let members: BTreeSet<u32> =
                (0..size as u32).filter(|v| subset >> v & 1 == 1).collect();
            let closed = members
                .iter()
                .all(|a| members.iter().all(|b| members.contains(&(a ^ b))));
            let invariant = members
                .iter()
                .all(|&v| (0..n).all(|i| (0..n).all(|j| members.contains(&swap_bits(v, i, j)))));
            if closed && invariant {
                out.insert(members);
            }
        }
        out
    }

    #[test]
    fn invariant_subgroups_match_brute_force() {
        for n in 2..=4 {
            let fast: BTreeSet<BTreeSet<u32>> = sn_invariant_subgroups(n)
                .unwrap()
                .into_iter()
                .map(|s| s.subgroup.elements)
                .collect();
            assert_eq!(fast, brute_force_invariant(n), "n = {n}");
        }
    }

    #[test]
    fn rank_two_collapses_diag_and_even_weight() {
        let subs = sn_invariant_subgroups(2).unwrap();
        let labels: Vec<SubgroupLabel> = subs.iter().map(|s| s.label).collect();
        assert_eq!(
            labels,
            vec![
                SubgroupLabel::Trivial,
                SubgroupLabel::Diag,
                SubgroupLabel::Full
            ]
        );
        // the diagonal {00, 11} is also the even-weight subgroup
        assert!(subs[1].subgroup.is_even_weight());
    }

    #[test]
    fn invariant_rank_limits() {
        assert!(matches!(
            sn_invariant_subgroups(13),
            Err(Error::RankTooLarge { .. })
        ));
        assert!(sn_invariant_subgroups(0).is_err());
    }

    #[test]
    fn closure_basics() {
        let l = lambda(1, 2, 3).unwrap();
        assert_eq!(
            closure_endos(&[l], 3, 50),
            Err(Error::ClosureCapExceeded { cap: 50 })
        );
        let trivial = closure_endos(&[], 3, 10).unwrap();
        assert_eq!(trivial.len(), 1);
        assert!(trivial.elements()[0].is_identity());
        assert!(closure_endos(&[eps(1, 4).unwrap()], 3, 10).is_err());
    }

    #[test]
    fn wn_sizes_and_lagrange() {
        let w3 = build_wn(3).unwrap();
        assert_eq!(w3.len(), 48);
        for f in w3.iter() {
            let k = f.order_with_cap(48).unwrap();
            assert_eq!(48 % k, 0);
        }
    }

    #[test]
    fn center_of_w3() {
        let w3 = build_wn(3).unwrap();
        let z = special(Special::Z, 3).unwrap();
        let nc = normal_closure_in_finite(&w3, &z).unwrap();
        assert_eq!(nc.len(), 2);
        assert!(nc.contains(&z));
        let id = normal_closure_in_finite(&w3, &Endo::identity(3)).unwrap();
        assert_eq!(id.len(), 1);
        assert_eq!(
            normal_closure_in_finite(&w3, &lambda(1, 2, 3).unwrap()),
            Err(Error::ElementNotInGroup)
        );
    }

    #[test]
    fn shadow_relations() {
        let gens = default_shadow_generators(3).unwrap();
        let shadow = gl2_shadow(3, &gens, DEFAULT_CLOSURE_CAP).unwrap();
        assert_eq!(shadow.len(), 168);
        assert!(mod2_image(&lambda(2, 3, 3).unwrap().power(2).unwrap())
            .unwrap()
            .is_identity());
        assert!(mod2_image(&eps(2, 3).unwrap()).unwrap().is_identity());
    }

    #[test]
    fn vector_endos() {
        let z = Vec2Subgroup::vector_to_endo(0b111, 3).unwrap();
        assert_eq!(z, special(Special::Z, 3).unwrap());
        assert!(Vec2Subgroup::vector_to_endo(0, 3).unwrap().is_identity());
    }
}

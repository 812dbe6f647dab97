//! Boolean subalgebras of dimension d inside a set family.
//!
//! A witness is described by its atoms `A_0, A_1, …, A_d`: pairwise disjoint,
//! `A_1..A_d` nonempty, and `B_I = A_0 ∪ ⋃_{i∈I} A_i` a family member for every
//! `I ⊆ [d]`. `A_0` may be empty unless strict mode is requested.

use std::collections::{HashMap, HashSet};
use std::ops::ControlFlow;

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::family::SetFamily;
use crate::set::FiniteSet;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BooleanAlgebraWitness {
    pub d: usize,
    /// `index_map[I]` is the member index of `B_I`, where bit `i - 1` of the
    /// mask `I` stands for atom `A_i`.
    pub index_map: Vec<usize>,
    /// `atoms[0]` is `A_0`; `atoms[1..]` are sorted by least element.
    pub atoms: Vec<FiniteSet>,
}

impl BooleanAlgebraWitness {
    /// `B_I` computed from the atoms.
    pub fn set_for(&self, mask: usize) -> FiniteSet {
        let mut s = self.atoms[0].clone();
        for i in 1..=self.d {
            if mask & (1 << (i - 1)) != 0 {
                s.union_with(&self.atoms[i]);
            }
        }
        s
    }

    pub fn sets(&self) -> Vec<FiniteSet> {
        (0..1usize << self.d).map(|m| self.set_for(m)).collect()
    }

    pub fn member_indices(&self) -> Vec<usize> {
        let mut v = self.index_map.clone();
        v.sort_unstable();
        v
    }

    /// Full check of the index-map definition against `family`: distinct
    /// members, and `B_I ∪ B_J = B_{I∪J}`, `B_I ∩ B_J = B_{I∩J}` for all pairs.
    pub fn verify(&self, family: &SetFamily) -> bool {
        let n = 1usize << self.d;
        if self.index_map.len() != n || self.index_map.iter().any(|&i| i >= family.len()) {
            return false;
        }
        let distinct: HashSet<usize> = self.index_map.iter().copied().collect();
        if distinct.len() != n {
            return false;
        }
        let b = |m: usize| family.member(self.index_map[m]);
        for i in 0..n {
            for j in 0..n {
                if &b(i).union(b(j)) != b(i | j) || &b(i).intersection(b(j)) != b(i & j) {
                    return false;
                }
            }
        }
        (0..n).all(|m| &self.set_for(m) == b(m))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("witness serializes")
    }
}

struct MemberMap<'a>(&'a [usize]);

impl Serialize for MemberMap<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (mask, idx) in self.0.iter().enumerate() {
            map.serialize_entry(&mask.to_string(), idx)?;
        }
        map.end()
    }
}

impl Serialize for BooleanAlgebraWitness {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let atoms: Vec<Vec<usize>> = self.atoms.iter().map(FiniteSet::elements).collect();
        let mut st = s.serialize_struct("BooleanAlgebraWitness", 3)?;
        st.serialize_field("d", &self.d)?;
        st.serialize_field("atoms", &atoms)?;
        st.serialize_field("members", &MemberMap(&self.index_map))?;
        st.end()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumerateOptions {
    /// Stop after this many witnesses.
    pub limit: Option<usize>,
    /// Require a nonempty base atom `A_0`.
    pub strict: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("more than {limit} Boolean algebras of dimension {d}; returning the first {limit}")]
    LimitExceeded {
        d: usize,
        limit: usize,
        partial: Vec<BooleanAlgebraWitness>,
    },
}

/// Visits every canonical witness whose members all lie in `active`, grouped
/// by base member in `active` order.
pub(crate) fn for_each_algebra<B>(
    sets: &[FiniteSet],
    active: &[usize],
    d: usize,
    strict: bool,
    visit: &mut dyn FnMut(BooleanAlgebraWitness) -> ControlFlow<B>,
) -> ControlFlow<B> {
    assert!(d >= 1, "dimension must be at least 1");
    if d >= usize::BITS as usize - 1 || active.len() < 1 << d {
        return ControlFlow::Continue(());
    }
    let lookup: HashMap<&FiniteSet, usize> = active.iter().map(|&i| (&sets[i], i)).collect();
    for &base_idx in active {
        let base = &sets[base_idx];
        if strict && base.is_empty() {
            continue;
        }
        let atoms: Vec<FiniteSet> = active
            .iter()
            .filter(|&&g| base.is_proper_subset(&sets[g]))
            .map(|&g| sets[g].difference(base))
            .collect();
        if atoms.len() < d {
            continue;
        }
        // unions[mask] over the chosen atoms, as member indices
        let mut unions: Vec<(FiniteSet, usize)> = vec![(base.clone(), base_idx)];
        let mut chosen: Vec<usize> = Vec::with_capacity(d);
        extend_algebra(
            &lookup,
            &atoms,
            d,
            0,
            &FiniteSet::new(),
            &mut chosen,
            &mut unions,
            base,
            visit,
        )?;
    }
    ControlFlow::Continue(())
}

#[allow(clippy::too_many_arguments)]
fn extend_algebra<B>(
    lookup: &HashMap<&FiniteSet, usize>,
    atoms: &[FiniteSet],
    d: usize,
    from: usize,
    covered: &FiniteSet,
    chosen: &mut Vec<usize>,
    unions: &mut Vec<(FiniteSet, usize)>,
    base: &FiniteSet,
    visit: &mut dyn FnMut(BooleanAlgebraWitness) -> ControlFlow<B>,
) -> ControlFlow<B> {
    if chosen.len() == d {
        return visit(canonical_witness(lookup, atoms, chosen, base, d));
    }
    let need = d - chosen.len();
    for i in from..atoms.len() {
        if atoms.len() - i < need {
            break;
        }
        let atom = &atoms[i];
        if !atom.is_disjoint(covered) {
            continue;
        }
        let old = unions.len();
        let mut ok = true;
        for k in 0..old {
            let s = unions[k].0.union(atom);
            match lookup.get(&s) {
                Some(&idx) => unions.push((s, idx)),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            chosen.push(i);
            let next_cover = covered.union(atom);
            extend_algebra(
                lookup,
                atoms,
                d,
                i + 1,
                &next_cover,
                chosen,
                unions,
                base,
                visit,
            )?;
            chosen.pop();
        }
        unions.truncate(old);
    }
    ControlFlow::Continue(())
}

fn canonical_witness(
    lookup: &HashMap<&FiniteSet, usize>,
    atoms: &[FiniteSet],
    chosen: &[usize],
    base: &FiniteSet,
    d: usize,
) -> BooleanAlgebraWitness {
    let mut parts: Vec<FiniteSet> = chosen.iter().map(|&i| atoms[i].clone()).collect();
    parts.sort_by_key(|a| a.min_position());
    let mut all = Vec::with_capacity(d + 1);
    all.push(base.clone());
    all.extend(parts);
    let mut w = BooleanAlgebraWitness {
        d,
        index_map: Vec::new(),
        atoms: all,
    };
    w.index_map = (0..1usize << d).map(|m| lookup[&w.set_for(m)]).collect();
    w
}

pub fn enumerate_boolean_algebras(
    family: &SetFamily,
    d: usize,
    limit: Option<usize>,
) -> Result<Vec<BooleanAlgebraWitness>, AlgebraError> {
    enumerate_with(
        family,
        d,
        EnumerateOptions {
            limit,
            strict: false,
        },
    )
}

pub fn enumerate_with(
    family: &SetFamily,
    d: usize,
    opts: EnumerateOptions,
) -> Result<Vec<BooleanAlgebraWitness>, AlgebraError> {
    let mut out = Vec::new();
    let flow = for_each_algebra(
        family.members(),
        &family.all_indices(),
        d,
        opts.strict,
        &mut |w| {
            if opts.limit.is_some_and(|l| out.len() >= l) {
                return ControlFlow::Break(());
            }
            out.push(w);
            ControlFlow::Continue(())
        },
    );
    match flow {
        ControlFlow::Continue(()) => Ok(out),
        ControlFlow::Break(()) => Err(AlgebraError::LimitExceeded {
            d,
            limit: opts.limit.unwrap_or(0),
            partial: out,
        }),
    }
}

pub fn count_boolean_algebras(family: &SetFamily, d: usize) -> u64 {
    count_with(family, d, false)
}

pub fn count_with(family: &SetFamily, d: usize, strict: bool) -> u64 {
    let mut n = 0u64;
    let _ = for_each_algebra::<()>(
        family.members(),
        &family.all_indices(),
        d,
        strict,
        &mut |_| {
            n += 1;
            ControlFlow::Continue(())
        },
    );
    n
}

pub fn is_bd_free(family: &SetFamily, d: usize) -> Result<(), BooleanAlgebraWitness> {
    match find_algebra(family.members(), &family.all_indices(), d) {
        None => Ok(()),
        Some(w) => Err(w),
    }
}

pub(crate) fn find_algebra(
    sets: &[FiniteSet],
    active: &[usize],
    d: usize,
) -> Option<BooleanAlgebraWitness> {
    match for_each_algebra(sets, active, d, false, &mut ControlFlow::Break) {
        ControlFlow::Break(w) => Some(w),
        ControlFlow::Continue(()) => None,
    }
}

/// `⌈log₂(d + 2)⌉`, the size of a smallest determining subfamily.
pub fn determining_size(d: usize) -> usize {
    let x = d + 2;
    (usize::BITS - (x - 1).leading_zeros()) as usize
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeterminingSet {
    /// Family member indices of `C_1, …, C_k`.
    pub indices: Vec<usize>,
    /// The masks `I_j` with `C_j = B_{I_j}`.
    pub masks: Vec<usize>,
    pub size: usize,
}

/// `C_j = A_0 ∪ ⋃{A_i : bit j-1 of i is set}`, `j = 1..=⌈log₂(d+2)⌉`.
pub fn determining_subfamily(w: &BooleanAlgebraWitness) -> DeterminingSet {
    let k = determining_size(w.d);
    let masks: Vec<usize> = (0..k)
        .map(|j| {
            (1..=w.d)
                .filter(|i| i >> j & 1 == 1)
                .fold(0usize, |m, i| m | 1 << (i - 1))
        })
        .collect();
    DeterminingSet {
        indices: masks.iter().map(|&m| w.index_map[m]).collect(),
        masks,
        size: k,
    }
}

/// Closure of `sets` under union, intersection and difference.
pub fn closure(sets: &[FiniteSet]) -> HashSet<FiniteSet> {
    let mut all: Vec<FiniteSet> = Vec::new();
    let mut seen: HashSet<FiniteSet> = HashSet::new();
    for s in sets {
        if seen.insert(s.clone()) {
            all.push(s.clone());
        }
    }
    let mut next = 0;
    while next < all.len() {
        let x = all[next].clone();
        for y in 0..=next {
            let y = all[y].clone();
            for z in [
                x.union(&y),
                x.intersection(&y),
                x.difference(&y),
                y.difference(&x),
            ] {
                if seen.insert(z.clone()) {
                    all.push(z);
                }
            }
        }
        next += 1;
    }
    seen
}

/// Whether every member of the algebra is a Boolean expression (without
/// complement) of the sets in `generators`.
pub fn generates(generators: &[FiniteSet], w: &BooleanAlgebraWitness) -> bool {
    if generators.is_empty() {
        return false;
    }
    let cl = closure(generators);
    w.sets().iter().all(|s| cl.contains(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{chain_product, power_set};
    use itertools::Itertools;
    use proptest::prelude::*;

    /// Any labeling of the 4 sets by subsets of [2] satisfying the definition.
    fn is_b2(sets: &[&FiniteSet]) -> bool {
        sets.iter().permutations(4).any(|p| {
            let b = |m: usize| *p[m];
            (0..4).all(|i| {
                (0..4)
                    .all(|j| &b(i).union(b(j)) == b(i | j) && &b(i).intersection(b(j)) == b(i & j))
            })
        })
    }

    fn brute_b2_count(f: &SetFamily) -> u64 {
        f.members()
            .iter()
            .combinations(4)
            .filter(|c| is_b2(c))
            .count() as u64
    }

    #[test]
    fn power_set_two() {
        let f = power_set(2).unwrap();
        let ws = enumerate_boolean_algebras(&f, 2, None).unwrap();
        assert_eq!(ws.len(), 1);
        let w = &ws[0];
        assert!(w.atoms[0].is_empty());
        assert_eq!(w.atoms[1].elements(), vec![1]);
        assert_eq!(w.atoms[2].elements(), vec![2]);
        assert!(w.verify(&f));
        assert_eq!(count_with(&f, 2, true), 0);
    }

    #[test]
    fn chains_have_none() {
        let f = SetFamily::make(5, (0..=5).map(|t| (1..=t).collect::<Vec<_>>())).unwrap();
        assert_eq!(count_boolean_algebras(&f, 2), 0);
        assert_eq!(count_boolean_algebras(&f, 1), 15);
    }

    #[test]
    fn power_set_three_has_nine() {
        let f = power_set(3).unwrap();
        assert_eq!(count_boolean_algebras(&f, 2), 9);
        assert_eq!(brute_b2_count(&f), 9);
        assert!(9.0 <= crate::extraction::binomial_f64(f.len(), determining_size(2)));
    }

    #[test]
    fn chain_product_two_four() {
        let f = chain_product(&[2, 4]).unwrap();
        assert_eq!(count_boolean_algebras(&f, 2), 6);
        assert_eq!(brute_b2_count(&f), 6);
    }

    #[test]
    fn too_few_members() {
        let f = power_set(2).unwrap();
        assert_eq!(count_boolean_algebras(&f, 3), 0);
    }

    #[test]
    fn limit_flags_partial() {
        let f = power_set(3).unwrap();
        match enumerate_boolean_algebras(&f, 2, Some(4)) {
            Err(AlgebraError::LimitExceeded { partial, .. }) => assert_eq!(partial.len(), 4),
            other => panic!("expected limit error, got {other:?}"),
        }
        assert_eq!(enumerate_boolean_algebras(&f, 2, Some(9)).unwrap().len(), 9);
    }

    #[test]
    fn determining_sizes() {
        assert_eq!(determining_size(1), 2);
        assert_eq!(determining_size(2), 2);
        assert_eq!(determining_size(3), 3);
        assert_eq!(determining_size(6), 3);
        assert_eq!(determining_size(7), 4);
    }

    #[test]
    fn determining_for_power_set_two() {
        let f = power_set(2).unwrap();
        let w = &enumerate_boolean_algebras(&f, 2, None).unwrap()[0];
        let c = determining_subfamily(w);
        assert_eq!(c.size, 2);
        let sets: Vec<FiniteSet> = c.indices.iter().map(|&i| f.member(i).clone()).collect();
        assert_eq!(sets[0].elements(), vec![1]);
        assert_eq!(sets[1].elements(), vec![2]);
        assert!(generates(&sets, w));
        assert_eq!(closure(&sets).len(), 4);
        assert!(generates(&w.sets(), w));
        assert!(!generates(&[w.set_for(0)], w));
    }

    #[test]
    fn json_shape() {
        let f = power_set(2).unwrap();
        let w = &enumerate_boolean_algebras(&f, 2, None).unwrap()[0];
        assert_eq!(
            w.to_json(),
            r#"{"d":2,"atoms":[[],[1],[2]],"members":{"0":0,"1":1,"2":2,"3":3}}"#
        );
    }

    fn random_family() -> impl Strategy<Value = SetFamily> {
        prop::collection::btree_set(0u64..(1 << 4), 0..=12).prop_map(|masks| {
            SetFamily::from_sets(4, masks.into_iter().map(FiniteSet::from_mask).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn enumeration_is_sound_and_complete(f in random_family()) {
            let ws = enumerate_boolean_algebras(&f, 2, None).unwrap();
            for w in &ws {
                prop_assert!(w.verify(&f));
            }
            let distinct: HashSet<Vec<usize>> = ws.iter().map(|w| w.member_indices()).collect();
            prop_assert_eq!(distinct.len(), ws.len());
            prop_assert_eq!(ws.len() as u64, brute_b2_count(&f));
        }
    }
}

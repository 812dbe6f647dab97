//! The a-union-free and (a,b)-union-free predicates.
//!
//! All searches run over an *active* list of member indices so that the
//! exact oracle can reuse them on candidate subfamilies without copying sets.

use std::ops::ControlFlow;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::family::SetFamily;
use crate::set::FiniteSet;

/// Distinct members `parts` (a of them) whose union is member `target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnionViolation {
    pub parts: Vec<usize>,
    pub target: usize,
}

impl UnionViolation {
    pub fn participants(&self) -> Vec<usize> {
        let mut all = self.parts.clone();
        all.push(self.target);
        all
    }
}

/// Distinct members with `⋃ left = ⋃ right`, `|left| = a`, `|right| = b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbViolation {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl AbViolation {
    pub fn participants(&self) -> Vec<usize> {
        self.left.iter().chain(&self.right).copied().collect()
    }
}

/// Visits, in lexicographic order, every increasing `need`-tuple drawn from
/// `cands` whose union is exactly `target`. Every candidate must be a subset
/// of `target`.
fn for_each_cover<B>(
    sets: &[FiniteSet],
    cands: &[usize],
    target: &FiniteSet,
    need: usize,
    visit: &mut dyn FnMut(&[usize]) -> ControlFlow<B>,
) -> ControlFlow<B> {
    if need > cands.len() {
        return ControlFlow::Continue(());
    }
    // suffix[i] = union of cands[i..]
    let mut suffix = vec![FiniteSet::new(); cands.len() + 1];
    for i in (0..cands.len()).rev() {
        suffix[i] = suffix[i + 1].union(&sets[cands[i]]);
    }
    if &suffix[0] != target {
        return ControlFlow::Continue(());
    }
    let mut picked = Vec::with_capacity(need);
    cover_dfs(
        sets,
        cands,
        target,
        need,
        0,
        &FiniteSet::new(),
        &suffix,
        &mut picked,
        visit,
    )
}

#[allow(clippy::too_many_arguments)]
fn cover_dfs<B>(
    sets: &[FiniteSet],
    cands: &[usize],
    target: &FiniteSet,
    need: usize,
    from: usize,
    acc: &FiniteSet,
    suffix: &[FiniteSet],
    picked: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]) -> ControlFlow<B>,
) -> ControlFlow<B> {
    if picked.len() == need {
        if acc == target {
            return visit(picked);
        }
        return ControlFlow::Continue(());
    }
    let left = need - picked.len();
    for i in from..=cands.len() - left {
        if &acc.union(&suffix[i]) != target {
            break;
        }
        let next = acc.union(&sets[cands[i]]);
        picked.push(cands[i]);
        cover_dfs(
            sets,
            cands,
            target,
            need,
            i + 1,
            &next,
            suffix,
            picked,
            visit,
        )?;
        picked.pop();
    }
    ControlFlow::Continue(())
}

/// Visits every a-union violation among `active` (targets in list order,
/// parts lexicographic).
pub(crate) fn for_each_union_violation<B>(
    sets: &[FiniteSet],
    active: &[usize],
    a: usize,
    visit: &mut dyn FnMut(UnionViolation) -> ControlFlow<B>,
) -> ControlFlow<B> {
    assert!(a >= 1, "a must be at least 1");
    for &t in active {
        let target = &sets[t];
        let cands: Vec<usize> = active
            .iter()
            .copied()
            .filter(|&c| c != t && sets[c].is_subset(target))
            .collect();
        for_each_cover(sets, &cands, target, a, &mut |parts| {
            visit(UnionViolation {
                parts: parts.to_vec(),
                target: t,
            })
        })?;
    }
    ControlFlow::Continue(())
}

pub(crate) fn find_union_violation(
    sets: &[FiniteSet],
    active: &[usize],
    a: usize,
) -> Option<UnionViolation> {
    match for_each_union_violation(sets, active, a, &mut ControlFlow::Break) {
        ControlFlow::Break(v) => Some(v),
        ControlFlow::Continue(()) => None,
    }
}

/// Visits every (a,b) violation among `active`. When `a == b` each unordered
/// pair of sides is visited once, with the lexicographically smaller side on
/// the left.
pub(crate) fn for_each_ab_violation<B>(
    sets: &[FiniteSet],
    active: &[usize],
    a: usize,
    b: usize,
    visit: &mut dyn FnMut(AbViolation) -> ControlFlow<B>,
) -> ControlFlow<B> {
    assert!(a >= 1 && b >= 1, "a and b must be at least 1");
    if a + b > active.len() {
        return ControlFlow::Continue(());
    }
    for left in active.iter().copied().combinations(a) {
        let mut u = FiniteSet::new();
        for &i in &left {
            u.union_with(&sets[i]);
        }
        let cands: Vec<usize> = active
            .iter()
            .copied()
            .filter(|c| !left.contains(c) && sets[*c].is_subset(&u))
            .collect();
        for_each_cover(sets, &cands, &u, b, &mut |right| {
            if a == b && right < left.as_slice() {
                return ControlFlow::Continue(());
            }
            visit(AbViolation {
                left: left.clone(),
                right: right.to_vec(),
            })
        })?;
    }
    ControlFlow::Continue(())
}

pub(crate) fn find_ab_violation(
    sets: &[FiniteSet],
    active: &[usize],
    a: usize,
    b: usize,
) -> Option<AbViolation> {
    match for_each_ab_violation(sets, active, a, b, &mut ControlFlow::Break) {
        ControlFlow::Break(v) => Some(v),
        ControlFlow::Continue(()) => None,
    }
}

/// `Ok(())` if the family is a-union-free, otherwise the lexicographically
/// first violation (targets by member order, then parts).
pub fn is_a_union_free(family: &SetFamily, a: usize) -> Result<(), UnionViolation> {
    match find_union_violation(family.members(), &family.all_indices(), a) {
        None => Ok(()),
        Some(v) => Err(v),
    }
}

pub fn is_ab_union_free(family: &SetFamily, a: usize, b: usize) -> Result<(), AbViolation> {
    match find_ab_violation(family.members(), &family.all_indices(), a, b) {
        None => Ok(()),
        Some(v) => Err(v),
    }
}

pub fn count_union_violations(family: &SetFamily, a: usize) -> usize {
    let mut n = 0;
    let _ = for_each_union_violation::<()>(family.members(), &family.all_indices(), a, &mut |_| {
        n += 1;
        ControlFlow::Continue(())
    });
    n
}

pub fn count_ab_violations(family: &SetFamily, a: usize, b: usize) -> usize {
    let mut n = 0;
    let _ = for_each_ab_violation::<()>(family.members(), &family.all_indices(), a, b, &mut |_| {
        n += 1;
        ControlFlow::Continue(())
    });
    n
}

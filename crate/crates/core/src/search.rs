//! Branch and bound for the largest item subset containing no conflict.
//!
//! A conflict is a set of items that may not all be kept. Both the subfamily
//! oracle (items = members, conflicts = violations) and the Turán solver
//! (items = edges, conflicts = K_{d*2} copies) reduce to this.
//!
//! Each node carries a candidate set and a set of items fixed as kept. The
//! node branches on one conflict inside the candidate: branch `i` deletes the
//! `i`-th free participant and fixes the earlier ones, so no subset is visited
//! twice. A greedy packing of conflicts with pairwise disjoint free parts is a
//! lower bound on the deletions still required.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::set::FiniteSet;

pub trait ConflictFinder {
    /// Some conflict lying entirely inside `within`.
    fn find(&self, within: &FiniteSet) -> Option<Vec<usize>>;

    /// Per-item count of conflicts inside `within`, used to order branches.
    fn degrees(&self, _within: &FiniteSet, _items: usize) -> Option<Vec<usize>> {
        None
    }

    fn packing(&self, cand: &FiniteSet, fixed: &FiniteSet) -> Packing {
        let mut within = cand.clone();
        let mut p = Packing::default();
        while let Some(c) = self.find(&within) {
            let free: Vec<usize> = c.into_iter().filter(|&x| !fixed.contains(x)).collect();
            if free.is_empty() {
                p.dead = true;
                return p;
            }
            for &x in &free {
                within.remove(x);
            }
            p.add(free);
        }
        p
    }
}

#[derive(Debug, Default)]
pub struct Packing {
    pub count: usize,
    pub dead: bool,
    pub branch: Option<Vec<usize>>,
}

impl Packing {
    fn add(&mut self, free: Vec<usize>) {
        self.count += 1;
        if self.branch.as_ref().is_none_or(|b| free.len() < b.len()) {
            self.branch = Some(free);
        }
    }
}

/// An explicit list of conflicts.
#[derive(Clone, Debug)]
pub struct ConflictList {
    sets: Vec<FiniteSet>,
}

impl ConflictList {
    pub fn new<I: IntoIterator<Item = Vec<usize>>>(conflicts: I) -> Self {
        ConflictList {
            sets: conflicts
                .into_iter()
                .map(FiniteSet::from_positions)
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

impl ConflictFinder for ConflictList {
    fn find(&self, within: &FiniteSet) -> Option<Vec<usize>> {
        self.sets
            .iter()
            .find(|c| c.is_subset(within))
            .map(|c| c.iter().collect())
    }

    fn degrees(&self, within: &FiniteSet, items: usize) -> Option<Vec<usize>> {
        let mut deg = vec![0; items];
        for c in self.sets.iter().filter(|c| c.is_subset(within)) {
            for x in c.iter() {
                deg[x] += 1;
            }
        }
        Some(deg)
    }

    fn packing(&self, cand: &FiniteSet, fixed: &FiniteSet) -> Packing {
        let mut used = FiniteSet::new();
        let mut p = Packing::default();
        for c in self.sets.iter().filter(|c| c.is_subset(cand)) {
            let free = c.difference(fixed);
            if free.is_empty() {
                p.dead = true;
                return p;
            }
            if free.is_disjoint(&used) {
                used.union_with(&free);
                p.add(free.iter().collect());
            }
        }
        p
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
    /// A starting solution; ignored if it contains a conflict.
    pub initial: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    /// Kept items, increasing.
    pub best: Vec<usize>,
    /// The search tree was exhausted.
    pub proven: bool,
    pub nodes: u64,
}

struct Search<'a, F: ConflictFinder + ?Sized> {
    finder: &'a F,
    items: usize,
    best: FiniteSet,
    best_len: usize,
    nodes: u64,
    aborted: bool,
    node_limit: Option<u64>,
    deadline: Option<Instant>,
}

impl<F: ConflictFinder + ?Sized> Search<'_, F> {
    fn run(&mut self, cand: FiniteSet, fixed: FiniteSet) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.node_limit.is_some_and(|l| self.nodes > l)
            || self.deadline.is_some_and(|d| Instant::now() >= d)
        {
            self.aborted = true;
            return;
        }
        let size = cand.len();
        if size <= self.best_len {
            return;
        }
        let packing = self.finder.packing(&cand, &fixed);
        if packing.dead || size - packing.count <= self.best_len {
            return;
        }
        let Some(mut branch) = packing.branch else {
            self.best_len = size;
            self.best = cand;
            return;
        };
        if let Some(deg) = self.finder.degrees(&cand, self.items) {
            branch.sort_by_key(|&x| (std::cmp::Reverse(deg[x]), x));
        }
        let mut fixed = fixed;
        for x in branch {
            let mut next = cand.clone();
            next.remove(x);
            self.run(next, fixed.clone());
            if self.aborted {
                return;
            }
            fixed.insert(x);
        }
    }
}

fn greedy(finder: &(impl ConflictFinder + ?Sized), items: usize) -> FiniteSet {
    let mut cand = FiniteSet::range(0, items);
    while let Some(c) = finder.find(&cand) {
        let victim = match finder.degrees(&cand, items) {
            Some(deg) => *c
                .iter()
                .max_by_key(|&&x| (deg[x], std::cmp::Reverse(x)))
                .unwrap(),
            None => *c.last().unwrap(),
        };
        cand.remove(victim);
    }
    cand
}

/// Largest subset of `0..items` containing no conflict reported by `finder`.
pub fn maximum_conflict_free<F: ConflictFinder + ?Sized>(
    items: usize,
    finder: &F,
    config: &SearchConfig,
) -> SearchOutcome {
    let start = Instant::now();
    let initial = config
        .initial
        .as_ref()
        .map(|v| FiniteSet::from_positions(v.iter().copied().filter(|&x| x < items)))
        .filter(|s| finder.find(s).is_none());
    let g = greedy(finder, items);
    let best = match initial {
        Some(s) if s.len() > g.len() => s,
        _ => g,
    };
    let mut search = Search {
        finder,
        items,
        best_len: best.len(),
        best,
        nodes: 0,
        aborted: false,
        node_limit: config.node_limit,
        deadline: config.time_limit.map(|t| start + t),
    };
    search.run(FiniteSet::range(0, items), FiniteSet::new());
    SearchOutcome {
        best: search.best.iter().collect(),
        proven: !search.aborted,
        nodes: search.nodes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use proptest::prelude::*;

    fn brute(items: usize, conflicts: &[Vec<usize>]) -> usize {
        (0u32..1 << items)
            .filter(|mask| {
                conflicts
                    .iter()
                    .all(|c| !c.iter().all(|&x| mask >> x & 1 == 1))
            })
            .map(|mask| mask.count_ones() as usize)
            .max()
            .unwrap()
    }

    struct Lazy(ConflictList);
    impl ConflictFinder for Lazy {
        fn find(&self, within: &FiniteSet) -> Option<Vec<usize>> {
            self.0.find(within)
        }
    }

    #[test]
    fn single_conflict() {
        let list = ConflictList::new([vec![0, 1, 2]]);
        let out = maximum_conflict_free(4, &list, &SearchConfig::default());
        assert_eq!(out.best.len(), 3);
        assert!(out.proven);
    }

    #[test]
    fn all_pairs_of_five() {
        let list = ConflictList::new((0..5).combinations(2));
        let out = maximum_conflict_free(5, &list, &SearchConfig::default());
        assert_eq!(out.best.len(), 1);
    }

    #[test]
    fn node_limit_reports_unproven() {
        let list = ConflictList::new((0..12).combinations(3));
        let out = maximum_conflict_free(
            12,
            &list,
            &SearchConfig {
                node_limit: Some(2),
                ..Default::default()
            },
        );
        assert!(!out.proven);
        assert!(list
            .find(&FiniteSet::from_positions(out.best.iter().copied()))
            .is_none());
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            items in 1usize..12,
            raw in prop::collection::vec(prop::collection::btree_set(0usize..12, 1..5), 0..25),
        ) {
            let conflicts: Vec<Vec<usize>> = raw
                .into_iter()
                .map(|s| s.into_iter().filter(|&x| x < items).collect::<Vec<_>>())
                .filter(|c| !c.is_empty())
                .collect();
            let list = ConflictList::new(conflicts.clone());
            let want = brute(items, &conflicts);
            let a = maximum_conflict_free(items, &list, &SearchConfig::default());
            let b = maximum_conflict_free(items, &Lazy(list.clone()), &SearchConfig::default());
            prop_assert!(a.proven && b.proven);
            prop_assert_eq!(a.best.len(), want);
            prop_assert_eq!(b.best.len(), want);
            prop_assert!(list.find(&FiniteSet::from_positions(a.best.iter().copied())).is_none());
        }
    }
}

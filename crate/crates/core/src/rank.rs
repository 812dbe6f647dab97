//! Rank of a member = length of the longest chain in the family ending at it.

use crate::family::SetFamily;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankTable {
    /// `rank[i]` is the rank of member `i` (≥ 1).
    pub rank: Vec<usize>,
    /// `levels[k - 1]` lists the members of rank `k` in increasing index order.
    pub levels: Vec<Vec<usize>>,
    /// Length of the longest chain.
    pub max_rank: usize,
    /// A proper subset of member `i` with rank `rank[i] - 1`, lowest index first.
    pub predecessor: Vec<Option<usize>>,
}

impl RankTable {
    pub fn level(&self, k: usize) -> &[usize] {
        &self.levels[k - 1]
    }

    /// A chain of length `rank[top]` ending at `top`, listed bottom-up.
    pub fn chain_to(&self, top: usize) -> Vec<usize> {
        let mut chain = vec![top];
        let mut cur = top;
        while let Some(p) = self.predecessor[cur] {
            chain.push(p);
            cur = p;
        }
        chain.reverse();
        chain
    }
}

pub fn rank_partition(family: &SetFamily) -> RankTable {
    let sets = family.members();
    let m = sets.len();
    // Proper subsets are strictly smaller, so size order is a topological order.
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&i| (sets[i].len(), i));

    let mut rank = vec![0usize; m];
    let mut predecessor = vec![None; m];
    for (pos, &i) in order.iter().enumerate() {
        let mut best = 0;
        let mut pred = None;
        for &j in &order[..pos] {
            if sets[j].len() < sets[i].len() && sets[j].is_subset(&sets[i]) {
                let better = rank[j] > best || (rank[j] == best && pred.is_some_and(|p| j < p));
                if better {
                    best = rank[j];
                    pred = Some(j);
                }
            }
        }
        rank[i] = best + 1;
        predecessor[i] = pred;
    }

    let max_rank = rank.iter().copied().max().unwrap_or(0);
    let mut levels = vec![Vec::new(); max_rank];
    for (i, &r) in rank.iter().enumerate() {
        levels[r - 1].push(i);
    }
    RankTable {
        rank,
        levels,
        max_rank,
        predecessor,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::erdos_shelah_family;
    use proptest::prelude::*;

    #[test]
    fn chain_ranks() {
        let f = SetFamily::make(3, [vec![1], vec![1, 2], vec![1, 2, 3]]).unwrap();
        let t = rank_partition(&f);
        assert_eq!(t.rank, vec![1, 2, 3]);
        assert_eq!(t.max_rank, 3);
        assert_eq!(t.chain_to(2), vec![0, 1, 2]);
    }

    #[test]
    fn antichain_ranks() {
        let f = SetFamily::make(3, [vec![1], vec![2], vec![3]]).unwrap();
        let t = rank_partition(&f);
        assert_eq!(t.rank, vec![1, 1, 1]);
        assert_eq!(t.max_rank, 1);
    }

    #[test]
    fn es2_ranks() {
        let t = rank_partition(&erdos_shelah_family(2).unwrap());
        assert_eq!(t.rank, vec![1, 2, 2, 3]);
        assert_eq!(t.max_rank, 3);
        assert_eq!(t.levels, vec![vec![0], vec![1, 2], vec![3]]);
    }

    #[test]
    fn empty_family() {
        let f = SetFamily::make(2, Vec::<Vec<usize>>::new()).unwrap();
        let t = rank_partition(&f);
        assert_eq!(t.max_rank, 0);
        assert!(t.levels.is_empty());
    }

    fn random_family() -> impl Strategy<Value = SetFamily> {
        prop::collection::btree_set(0u64..(1 << 7), 0..30).prop_map(|masks| {
            SetFamily::from_sets(
                7,
                masks.into_iter().map(crate::FiniteSet::from_mask).collect(),
            )
            .unwrap()
        })
    }

    /// Longest chain by brute-force recursion over the subset order.
    fn longest_chain_ending(f: &SetFamily, i: usize) -> usize {
        1 + (0..f.len())
            .filter(|&j| f.member(j).is_proper_subset(f.member(i)))
            .map(|j| longest_chain_ending(f, j))
            .max()
            .unwrap_or(0)
    }

    proptest! {
        #[test]
        fn levels_are_antichains_and_chains_fit(f in random_family()) {
            let t = rank_partition(&f);
            prop_assert_eq!(t.levels.iter().map(Vec::len).sum::<usize>(), f.len());
            for level in &t.levels {
                for (x, &i) in level.iter().enumerate() {
                    for &j in &level[x + 1..] {
                        prop_assert!(!f.member(i).comparable(f.member(j)));
                    }
                }
            }
            for k in 1..=t.max_rank {
                let top = t.level(k)[0];
                let chain = t.chain_to(top);
                prop_assert_eq!(chain.len(), k);
                for w in chain.windows(2) {
                    prop_assert!(f.member(w[0]).is_proper_subset(f.member(w[1])));
                }
                let mut together: Vec<usize> = t.level(k).to_vec();
                together.extend(&chain[..k - 1]);
                together.sort();
                together.dedup();
                prop_assert_eq!(together.len(), t.level(k).len() + k - 1);
            }
            for i in 0..f.len() {
                prop_assert_eq!(t.rank[i], longest_chain_ending(&f, i));
            }
        }
    }
}

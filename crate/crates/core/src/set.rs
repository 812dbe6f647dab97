//! Bit-vector sets over a finite universe of positions `0..n`.
//!
//! Sets up to 128 positions live inline; larger universes spill to the heap.
//! The word vector is kept trimmed (no trailing zero words) so that derived
//! equality and hashing agree with set equality.

use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

type Word = u64;
const WORD_BITS: usize = Word::BITS as usize;

/// A finite set of non-negative positions.
///
/// Ground elements are 1-based in the mathematical sense (`[n] = {1, …, n}`);
/// element `e` is stored at position `e - 1`. Methods that mention
/// *positions* are 0-based, methods that mention *elements* are 1-based.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct FiniteSet {
    words: SmallVec<[Word; 2]>,
}

impl FiniteSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_positions<I: IntoIterator<Item = usize>>(positions: I) -> Self {
        let mut s = Self::new();
        for p in positions {
            s.insert(p);
        }
        s
    }

    /// Build from 1-based elements. Element 0 is not a valid element.
    pub fn from_elements<I: IntoIterator<Item = usize>>(elements: I) -> Self {
        Self::from_positions(elements.into_iter().map(|e| {
            assert!(e >= 1, "elements are 1-based");
            e - 1
        }))
    }

    /// Positions `start..end`.
    pub fn range(start: usize, end: usize) -> Self {
        Self::from_positions(start..end)
    }

    /// The set whose position `p` is present iff bit `p` of `mask` is set.
    pub fn from_mask(mask: u64) -> Self {
        let mut s = Self::new();
        if mask != 0 {
            s.words.push(mask);
        }
        s
    }

    /// The low 64 positions as a mask, or `None` if a higher position is set.
    pub fn as_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn insert(&mut self, position: usize) -> bool {
        let (w, b) = (position / WORD_BITS, position % WORD_BITS);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        let before = self.words[w];
        self.words[w] |= 1 << b;
        before != self.words[w]
    }

    pub fn remove(&mut self, position: usize) -> bool {
        let (w, b) = (position / WORD_BITS, position % WORD_BITS);
        if w >= self.words.len() {
            return false;
        }
        let before = self.words[w];
        self.words[w] &= !(1 << b);
        let changed = before != self.words[w];
        self.trim();
        changed
    }

    #[inline]
    pub fn contains(&self, position: usize) -> bool {
        let (w, b) = (position / WORD_BITS, position % WORD_BITS);
        self.words.get(w).is_some_and(|x| x & (1 << b) != 0)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// One past the highest position present (0 for the empty set).
    pub fn span(&self) -> usize {
        match self.words.last() {
            None => 0,
            Some(&w) => {
                (self.words.len() - 1) * WORD_BITS + (WORD_BITS - w.leading_zeros() as usize)
            }
        }
    }

    pub fn min_position(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words.len() <= other.words.len()
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    pub fn is_proper_subset(&self, other: &Self) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn comparable(&self, other: &Self) -> bool {
        self.is_subset(other) || other.is_subset(self)
    }

    pub fn union(&self, other: &Self) -> Self {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = long.clone();
        for (o, s) in out.words.iter_mut().zip(&short.words) {
            *o |= s;
        }
        out
    }

    pub fn union_with(&mut self, other: &Self) {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (o, s) in self.words.iter_mut().zip(&other.words) {
            *o |= s;
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = Self {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        };
        out.trim();
        out
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.difference_with(other);
        out
    }

    pub fn difference_with(&mut self, other: &Self) {
        for (o, s) in self.words.iter_mut().zip(&other.words) {
            *o &= !s;
        }
        self.trim();
    }

    /// Positions in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD_BITS + b)
            })
        })
    }

    /// 1-based elements in increasing order.
    pub fn elements(&self) -> Vec<usize> {
        self.iter().map(|p| p + 1).collect()
    }
}

/// Orders sets by the numeric value of their membership vector
/// (position `p` has weight `2^p`).
impl Ord for FiniteSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.words
            .len()
            .cmp(&other.words.len())
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for FiniteSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.elements()).finish()
    }
}

impl FromIterator<usize> for FiniteSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::from_positions(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn trimmed_equality_across_word_boundaries() {
        let mut a = FiniteSet::from_positions([3, 130]);
        a.remove(130);
        assert_eq!(a, FiniteSet::from_positions([3]));
        assert_eq!(a.span(), 4);
        assert_eq!(FiniteSet::new().span(), 0);
    }

    #[test]
    fn numeric_order() {
        let a = FiniteSet::from_positions([0, 1]); // 3
        let b = FiniteSet::from_positions([2]); // 4
        let c = FiniteSet::from_positions([64]);
        assert!(FiniteSet::new() < a && a < b && b < c);
    }

    #[test]
    fn elements_are_one_based() {
        let s = FiniteSet::from_elements([1, 3]);
        assert_eq!(s.elements(), vec![1, 3]);
        assert!(s.contains(0) && s.contains(2));
    }

    fn positions() -> impl Strategy<Value = BTreeSet<usize>> {
        prop::collection::btree_set(0usize..200, 0..20)
    }

    proptest! {
        #[test]
        fn ops_match_btreeset(x in positions(), y in positions()) {
            let a: FiniteSet = x.iter().copied().collect();
            let b: FiniteSet = y.iter().copied().collect();
            let set = |s: &FiniteSet| s.iter().collect::<BTreeSet<_>>();
            prop_assert_eq!(set(&a.union(&b)), x.union(&y).copied().collect());
            prop_assert_eq!(set(&a.intersection(&b)), x.intersection(&y).copied().collect());
            prop_assert_eq!(set(&a.difference(&b)), x.difference(&y).copied().collect());
            prop_assert_eq!(a.is_subset(&b), x.is_subset(&y));
            prop_assert_eq!(a.is_disjoint(&b), x.is_disjoint(&y));
            prop_assert_eq!(a.len(), x.len());
            prop_assert_eq!(a.intersection(&b) == b.intersection(&a), true);
        }
    }
}

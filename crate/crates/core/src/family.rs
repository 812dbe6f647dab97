use std::collections::HashMap;

use thiserror::Error;

use crate::set::FiniteSet;

/// Hard caps applied by constructors. Set operations themselves have no cap;
/// these only stop a constructor from materializing something absurd.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_universe: usize,
    pub max_members: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_universe: 4096,
            max_members: 1 << 20,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("member {second} duplicates member {first}")]
    DuplicateSet { first: usize, second: usize },
    #[error("member {member} contains element {element}, outside [1, {universe}]")]
    ElementOutOfRange {
        member: usize,
        element: usize,
        universe: usize,
    },
    #[error("universe of {universe} elements or {members} members exceeds the configured limits")]
    UniverseTooLarge { universe: usize, members: usize },
    #[error("member index {0} is out of range")]
    IndexOutOfRange(usize),
}

/// An ordered collection of distinct subsets of `[n]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFamily {
    universe: usize,
    members: Vec<FiniteSet>,
}

impl SetFamily {
    /// Builds a family from 1-based element lists, preserving order.
    pub fn make<S, I>(universe: usize, sets: I) -> Result<Self, FamilyError>
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = usize>,
    {
        let mut members = Vec::new();
        for (idx, elems) in sets.into_iter().enumerate() {
            let mut s = FiniteSet::new();
            for e in elems {
                if e == 0 || e > universe {
                    return Err(FamilyError::ElementOutOfRange {
                        member: idx,
                        element: e,
                        universe,
                    });
                }
                s.insert(e - 1);
            }
            members.push(s);
        }
        Self::from_sets(universe, members)
    }

    pub fn from_sets(universe: usize, members: Vec<FiniteSet>) -> Result<Self, FamilyError> {
        let mut seen: HashMap<&FiniteSet, usize> = HashMap::with_capacity(members.len());
        for (idx, s) in members.iter().enumerate() {
            if s.span() > universe {
                return Err(FamilyError::ElementOutOfRange {
                    member: idx,
                    element: s.span(),
                    universe,
                });
            }
            if let Some(&first) = seen.get(s) {
                return Err(FamilyError::DuplicateSet { first, second: idx });
            }
            seen.insert(s, idx);
        }
        Ok(SetFamily { universe, members })
    }

    pub(crate) fn from_sets_unchecked(universe: usize, members: Vec<FiniteSet>) -> Self {
        debug_assert!(Self::from_sets(universe, members.clone()).is_ok());
        SetFamily { universe, members }
    }

    pub fn universe_size(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[FiniteSet] {
        &self.members
    }

    pub fn member(&self, idx: usize) -> &FiniteSet {
        &self.members[idx]
    }

    /// Index of `set` in the family, if present.
    pub fn position(&self, set: &FiniteSet) -> Option<usize> {
        self.members.iter().position(|m| m == set)
    }

    /// The members at `indices`, in the given order, over the same universe.
    pub fn subfamily(&self, indices: &[usize]) -> Result<SetFamily, FamilyError> {
        let mut out = Vec::with_capacity(indices.len());
        for &i in indices {
            out.push(
                self.members
                    .get(i)
                    .cloned()
                    .ok_or(FamilyError::IndexOutOfRange(i))?,
            );
        }
        SetFamily::from_sets(self.universe, out)
    }

    pub fn all_indices(&self) -> Vec<usize> {
        (0..self.members.len()).collect()
    }
}

impl serde::Serialize for SetFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let sets: Vec<Vec<usize>> = self.members().iter().map(FiniteSet::elements).collect();
        let mut st = s.serialize_struct("SetFamily", 2)?;
        st.serialize_field("n", &self.universe_size())?;
        st.serialize_field("members", &sets)?;
        st.end()
    }
}

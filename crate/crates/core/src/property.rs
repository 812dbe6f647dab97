use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boolean_algebra::{find_algebra, for_each_algebra};
use crate::family::SetFamily;
use crate::set::FiniteSet;
use crate::union_free::{
    find_ab_violation, find_union_violation, for_each_ab_violation, for_each_union_violation,
};

/// A hereditary family property.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Property {
    /// No Boolean subalgebra of dimension `d`.
    BdFree { d: usize },
    /// No `F_1 ∪ ⋯ ∪ F_a = F_{a+1}` over distinct members.
    UnionFree { a: usize },
    /// No `F_1 ∪ ⋯ ∪ F_a = F_{a+1} ∪ ⋯ ∪ F_{a+b}` over distinct members.
    AbUnionFree { a: usize, b: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("bad property {0:?}: expected bd:D, uf:A or abuf:A,B with positive integers")]
pub struct PropertyParseError(pub String);

impl FromStr for Property {
    type Err = PropertyParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PropertyParseError(s.to_string());
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let num = |x: &str| {
            x.trim()
                .parse::<usize>()
                .ok()
                .filter(|&v| v >= 1)
                .ok_or_else(bad)
        };
        match kind {
            "bd" => Ok(Property::BdFree { d: num(rest)? }),
            "uf" => Ok(Property::UnionFree { a: num(rest)? }),
            "abuf" => {
                let (a, b) = rest.split_once(',').ok_or_else(bad)?;
                Ok(Property::AbUnionFree {
                    a: num(a)?,
                    b: num(b)?,
                })
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Property::BdFree { d } => write!(f, "bd:{d}"),
            Property::UnionFree { a } => write!(f, "uf:{a}"),
            Property::AbUnionFree { a, b } => write!(f, "abuf:{a},{b}"),
        }
    }
}

impl Property {
    /// Participants of some violation lying inside `active`.
    pub(crate) fn find_violation(
        &self,
        sets: &[FiniteSet],
        active: &[usize],
    ) -> Option<Vec<usize>> {
        match *self {
            Property::BdFree { d } => find_algebra(sets, active, d).map(|w| w.member_indices()),
            Property::UnionFree { a } => {
                find_union_violation(sets, active, a).map(|v| v.participants())
            }
            Property::AbUnionFree { a, b } => {
                find_ab_violation(sets, active, a, b).map(|v| v.participants())
            }
        }
    }

    pub(crate) fn for_each_violation<B>(
        &self,
        sets: &[FiniteSet],
        active: &[usize],
        visit: &mut dyn FnMut(Vec<usize>) -> ControlFlow<B>,
    ) -> ControlFlow<B> {
        match *self {
            Property::BdFree { d } => {
                for_each_algebra(sets, active, d, false, &mut |w| visit(w.member_indices()))
            }
            Property::UnionFree { a } => {
                for_each_union_violation(sets, active, a, &mut |v| visit(v.participants()))
            }
            Property::AbUnionFree { a, b } => {
                for_each_ab_violation(sets, active, a, b, &mut |v| visit(v.participants()))
            }
        }
    }

    /// Whether the members at `indices` have the property.
    pub fn holds_on(&self, family: &SetFamily, indices: &[usize]) -> bool {
        let mut idx = indices.to_vec();
        idx.sort_unstable();
        self.find_violation(family.members(), &idx).is_none()
    }

    pub fn holds(&self, family: &SetFamily) -> bool {
        self.find_violation(family.members(), &family.all_indices())
            .is_none()
    }

    /// Every violation inside the family, as sorted participant lists, or
    /// `None` if there are more than `limit`.
    pub fn all_violations(&self, family: &SetFamily, limit: usize) -> Option<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        let flow =
            self.for_each_violation(family.members(), &family.all_indices(), &mut |mut v| {
                if out.len() >= limit {
                    return ControlFlow::Break(());
                }
                v.sort_unstable();
                out.push(v);
                ControlFlow::Continue(())
            });
        match flow {
            ControlFlow::Continue(()) => Some(out),
            ControlFlow::Break(()) => None,
        }
    }

    /// Smallest number of distinct members a violation needs.
    pub fn violation_size(&self) -> usize {
        match *self {
            Property::BdFree { d } => 1 << d,
            Property::UnionFree { a } => a + 1,
            Property::AbUnionFree { a, b } => a + b,
        }
    }
}

/// Number of minimal violating configurations: B_d witnesses, solutions of
/// the union equation `{F_1..F_a} → F_{a+1}`, or `(left, right)` solutions of
/// the (a,b) equation (unordered sides when `a = b`).
pub fn count_violations(family: &SetFamily, property: Property) -> u64 {
    let mut n = 0u64;
    let _ = property.for_each_violation::<()>(family.members(), &family.all_indices(), &mut |_| {
        n += 1;
        ControlFlow::Continue(())
    });
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{erdos_shelah_family, power_set};

    #[test]
    fn parse_round_trip() {
        for s in ["bd:2", "uf:3", "abuf:2,2"] {
            assert_eq!(s.parse::<Property>().unwrap().to_string(), s);
        }
        for s in ["bd:0", "x:1", "uf", "abuf:2", "uf:-1"] {
            assert!(s.parse::<Property>().is_err(), "{s}");
        }
    }

    #[test]
    fn counts() {
        let chain = SetFamily::make(3, [vec![1], vec![1, 2], vec![1, 2, 3]]).unwrap();
        for p in ["bd:2", "uf:2", "abuf:2,2", "abuf:1,2"] {
            assert_eq!(count_violations(&chain, p.parse().unwrap()), 0, "{p}");
        }
        assert_eq!(
            count_violations(
                &erdos_shelah_family(2).unwrap(),
                Property::UnionFree { a: 2 }
            ),
            1
        );
        assert_eq!(
            count_violations(&power_set(3).unwrap(), Property::BdFree { d: 2 }),
            9
        );
    }

    #[test]
    fn holds_on_subfamily() {
        let f = erdos_shelah_family(2).unwrap();
        let p = Property::UnionFree { a: 2 };
        assert!(!p.holds(&f));
        assert!(p.holds_on(&f, &[3, 0, 1]));
        assert!(!p.holds_on(&f, &[3, 2, 1]));
    }
}

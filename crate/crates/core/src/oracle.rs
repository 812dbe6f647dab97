//! Exact `f(F, Γ)` on small families, and `f(m, Γ)` by exhaustive search over
//! all m-member families on a tiny ground set.

use std::collections::HashSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::family::SetFamily;
use crate::property::Property;
use crate::search::{maximum_conflict_free, ConflictFinder, ConflictList, SearchConfig};
use crate::set::FiniteSet;

/// Violations are listed up front when there are at most this many;
/// otherwise they are searched for lazily at every node.
const CONFLICT_LIST_LIMIT: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub optimum: usize,
    /// Member indices of an optimal (or best found) subfamily.
    pub witness: Vec<usize>,
    /// The search completed within its limits.
    pub proven: bool,
    pub nodes: u64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("enumeration budget exceeded: {needed} candidate families > budget {budget}")]
    LimitExceeded { needed: u128, budget: u128 },
    #[error("oracle witness fails the property check")]
    InternalVerificationFailed,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

struct LazyFinder<'a> {
    sets: &'a [FiniteSet],
    property: Property,
}

impl ConflictFinder for LazyFinder<'_> {
    fn find(&self, within: &FiniteSet) -> Option<Vec<usize>> {
        let active: Vec<usize> = within.iter().collect();
        self.property.find_violation(self.sets, &active)
    }
}

/// Largest subfamily with `property`, by branch and bound over deletions.
/// Hitting a limit is not an error: the best incumbent is returned with
/// `proven = false`.
pub fn max_subfamily(
    family: &SetFamily,
    property: Property,
    config: &SearchConfig,
) -> Result<OracleResult, OracleError> {
    let out = match property.all_violations(family, CONFLICT_LIST_LIMIT) {
        Some(list) => maximum_conflict_free(family.len(), &ConflictList::new(list), config),
        None => maximum_conflict_free(
            family.len(),
            &LazyFinder {
                sets: family.members(),
                property,
            },
            config,
        ),
    };
    if !property.holds_on(family, &out.best) {
        return Err(OracleError::InternalVerificationFailed);
    }
    Ok(OracleResult {
        optimum: out.best.len(),
        witness: out.best,
        proven: out.proven,
        nodes: out.nodes,
    })
}

/// Largest subfamily by checking all `2^m` subfamilies. Test oracle only.
pub fn max_subfamily_exhaustive(family: &SetFamily, property: Property) -> usize {
    let m = family.len();
    assert!(m <= 24, "exhaustive scan is for tiny families");
    let mut best = 0;
    for mask in 0u32..1 << m {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let idx: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
        if property.holds_on(family, &idx) {
            best = size;
        }
    }
    best
}

/// Smallest sorted image of the family under permutations of the ground set.
pub fn canonical_form(sets: &[FiniteSet], universe: usize) -> Vec<FiniteSet> {
    let mut best: Option<Vec<FiniteSet>> = None;
    for perm in (0..universe).permutations(universe) {
        let mut image: Vec<FiniteSet> = sets
            .iter()
            .map(|s| FiniteSet::from_positions(s.iter().map(|p| perm[p])))
            .collect();
        image.sort();
        if best.as_ref().is_none_or(|b| image < *b) {
            best = Some(image);
        }
    }
    best.unwrap_or_default()
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinOverFamilies {
    pub value: usize,
    /// One family attaining the minimum.
    pub worst: SetFamily,
    /// Number of isomorphism classes examined.
    pub classes: usize,
    pub proven: bool,
}

/// `min { f(F, Γ) : F ⊆ 2^[n], |F| = m }`, one representative per class of
/// ground-element relabelings.
pub fn min_over_families(
    m: usize,
    n: usize,
    property: Property,
    config: &SearchConfig,
    budget: u128,
) -> Result<MinOverFamilies, OracleError> {
    if n > 16 {
        return Err(OracleError::InvalidParameter(format!(
            "n = {n} is too large"
        )));
    }
    let pool = 1u128 << n;
    if m == 0 || m as u128 > pool {
        return Err(OracleError::InvalidParameter(format!(
            "no family of {m} distinct subsets of [{n}]"
        )));
    }
    let needed = binomial(pool, m as u128);
    if needed > budget {
        return Err(OracleError::LimitExceeded { needed, budget });
    }
    let all: Vec<FiniteSet> = (0..1u64 << n).map(FiniteSet::from_mask).collect();
    let mut seen: HashSet<Vec<FiniteSet>> = HashSet::new();
    let mut best: Option<(usize, SetFamily)> = None;
    let mut proven = true;
    for combo in (0..all.len()).combinations(m) {
        let sets: Vec<FiniteSet> = combo.iter().map(|&i| all[i].clone()).collect();
        if !seen.insert(canonical_form(&sets, n)) {
            continue;
        }
        let family = SetFamily::from_sets_unchecked(n, sets);
        let r = max_subfamily(&family, property, config)?;
        proven &= r.proven;
        if best.as_ref().is_none_or(|(v, _)| r.optimum < *v) {
            best = Some((r.optimum, family));
        }
    }
    let (value, worst) = best.expect("at least one family");
    Ok(MinOverFamilies {
        value,
        worst,
        classes: seen.len(),
        proven,
    })
}

//! Named families: chain products, the Erdős–Shelah grid family, the
//! B_d-extremal product, leveled stacks of grid families, co-singletons and
//! power sets.
//!
//! Every chain or level gets its own contiguous block of fresh ground
//! elements, so tops of distinct chains are disjoint.

use serde::Serialize;
use thiserror::Error;

use crate::family::{FamilyError, Limits, SetFamily};
use crate::set::FiniteSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("geometric levels need a ≥ 4 (got a = {0}): (b-1)/(b-2) is undefined for b = 2")]
    GeometricUndefined(usize),
}

fn too_large(universe: usize, members: usize) -> ConstructionError {
    FamilyError::UniverseTooLarge { universe, members }.into()
}

fn check(
    universe: Option<usize>,
    members: Option<usize>,
    limits: &Limits,
) -> Result<(usize, usize), ConstructionError> {
    match (universe, members) {
        (Some(u), Some(m)) if u <= limits.max_universe && m <= limits.max_members => Ok((u, m)),
        (u, m) => Err(too_large(u.unwrap_or(usize::MAX), m.unwrap_or(usize::MAX))),
    }
}

/// Product of chains with the given lengths. Member `(j_1, …, j_d)` is
/// `S¹_{j_1} ∪ ⋯ ∪ S^d_{j_d}` with `|Sⁱ_j| = j`; members are listed with the
/// first coordinate varying fastest.
pub fn chain_product(sizes: &[usize]) -> Result<SetFamily, ConstructionError> {
    chain_product_with(sizes, &Limits::default())
}

pub fn chain_product_with(
    sizes: &[usize],
    limits: &Limits,
) -> Result<SetFamily, ConstructionError> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(ConstructionError::InvalidParameter(format!(
            "chain sizes must be nonempty and positive, got {sizes:?}"
        )));
    }
    let universe = sizes.iter().try_fold(0usize, |a, &s| a.checked_add(s));
    let members = sizes.iter().try_fold(1usize, |a, &s| a.checked_mul(s));
    let (universe, m) = check(universe, members, limits)?;

    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, &s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();
    let mut out = Vec::with_capacity(m);
    let mut coord = vec![1usize; sizes.len()];
    for _ in 0..m {
        let mut s = FiniteSet::new();
        for (i, &j) in coord.iter().enumerate() {
            for p in offsets[i]..offsets[i] + j {
                s.insert(p);
            }
        }
        out.push(s);
        for (i, c) in coord.iter_mut().enumerate() {
            if *c < sizes[i] {
                *c += 1;
                break;
            }
            *c = 1;
        }
    }
    Ok(SetFamily::from_sets_unchecked(universe, out))
}

/// Index of the chain-product member with 1-based coordinates `coord`.
pub fn chain_product_index(sizes: &[usize], coord: &[usize]) -> usize {
    let mut idx = 0;
    let mut stride = 1;
    for (&s, &c) in sizes.iter().zip(coord) {
        idx += (c - 1) * stride;
        stride *= s;
    }
    idx
}

/// `F_ES(k) = {A_i ∪ B_j}`, the product of two disjoint chains of length k.
/// Member `(i, j)` sits at index `(j - 1)·k + (i - 1)`.
pub fn erdos_shelah_family(k: usize) -> Result<SetFamily, ConstructionError> {
    if k == 0 {
        return Err(ConstructionError::InvalidParameter(
            "k must be at least 1".into(),
        ));
    }
    chain_product(&[k, k])
}

/// Chain sizes `k, k², k⁴, …, k^{2^{d-1}}`.
pub fn bd_extremal_sizes(k: usize, d: usize) -> Option<Vec<usize>> {
    (0..d)
        .map(|i| k.checked_pow(1u32.checked_shl(i as u32)?))
        .collect()
}

pub fn bd_extremal_family(k: usize, d: usize) -> Result<SetFamily, ConstructionError> {
    if k < 2 || d < 2 {
        return Err(ConstructionError::InvalidParameter(format!(
            "need k ≥ 2 and d ≥ 2, got k = {k}, d = {d}"
        )));
    }
    let sizes = bd_extremal_sizes(k, d).ok_or_else(|| too_large(usize::MAX, usize::MAX))?;
    chain_product(&sizes)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeveledSpec {
    /// `k_ℓ` for each level, bottom first.
    pub level_sizes: Vec<usize>,
}

impl LeveledSpec {
    pub fn uniform(q: usize, k: usize) -> Self {
        LeveledSpec {
            level_sizes: vec![k; q],
        }
    }

    pub fn levels(&self) -> usize {
        self.level_sizes.len()
    }

    pub fn total_size(&self) -> usize {
        self.level_sizes.iter().map(|k| k * k).sum()
    }

    /// Member index range of level `l` (1-based).
    pub fn level_range(&self, l: usize) -> std::ops::Range<usize> {
        let start: usize = self.level_sizes[..l - 1].iter().map(|k| k * k).sum();
        start..start + self.level_sizes[l - 1].pow(2)
    }
}

/// Level ℓ is a copy of `F_ES(k_ℓ)` on fresh elements, with every member
/// additionally containing all elements of the levels below it.
pub fn leveled_family(spec: &LeveledSpec) -> Result<SetFamily, ConstructionError> {
    leveled_family_with(spec, &Limits::default())
}

pub fn leveled_family_with(
    spec: &LeveledSpec,
    limits: &Limits,
) -> Result<SetFamily, ConstructionError> {
    if spec.level_sizes.is_empty() || spec.level_sizes.contains(&0) {
        return Err(ConstructionError::InvalidParameter(
            "need at least one level and every k ≥ 1".into(),
        ));
    }
    let universe = spec
        .level_sizes
        .iter()
        .try_fold(0usize, |a, &k| a.checked_add(k.checked_mul(2)?));
    let members = spec
        .level_sizes
        .iter()
        .try_fold(0usize, |a, &k| a.checked_add(k.checked_mul(k)?));
    let (universe, m) = check(universe, members, limits)?;

    let mut out = Vec::with_capacity(m);
    let mut offset = 0;
    for &k in &spec.level_sizes {
        let prefix = FiniteSet::range(0, offset);
        for j in 1..=k {
            for i in 1..=k {
                let mut s = prefix.clone();
                s.union_with(&FiniteSet::range(offset, offset + i));
                s.union_with(&FiniteSet::range(offset + k, offset + k + j));
                out.push(s);
            }
        }
        offset += 2 * k;
    }
    Ok(SetFamily::from_sets_unchecked(universe, out))
}

/// `⌈√x⌉` for integers.
pub fn ceil_sqrt(x: usize) -> usize {
    let mut r = (x as f64).sqrt() as usize;
    while r * r > x {
        r -= 1;
    }
    while r * r < x {
        r += 1;
    }
    r
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeometricLevels {
    pub a: usize,
    pub b: usize,
    pub ratio: f64,
    /// Unrounded `k·((b-1)/(b-2))^{2(ℓ-1)}`.
    pub real_sizes: Vec<f64>,
    pub spec: LeveledSpec,
}

/// Level sizes `k_ℓ = k·((b-1)/(b-2))^{2(ℓ-1)}` with `b = ⌈√(a+1)⌉`, rounded to
/// the nearest integer (at least 1).
pub fn geometric_levels(
    a: usize,
    k: usize,
    q: usize,
) -> Result<GeometricLevels, ConstructionError> {
    if a < 4 {
        return Err(ConstructionError::GeometricUndefined(a));
    }
    if k == 0 || q == 0 {
        return Err(ConstructionError::InvalidParameter(
            "need k ≥ 1 and q ≥ 1".into(),
        ));
    }
    let b = ceil_sqrt(a + 1);
    let ratio = (b - 1) as f64 / (b - 2) as f64;
    let real_sizes: Vec<f64> = (0..q)
        .map(|l| k as f64 * ratio.powi(2 * l as i32))
        .collect();
    let level_sizes = real_sizes
        .iter()
        .map(|&x| (x.round() as usize).max(1))
        .collect();
    Ok(GeometricLevels {
        a,
        b,
        ratio,
        real_sizes,
        spec: LeveledSpec { level_sizes },
    })
}

/// All (m-1)-subsets of `[m]`, in lexicographic order of their element lists.
pub fn co_singleton_family(m: usize) -> Result<SetFamily, ConstructionError> {
    if m < 2 {
        return Err(ConstructionError::InvalidParameter(
            "m must be at least 2".into(),
        ));
    }
    check(Some(m), Some(m), &Limits::default())?;
    let full = FiniteSet::range(0, m);
    let out = (0..m)
        .rev()
        .map(|p| {
            let mut s = full.clone();
            s.remove(p);
            s
        })
        .collect();
    Ok(SetFamily::from_sets_unchecked(m, out))
}

/// `2^[n]`, ordered by the numeric value of the membership vector.
pub fn power_set(n: usize) -> Result<SetFamily, ConstructionError> {
    let limits = Limits::default();
    if n >= 63 || (1usize << n) > limits.max_members {
        return Err(too_large(n, usize::MAX));
    }
    let out = (0..1u64 << n).map(FiniteSet::from_mask).collect();
    Ok(SetFamily::from_sets_unchecked(n, out))
}

//! Extracting large subfamilies with a certified size guarantee.
//!
//! * Random deletion: keep each member independently with probability `p`,
//!   then break every remaining Boolean subalgebra by deleting one member.
//!   The expected output is at least `m·p − p^{2^d}·#B_d(F)`.
//! * Rank splitting: one rank level plus a chain ending in it is union-free
//!   for every `a`, and some level gives at least `√(2m) − 1/2` members.
//! * Greedy: add members in a fixed order while the property survives.

use std::collections::HashMap;
use std::ops::ControlFlow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boolean_algebra::{count_boolean_algebras, determining_size, for_each_algebra};
use crate::family::SetFamily;
use crate::property::Property;
use crate::rank::rank_partition;

/// Above this many witnesses the guarantee falls back to the binomial bound.
const EXACT_COUNT_LIMIT: u64 = 5_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub trials: usize,
    pub best: usize,
    pub mean: f64,
    pub sizes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractionResult {
    /// Member indices of the extracted subfamily, increasing.
    pub indices: Vec<usize>,
    pub property: Property,
    /// Lower bound the method certifies.
    pub guarantee: f64,
    /// The guarantee used a worst-case count rather than the exact one.
    pub pessimistic: bool,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trials: Option<TrialStats>,
}

impl ExtractionResult {
    pub fn size(&self) -> usize {
        self.indices.len()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtractionError {
    #[error("{method} produced a subfamily without property {property}")]
    InternalVerificationFailed { method: String, property: Property },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

fn verify(
    family: &SetFamily,
    result: ExtractionResult,
) -> Result<ExtractionResult, ExtractionError> {
    if result.property.holds_on(family, &result.indices) {
        Ok(result)
    } else {
        Err(ExtractionError::InternalVerificationFailed {
            method: result.method,
            property: result.property,
        })
    }
}

pub fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `2^{-1/3} m^{-1/3}` for `d = 2`, otherwise `m^{-(⌈log₂(d+2)⌉-1)/(2^d-1)}`,
/// capped at 1.
pub fn default_probability(m: usize, d: usize) -> f64 {
    let m = m as f64;
    let p = if d == 2 {
        (2.0 * m).powf(-1.0 / 3.0)
    } else {
        let e = (determining_size(d) - 1) as f64 / ((1u64 << d) - 1) as f64;
        m.powf(-e)
    };
    p.min(1.0)
}

/// `m·p − p^{2^d}·count`.
pub fn deletion_guarantee(m: usize, d: usize, p: f64, count: f64) -> f64 {
    m as f64 * p - p.powi(1 << d) * count
}

/// Deletes one member per remaining witness, always the member lying in the
/// most witnesses (lowest index on ties), until none remain.
fn break_algebras(family: &SetFamily, mut kept: Vec<usize>, d: usize) -> Vec<usize> {
    loop {
        let mut hits: HashMap<usize, usize> = HashMap::new();
        let _ = for_each_algebra::<()>(family.members(), &kept, d, false, &mut |w| {
            for i in w.index_map {
                *hits.entry(i).or_default() += 1;
            }
            ControlFlow::Continue(())
        });
        let Some((&victim, _)) = hits
            .iter()
            .max_by_key(|&(&i, &c)| (c, std::cmp::Reverse(i)))
        else {
            return kept;
        };
        kept.retain(|&i| i != victim);
    }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// The B_d-free subfamily each trial ends with, in trial order. Trial `t`
/// draws from stream `t` of the seeded generator.
pub fn deletion_trials(
    family: &SetFamily,
    d: usize,
    p: f64,
    seed: u64,
    trials: usize,
) -> Vec<Vec<usize>> {
    let m = family.len();
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let sample: Vec<usize> = (0..m).filter(|_| rng.random::<f64>() < p).collect();
            break_algebras(family, sample, d)
        })
        .collect()
}

pub fn random_deletion_bd_free(
    family: &SetFamily,
    d: usize,
    p: f64,
    seed: u64,
    trials: usize,
) -> Result<ExtractionResult, ExtractionError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(ExtractionError::InvalidParameter(format!(
            "p = {p} is outside (0, 1]"
        )));
    }
    if d < 2 || trials == 0 {
        return Err(ExtractionError::InvalidParameter(
            "need d ≥ 2 and at least one trial".into(),
        ));
    }
    let m = family.len();
    let outputs = deletion_trials(family, d, p, seed, trials);

    let sizes: Vec<usize> = outputs.iter().map(Vec::len).collect();
    let best_trial = (0..trials)
        .max_by_key(|&t| (sizes[t], std::cmp::Reverse(t)))
        .unwrap();
    let mean = sizes.iter().sum::<usize>() as f64 / trials as f64;

    let (count, pessimistic) = exact_or_bound(family, d);
    let result = ExtractionResult {
        indices: outputs[best_trial].clone(),
        property: Property::BdFree { d },
        guarantee: deletion_guarantee(m, d, p, count),
        pessimistic,
        method: "random-deletion".into(),
        seed: Some(seed),
        trials: Some(TrialStats {
            trials,
            best: sizes[best_trial],
            mean,
            sizes,
        }),
    };
    verify(family, result)
}

/// The exact B_d count when enumeration is cheap enough, else the
/// `C(m, ⌈log₂(d+2)⌉)` upper bound (flagged).
fn exact_or_bound(family: &SetFamily, d: usize) -> (f64, bool) {
    let m = family.len();
    let bound = binomial_f64(m, determining_size(d));
    // enumeration visits at most m · C(m, d) generator tuples
    let work = m as f64 * binomial_f64(m, d);
    if work <= EXACT_COUNT_LIMIT as f64 {
        (count_boolean_algebras(family, d) as f64, false)
    } else {
        (bound, true)
    }
}

/// One rank level plus a longest chain ending in it, choosing the level that
/// maximizes `|level_k| + k − 1` (smallest `k` on ties).
pub fn kleitman_extract(family: &SetFamily, a: usize) -> Result<ExtractionResult, ExtractionError> {
    if a < 2 {
        return Err(ExtractionError::InvalidParameter(
            "a must be at least 2".into(),
        ));
    }
    let m = family.len();
    let table = rank_partition(family);
    let floor = (2.0 * m as f64).sqrt() - 0.5;
    let mut indices = Vec::new();
    let mut value = 0usize;
    if table.max_rank > 0 {
        let k = (1..=table.max_rank)
            .max_by_key(|&k| (table.level(k).len() + k - 1, std::cmp::Reverse(k)))
            .unwrap();
        let level = table.level(k);
        indices = level.to_vec();
        let chain = table.chain_to(level[0]);
        indices.extend(&chain[..chain.len() - 1]);
        indices.sort_unstable();
        value = level.len() + k - 1;
        debug_assert_eq!(indices.len(), value);
    }
    let result = ExtractionResult {
        indices,
        property: Property::UnionFree { a },
        guarantee: (value as f64).max(if m == 0 { 0.0 } else { floor }),
        pessimistic: false,
        method: "kleitman".into(),
        seed: None,
        trials: None,
    };
    verify(family, result)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GreedyOrder {
    Given,
    SizeAscending,
    SizeDescending,
}

impl std::str::FromStr for GreedyOrder {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "given" => Ok(GreedyOrder::Given),
            "size-ascending" => Ok(GreedyOrder::SizeAscending),
            "size-descending" => Ok(GreedyOrder::SizeDescending),
            _ => Err(format!("unknown order {s:?}")),
        }
    }
}

pub fn greedy_extract(
    family: &SetFamily,
    property: Property,
    order: GreedyOrder,
) -> Result<ExtractionResult, ExtractionError> {
    let mut scan = family.all_indices();
    match order {
        GreedyOrder::Given => {}
        GreedyOrder::SizeAscending => scan.sort_by_key(|&i| (family.member(i).len(), i)),
        GreedyOrder::SizeDescending => {
            scan.sort_by_key(|&i| (std::cmp::Reverse(family.member(i).len()), i))
        }
    }
    let mut kept: Vec<usize> = Vec::new();
    for i in scan {
        kept.push(i);
        if !property.holds_on(family, &kept) {
            kept.pop();
        }
    }
    kept.sort_unstable();
    let result = ExtractionResult {
        guarantee: kept.len() as f64,
        indices: kept,
        property,
        pessimistic: false,
        method: "greedy".into(),
        seed: None,
        trials: None,
    };
    verify(family, result)
}

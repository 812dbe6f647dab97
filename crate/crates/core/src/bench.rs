//! Benchmark suites: extraction methods against the exact oracle and the
//! applicable bounds, one row per (family, method, property).

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{leveled_bound, union_free_bounds, worst_case_deletion_guarantee};
use crate::constructions::{
    bd_extremal_family, chain_product, co_singleton_family, erdos_shelah_family, leveled_family,
    power_set, LeveledSpec,
};
use crate::extraction::{
    default_probability, greedy_extract, kleitman_extract, random_deletion_bd_free, GreedyOrder,
};
use crate::family::SetFamily;
use crate::grid::es_grid_bound;
use crate::manifest::{Output, RunManifest, Timing};
use crate::oracle::max_subfamily;
use crate::property::Property;
use crate::search::SearchConfig;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FamilySpec {
    PowerSet { n: usize },
    Es { k: usize },
    ChainProduct { sizes: Vec<usize> },
    BdExtremal { k: usize, d: usize },
    Leveled { q: usize, k: usize },
    CoSingleton { m: usize },
}

impl FamilySpec {
    pub fn label(&self) -> String {
        match self {
            FamilySpec::PowerSet { n } => format!("power-set({n})"),
            FamilySpec::Es { k } => format!("es({k})"),
            FamilySpec::ChainProduct { sizes } => {
                let s: Vec<String> = sizes.iter().map(|x| x.to_string()).collect();
                format!("chain-product({})", s.join(","))
            }
            FamilySpec::BdExtremal { k, d } => format!("bd-extremal({k},{d})"),
            FamilySpec::Leveled { q, k } => format!("leveled({q},{k})"),
            FamilySpec::CoSingleton { m } => format!("co-singleton({m})"),
        }
    }

    pub fn build(&self) -> Result<SetFamily, String> {
        let r = match self {
            FamilySpec::PowerSet { n } => power_set(*n),
            FamilySpec::Es { k } => erdos_shelah_family(*k),
            FamilySpec::ChainProduct { sizes } => chain_product(sizes),
            FamilySpec::BdExtremal { k, d } => bd_extremal_family(*k, *d),
            FamilySpec::Leveled { q, k } => leveled_family(&LeveledSpec::uniform(*q, *k)),
            FamilySpec::CoSingleton { m } => co_singleton_family(*m),
        };
        r.map_err(|e| e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    RandomDeletion,
    Kleitman,
    Greedy,
    Exact,
}

impl Method {
    fn name(&self) -> &'static str {
        match self {
            Method::RandomDeletion => "random-deletion",
            Method::Kleitman => "kleitman",
            Method::Greedy => "greedy",
            Method::Exact => "exact",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub family: FamilySpec,
    pub property: Property,
    pub methods: Vec<Method>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Suite {
    pub name: String,
    pub scenarios: Vec<Scenario>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BenchError {
    #[error("unknown suite {0:?} (known: b2-small, uf-es, empty)")]
    UnknownSuite(String),
    #[error("manifest is not a bench manifest: {0}")]
    BadManifest(String),
}

pub fn named_suite(name: &str) -> Result<Suite, BenchError> {
    let scenarios = match name {
        "b2-small" => (3..=5)
            .map(|n| Scenario {
                family: FamilySpec::PowerSet { n },
                property: Property::BdFree { d: 2 },
                methods: vec![Method::RandomDeletion, Method::Exact],
            })
            .collect(),
        "uf-es" => (2..=3)
            .map(|k| Scenario {
                family: FamilySpec::Es { k },
                property: Property::UnionFree { a: 2 },
                methods: vec![Method::Kleitman, Method::Exact],
            })
            .collect(),
        "empty" => Vec::new(),
        _ => return Err(BenchError::UnknownSuite(name.to_string())),
    };
    Ok(Suite {
        name: name.to_string(),
        scenarios,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchOptions {
    pub seed: u64,
    pub trials: usize,
    /// Per-row node limit for the exact oracle.
    pub node_limit: Option<u64>,
    pub timing: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            seed: 0,
            trials: 200,
            node_limit: Some(50_000_000),
            timing: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub family: String,
    pub m: usize,
    pub method: String,
    pub property: Property,
    pub size: Option<usize>,
    pub guarantee: Option<f64>,
    /// false only for an exact row that hit its limit.
    pub proven: Option<bool>,
    pub bounds: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub runtime_ms: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub suite: Suite,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn failed(&self) -> bool {
        self.rows.iter().any(|r| r.error.is_some())
    }
}

/// Bounds that hold for this particular family. Upper bounds on f(m, ·)
/// only constrain the worst m-member family, so they are left out.
fn applicable_bounds(
    family: &SetFamily,
    spec: &FamilySpec,
    property: Property,
) -> BTreeMap<String, f64> {
    let m = family.len();
    let mut out = BTreeMap::new();
    match property {
        Property::BdFree { d } => {
            if m > 0 {
                out.insert(
                    "deletion_guarantee".into(),
                    worst_case_deletion_guarantee(m, d),
                );
            }
        }
        Property::UnionFree { a } => {
            out.insert(
                "kleitman_lower".into(),
                union_free_bounds(m, a).kleitman_lower,
            );
            match spec {
                FamilySpec::Es { k } => {
                    out.insert("es_grid_bound".into(), es_grid_bound(*k, a) as f64);
                }
                FamilySpec::Leveled { q, k } => {
                    out.insert("leveled_bound".into(), leveled_bound(a, *k, *q) as f64);
                }
                _ => {}
            }
        }
        Property::AbUnionFree { a, b } => {
            out.insert("ab_union_free_value".into(), (a + b - 1) as f64);
        }
    }
    out
}

fn run_row(
    family: &SetFamily,
    scenario: &Scenario,
    method: &Method,
    opts: &BenchOptions,
) -> BenchRow {
    let start = Instant::now();
    let mut row = BenchRow {
        family: scenario.family.label(),
        m: family.len(),
        method: method.name().to_string(),
        property: scenario.property,
        size: None,
        guarantee: None,
        proven: None,
        bounds: applicable_bounds(family, &scenario.family, scenario.property),
        runtime_ms: None,
        error: None,
    };
    let outcome: Result<(), String> = match (method, scenario.property) {
        (Method::RandomDeletion, Property::BdFree { d }) => {
            let p = default_probability(family.len(), d);
            random_deletion_bd_free(family, d, p, opts.seed, opts.trials)
                .map(|r| {
                    row.size = Some(r.size());
                    row.guarantee = Some(r.guarantee);
                })
                .map_err(|e| e.to_string())
        }
        (Method::RandomDeletion, p) => Err(format!(
            "random-deletion needs a B_d-free property, got {p}"
        )),
        (Method::Kleitman, Property::UnionFree { a }) => kleitman_extract(family, a)
            .map(|r| {
                row.size = Some(r.size());
                row.guarantee = Some(r.guarantee);
            })
            .map_err(|e| e.to_string()),
        (Method::Kleitman, p) => Err(format!("kleitman needs an a-union-free property, got {p}")),
        (Method::Greedy, p) => greedy_extract(family, p, GreedyOrder::Given)
            .map(|r| row.size = Some(r.size()))
            .map_err(|e| e.to_string()),
        (Method::Exact, p) => {
            let cfg = SearchConfig {
                node_limit: opts.node_limit,
                ..Default::default()
            };
            max_subfamily(family, p, &cfg)
                .map(|r| {
                    row.size = Some(r.optimum);
                    row.proven = Some(r.proven);
                })
                .map_err(|e| e.to_string())
        }
    };
    row.error = outcome.err();
    if opts.timing {
        row.runtime_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    row
}

fn error_row(scenario: &Scenario, method: &Method, error: String) -> BenchRow {
    BenchRow {
        family: scenario.family.label(),
        m: 0,
        method: method.name().to_string(),
        property: scenario.property,
        size: None,
        guarantee: None,
        proven: None,
        bounds: BTreeMap::new(),
        runtime_ms: None,
        error: Some(error),
    }
}

/// Rows come out in scenario order, then method order, however the work is
/// scheduled.
pub fn run_suite(suite: &Suite, opts: &BenchOptions) -> BenchReport {
    let jobs: Vec<(&Scenario, &Method)> = suite
        .scenarios
        .iter()
        .flat_map(|s| s.methods.iter().map(move |m| (s, m)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(s, m)| match s.family.build() {
            Ok(f) => run_row(&f, s, m, opts),
            Err(e) => error_row(s, m, e),
        })
        .collect();
    BenchReport {
        suite: suite.clone(),
        rows,
    }
}

pub fn bench_manifest(suite: &Suite, opts: &BenchOptions) -> RunManifest {
    let mut m = RunManifest::new("bench")
        .flag("suite", suite)
        .flag("trials", opts.trials)
        .flag("node_limit", opts.node_limit)
        .flag("timing", opts.timing);
    m.seed = Some(opts.seed);
    m
}

pub fn run_bench(suite: &Suite, opts: &BenchOptions) -> Output<BenchReport> {
    let start = Instant::now();
    let result = run_suite(suite, opts);
    let mut manifest = bench_manifest(suite, opts);
    if opts.timing {
        manifest.timing = Some(Timing {
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }
    Output { manifest, result }
}

fn flag<T: serde::de::DeserializeOwned>(m: &RunManifest, name: &str) -> Result<T, BenchError> {
    let v = m
        .flags
        .get(name)
        .ok_or_else(|| BenchError::BadManifest(format!("missing flag {name}")))?;
    serde_json::from_value(v.clone())
        .map_err(|e| BenchError::BadManifest(format!("flag {name}: {e}")))
}

/// Runs the bench a manifest describes.
pub fn rerun(manifest: &RunManifest) -> Result<Output<BenchReport>, BenchError> {
    if manifest.command != "bench" {
        return Err(BenchError::BadManifest(format!(
            "command is {:?}",
            manifest.command
        )));
    }
    let suite: Suite = flag(manifest, "suite")?;
    let opts = BenchOptions {
        seed: manifest
            .seed
            .ok_or_else(|| BenchError::BadManifest("missing seed".into()))?,
        trials: flag(manifest, "trials")?,
        node_limit: flag(manifest, "node_limit")?,
        timing: flag(manifest, "timing")?,
    };
    Ok(run_bench(&suite, &opts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_suite() {
        let r = run_suite(&named_suite("empty").unwrap(), &BenchOptions::default());
        assert!(r.rows.is_empty() && !r.failed());
        assert!(named_suite("nope").is_err());
    }

    #[test]
    fn failing_row_does_not_stop_the_run() {
        let suite = Suite {
            name: "mixed".into(),
            scenarios: vec![
                Scenario {
                    family: FamilySpec::Es { k: 2 },
                    property: Property::UnionFree { a: 2 },
                    methods: vec![Method::RandomDeletion, Method::Exact],
                },
                Scenario {
                    family: FamilySpec::BdExtremal { k: 1, d: 2 },
                    property: Property::BdFree { d: 2 },
                    methods: vec![Method::Exact],
                },
            ],
        };
        let r = run_suite(&suite, &BenchOptions::default());
        assert_eq!(r.rows.len(), 3);
        assert!(r.rows[0].error.is_some());
        assert_eq!(r.rows[1].size, Some(3));
        assert!(r.rows[2].error.is_some());
        assert!(r.failed());
    }

    #[test]
    fn uf_es_rows_respect_bound() {
        let r = run_suite(&named_suite("uf-es").unwrap(), &BenchOptions::default());
        assert_eq!(r.rows.len(), 4);
        for row in r.rows.iter().filter(|r| r.method == "exact") {
            assert!(row.size.unwrap() as f64 <= row.bounds["es_grid_bound"]);
        }
    }
}

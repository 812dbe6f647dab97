//! Complete d-partite d-uniform hypergraphs with part sizes `k, k², …,
//! k^{2^{d-1}}`, copies of `K_{d*2}` (two vertices per part, all `2^d`
//! transversal edges present), exact generalized Turán numbers on small
//! hosts, and the correspondence with chain-product families.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::boolean_algebra::count_boolean_algebras;
use crate::constructions::{
    bd_extremal_family, bd_extremal_sizes, chain_product_index, ConstructionError,
};
use crate::family::SetFamily;
use crate::oracle::OracleResult;
use crate::property::Property;
use crate::search::{maximum_conflict_free, ConflictList, SearchConfig};
use crate::set::FiniteSet;

const EDGE_BUDGET: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TuranError {
    #[error("hypergraph with part sizes {0:?} exceeds the edge budget")]
    BudgetExceeded(Vec<usize>),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("family/hypergraph correspondence broken: {0}")]
    BijectionViolated(String),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultipartiteHypergraph {
    pub part_sizes: Vec<usize>,
    /// Each edge picks one 0-based vertex per part.
    pub edges: Vec<Vec<usize>>,
    pub complete: bool,
}

impl MultipartiteHypergraph {
    /// All `∏ a_i` edges, first coordinate varying fastest.
    pub fn complete(part_sizes: &[usize]) -> Result<Self, TuranError> {
        let total = part_sizes
            .iter()
            .try_fold(1usize, |acc, &s| acc.checked_mul(s))
            .filter(|&t| t <= EDGE_BUDGET)
            .ok_or_else(|| TuranError::BudgetExceeded(part_sizes.to_vec()))?;
        if part_sizes.is_empty() || part_sizes.contains(&0) {
            return Err(TuranError::InvalidParameter(
                "parts must be nonempty".into(),
            ));
        }
        let mut edges = Vec::with_capacity(total);
        let mut coord = vec![0usize; part_sizes.len()];
        for _ in 0..total {
            edges.push(coord.clone());
            for (i, c) in coord.iter_mut().enumerate() {
                if *c + 1 < part_sizes[i] {
                    *c += 1;
                    break;
                }
                *c = 0;
            }
        }
        Ok(MultipartiteHypergraph {
            part_sizes: part_sizes.to_vec(),
            edges,
            complete: true,
        })
    }

    pub fn uniformity(&self) -> usize {
        self.part_sizes.len()
    }

    /// The subhypergraph on the edges at `indices`.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        MultipartiteHypergraph {
            part_sizes: self.part_sizes.clone(),
            edges: indices.iter().map(|&i| self.edges[i].clone()).collect(),
            complete: false,
        }
    }
}

/// `K_d^{(k)} = K(k, k², …, k^{2^{d-1}})`.
pub fn build_kdk(k: usize, d: usize) -> Result<MultipartiteHypergraph, TuranError> {
    if k < 1 || d < 1 {
        return Err(TuranError::InvalidParameter("need k ≥ 1 and d ≥ 1".into()));
    }
    let sizes = bd_extremal_sizes(k, d).ok_or_else(|| TuranError::BudgetExceeded(vec![k; d]))?;
    MultipartiteHypergraph::complete(&sizes)
}

/// Every `K_{d*2}` copy, as the increasing list of its `2^d` edge indices.
pub fn kd2_copies(h: &MultipartiteHypergraph) -> Vec<Vec<usize>> {
    let lookup: HashMap<&[usize], usize> = h
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| (e.as_slice(), i))
        .collect();
    let d = h.uniformity();
    // vertices of each part that appear in some edge
    let mut used: Vec<Vec<usize>> = vec![Vec::new(); d];
    for (i, u) in used.iter_mut().enumerate() {
        let mut seen = vec![false; h.part_sizes[i]];
        for e in &h.edges {
            seen[e[i]] = true;
        }
        *u = (0..h.part_sizes[i]).filter(|&v| seen[v]).collect();
    }
    let mut out = Vec::new();
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(d);
    copies_rec(&used, &lookup, &mut pairs, &mut out);
    out
}

fn copies_rec(
    used: &[Vec<usize>],
    lookup: &HashMap<&[usize], usize>,
    pairs: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<usize>>,
) {
    let d = used.len();
    if pairs.len() == d {
        let mut edges = Vec::with_capacity(1 << d);
        let mut e = vec![0; d];
        for mask in 0..1usize << d {
            for (i, &(u, v)) in pairs.iter().enumerate() {
                e[i] = if mask >> i & 1 == 1 { v } else { u };
            }
            match lookup.get(e.as_slice()) {
                Some(&idx) => edges.push(idx),
                None => return,
            }
        }
        edges.sort_unstable();
        out.push(edges);
        return;
    }
    let part = &used[pairs.len()];
    for (x, &u) in part.iter().enumerate() {
        for &v in &part[x + 1..] {
            pairs.push((u, v));
            copies_rec(used, lookup, pairs, out);
            pairs.pop();
        }
    }
}

pub fn count_kd2(h: &MultipartiteHypergraph) -> u64 {
    if h.edges.len() < 1 << h.uniformity() {
        return 0;
    }
    if h.complete {
        return h
            .part_sizes
            .iter()
            .map(|&a| (a * a.saturating_sub(1) / 2) as u64)
            .product();
    }
    kd2_copies(h).len() as u64
}

/// Largest `K_{d*2}`-free edge subset of `h`, by branch and bound.
pub fn ex_exact(h: &MultipartiteHypergraph, config: &SearchConfig) -> OracleResult {
    let conflicts = ConflictList::new(kd2_copies(h));
    let out = maximum_conflict_free(h.edges.len(), &conflicts, config);
    OracleResult {
        optimum: out.best.len(),
        witness: out.best,
        proven: out.proven,
        nodes: out.nodes,
    }
}

/// `(2 − 2^{1−d})·k^{2^d − 2}`.
pub fn turan_bound(k: usize, d: usize) -> f64 {
    (2.0 - 0.5f64.powi(d as i32 - 1)) * (k as f64).powi((1i32 << d) - 2)
}

/// `C(k, 2) + k²`, the sharper count for `d = 2`.
pub fn base_case_bound(k: usize) -> usize {
    k * (k - 1) / 2 + k * k
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkDiagnostic {
    /// Vertex of the largest part.
    pub vertex: usize,
    pub degree: usize,
    /// `K_{(d-1)*2}` copies in the link of the vertex.
    pub link_copies: u64,
}

/// Degrees and link copy counts over the largest (last) part, the quantities
/// the induction on `d` sums over.
pub fn link_diagnostics(h: &MultipartiteHypergraph) -> Vec<LinkDiagnostic> {
    let d = h.uniformity();
    let last = d - 1;
    (0..h.part_sizes[last])
        .map(|v| {
            let link = MultipartiteHypergraph {
                part_sizes: h.part_sizes[..last].to_vec(),
                edges: h
                    .edges
                    .iter()
                    .filter(|e| e[last] == v)
                    .map(|e| e[..last].to_vec())
                    .collect(),
                complete: false,
            };
            LinkDiagnostic {
                vertex: v,
                degree: link.edges.len(),
                link_copies: if last == 0 { 0 } else { count_kd2(&link) },
            }
        })
        .collect()
}

/// The member `S¹_{j_1} ∪ ⋯ ∪ S^d_{j_d}` for 0-based edge coordinates,
/// built directly from the block layout.
fn member_for_edge(sizes: &[usize], edge: &[usize]) -> FiniteSet {
    let mut s = FiniteSet::new();
    let mut offset = 0;
    for (&size, &c) in sizes.iter().zip(edge) {
        for p in offset..=offset + c {
            s.insert(p);
        }
        offset += size;
    }
    s
}

/// Member indices of the family corresponding to the given edges.
pub fn pullback(
    family: &SetFamily,
    h: &MultipartiteHypergraph,
    edges: &[usize],
) -> Result<Vec<usize>, TuranError> {
    edges
        .iter()
        .map(|&e| {
            let set = member_for_edge(&h.part_sizes, &h.edges[e]);
            family.position(&set).ok_or_else(|| {
                TuranError::BijectionViolated(format!("edge {:?} has no member", h.edges[e]))
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BijectionReport {
    pub k: usize,
    pub d: usize,
    pub members: usize,
    pub edges: usize,
    pub bd_witnesses: u64,
    pub kd2_copies: u64,
    pub subfamilies_checked: usize,
}

/// Checks that edges of `K_d^{(k)}` and members of the B_d-extremal family
/// correspond one to one, that B_d witnesses and `K_{d*2}` copies are
/// equinumerous, and that B_d-freeness and `K_{d*2}`-freeness agree on
/// sampled subsets (all subsets when there are at most 12 edges).
pub fn family_hypergraph_bijection(
    k: usize,
    d: usize,
    samples: usize,
    seed: u64,
) -> Result<BijectionReport, TuranError> {
    let family = bd_extremal_family(k, d)?;
    let h = build_kdk(k, d)?;
    if family.len() != h.edges.len() {
        return Err(TuranError::BijectionViolated(format!(
            "{} members vs {} edges",
            family.len(),
            h.edges.len()
        )));
    }
    let image = pullback(&family, &h, &(0..h.edges.len()).collect::<Vec<_>>())?;
    let mut seen = vec![false; family.len()];
    for (e, &i) in image.iter().enumerate() {
        let coord: Vec<usize> = h.edges[e].iter().map(|c| c + 1).collect();
        if seen[i] || chain_product_index(&h.part_sizes, &coord) != i {
            return Err(TuranError::BijectionViolated(format!(
                "edge {e} maps to member {i} inconsistently"
            )));
        }
        seen[i] = true;
    }
    let bd_witnesses = count_boolean_algebras(&family, d);
    let copies = kd2_copies(&h);
    if bd_witnesses != copies.len() as u64 || count_kd2(&h) != bd_witnesses {
        return Err(TuranError::BijectionViolated(format!(
            "{bd_witnesses} B_{d} witnesses vs {} K_(d*2) copies",
            copies.len()
        )));
    }

    let n = h.edges.len();
    let subsets: Vec<Vec<usize>> = if n <= 12 {
        (0u32..1 << n)
            .map(|mask| (0..n).filter(|&e| mask >> e & 1 == 1).collect())
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples)
            .map(|s| {
                // sweep the keep probability so both outcomes show up
                let p = (s as f64 + 0.5) / samples as f64;
                (0..n).filter(|_| rng.random::<f64>() < p).collect()
            })
            .collect()
    };
    let property = Property::BdFree { d };
    let list = ConflictList::new(copies);
    for edges in &subsets {
        let members = pullback(&family, &h, edges)?;
        let free_family = property.holds_on(&family, &members);
        let free_graph = crate::search::ConflictFinder::find(
            &list,
            &FiniteSet::from_positions(edges.iter().copied()),
        )
        .is_none();
        if free_family != free_graph {
            return Err(TuranError::BijectionViolated(format!(
                "edge subset {edges:?} disagrees"
            )));
        }
    }
    Ok(BijectionReport {
        k,
        d,
        members: family.len(),
        edges: n,
        bd_witnesses,
        kd2_copies: count_kd2(&h),
        subfamilies_checked: subsets.len(),
    })
}

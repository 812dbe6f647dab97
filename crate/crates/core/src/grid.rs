//! Grid view of subfamilies of `F_ES(k)`: member `A_i ∪ B_j` is the point
//! `(i, j)` of the k×k grid, and `A_i ∪ B_j` is a union of `a` other chosen
//! members exactly when the rectangle `R(i, j)` holds at least `a` other
//! points, one of them on its top row `y = j` and one on its right column
//! `x = i`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::constructions::ceil_sqrt;
use crate::family::SetFamily;
use crate::set::FiniteSet;
use crate::union_free::is_a_union_free;

pub type Point = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridPointSet {
    pub k: usize,
    pub points: BTreeSet<Point>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("set {0:?} is not a member of F_ES({1})")]
    NotASubfamily(Vec<usize>, usize),
}

/// Reads `(i, j)` back from `A_i ∪ B_j` with `A_i = {1..i}` and
/// `B_j = {k+1..k+j}`.
pub fn es_coordinates(set: &FiniteSet, k: usize) -> Option<Point> {
    if set.span() > 2 * k {
        return None;
    }
    let i = set.iter().take_while(|&p| p < k).count();
    let j = set.len() - i;
    let expected = FiniteSet::range(0, i).union(&FiniteSet::range(k, k + j));
    (i >= 1 && j >= 1 && &expected == set).then_some((i, j))
}

pub fn to_grid(sets: &[FiniteSet], k: usize) -> Result<GridPointSet, GridError> {
    let points = sets
        .iter()
        .map(|s| es_coordinates(s, k).ok_or_else(|| GridError::NotASubfamily(s.elements(), k)))
        .collect::<Result<BTreeSet<_>, _>>()?;
    Ok(GridPointSet { k, points })
}

/// The rectangle test in both directions: the violating point and `a` points
/// of `R(i, j)` covering it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridViolation {
    pub point: Point,
    pub cover: Vec<Point>,
}

/// Lexicographically smallest `(i, j)` whose rectangle holds at least `a`
/// other points including one on the top row and one on the right column.
pub fn grid_violation(p: &GridPointSet, a: usize) -> Option<GridViolation> {
    assert!(a >= 2, "a must be at least 2");
    for &(i, j) in &p.points {
        let inside: Vec<Point> = p
            .points
            .iter()
            .copied()
            .filter(|&(x, y)| x <= i && y <= j && (x, y) != (i, j))
            .collect();
        if inside.len() < a {
            continue;
        }
        let top = inside.iter().copied().filter(|&(_, y)| y == j).max();
        let right = inside.iter().copied().filter(|&(x, _)| x == i).max();
        if let (Some(top), Some(right)) = (top, right) {
            let mut cover = vec![top, right];
            cover.extend(
                inside
                    .iter()
                    .copied()
                    .filter(|q| *q != top && *q != right)
                    .take(a - 2),
            );
            cover.sort();
            return Some(GridViolation {
                point: (i, j),
                cover,
            });
        }
    }
    None
}

/// Whether the rectangle test and the definitional a-union-free check agree
/// on the subfamily `sets` of `F_ES(k)`.
pub fn grid_equivalence_check(sets: &[FiniteSet], k: usize, a: usize) -> Result<bool, GridError> {
    let grid = to_grid(sets, k)?;
    let family = SetFamily::from_sets(2 * k, sets.to_vec()).expect("distinct members of F_ES(k)");
    Ok(grid_violation(&grid, a).is_none() == is_a_union_free(&family, a).is_ok())
}

/// `⌈√(a+1)⌉ − 1`.
pub fn prune_depth(a: usize) -> usize {
    ceil_sqrt(a + 1) - 1
}

/// Drops the `⌈√(a+1)⌉ − 1` lowest points of every column.
pub fn column_prune(p: &GridPointSet, a: usize) -> GridPointSet {
    let h = prune_depth(a);
    let mut columns: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(x, y) in &p.points {
        columns.entry(x).or_default().push(y);
    }
    let points = columns
        .into_iter()
        .flat_map(|(x, ys)| ys.into_iter().skip(h).map(move |y| (x, y)))
        .collect();
    GridPointSet { k: p.k, points }
}

pub fn row_sizes(p: &GridPointSet) -> Vec<usize> {
    let mut rows = vec![0; p.k + 1];
    for &(_, y) in &p.points {
        rows[y] += 1;
    }
    rows.remove(0);
    rows
}

/// `2(⌈√(a+1)⌉ − 1)k`.
pub fn es_grid_bound(k: usize, a: usize) -> usize {
    2 * prune_depth(a) * k
}

/// k×k matrix, top row `y = k`, `#` for occupied cells.
pub fn render(p: &GridPointSet) -> String {
    let mut out = String::new();
    for y in (1..=p.k).rev() {
        for x in 1..=p.k {
            out.push(if p.points.contains(&(x, y)) { '#' } else { '.' });
        }
        writeln!(out).unwrap();
    }
    out
}

//! Closed-form bounds on `f(m, Γ)` and related quantities.
//!
//! Bounds whose constants are hidden in `o(1)`, `O(·)` or `Θ(·)` carry
//! `asymptotic: true` and should be read as trends, never as pass/fail gates.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boolean_algebra::determining_size;
use crate::extraction::{binomial_f64, default_probability, deletion_guarantee};
use crate::grid::es_grid_bound;
use crate::turan::{base_case_bound, turan_bound};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("the geometric refinement needs a ≥ 4, got a = {0}")]
    GeometricUndefined(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// `(e_d, e_d′) = ((2^d − ⌈log₂(d+2)⌉)/(2^d − 1), (2^d − 2)/(2^d − 1))`.
pub fn exponents(d: usize) -> (Ratio<i64>, Ratio<i64>) {
    assert!((2..=40).contains(&d), "d must be in 2..=40");
    let full = (1i64 << d) - 1;
    (
        Ratio::new(full + 1 - determining_size(d) as i64, full),
        Ratio::new(full - 1, full),
    )
}

/// `(3·2^{−7/3}·m^{2/3}, (3/2)·m^{2/3})`; the lower value omits its `o(1)`.
pub fn b2_bounds(m: usize) -> (f64, f64) {
    let t = (m as f64).powf(2.0 / 3.0);
    (3.0 * 2f64.powf(-7.0 / 3.0) * t, 1.5 * t)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnionFreeBounds {
    /// `√(2m) − 1/2`.
    pub kleitman_lower: f64,
    /// `4a + 4a^{1/4}√m`.
    pub union_free_upper: f64,
    /// `max{a, ⅓·a^{1/4}·√m}`, an external result quoted for reference.
    pub reference_lower: f64,
}

pub fn union_free_bounds(m: usize, a: usize) -> UnionFreeBounds {
    let (m, a) = (m as f64, a as f64);
    UnionFreeBounds {
        kleitman_lower: (2.0 * m).sqrt() - 0.5,
        union_free_upper: 4.0 * a + 4.0 * a.powf(0.25) * m.sqrt(),
        reference_lower: a.max(a.powf(0.25) * m.sqrt() / 3.0),
    }
}

/// `a − 2 + 2k(⌈√(a+1)⌉ − 1) + (2k − 1)(q − 1)`, a strict upper bound on the
/// largest a-union-free subfamily of the q-level stack of `F_ES(k)`.
pub fn leveled_bound(a: usize, k: usize, q: usize) -> usize {
    assert!(a >= 2 && k >= 1 && q >= 1);
    a - 2 + es_grid_bound(k, a) + (2 * k - 1) * (q - 1)
}

/// `√8·a^{1/4}·√m`, without the `O(a)` term.
pub fn geometric_refinement_bound(m: usize, a: usize) -> Result<f64, BoundsError> {
    if a < 4 {
        return Err(BoundsError::GeometricUndefined(a));
    }
    Ok(8f64.sqrt() * (a as f64).powf(0.25) * (m as f64).sqrt())
}

/// `2^n / n^{2^{−d}}`, order of magnitude only.
pub fn power_set_order(n: usize, d: usize) -> f64 {
    2f64.powi(n as i32) / (n as f64).powf(0.5f64.powi(d as i32))
}

/// `a + b − 1`, the exact value of `f(m, (a,b)-union-free)` for `a, b ≥ 2`.
pub fn ab_union_free_value(a: usize, b: usize) -> usize {
    a + b - 1
}

/// `f / (a^{1/4}·√m)`; the conjectured limit lies between 1/3 and 4.
pub fn limit_ratio(f: f64, a: usize, m: usize) -> f64 {
    f / ((a as f64).powf(0.25) * (m as f64).sqrt())
}

/// `m·p − p^{2^d}·C(m, ⌈log₂(d+2)⌉)` at the default probability: a lower
/// bound on `f(F, B_d-free)` for every family of size m.
pub fn worst_case_deletion_guarantee(m: usize, d: usize) -> f64 {
    let p = default_probability(m, d);
    deletion_guarantee(m, d, p, binomial_f64(m, determining_size(d)))
}

/// `(m, guarantee / m^{e_d})` for each m.
pub fn deletion_scaling(d: usize, ms: &[usize]) -> Vec<(usize, f64)> {
    let (e, _) = exponents(d);
    let e = *e.numer() as f64 / *e.denom() as f64;
    ms.iter()
        .map(|&m| (m, worst_case_deletion_guarantee(m, d) / (m as f64).powf(e)))
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsContext {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub a: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub b: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub name: String,
    pub formula: String,
    pub value: f64,
    /// Exact rational or integer value, when there is one.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact: Option<String>,
    /// `lower` or `upper` bound on the named quantity, or `value`.
    pub kind: String,
    pub asymptotic: bool,
    /// Quoted from other work, not derived here.
    pub external: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub caveat: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsProfile {
    pub context: BoundsContext,
    pub bounds: Vec<BoundEntry>,
}

impl BoundsProfile {
    pub fn get(&self, name: &str) -> Option<&BoundEntry> {
        self.bounds.iter().find(|b| b.name == name)
    }
}

const WORST_CASE: &str = "bounds the worst m-member family; a given family may exceed it";

struct Builder(Vec<BoundEntry>);

impl Builder {
    fn push(&mut self, name: &str, formula: &str, kind: &str, value: f64) -> &mut BoundEntry {
        self.0.push(BoundEntry {
            name: name.into(),
            formula: formula.into(),
            value,
            exact: None,
            kind: kind.into(),
            asymptotic: false,
            external: false,
            caveat: None,
        });
        self.0.last_mut().unwrap()
    }
}

/// Every bound that applies to the parameters present in `ctx`.
pub fn bounds_profile(ctx: &BoundsContext) -> Result<BoundsProfile, BoundsError> {
    let mut b = Builder(Vec::new());
    if let Some(d) = ctx.d {
        if d < 2 {
            return Err(BoundsError::InvalidParameter("d must be at least 2".into()));
        }
        let (e, e2) = exponents(d);
        let to_f = |r: Ratio<i64>| *r.numer() as f64 / *r.denom() as f64;
        b.push(
            "e_d",
            "(2^d - ceil(log2(d+2))) / (2^d - 1)",
            "value",
            to_f(e),
        )
        .exact = Some(e.to_string());
        b.push("e_d_prime", "(2^d - 2) / (2^d - 1)", "value", to_f(e2))
            .exact = Some(e2.to_string());
        if let Some(m) = ctx.m {
            b.push(
                "deletion_guarantee",
                "m*p - p^(2^d) * C(m, ceil(log2(d+2))), p = default_probability(m, d)",
                "lower",
                worst_case_deletion_guarantee(m, d),
            );
            if d == 2 {
                let (lo, hi) = b2_bounds(m);
                let e = b.push("b2_lower", "3 * 2^(-7/3) * m^(2/3)", "lower", lo);
                e.asymptotic = true;
                e.caveat = Some("holds up to a (1 + o(1)) factor".into());
                b.push("b2_upper", "(3/2) * m^(2/3)", "upper", hi).caveat = Some(WORST_CASE.into());
            } else {
                let mf = m as f64;
                let e = b.push("bd_lower_order", "m^(e_d)", "lower", mf.powf(to_f(e)));
                e.asymptotic = true;
                e.caveat = Some("constant c_d unknown; exponent only".into());
                let e = b.push("bd_upper_order", "m^(e_d')", "upper", mf.powf(to_f(e2)));
                e.asymptotic = true;
                e.caveat = Some("constant c_d' unknown; exponent only; worst family only".into());
            }
        }
        if let Some(n) = ctx.n {
            let e = b.push(
                "power_set_order",
                "2^n / n^(2^(-d))",
                "value",
                power_set_order(n, d),
            );
            e.asymptotic = true;
            e.external = true;
            e.caveat = Some("Theta(.) order of f(2^[n], B_d-free); constant unknown".into());
        }
        if let Some(k) = ctx.k {
            b.push(
                "turan_bound",
                "(2 - 1/2^(d-1)) * k^(2^d - 2)",
                "upper",
                turan_bound(k, d),
            );
            if d == 2 {
                let v = base_case_bound(k);
                b.push("turan_base_case", "C(k,2) + k^2", "upper", v as f64)
                    .exact = Some(v.to_string());
            }
        }
    }
    if let Some(a) = ctx.a {
        if a < 2 {
            return Err(BoundsError::InvalidParameter("a must be at least 2".into()));
        }
        if let Some(bb) = ctx.b {
            let v = ab_union_free_value(a, bb);
            b.push("ab_union_free_value", "a + b - 1", "value", v as f64)
                .exact = Some(v.to_string());
        }
        if let Some(m) = ctx.m {
            let u = union_free_bounds(m, a);
            b.push(
                "kleitman_lower",
                "sqrt(2m) - 1/2",
                "lower",
                u.kleitman_lower,
            );
            b.push(
                "union_free_upper",
                "4a + 4 a^(1/4) sqrt(m)",
                "upper",
                u.union_free_upper,
            )
            .caveat = Some(WORST_CASE.into());
            let e = b.push(
                "reference_lower",
                "max(a, (1/3) a^(1/4) sqrt(m))",
                "lower",
                u.reference_lower,
            );
            e.external = true;
            if a >= 4 {
                let e = b.push(
                    "geometric_upper",
                    "sqrt(8) a^(1/4) sqrt(m)",
                    "upper",
                    geometric_refinement_bound(m, a)?,
                );
                e.asymptotic = true;
                e.caveat = Some("plus O(a); needs q/b -> infinity".into());
            }
        }
        if let Some(k) = ctx.k {
            let v = es_grid_bound(k, a);
            b.push(
                "es_grid_bound",
                "2 (ceil(sqrt(a+1)) - 1) k",
                "upper",
                v as f64,
            )
            .exact = Some(v.to_string());
            if let Some(q) = ctx.q {
                let v = leveled_bound(a, k, q);
                let e = b.push(
                    "leveled_bound",
                    "a - 2 + 2k (ceil(sqrt(a+1)) - 1) + (2k - 1)(q - 1)",
                    "strict-upper",
                    v as f64,
                );
                e.exact = Some(v.to_string());
            }
        }
    }
    Ok(BoundsProfile {
        context: ctx.clone(),
        bounds: b.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol
    }

    #[test]
    fn exponent_values() {
        assert_eq!(exponents(2), (Ratio::new(2, 3), Ratio::new(2, 3)));
        assert_eq!(exponents(3), (Ratio::new(5, 7), Ratio::new(6, 7)));
        assert_eq!(exponents(4), (Ratio::new(13, 15), Ratio::new(14, 15)));
    }

    #[test]
    fn b2_values() {
        let (lo, hi) = b2_bounds(8);
        assert!(close(lo, 2.381, 1e-3) && close(hi, 6.0, 1e-12));
        let (lo, hi) = b2_bounds(1);
        assert!(close(lo, 0.595, 1e-3) && close(hi, 1.5, 1e-12));
        assert!(close(b2_bounds(1000).1, 150.0, 1e-9));
    }

    #[test]
    fn union_free_values() {
        let u = union_free_bounds(8, 2);
        assert!(close(u.kleitman_lower, 3.5, 1e-12));
        assert!(close(
            u.union_free_upper,
            8.0 + 4.0 * 2f64.powf(0.25) * 8f64.sqrt(),
            1e-12
        ));
        assert!(close(u.union_free_upper, 21.45, 1e-2));
        assert!(close(u.reference_lower, 2.0, 1e-12));
        assert!(close(
            union_free_bounds(100, 2).kleitman_lower,
            13.642,
            1e-3
        ));
        let u = union_free_bounds(1, 2);
        assert!(close(u.kleitman_lower, 0.914, 1e-3));
        assert_eq!(u.kleitman_lower.ceil(), 1.0);
    }

    #[test]
    fn leveled_values() {
        assert_eq!(leveled_bound(2, 2, 2), 7);
        assert_eq!(leveled_bound(2, 2, 1), 4);
        assert_eq!(leveled_bound(8, 3, 3), 28);
    }

    #[test]
    fn geometric_values() {
        assert!(close(
            geometric_refinement_bound(100, 8).unwrap(),
            47.57,
            1e-2
        ));
        assert_eq!(
            geometric_refinement_bound(1, 3),
            Err(BoundsError::GeometricUndefined(3))
        );
        assert!(close(geometric_refinement_bound(1, 4).unwrap(), 4.0, 1e-12));
    }

    #[test]
    fn reference_values() {
        assert_eq!(ab_union_free_value(3, 4), 6);
        assert!(close(power_set_order(4, 2), 16.0 / 4f64.powf(0.25), 1e-12));
        assert!(close(power_set_order(4, 2), 11.31, 1e-2));
        assert!(close(limit_ratio(10.0, 2, 64), 1.051, 1e-3));
    }

    #[test]
    fn profile_flags() {
        let p = bounds_profile(&BoundsContext {
            m: Some(64),
            d: Some(2),
            a: Some(4),
            k: Some(2),
            q: Some(2),
            ..Default::default()
        })
        .unwrap();
        assert!(p.get("b2_lower").unwrap().asymptotic);
        assert!(!p.get("b2_upper").unwrap().asymptotic);
        assert!(p.get("geometric_upper").unwrap().asymptotic);
        assert!(p.get("reference_lower").unwrap().external);
        assert_eq!(p.get("e_d").unwrap().exact.as_deref(), Some("2/3"));
        assert_eq!(p.get("leveled_bound").unwrap().exact.as_deref(), Some("13"));
        let p3 = bounds_profile(&BoundsContext {
            m: Some(64),
            d: Some(3),
            ..Default::default()
        })
        .unwrap();
        assert!(p3.get("bd_lower_order").unwrap().asymptotic);
        assert!(p3.get("b2_lower").is_none());
    }
}

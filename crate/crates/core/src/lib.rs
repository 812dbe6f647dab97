//! Extremal subfamilies of finite set families.
//!
//! Given a family of distinct subsets of `[n]`, this crate finds large
//! subfamilies that avoid Boolean subalgebras of a given dimension (B_d-free)
//! or avoid union relations among their members (a-union-free and
//! (a,b)-union-free). It provides the named extremal constructions, the
//! extraction algorithms with their certified guarantees, exact
//! branch-and-bound oracles for small instances, the multipartite Turán view
//! of the chain-product construction, and closed-form bounds to compare
//! against.

pub mod bench;
pub mod boolean_algebra;
pub mod bounds;
pub mod constructions;
pub mod extraction;
pub mod family;
pub mod format;
pub mod grid;
pub mod manifest;
pub mod oracle;
pub mod property;
pub mod rank;
pub mod search;
pub mod set;
pub mod turan;
pub mod union_free;

pub use family::{FamilyError, Limits, SetFamily};
pub use property::Property;
pub use set::FiniteSet;

//! Plain-text family format.
//!
//! ```text
//! n m
//! <strictly increasing 1-based elements, space separated, or "-">   (m lines)
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::family::{FamilyError, SetFamily};
use crate::set::FiniteSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: element {element} is outside [1, {universe}] (position {position} on the line)")]
    ElementOutOfRange {
        line: usize,
        position: usize,
        element: usize,
        universe: usize,
    },
    #[error("line {second} duplicates line {first}")]
    Duplicate { first: usize, second: usize },
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

pub fn parse_family(text: &str) -> Result<SetFamily, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (hl, header) = lines
        .next()
        .ok_or_else(|| syntax(1, "missing header \"n m\""))?;
    let nums: Vec<&str> = header.split_whitespace().collect();
    if nums.len() != 2 {
        return Err(syntax(hl, "header must be \"n m\""));
    }
    let n: usize = nums[0]
        .parse()
        .map_err(|_| syntax(hl, "bad universe size"))?;
    let m: usize = nums[1]
        .parse()
        .map_err(|_| syntax(hl, "bad member count"))?;

    let mut sets = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, line) = lines.next().ok_or_else(|| {
            syntax(
                hl,
                format!("header declares {m} members, file has {}", sets.len()),
            )
        })?;
        let line = line.trim_end_matches('\r');
        let mut s = FiniteSet::new();
        if line != "-" {
            let mut prev = 0usize;
            for (pos, tok) in line.split(' ').enumerate() {
                let e: usize = tok.parse().map_err(|_| {
                    syntax(ln, format!("bad element {tok:?} at position {}", pos + 1))
                })?;
                if e == 0 || e > n {
                    return Err(ParseError::ElementOutOfRange {
                        line: ln,
                        position: pos + 1,
                        element: e,
                        universe: n,
                    });
                }
                if e <= prev {
                    return Err(syntax(ln, "elements must be strictly increasing"));
                }
                prev = e;
                s.insert(e - 1);
            }
        }
        sets.push(s);
    }
    if let Some((ln, extra)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(syntax(ln, format!("unexpected trailing content {extra:?}")));
    }
    SetFamily::from_sets(n, sets).map_err(|e| match e {
        FamilyError::DuplicateSet { first, second } => ParseError::Duplicate {
            first: first + 2,
            second: second + 2,
        },
        other => syntax(hl, other.to_string()),
    })
}

pub fn write_family(family: &SetFamily) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", family.universe_size(), family.len()).unwrap();
    for s in family.members() {
        if s.is_empty() {
            out.push('-');
        } else {
            let mut first = true;
            for e in s.elements() {
                if !first {
                    out.push(' ');
                }
                first = false;
                write!(out, "{e}").unwrap();
            }
        }
        out.push('\n');
    }
    out
}

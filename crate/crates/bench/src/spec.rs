//! Solver specifications such as `dense:c=1,lambda=0.5,everywhere=true`.
//!
//! A list of specs is separated by `;` or by commas. Because commas also
//! separate the keys inside a dense spec, a comma-separated token that
//! looks like `key=value` is attached to the spec before it.

use std::fmt;
use std::str::FromStr;

use lmtr_core::{DenseParams, InitKind, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolverSpec {
    Conventional,
    Dense {
        c: f64,
        lambda: f64,
        everywhere: bool,
    },
}

impl SolverSpec {
    pub const DEFAULT_DENSE: SolverSpec = SolverSpec::Dense {
        c: 1.0,
        lambda: 0.5,
        everywhere: true,
    };

    /// Label used as `solver_id` in records and profiles.
    pub fn id(&self) -> String {
        self.to_string()
    }

    /// `base` with the initialization replaced by this spec.
    pub fn apply(&self, base: &SolverConfig) -> SolverConfig {
        let init = match *self {
            SolverSpec::Conventional => InitKind::Conventional,
            SolverSpec::Dense {
                c,
                lambda,
                everywhere,
            } => InitKind::Dense(DenseParams {
                c,
                lambda,
                everywhere,
            }),
        };
        SolverConfig {
            init,
            ..base.clone()
        }
    }
}

impl fmt::Display for SolverSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverSpec::Conventional => f.write_str("conventional"),
            SolverSpec::Dense {
                c,
                lambda,
                everywhere,
            } => write!(f, "dense(c={c},lambda={lambda},everywhere={everywhere})"),
        }
    }
}

impl FromStr for SolverSpec {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || BenchError::Spec(s.to_string());
        if s == "conventional" {
            return Ok(SolverSpec::Conventional);
        }
        let rest = s.strip_prefix("dense").ok_or_else(bad)?;
        let (mut c, mut lambda, mut everywhere) = (1.0, 0.5, true);
        let params = match rest.strip_prefix(':') {
            Some(p) => p,
            None if rest.is_empty() => "",
            None => return Err(bad()),
        };
        for kv in params.split(',').map(str::trim).filter(|kv| !kv.is_empty()) {
            let (key, value) = kv.split_once('=').ok_or_else(bad)?;
            let value = value.trim();
            match key.trim() {
                "c" => c = value.parse().map_err(|_| bad())?,
                "lambda" => lambda = value.parse().map_err(|_| bad())?,
                "everywhere" => everywhere = value.parse().map_err(|_| bad())?,
                _ => return Err(bad()),
            }
        }
        Ok(SolverSpec::Dense {
            c,
            lambda,
            everywhere,
        })
    }
}

/// Parses a list such as `dense:c=1,lambda=0.5,conventional`.
pub fn parse_list(s: &str) -> Result<Vec<SolverSpec>> {
    let mut groups: Vec<String> = Vec::new();
    for chunk in s.split(';') {
        for token in chunk.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match groups.last_mut() {
                Some(last) if token.contains('=') && !token.starts_with("dense") => {
                    last.push(',');
                    last.push_str(token);
                }
                _ => groups.push(token.to_string()),
            }
        }
        // `;` always closes the current spec.
        groups.push(String::new());
    }
    let specs = groups
        .iter()
        .filter(|g| !g.is_empty())
        .map(|g| g.parse())
        .collect::<Result<Vec<_>>>()?;
    if specs.is_empty() {
        return Err(BenchError::Spec(s.to_string()));
    }
    Ok(specs)
}

//! Performance profiles.
//!
//! For each problem `p` and solver `s` the ratio `π = t/min t` compares the
//! metric of `s` with the best solver on `p`; failures and missing cells get
//! `π = ∞`. The profile `ρ_s(τ)` is the fraction of all problems with
//! `π ≤ τ`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{BenchError, Result, RunRecord};

pub const GRID_POINTS: usize = 200;
pub const TAU_MAX: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Iter,
    Time,
}

impl Metric {
    fn value(self, r: &RunRecord) -> f64 {
        if !r.converged() {
            return f64::INFINITY;
        }
        let v = match self {
            Metric::Iter => r.iterations as f64,
            Metric::Time => r.time_seconds,
        };
        // A zero best value would make every ratio infinite.
        v.max(f64::MIN_POSITIVE)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Iter => "iter",
            Metric::Time => "time",
        })
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "iter" => Ok(Metric::Iter),
            "time" => Ok(Metric::Time),
            _ => Err(format!("unknown metric `{s}` (expected iter or time)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub solver_id: String,
    /// `(τ, ρ(τ))` on the grid.
    pub points: Vec<(f64, f64)>,
}

/// Ratio matrix of a set of records.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTable {
    /// Problem keys in first-seen order.
    pub problems: Vec<String>,
    /// Solver ids in first-seen order.
    pub solvers: Vec<String>,
    /// `ratios[p][s] = π_{p,s}`.
    pub ratios: Vec<Vec<f64>>,
}

impl ProfileTable {
    pub fn from_records(records: &[RunRecord], metric: Metric) -> Result<Self> {
        let mut problems: Vec<String> = Vec::new();
        let mut solvers: Vec<String> = Vec::new();
        for r in records {
            let key = r.problem_key();
            if !problems.contains(&key) {
                problems.push(key);
            }
            if !solvers.contains(&r.solver_id) {
                solvers.push(r.solver_id.clone());
            }
        }
        let mut values = vec![vec![None; solvers.len()]; problems.len()];
        for r in records {
            let p = problems.iter().position(|k| *k == r.problem_key()).unwrap();
            let s = solvers.iter().position(|k| *k == r.solver_id).unwrap();
            if values[p][s].replace(metric.value(r)).is_some() {
                return Err(BenchError::Duplicate {
                    problem: r.problem_key(),
                    solver: r.solver_id.clone(),
                });
            }
        }
        let ratios = values
            .into_iter()
            .map(|row| {
                let row: Vec<f64> = row
                    .into_iter()
                    .map(|v| v.unwrap_or(f64::INFINITY))
                    .collect();
                let best = row.iter().copied().fold(f64::INFINITY, f64::min);
                row.iter()
                    .map(|&v| {
                        if v.is_finite() {
                            v / best
                        } else {
                            f64::INFINITY
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            problems,
            solvers,
            ratios,
        })
    }

    /// `ρ_s(τ)`, with the total problem count as denominator.
    pub fn rho(&self, solver: usize, tau: f64) -> f64 {
        if self.problems.is_empty() {
            return 0.0;
        }
        let hits = self.ratios.iter().filter(|row| row[solver] <= tau).count();
        hits as f64 / self.problems.len() as f64
    }

    pub fn solver_index(&self, id: &str) -> Option<usize> {
        self.solvers.iter().position(|s| s == id)
    }

    pub fn curves(&self, grid: &[f64]) -> Vec<ProfileCurve> {
        self.solvers
            .iter()
            .enumerate()
            .map(|(s, id)| ProfileCurve {
                solver_id: id.clone(),
                points: grid.iter().map(|&t| (t, self.rho(s, t))).collect(),
            })
            .collect()
    }
}

/// `points` log-spaced values from 1 to `tau_max`, both included.
pub fn tau_grid(points: usize, tau_max: f64) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![1.0],
        _ => {
            let last = points - 1;
            (0..points)
                .map(|i| {
                    if i == last {
                        tau_max
                    } else {
                        tau_max.powf(i as f64 / last as f64)
                    }
                })
                .collect()
        }
    }
}

/// Profiles on the default grid of 200 points over `[1, 64]`.
pub fn performance_profile(records: &[RunRecord], metric: Metric) -> Result<Vec<ProfileCurve>> {
    let table = ProfileTable::from_records(records, metric)?;
    Ok(table.curves(&tau_grid(GRID_POINTS, TAU_MAX)))
}

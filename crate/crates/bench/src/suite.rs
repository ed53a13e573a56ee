use std::time::Instant;

use lmtr_core::par::{self, Execution};
use lmtr_core::{minimize, Objective, Problem, SolverConfig, Status};
use serde::{Deserialize, Serialize};

use crate::{BenchError, Result, RunRecord, SolverSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub problems: Vec<Problem>,
    pub solvers: Vec<SolverSpec>,
    pub reps: usize,
    /// Leading repetitions left out of the timing average.
    pub discard: usize,
    /// Settings shared by every solver; each spec replaces the initialization.
    pub base: SolverConfig,
    /// Run cells concurrently. Timings are then subject to contention.
    #[serde(skip, default = "sequential")]
    pub exec: Execution,
}

fn sequential() -> Execution {
    Execution::Sequential
}

impl SuiteConfig {
    pub fn new(problems: Vec<Problem>, solvers: Vec<SolverSpec>) -> Self {
        Self {
            problems,
            solvers,
            reps: 10,
            discard: 2,
            base: SolverConfig::default(),
            exec: Execution::Sequential,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.problems.is_empty() || self.solvers.is_empty() {
            return Err(BenchError::Suite(
                "need at least one problem and one solver".into(),
            ));
        }
        if self.reps == 0 {
            return Err(BenchError::Suite("reps must be positive".into()));
        }
        for spec in &self.solvers {
            spec.apply(&self.base).validate()?;
        }
        Ok(())
    }
}

/// Mean of `times` after dropping the first `discard` entries, or of all
/// entries when nothing would be left.
pub fn timed_mean(times: &[f64], discard: usize) -> f64 {
    let kept = if times.len() > discard {
        &times[discard..]
    } else {
        times
    };
    kept.iter().sum::<f64>() / kept.len() as f64
}

/// Runs every (problem, solver) cell `reps` times. Records come back in
/// problem-major order regardless of execution mode.
pub fn run_suite(suite: &SuiteConfig) -> Result<Vec<RunRecord>> {
    suite.validate()?;
    let cells: Vec<(&Problem, &SolverSpec)> = suite
        .problems
        .iter()
        .flat_map(|p| suite.solvers.iter().map(move |s| (p, s)))
        .collect();
    par::map(&cells, suite.exec, |&(problem, spec)| {
        run_cell(suite, problem, spec)
    })
    .into_iter()
    .collect()
}

fn run_cell(suite: &SuiteConfig, problem: &Problem, spec: &SolverSpec) -> Result<RunRecord> {
    let cfg = spec.apply(&suite.base);
    let x0 = problem.start();
    let id = spec.id();
    let mut times = Vec::with_capacity(suite.reps);
    let mut first = None;
    for _ in 0..suite.reps {
        let t0 = Instant::now();
        let res = minimize(problem, &x0, &cfg);
        times.push(t0.elapsed().as_secs_f64());
        let res = match res {
            Ok(res) => res,
            Err(_) => {
                return Ok(failed_record(
                    problem,
                    &id,
                    timed_mean(&times, suite.discard),
                ))
            }
        };
        match &first {
            None => first = Some(res),
            Some(prev) if prev.iterations != res.iterations || prev.status != res.status => {
                return Err(BenchError::NonDeterministic {
                    problem: problem.name().to_string(),
                    solver: id,
                })
            }
            Some(_) => {}
        }
    }
    let res = first.expect("at least one repetition");
    Ok(RunRecord::from_result(
        problem.name(),
        problem.n,
        &id,
        &res,
        timed_mean(&times, suite.discard),
    ))
}

fn failed_record(problem: &Problem, id: &str, time_seconds: f64) -> RunRecord {
    RunRecord {
        problem: problem.name().to_string(),
        n: problem.n,
        solver_id: id.to_string(),
        iterations: 0,
        total_steps: 0,
        time_seconds,
        status: Status::NumericalFailure,
        f_final: f64::NAN,
        g_norm_final: f64::NAN,
        f_evals: 0,
        g_evals: 0,
        max_gamma: f64::NAN,
        max_gamma_perp: f64::NAN,
        pair_violations: 0,
    }
}

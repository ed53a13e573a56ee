use lmtr_core::{SolverResult, Status};
use serde::{Deserialize, Serialize};

/// One (problem, solver) cell of a suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub problem: String,
    pub n: usize,
    pub solver_id: String,
    /// Accepted steps.
    pub iterations: usize,
    pub total_steps: usize,
    /// Mean wall-clock seconds over the timed repetitions.
    #[serde(with = "finite_or_null")]
    pub time_seconds: f64,
    pub status: Status,
    #[serde(with = "finite_or_null")]
    pub f_final: f64,
    #[serde(with = "finite_or_null")]
    pub g_norm_final: f64,
    pub f_evals: usize,
    pub g_evals: usize,
    #[serde(with = "finite_or_null")]
    pub max_gamma: f64,
    #[serde(with = "finite_or_null")]
    pub max_gamma_perp: f64,
    pub pair_violations: usize,
}

impl RunRecord {
    pub fn from_result(
        problem: &str,
        n: usize,
        solver_id: &str,
        res: &SolverResult,
        time_seconds: f64,
    ) -> Self {
        Self {
            problem: problem.to_string(),
            n,
            solver_id: solver_id.to_string(),
            iterations: res.iterations,
            total_steps: res.total_steps,
            time_seconds,
            status: res.status,
            f_final: res.f_final,
            g_norm_final: res.g_norm_final,
            f_evals: res.f_evals,
            g_evals: res.g_evals,
            max_gamma: res.stats.max_gamma,
            max_gamma_perp: res.stats.max_gamma_perp,
            pair_violations: res.stats.pair_violations,
        }
    }

    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }

    /// Key identifying the problem instance in a profile.
    pub fn problem_key(&self) -> String {
        format!("{}/{}", self.problem, self.n)
    }
}

/// Non-finite floats are written as null (empty in CSV) and read back as NaN.
mod finite_or_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

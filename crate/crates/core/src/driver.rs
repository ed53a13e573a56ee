//! Outer trust-region iteration.
//!
//! Each iteration first measures the full quasi-Newton step `p_u = −B̂⁻¹g`
//! through the `2m`-dimensional norm identity. If it fits inside the
//! Euclidean ball of radius `Δ` it also fits the shape-changing ball and is
//! the exact subproblem solution; otherwise the partial eigendecomposition
//! is used to solve the decoupled subproblem in closed form. The radius is
//! updated from the ratio of actual to predicted reduction and the
//! shape-changing norm of the trial step.

use serde::{Deserialize, Serialize};

use crate::denseinit::{InitPolicy, InverseRep};
use crate::pairstore::PairBuffer;
use crate::problems::Objective;
use crate::spectral::{perp_norm_sq, sc_norm_parts, SpectralFactorization};
use crate::subproblem::{assemble_step, DecoupledProblem};
use crate::{Error, Result, Vector};

/// Armijo constant of the initial backtracking search.
pub const ARMIJO: f64 = 1e-4;
/// Maximum number of halvings in the initial backtracking search.
pub const MAX_HALVINGS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopRule {
    /// `‖g‖₂ ≤ ε·max(1, ‖x‖₂)`.
    RelativeTwoNorm,
    /// `‖g‖_∞ ≤ ε`.
    AbsoluteInfNorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenseParams {
    pub c: f64,
    pub lambda: f64,
    /// Use `B̂` for the full quasi-Newton step as well, not only for the
    /// constrained subproblem.
    pub everywhere: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    /// `B₀ = γI` throughout.
    Conventional,
    Dense(DenseParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Number of stored pairs.
    pub m: usize,
    pub epsilon: f64,
    pub c3: f64,
    /// Rank threshold on the LDLᵀ diagonal of the normalized Gram matrix.
    pub eps_r: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub tau3: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub eta3: f64,
    pub eta4: f64,
    pub delta0: f64,
    pub init: InitKind,
    pub gamma0_perp: f64,
    /// Cap on the number of trial steps, accepted or not.
    pub max_iter: usize,
    pub stop_rule: StopRule,
    pub keep_trace: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            m: 5,
            epsilon: 1e-10,
            c3: 1e-8,
            eps_r: 1e-14,
            tau1: 0.0,
            tau2: 0.25,
            tau3: 0.75,
            eta1: 0.25,
            eta2: 0.5,
            eta3: 0.8,
            eta4: 2.0,
            delta0: 1.0,
            init: InitKind::Dense(DenseParams {
                c: 1.0,
                lambda: 0.5,
                everywhere: true,
            }),
            gamma0_perp: 1.0,
            max_iter: 10_000,
            stop_rule: StopRule::RelativeTwoNorm,
            keep_trace: false,
        }
    }
}

impl SolverConfig {
    pub fn conventional() -> Self {
        Self {
            init: InitKind::Conventional,
            ..Self::default()
        }
    }

    pub fn dense(c: f64, lambda: f64, everywhere: bool) -> Self {
        Self {
            init: InitKind::Dense(DenseParams {
                c,
                lambda,
                everywhere,
            }),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if self.m == 0 {
            return bad("m must be positive");
        }
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be positive");
        }
        if !(self.c3 > 0.0 && self.c3 < 1.0) {
            return bad("c3 must lie in (0, 1)");
        }
        if !(self.eps_r > 0.0) {
            return bad("eps_r must be positive");
        }
        if !(0.0 <= self.tau1 && self.tau1 < self.tau2 && self.tau2 < 0.5)
            || !(0.5 < self.tau3 && self.tau3 < 1.0)
        {
            return bad("need 0 <= tau1 < tau2 < 0.5 < tau3 < 1");
        }
        if !(0.0 < self.eta1 && self.eta1 < self.eta2 && self.eta2 <= 0.5)
            || !(0.5 < self.eta3 && self.eta3 < 1.0 && 1.0 < self.eta4)
        {
            return bad("need 0 < eta1 < eta2 <= 0.5 < eta3 < 1 < eta4");
        }
        if !(self.delta0 > 0.0) {
            return bad("delta0 must be positive");
        }
        if let InitKind::Dense(p) = self.init {
            InitPolicy::dense(p.c, p.lambda, self.gamma0_perp)?;
        }
        InitPolicy::conventional(self.gamma0_perp)?;
        Ok(())
    }

    fn policy(&self) -> Result<InitPolicy> {
        match self.init {
            InitKind::Conventional => InitPolicy::conventional(self.gamma0_perp),
            InitKind::Dense(p) => InitPolicy::dense(p.c, p.lambda, self.gamma0_perp),
        }
    }

    fn dense_unconstrained(&self) -> bool {
        matches!(self.init, InitKind::Dense(p) if p.everywhere)
    }

    fn converged(&self, g: &Vector, x: &Vector) -> bool {
        match self.stop_rule {
            StopRule::RelativeTwoNorm => g.norm() <= self.epsilon * x.norm().max(1.0),
            StopRule::AbsoluteInfNorm => g.amax() <= self.epsilon,
        }
    }

    /// New radius from the ratio `rho`, the shape-changing norm of the
    /// trial step and the current radius.
    pub fn update_radius(&self, rho: f64, step_norm: f64, delta: f64) -> f64 {
        if rho < self.tau2 {
            (self.eta1 * delta).min(self.eta2 * step_norm)
        } else if rho >= self.tau3 && step_norm >= self.eta3 * delta {
            self.eta4 * delta
        } else {
            delta
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxIter,
    NumericalFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// Backtracking along the normalized steepest-descent direction.
    LineSearch,
    /// Full quasi-Newton step inside the trust region.
    Unconstrained,
    /// Closed-form solution of the shape-changing subproblem.
    Constrained,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub k: usize,
    pub delta: f64,
    pub rho: f64,
    pub step: StepKind,
    pub accepted: bool,
    pub gamma: Option<f64>,
    pub gamma_perp: f64,
    pub rank: usize,
    pub f: f64,
    pub g_norm: f64,
}

/// Observables of the boundedness hypotheses of the convergence theory.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunStats {
    pub accepted_pairs: usize,
    pub rejected_pairs: usize,
    pub unconstrained_steps: usize,
    pub constrained_steps: usize,
    /// Largest `γ` recorded (0 if no pair was admitted).
    pub max_gamma: f64,
    pub min_gamma: f64,
    pub max_gamma_perp: f64,
    pub min_gamma_perp: f64,
    /// Stored pairs failing `sᵀy > c₃‖s‖‖y‖` at the end of the run.
    pub pair_violations: usize,
}

impl RunStats {
    fn record_scales(&mut self, gamma: f64, gamma_perp: f64) {
        if self.accepted_pairs == 1 {
            self.max_gamma = gamma;
            self.min_gamma = gamma;
            self.max_gamma_perp = gamma_perp;
            self.min_gamma_perp = gamma_perp;
        } else {
            self.max_gamma = self.max_gamma.max(gamma);
            self.min_gamma = self.min_gamma.min(gamma);
            self.max_gamma_perp = self.max_gamma_perp.max(gamma_perp);
            self.min_gamma_perp = self.min_gamma_perp.min(gamma_perp);
        }
    }

    /// `max(γ, γ⊥)` over the run, the empirical bound `c₂`.
    pub fn c2(&self) -> f64 {
        self.max_gamma.max(self.max_gamma_perp)
    }

    /// All recorded scales are finite and positive.
    pub fn scales_bounded(&self) -> bool {
        self.accepted_pairs == 0
            || [
                self.min_gamma,
                self.max_gamma,
                self.min_gamma_perp,
                self.max_gamma_perp,
            ]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverResult {
    pub x_final: Vector,
    pub f_final: f64,
    pub g_norm_final: f64,
    /// Accepted steps, including the initial line-search step.
    pub iterations: usize,
    pub total_steps: usize,
    pub f_evals: usize,
    pub g_evals: usize,
    pub status: Status,
    pub stats: RunStats,
    pub trace: Option<Vec<TraceRecord>>,
}

/// Snapshot handed to observers after every step.
#[derive(Debug, Clone, Copy)]
pub struct IterateView<'a> {
    /// Number of trial steps taken so far.
    pub k: usize,
    pub x: &'a Vector,
    pub f: f64,
    pub g: &'a Vector,
    pub delta: f64,
    pub accepted: bool,
}

/// Result of the backtracking search that produces the first iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialStep {
    pub x: Vector,
    pub f: f64,
    /// Step length along `−g/‖g‖`.
    pub t: f64,
    pub f_evals: usize,
}

/// Backtracks `t ← t/2` from `t = 1` along `−g/‖g‖` until the Armijo
/// condition holds.
pub fn initial_point_step<O: Objective + ?Sized>(
    problem: &O,
    x0: &Vector,
    f0: f64,
    g0: &Vector,
) -> Result<InitialStep> {
    let gn = g0.norm();
    if !(gn > 0.0) || !gn.is_finite() {
        return Err(Error::InvalidParameter(
            "line search needs a finite nonzero gradient".into(),
        ));
    }
    let dir = -g0 / gn;
    let mut t = 1.0;
    for evals in 1..=MAX_HALVINGS + 1 {
        let x = x0 + &dir * t;
        let f = problem.value(&x);
        if f.is_finite() && f <= f0 - ARMIJO * t * gn {
            return Ok(InitialStep {
                x,
                f,
                t,
                f_evals: evals,
            });
        }
        t *= 0.5;
    }
    Err(Error::Singular("no decrease along steepest descent"))
}

pub fn minimize<O: Objective + ?Sized>(
    problem: &O,
    x0: &Vector,
    config: &SolverConfig,
) -> Result<SolverResult> {
    minimize_with_observer(problem, x0, config, |_| {})
}

/// [`minimize`] that reports every iterate, starting with `x0`.
pub fn minimize_with_observer<O, F>(
    problem: &O,
    x0: &Vector,
    config: &SolverConfig,
    observer: F,
) -> Result<SolverResult>
where
    O: Objective + ?Sized,
    F: FnMut(&IterateView<'_>),
{
    config.validate()?;
    if x0.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.dim(),
            found: x0.len(),
        });
    }
    let mut solver = Solver::new(problem, x0.clone(), config, observer)?;
    solver.run();
    Ok(solver.finish())
}

struct Solver<'a, O: ?Sized, F> {
    problem: &'a O,
    config: &'a SolverConfig,
    observer: F,
    x: Vector,
    f: f64,
    g: Vector,
    delta: f64,
    buffer: PairBuffer,
    policy: InitPolicy,
    spectral: Option<SpectralFactorization>,
    iterations: usize,
    total_steps: usize,
    f_evals: usize,
    g_evals: usize,
    status: Option<Status>,
    stats: RunStats,
    trace: Option<Vec<TraceRecord>>,
}

impl<'a, O, F> Solver<'a, O, F>
where
    O: Objective + ?Sized,
    F: FnMut(&IterateView<'_>),
{
    fn new(problem: &'a O, x: Vector, config: &'a SolverConfig, observer: F) -> Result<Self> {
        let f = problem.value(&x);
        let g = problem.gradient(&x);
        let mut solver = Self {
            problem,
            config,
            observer,
            buffer: PairBuffer::new(config.m, x.len()),
            policy: config.policy()?,
            spectral: None,
            x,
            f,
            g,
            delta: config.delta0,
            iterations: 0,
            total_steps: 0,
            f_evals: 1,
            g_evals: 1,
            status: None,
            stats: RunStats::default(),
            trace: config.keep_trace.then(Vec::new),
        };
        if !(f.is_finite() && solver.g.iter().all(|v| v.is_finite())) {
            solver.status = Some(Status::NumericalFailure);
        }
        solver.notify(true);
        Ok(solver)
    }

    fn notify(&mut self, accepted: bool) {
        let view = IterateView {
            k: self.total_steps,
            x: &self.x,
            f: self.f,
            g: &self.g,
            delta: self.delta,
            accepted,
        };
        (self.observer)(&view);
    }

    fn run(&mut self) {
        if self.status.is_some() {
            return;
        }
        if self.config.converged(&self.g, &self.x) {
            self.status = Some(Status::Converged);
            return;
        }
        if let Err(status) = self.line_search_step() {
            self.status = Some(status);
            return;
        }
        loop {
            if self.config.converged(&self.g, &self.x) {
                self.status = Some(Status::Converged);
                return;
            }
            if self.total_steps >= self.config.max_iter {
                self.status = Some(Status::MaxIter);
                return;
            }
            if let Err(status) = self.trust_region_step() {
                self.status = Some(status);
                return;
            }
        }
    }

    fn line_search_step(&mut self) -> std::result::Result<(), Status> {
        let step = initial_point_step(self.problem, &self.x, self.f, &self.g)
            .map_err(|_| Status::NumericalFailure)?;
        self.f_evals += step.f_evals;
        let g_new = self.problem.gradient(&step.x);
        self.g_evals += 1;
        if !g_new.iter().all(|v| v.is_finite()) {
            return Err(Status::NumericalFailure);
        }
        let s = &step.x - &self.x;
        let y = &g_new - &self.g;
        self.x = step.x;
        self.f = step.f;
        self.g = g_new;
        self.admit_pair(s, y)?;
        self.iterations += 1;
        self.total_steps += 1;
        self.push_trace(StepKind::LineSearch, f64::NAN, true);
        self.notify(true);
        Ok(())
    }

    fn admit_pair(&mut self, s: Vector, y: Vector) -> std::result::Result<(), Status> {
        let accepted = self
            .buffer
            .try_push(s, y, self.config.c3)
            .map_err(|_| Status::NumericalFailure)?;
        if !accepted {
            self.stats.rejected_pairs += 1;
            return Ok(());
        }
        let newest = self.buffer.newest().expect("pair just stored");
        self.policy
            .update_gamma(newest)
            .map_err(|_| Status::NumericalFailure)?;
        self.stats.accepted_pairs += 1;
        let gamma = self.policy.gamma().expect("gamma just updated");
        self.stats.record_scales(gamma, self.policy.gamma_perp());
        self.spectral = None;
        Ok(())
    }

    fn gamma(&self) -> f64 {
        self.policy.gamma().unwrap_or(self.config.gamma0_perp)
    }

    fn spectral(&mut self) -> &SpectralFactorization {
        if self.spectral.is_none() {
            let fac =
                match SpectralFactorization::new(&self.buffer, self.gamma(), self.config.eps_r) {
                    Ok(fac) => fac,
                    // No usable parallel directions: B̂ acts as γ⊥I.
                    Err(_) => SpectralFactorization::empty(self.buffer.dim(), self.gamma()),
                };
            self.spectral = Some(fac);
        }
        self.spectral.as_ref().expect("factorization cached")
    }

    fn unconstrained_inverse(&self) -> Result<InverseRep> {
        if self.buffer.is_empty() {
            return Ok(InverseRep::isotropic(self.policy.gamma_perp()));
        }
        let gamma = self.gamma();
        if self.config.dense_unconstrained() {
            InverseRep::new(
                &self.buffer,
                gamma,
                self.policy.gamma_perp(),
                self.config.eps_r,
            )
        } else {
            InverseRep::conventional(&self.buffer, gamma)
        }
    }

    /// Trial step, its model value `Q(p)` and which branch produced it.
    fn select_step(&mut self) -> Result<(Vector, f64, StepKind)> {
        let inv = self.unconstrained_inverse()?;
        let u = inv.v_dot(&self.buffer, &self.g)?;
        let pu_norm = inv.unconstrained_norm_with(self.g.norm_squared(), &u);
        if pu_norm <= self.delta {
            let p = -inv.solve_with(&self.buffer, &self.g, &u);
            let q = 0.5 * self.g.dot(&p);
            return Ok((p, q, StepKind::Unconstrained));
        }

        let gamma = self.gamma();
        let gamma_perp = self.policy.gamma_perp();
        let delta = self.delta;
        let g = self.g.clone();
        let fac = self.spectral().clone();
        let g_par = fac.apply_par_t(&self.buffer, &g)?;
        let g_perp_norm = perp_norm_sq(&g, &g_par).sqrt();
        let sub = DecoupledProblem::new(
            g_par.clone(),
            g_perp_norm,
            fac.lambdas(),
            gamma,
            gamma_perp,
            delta,
        );
        let sol = sub.solve();
        let p = assemble_step(sol.beta, &g, &g_par, &sol.v_par, &fac, &self.buffer)?;
        Ok((p, sol.model_reduction, StepKind::Constrained))
    }

    fn trust_region_step(&mut self) -> std::result::Result<(), Status> {
        let (p, q, kind) = self.select_step().map_err(|_| Status::NumericalFailure)?;
        if !(q < 0.0) || !q.is_finite() {
            return Err(Status::NumericalFailure);
        }
        match kind {
            StepKind::Unconstrained => self.stats.unconstrained_steps += 1,
            _ => self.stats.constrained_steps += 1,
        }
        let step_norm = {
            let buffer = self.buffer.clone();
            let fac = self.spectral();
            let p_par = fac
                .apply_par_t(&buffer, &p)
                .map_err(|_| Status::NumericalFailure)?;
            sc_norm_parts(&p, &p_par)
        };

        if p.amax() <= f64::EPSILON * self.x.amax() {
            // The step can no longer change the iterate.
            return Err(Status::NumericalFailure);
        }
        let x_trial = &self.x + &p;
        let f_trial = self.problem.value(&x_trial);
        self.f_evals += 1;
        if !f_trial.is_finite() {
            return Err(Status::NumericalFailure);
        }
        let rho = (f_trial - self.f) / q;
        let accepted = rho >= self.config.tau1;
        if accepted {
            let g_trial = self.problem.gradient(&x_trial);
            self.g_evals += 1;
            if !g_trial.iter().all(|v| v.is_finite()) {
                return Err(Status::NumericalFailure);
            }
            let y = &g_trial - &self.g;
            self.x = x_trial;
            self.f = f_trial;
            self.g = g_trial;
            self.admit_pair(p, y)?;
            self.iterations += 1;
        }
        self.total_steps += 1;
        let rank = self.spectral.as_ref().map_or(0, |f| f.rank());
        self.push_trace_with(kind, rho, accepted, rank);
        self.delta = self.config.update_radius(rho, step_norm, self.delta);
        self.notify(accepted);
        if !(self.delta > 0.0) {
            return Err(Status::NumericalFailure);
        }
        Ok(())
    }

    fn push_trace(&mut self, step: StepKind, rho: f64, accepted: bool) {
        let rank = self.spectral.as_ref().map_or(0, |f| f.rank());
        self.push_trace_with(step, rho, accepted, rank);
    }

    fn push_trace_with(&mut self, step: StepKind, rho: f64, accepted: bool, rank: usize) {
        if let Some(trace) = self.trace.as_mut() {
            trace.push(TraceRecord {
                k: self.total_steps,
                delta: self.delta,
                rho,
                step,
                accepted,
                gamma: self.policy.gamma(),
                gamma_perp: self.policy.gamma_perp(),
                rank,
                f: self.f,
                g_norm: self.g.norm(),
            });
        }
    }

    fn finish(mut self) -> SolverResult {
        self.stats.pair_violations = self
            .buffer
            .pairs()
            .filter(|p| !p.satisfies_curvature(self.config.c3))
            .count();
        SolverResult {
            g_norm_final: self.g.norm(),
            x_final: self.x,
            f_final: self.f,
            iterations: self.iterations,
            total_steps: self.total_steps,
            f_evals: self.f_evals,
            g_evals: self.g_evals,
            status: self.status.unwrap_or(Status::MaxIter),
            stats: self.stats,
            trace: self.trace,
        }
    }
}

//! Closed-form solution of the trust-region subproblem in the shape-changing
//! infinity norm.
//!
//! In the coordinates `v = Pᵀp` the model separates into `r` scalar problems
//! `min gᵢv + ½λᵢv²` on `[−Δ, Δ]` and one isotropic problem
//! `min g⊥ᵀv⊥ + ½γ⊥‖v⊥‖²` on the Euclidean ball of radius `Δ`. Both have
//! explicit minimizers; the step is reassembled as
//! `p* = βg + P∥(v∥ − βg∥)` so `P⊥` is never needed.

use crate::pairstore::PairBuffer;
use crate::spectral::SpectralFactorization;
use crate::{Result, Vector};

/// Relative size below which an eigenvalue is treated as exactly zero.
pub const ZERO_EIGENVALUE_RTOL: f64 = 1e-12;

/// The subproblem in decoupled coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoupledProblem {
    pub g_par: Vector,
    /// `‖P⊥ᵀg‖₂`.
    pub g_perp_norm: f64,
    /// `λᵢ = λ̂ᵢ + γ`.
    pub lambdas: Vector,
    pub gamma_perp: f64,
    pub radius: f64,
    /// `|λᵢ|` at or below this counts as zero.
    pub zero_tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemSolution {
    pub v_par: Vector,
    pub beta: f64,
    /// `Q(p*) = q∥(v∥) + q⊥(βg⊥)`.
    pub model_reduction: f64,
}

impl DecoupledProblem {
    /// `gamma` only sets the zero-eigenvalue tolerance
    /// `1e-12 · max(1, |γ|)`.
    pub fn new(
        g_par: Vector,
        g_perp_norm: f64,
        lambdas: Vector,
        gamma: f64,
        gamma_perp: f64,
        radius: f64,
    ) -> Self {
        debug_assert_eq!(g_par.len(), lambdas.len());
        debug_assert!(radius > 0.0);
        debug_assert!(g_perp_norm >= 0.0);
        Self {
            g_par,
            g_perp_norm,
            lambdas,
            gamma_perp,
            radius,
            zero_tol: ZERO_EIGENVALUE_RTOL * gamma.abs().max(1.0),
        }
    }

    pub fn solve(&self) -> SubproblemSolution {
        let v_par = solve_parallel(&self.g_par, &self.lambdas, self.radius, self.zero_tol);
        let beta = solve_perp_beta(self.gamma_perp, self.g_perp_norm, self.radius);
        let model_reduction = model_reduction(
            &v_par,
            beta,
            &self.g_par,
            self.g_perp_norm,
            &self.lambdas,
            self.gamma_perp,
        );
        SubproblemSolution {
            v_par,
            beta,
            model_reduction,
        }
    }
}

/// Coordinate-wise global minimizer of `gᵢv + ½λᵢv²` over `|v| ≤ Δ`.
///
/// Ties are broken deterministically: `v = 0` when `gᵢ = λᵢ = 0`, and
/// `v = +Δ` when `gᵢ = 0, λᵢ < 0`.
pub fn solve_parallel(g_par: &Vector, lambdas: &Vector, radius: f64, zero_tol: f64) -> Vector {
    debug_assert_eq!(g_par.len(), lambdas.len());
    g_par.zip_map(lambdas, |g, lambda| {
        if lambda > zero_tol && (g / lambda).abs() <= radius {
            -g / lambda
        } else if lambda.abs() <= zero_tol {
            if g == 0.0 {
                0.0
            } else {
                -g.signum() * radius
            }
        } else if g == 0.0 {
            // Negative curvature with no slope: either end of the interval.
            radius
        } else {
            -g.signum() * radius
        }
    })
}

/// Scale `β` with `v⊥* = βg⊥`.
pub fn solve_perp_beta(gamma_perp: f64, g_perp_norm: f64, radius: f64) -> f64 {
    if gamma_perp > 0.0 && g_perp_norm <= radius * gamma_perp.abs() {
        -1.0 / gamma_perp
    } else if g_perp_norm == 0.0 {
        0.0
    } else {
        -radius / g_perp_norm
    }
}

/// `p* = βg + P∥(v∥ − βg∥)`.
pub fn assemble_step(
    beta: f64,
    g: &Vector,
    g_par: &Vector,
    v_par: &Vector,
    fac: &SpectralFactorization,
    buffer: &PairBuffer,
) -> Result<Vector> {
    let mut p = g * beta;
    if fac.rank() > 0 {
        let coeffs = v_par - g_par * beta;
        p += fac.apply_par(buffer, &coeffs)?;
    }
    Ok(p)
}

/// `g∥ᵀv∥ + ½v∥ᵀΛv∥ + β‖g⊥‖² + ½γ⊥β²‖g⊥‖²`.
pub fn model_reduction(
    v_par: &Vector,
    beta: f64,
    g_par: &Vector,
    g_perp_norm: f64,
    lambdas: &Vector,
    gamma_perp: f64,
) -> f64 {
    let par: f64 = v_par
        .iter()
        .zip(g_par.iter())
        .zip(lambdas.iter())
        .map(|((v, g), l)| g * v + 0.5 * l * v * v)
        .sum();
    let gp2 = g_perp_norm * g_perp_norm;
    par + beta * gp2 + 0.5 * gamma_perp * beta * beta * gp2
}

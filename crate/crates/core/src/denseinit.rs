//! Two-scale initial matrix `B̂₀ = γP∥P∥ᵀ + γ⊥P⊥P⊥ᵀ`.
//!
//! `γ` is the usual spectral estimate `yᵀy / sᵀy` of the newest pair and
//! scales the subspace where curvature has been observed. `γ⊥` scales the
//! complement and follows
//!
//! ```text
//! γ⊥(c, λ) = λ·c·γmax + (1 − λ)·γ
//! ```
//!
//! where `γmax` is the largest `γ` seen so far in the run. `(c, λ) = (1, 0)`
//! recovers the conventional `B₀ = γI`.
//!
//! The updated matrix keeps the eigenvectors of the conventional one and
//! only replaces the eigenvalue on `P⊥` by `γ⊥`, so its inverse is the
//! conventional compact inverse plus a multiple of the projector onto
//! `Range([S Y])`:
//!
//! ```text
//! B̂⁻¹ = γ⊥⁻¹I + V M̂ Vᵀ,   V = [S Y],
//! M̂   = [[T⁻ᵀ(D + γ⁻¹YᵀY)T⁻¹, −γ⁻¹T⁻ᵀ], [−γ⁻¹T⁻¹, 0]] + (γ⁻¹ − γ⊥⁻¹)(VᵀV)⁻¹
//! ```

use serde::{Deserialize, Serialize};

use crate::pairstore::{CurvaturePair, PairBuffer};
use crate::pivoted::{unit_diagonal, PivotedCholesky};
use crate::{Error, Matrix, Result, Vector};

/// How `γ⊥` is derived from the curvature history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PerpRule {
    /// `γ⊥ = γ`; the conventional initialization.
    Conventional,
    /// `γ⊥ = λ·c·γmax + (1 − λ)·γ`.
    Blend { c: f64, lambda: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitPolicy {
    rule: PerpRule,
    gamma: Option<f64>,
    gamma_max: f64,
    gamma0_perp: f64,
}

impl InitPolicy {
    pub fn dense(c: f64, lambda: f64, gamma0_perp: f64) -> Result<Self> {
        if !(c >= 1.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("c = {c} must be >= 1")));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!(
                "lambda = {lambda} must lie in [0, 1]"
            )));
        }
        Self::with_rule(PerpRule::Blend { c, lambda }, gamma0_perp)
    }

    pub fn conventional(gamma0_perp: f64) -> Result<Self> {
        Self::with_rule(PerpRule::Conventional, gamma0_perp)
    }

    fn with_rule(rule: PerpRule, gamma0_perp: f64) -> Result<Self> {
        if !(gamma0_perp > 0.0 && gamma0_perp.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma0_perp = {gamma0_perp} must be positive"
            )));
        }
        Ok(Self {
            rule,
            gamma: None,
            gamma_max: 0.0,
            gamma0_perp,
        })
    }

    pub fn rule(&self) -> PerpRule {
        self.rule
    }

    /// Current `γ`, if any pair has been seen.
    pub fn gamma(&self) -> Option<f64> {
        self.gamma
    }

    pub fn gamma_max(&self) -> f64 {
        self.gamma_max
    }

    pub fn gamma0_perp(&self) -> f64 {
        self.gamma0_perp
    }

    /// Sets `γ = yᵀy / sᵀy` from an admitted pair and updates `γmax`.
    pub fn update_gamma(&mut self, pair: &CurvaturePair) -> Result<()> {
        if !(pair.sy > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "curvature sᵀy = {} must be positive",
                pair.sy
            )));
        }
        let gamma = pair.spectral_scale();
        self.gamma = Some(gamma);
        self.gamma_max = self.gamma_max.max(gamma);
        Ok(())
    }

    /// `γ⊥`, or `γ₀⊥` before the first pair.
    pub fn gamma_perp(&self) -> f64 {
        let Some(gamma) = self.gamma else {
            return self.gamma0_perp;
        };
        match self.rule {
            PerpRule::Conventional => gamma,
            PerpRule::Blend { c, lambda } => lambda * c * self.gamma_max + (1.0 - lambda) * gamma,
        }
    }
}

/// Inverse compact representation `B̂⁻¹ = γ⊥⁻¹I + V M̂ Vᵀ`.
#[derive(Debug, Clone)]
pub struct InverseRep {
    pub gamma: f64,
    pub gamma_perp: f64,
    /// `γ⁻¹ − γ⊥⁻¹`.
    pub alpha: f64,
    /// Upper triangular part of `SᵀY`, diagonal included.
    pub t: Matrix,
    /// Pivoted Cholesky factor of the normalized `VᵀV` (`R_V`), leading block.
    pub r_v: Matrix,
    pub m_hat: Matrix,
    /// `VᵀV`, needed for the norm of the unconstrained step.
    v_gram: Matrix,
    pairs: usize,
}

impl InverseRep {
    /// `B̂⁻¹ = γ⊥⁻¹I` for an empty history.
    pub fn isotropic(gamma_perp: f64) -> Self {
        Self {
            gamma: gamma_perp,
            gamma_perp,
            alpha: 0.0,
            t: Matrix::zeros(0, 0),
            r_v: Matrix::zeros(0, 0),
            m_hat: Matrix::zeros(0, 0),
            v_gram: Matrix::zeros(0, 0),
            pairs: 0,
        }
    }

    /// Dense-initialization inverse. When `VᵀV` is rank deficient the
    /// projector term uses the pseudo-inverse obtained from a pivoted
    /// factorization truncated at `eps_r`.
    pub fn new(buffer: &PairBuffer, gamma: f64, gamma_perp: f64, eps_r: f64) -> Result<Self> {
        let mut rep = Self::conventional(buffer, gamma)?;
        if !(gamma_perp > 0.0 && gamma_perp.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma_perp = {gamma_perp} must be positive"
            )));
        }
        let alpha = 1.0 / gamma - 1.0 / gamma_perp;
        let (gram_n, scale) = unit_diagonal(&rep.v_gram);
        let chol = PivotedCholesky::new(&gram_n, eps_r);
        let r_v = chol.leading();
        let ident = Matrix::identity(chol.rank, chol.rank);
        let r_inv = r_v
            .solve_upper_triangular(&ident)
            .ok_or(Error::Singular("VᵀV factor"))?;
        let inner = &r_inv * r_inv.transpose();
        let retained = chol.retained();
        for (a, &i) in retained.iter().enumerate() {
            for (b, &j) in retained.iter().enumerate() {
                rep.m_hat[(i, j)] += alpha * inner[(a, b)] / (scale[i] * scale[j]);
            }
        }
        rep.alpha = alpha;
        rep.gamma_perp = gamma_perp;
        rep.r_v = r_v;
        Ok(rep)
    }

    /// Classical compact inverse of the L-BFGS matrix with `B₀ = γI`.
    pub fn conventional(buffer: &PairBuffer, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma = {gamma} must be positive"
            )));
        }
        let views = buffer.triangular_views()?;
        let k = buffer.len();
        let t = views.upper;
        let t_inv = t
            .solve_upper_triangular(&Matrix::identity(k, k))
            .ok_or(Error::Singular("upper triangle of SᵀY"))?;
        let inner = Matrix::from_diagonal(&views.diag) + buffer.gram_yy() / gamma;
        let top_left = t_inv.transpose() * inner * &t_inv;
        let off = t_inv.transpose() * (-1.0 / gamma);

        let mut m_hat = Matrix::zeros(2 * k, 2 * k);
        m_hat
            .view_mut((0, 0), (k, k))
            .copy_from(&((&top_left + top_left.transpose()) * 0.5));
        m_hat.view_mut((0, k), (k, k)).copy_from(&off);
        m_hat.view_mut((k, 0), (k, k)).copy_from(&off.transpose());

        let mut v_gram = Matrix::zeros(2 * k, 2 * k);
        v_gram.view_mut((0, 0), (k, k)).copy_from(buffer.gram_ss());
        v_gram.view_mut((0, k), (k, k)).copy_from(buffer.gram_sy());
        v_gram
            .view_mut((k, 0), (k, k))
            .copy_from(&buffer.gram_sy().transpose());
        v_gram.view_mut((k, k), (k, k)).copy_from(buffer.gram_yy());

        Ok(Self {
            gamma,
            gamma_perp: gamma,
            alpha: 0.0,
            t,
            r_v: Matrix::zeros(0, 0),
            m_hat,
            v_gram,
            pairs: k,
        })
    }

    fn check(&self, buffer: &PairBuffer, n: usize) -> Result<()> {
        if buffer.len() != self.pairs {
            return Err(Error::DimensionMismatch {
                expected: self.pairs,
                found: buffer.len(),
            });
        }
        if n != buffer.dim() {
            return Err(Error::DimensionMismatch {
                expected: buffer.dim(),
                found: n,
            });
        }
        Ok(())
    }

    /// `u = Vᵀx = [Sᵀx; Yᵀx]`.
    pub fn v_dot(&self, buffer: &PairBuffer, x: &Vector) -> Result<Vector> {
        self.check(buffer, x.len())?;
        let k = self.pairs;
        let mut u = Vector::zeros(2 * k);
        if k > 0 {
            u.rows_mut(0, k).copy_from(&buffer.s_dot(x));
            u.rows_mut(k, k).copy_from(&buffer.y_dot(x));
        }
        Ok(u)
    }

    /// `B̂⁻¹x`.
    pub fn solve(&self, buffer: &PairBuffer, x: &Vector) -> Result<Vector> {
        let u = self.v_dot(buffer, x)?;
        Ok(self.solve_with(buffer, x, &u))
    }

    /// `B̂⁻¹x` given `u = Vᵀx`.
    pub fn solve_with(&self, buffer: &PairBuffer, x: &Vector, u: &Vector) -> Vector {
        let mut out = x / self.gamma_perp;
        let k = self.pairs;
        if k > 0 {
            let c = &self.m_hat * u;
            let a = c.rows(0, k).clone_owned();
            let b = c.rows(k, k).clone_owned();
            out += buffer.combine(&a, &b);
        }
        out
    }

    /// Full quasi-Newton step `p_u = −B̂⁻¹g`.
    pub fn unconstrained_step(&self, buffer: &PairBuffer, g: &Vector) -> Result<Vector> {
        Ok(-self.solve(buffer, g)?)
    }

    /// `‖B̂⁻¹g‖₂` in `2m` dimensions, without forming the step.
    pub fn unconstrained_norm(&self, buffer: &PairBuffer, g: &Vector) -> Result<f64> {
        let u = self.v_dot(buffer, g)?;
        Ok(self.unconstrained_norm_with(g.norm_squared(), &u))
    }

    /// `‖p_u‖₂` from `‖g‖²` and `u = Vᵀg`:
    /// `γ⊥⁻²‖g‖² + 2γ⊥⁻¹ uᵀM̂u + uᵀM̂(VᵀV)M̂u`.
    pub fn unconstrained_norm_with(&self, g_norm_sq: f64, u: &Vector) -> f64 {
        let a = 1.0 / self.gamma_perp;
        let mut sq = a * a * g_norm_sq;
        if self.pairs > 0 {
            let mu = &self.m_hat * u;
            sq += 2.0 * a * u.dot(&mu) + mu.dot(&(&self.v_gram * &mu));
        }
        sq.max(0.0).sqrt()
    }
}

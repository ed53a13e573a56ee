//! Compact representation `B = γI + ΨMΨᵀ` and its partial
//! eigendecomposition.
//!
//! With `Ψ = [γS, Y]` the thin QR factor `R` of `Ψ` is obtained from a
//! Cholesky factorization of the `2m × 2m` Gram matrix `ΨᵀΨ`, which the pair
//! buffer already caches blockwise. The orthonormal eigenvector block
//! `P∥ = ΨR⁻¹W` is only ever applied, never formed: products with it cost
//! one pass over the stored pairs.
//!
//! Columns of `Ψ` are normalized to unit length before factorizing, and the
//! factorization is pivoted and truncated at the rank threshold `eps_r`, so
//! the retained `r ≤ 2m` directions span `Range(Ψ)` even when the history is
//! (numerically) rank deficient.

use nalgebra::SymmetricEigen;

use crate::pairstore::PairBuffer;
use crate::pivoted::{unit_diagonal, PivotedCholesky};
use crate::{Error, Matrix, Result, Vector};

/// `M = −[[γSᵀS, L], [Lᵀ, −D]]⁻¹`, the middle factor of the compact form.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactMiddle {
    pub gamma: f64,
    pub m: Matrix,
}

impl CompactMiddle {
    pub fn build(buffer: &PairBuffer, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma = {gamma} must be positive"
            )));
        }
        let views = buffer.triangular_views()?;
        let k = buffer.len();
        let mut bracket = Matrix::zeros(2 * k, 2 * k);
        bracket
            .view_mut((0, 0), (k, k))
            .copy_from(&(buffer.gram_ss() * gamma));
        bracket.view_mut((0, k), (k, k)).copy_from(&views.lower);
        bracket
            .view_mut((k, 0), (k, k))
            .copy_from(&views.lower.transpose());
        bracket
            .view_mut((k, k), (k, k))
            .copy_from(&Matrix::from_diagonal(&(-&views.diag)));
        let inv = bracket
            .lu()
            .try_inverse()
            .ok_or(Error::Singular("compact middle bracket"))?;
        let m = -(&inv + inv.transpose()) * 0.5;
        Ok(Self { gamma, m })
    }
}

/// `Ψᵀx = [γSᵀx; Yᵀx]`.
pub fn psi_dot(buffer: &PairBuffer, gamma: f64, x: &Vector) -> Vector {
    let k = buffer.len();
    let mut out = Vector::zeros(2 * k);
    out.rows_mut(0, k).copy_from(&(buffer.s_dot(x) * gamma));
    out.rows_mut(k, k).copy_from(&buffer.y_dot(x));
    out
}

/// `Ψc = γS c₁ + Y c₂`.
pub fn psi_times(buffer: &PairBuffer, gamma: f64, c: &Vector) -> Vector {
    let k = buffer.len();
    let a = c.rows(0, k) * gamma;
    let b = c.rows(k, k).clone_owned();
    buffer.combine(&a, &b)
}

/// The `ΨᵀΨ` Gram matrix assembled from the cached blocks.
pub fn psi_gram(buffer: &PairBuffer, gamma: f64) -> Matrix {
    let k = buffer.len();
    let mut g = Matrix::zeros(2 * k, 2 * k);
    g.view_mut((0, 0), (k, k))
        .copy_from(&(buffer.gram_ss() * (gamma * gamma)));
    g.view_mut((0, k), (k, k))
        .copy_from(&(buffer.gram_sy() * gamma));
    g.view_mut((k, 0), (k, k))
        .copy_from(&(buffer.gram_sy().transpose() * gamma));
    g.view_mut((k, k), (k, k)).copy_from(buffer.gram_yy());
    g
}

/// Partial eigendecomposition `ΨMΨᵀ = P∥Λ̂P∥ᵀ` of the current history.
#[derive(Debug, Clone)]
pub struct SpectralFactorization {
    gamma: f64,
    dim: usize,
    pairs: usize,
    /// `λ̂₁ ≤ … ≤ λ̂ᵣ`.
    pub lambda_hat: Vector,
    /// Eigenvectors of `R M Rᵀ` on the retained subspace (`r × r`).
    pub w: Matrix,
    /// Leading upper-triangular block of the pivoted factor (`r × r`).
    pub r_lead: Matrix,
    /// Indices into the `2m'` columns of `Ψ` kept by the rank test, in pivot
    /// order.
    pub retained: Vec<usize>,
    /// Euclidean norms of the columns of `Ψ`.
    pub col_scale: Vector,
    /// `P∥ᵀ = coeff · Ψᵀ` (`r × 2m'`), i.e. `WᵀR⁻ᵀ` acting on the normalized
    /// retained columns.
    coeff: Matrix,
}

impl SpectralFactorization {
    /// Factorization of an empty history: `r = 0`, `P⊥ = I`.
    pub fn empty(dim: usize, gamma: f64) -> Self {
        Self {
            gamma,
            dim,
            pairs: 0,
            lambda_hat: Vector::zeros(0),
            w: Matrix::zeros(0, 0),
            r_lead: Matrix::zeros(0, 0),
            retained: Vec::new(),
            col_scale: Vector::zeros(0),
            coeff: Matrix::zeros(0, 0),
        }
    }

    /// Rank-revealing factorization of `Ψ = [γS, Y]` and eigendecomposition
    /// of the projected middle matrix.
    ///
    /// Returns [`Error::DegenerateHistory`] if pairs are stored but no
    /// direction survives the rank threshold.
    pub fn new(buffer: &PairBuffer, gamma: f64, eps_r: f64) -> Result<Self> {
        if buffer.is_empty() {
            return Ok(Self::empty(buffer.dim(), gamma));
        }
        let middle = CompactMiddle::build(buffer, gamma)?;
        let (gram_n, scale) = unit_diagonal(&psi_gram(buffer, gamma));
        let chol = PivotedCholesky::new(&gram_n, eps_r);
        let r = chol.rank;
        if r == 0 {
            return Err(Error::DegenerateHistory);
        }

        // Ψ ≈ Q R_full D with Q = Ψ D⁻¹ E R₁₁⁻¹, so ΨMΨᵀ = Q (R_full D M D R_fullᵀ) Qᵀ.
        let r_full = chol.unpermuted();
        let scaled_r = Matrix::from_fn(r, r_full.ncols(), |i, j| r_full[(i, j)] * scale[j]);
        let projected = &scaled_r * &middle.m * scaled_r.transpose();
        let projected = (&projected + projected.transpose()) * 0.5;
        let eig = SymmetricEigen::new(projected);
        let mut order: Vec<usize> = (0..r).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let lambda_hat = Vector::from_iterator(r, order.iter().map(|&i| eig.eigenvalues[i]));
        let w = Matrix::from_fn(r, r, |i, j| eig.eigenvectors[(i, order[j])]);

        let r_lead = chol.leading();
        let retained = chol.retained().to_vec();
        // coeff = Wᵀ R₁₁⁻ᵀ E, where E picks retained columns and divides by their scale.
        let r_inv_w = r_lead
            .solve_upper_triangular(&w)
            .ok_or(Error::Singular("pivoted Gram factor"))?;
        let mut coeff = Matrix::zeros(r, 2 * buffer.len());
        for (i, &col) in retained.iter().enumerate() {
            for row in 0..r {
                coeff[(row, col)] = r_inv_w[(i, row)] / scale[col];
            }
        }

        Ok(Self {
            gamma,
            dim: buffer.dim(),
            pairs: buffer.len(),
            lambda_hat,
            w,
            r_lead,
            retained,
            col_scale: scale,
            coeff,
        })
    }

    pub fn rank(&self) -> usize {
        self.lambda_hat.len()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Eigenvalues `λ̂ᵢ + γ` of `B` on the parallel subspace.
    pub fn lambdas(&self) -> Vector {
        self.lambda_hat.add_scalar(self.gamma)
    }

    fn check(&self, buffer: &PairBuffer, n: usize) -> Result<()> {
        if buffer.len() != self.pairs || buffer.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.pairs,
                found: buffer.len(),
            });
        }
        if n != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: n,
            });
        }
        Ok(())
    }

    /// `P∥ᵀx`, computed through `Ψᵀx` in `O(mn)`.
    pub fn apply_par_t(&self, buffer: &PairBuffer, x: &Vector) -> Result<Vector> {
        self.check(buffer, x.len())?;
        if self.rank() == 0 {
            return Ok(Vector::zeros(0));
        }
        Ok(&self.coeff * psi_dot(buffer, self.gamma, x))
    }

    /// `P∥v`.
    pub fn apply_par(&self, buffer: &PairBuffer, v: &Vector) -> Result<Vector> {
        self.check(buffer, self.dim)?;
        if self.rank() == 0 {
            return Err(Error::NoParallelSubspace);
        }
        if v.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                found: v.len(),
            });
        }
        Ok(psi_times(buffer, self.gamma, &self.coeff.tr_mul(v)))
    }

    /// Shape-changing infinity norm `max(‖P∥ᵀx‖_∞, ‖P⊥ᵀx‖₂)`.
    pub fn sc_norm(&self, buffer: &PairBuffer, x: &Vector) -> Result<f64> {
        let x_par = self.apply_par_t(buffer, x)?;
        Ok(sc_norm_parts(x, &x_par))
    }
}

/// `‖P⊥ᵀx‖²` from `‖x‖² − ‖P∥ᵀx‖²`, clamped at zero.
pub fn perp_norm_sq(x: &Vector, x_par: &Vector) -> f64 {
    (x.norm_squared() - x_par.norm_squared()).max(0.0)
}

/// The shape-changing norm given `x` and `P∥ᵀx`.
pub fn sc_norm_parts(x: &Vector, x_par: &Vector) -> f64 {
    x_par.amax().max(perp_norm_sq(x, x_par).sqrt())
}

//! Rank-revealing symmetric factorization for the small Gram matrices.

use crate::{Matrix, Vector};

/// `A[p, p] ≈ RᵀR` with diagonal pivoting, truncated at the first pivot
/// whose LDLᵀ diagonal falls to `threshold` or below.
#[derive(Debug, Clone)]
pub(crate) struct PivotedCholesky {
    /// Pivot order. The first `rank` entries are the retained columns.
    pub perm: Vec<usize>,
    pub rank: usize,
    /// `rank × N` upper-trapezoidal factor, columns in pivot order.
    pub factor: Matrix,
}

impl PivotedCholesky {
    pub fn new(a: &Matrix, threshold: f64) -> Self {
        let n = a.nrows();
        debug_assert_eq!(n, a.ncols());
        let mut work = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut r = Matrix::zeros(n, n);
        let mut rank = 0;

        for k in 0..n {
            let (piv, &dmax) = (k..n)
                .map(|i| (i, &work[(i, i)]))
                .max_by(|a, b| a.1.total_cmp(b.1))
                .expect("non-empty pivot range");
            if !(dmax > threshold) {
                break;
            }
            if piv != k {
                work.swap_rows(k, piv);
                work.swap_columns(k, piv);
                r.swap_columns(k, piv);
                perm.swap(k, piv);
            }
            let rkk = work[(k, k)].sqrt();
            r[(k, k)] = rkk;
            for j in k + 1..n {
                r[(k, j)] = work[(k, j)] / rkk;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    work[(i, j)] -= r[(k, i)] * r[(k, j)];
                }
            }
            rank = k + 1;
        }

        Self {
            perm,
            rank,
            factor: r.rows(0, rank).clone_owned(),
        }
    }

    /// Leading `rank × rank` upper-triangular block.
    pub fn leading(&self) -> Matrix {
        self.factor.columns(0, self.rank).clone_owned()
    }

    /// The factor with columns returned to their original order, so that
    /// `A ≈ RᵀR` without permutation.
    pub fn unpermuted(&self) -> Matrix {
        let mut out = Matrix::zeros(self.rank, self.perm.len());
        for (j, &p) in self.perm.iter().enumerate() {
            out.set_column(p, &self.factor.column(j));
        }
        out
    }

    pub fn retained(&self) -> &[usize] {
        &self.perm[..self.rank]
    }
}

/// `D⁻¹AD⁻¹` with `D = diag(√aᵢᵢ)`, and the scale vector `d`. Zero diagonal
/// entries keep unit scale.
pub(crate) fn unit_diagonal(a: &Matrix) -> (Matrix, Vector) {
    let d = a.diagonal().map(|x| if x > 0.0 { x.sqrt() } else { 1.0 });
    let scaled = Matrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] / (d[i] * d[j]));
    (scaled, d)
}

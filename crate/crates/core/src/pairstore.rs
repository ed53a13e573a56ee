//! Limited-memory history of curvature pairs `(s, y)`.
//!
//! Besides the pairs themselves the buffer keeps the three small Gram blocks
//! `SᵀS`, `SᵀY` and `YᵀY`. They are updated incrementally on every push and
//! eviction, so admitting a pair costs `4mn` flops and everything downstream
//! (compact middle matrix, rank-revealing factorization, inverse
//! representation) works in `2m` dimensions only.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::{Error, Matrix, Result, Vector};

/// A stored `(s, y)` pair together with its inner products.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvaturePair {
    pub s: Vector,
    pub y: Vector,
    pub sy: f64,
    pub ss: f64,
    pub yy: f64,
}

impl CurvaturePair {
    pub fn new(s: Vector, y: Vector) -> Result<Self> {
        if s.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: s.len(),
                found: y.len(),
            });
        }
        let sy = s.dot(&y);
        let ss = s.dot(&s);
        let yy = y.dot(&y);
        Ok(Self { s, y, sy, ss, yy })
    }

    /// `sᵀy > c₃‖s‖‖y‖`, the admission test for the history.
    pub fn satisfies_curvature(&self, c3: f64) -> bool {
        self.ss > 0.0 && self.yy > 0.0 && self.sy > c3 * self.ss.sqrt() * self.yy.sqrt()
    }

    /// Spectral scale `yᵀy / sᵀy`.
    pub fn spectral_scale(&self) -> f64 {
        self.yy / self.sy
    }
}

/// Triangular splitting of `SᵀY = L + D + (T − D)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularViews {
    /// Strictly lower triangular part.
    pub lower: Matrix,
    /// Diagonal, `sᵢᵀyᵢ`.
    pub diag: Vector,
    /// Upper triangular part including the diagonal.
    pub upper: Matrix,
}

/// FIFO buffer of at most `m` accepted pairs, oldest first.
#[derive(Debug, Clone)]
pub struct PairBuffer {
    capacity: usize,
    dim: usize,
    pairs: VecDeque<CurvaturePair>,
    gram_ss: Matrix,
    gram_sy: Matrix,
    gram_yy: Matrix,
}

impl PairBuffer {
    /// Empty buffer for vectors of length `dim` holding up to `capacity`
    /// pairs.
    pub fn new(capacity: usize, dim: usize) -> Self {
        assert!(capacity > 0, "pair buffer capacity must be positive");
        Self {
            capacity,
            dim,
            pairs: VecDeque::with_capacity(capacity),
            gram_ss: Matrix::zeros(0, 0),
            gram_sy: Matrix::zeros(0, 0),
            gram_yy: Matrix::zeros(0, 0),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> impl ExactSizeIterator<Item = &CurvaturePair> {
        self.pairs.iter()
    }

    /// Most recently admitted pair.
    pub fn newest(&self) -> Option<&CurvaturePair> {
        self.pairs.back()
    }

    pub fn gram_ss(&self) -> &Matrix {
        &self.gram_ss
    }

    /// `(SᵀY)ᵢⱼ = sᵢᵀyⱼ`.
    pub fn gram_sy(&self) -> &Matrix {
        &self.gram_sy
    }

    pub fn gram_yy(&self) -> &Matrix {
        &self.gram_yy
    }

    /// Admit `(s, y)` if `sᵀy > c₃‖s‖‖y‖`, evicting the oldest pair when the
    /// buffer is full. Returns whether the pair was stored; a rejected pair
    /// leaves the buffer untouched.
    pub fn try_push(&mut self, s: Vector, y: Vector, c3: f64) -> Result<bool> {
        if !(c3 > 0.0 && c3 < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "c3 = {c3} must lie in (0, 1)"
            )));
        }
        self.check_dim(s.len())?;
        self.check_dim(y.len())?;
        let pair = CurvaturePair::new(s, y)?;
        if !pair.satisfies_curvature(c3) {
            return Ok(false);
        }
        if self.pairs.len() == self.capacity {
            self.evict_oldest();
        }
        self.append(pair);
        Ok(true)
    }

    /// Drop every stored pair.
    pub fn clear(&mut self) {
        self.pairs.clear();
        self.gram_ss = Matrix::zeros(0, 0);
        self.gram_sy = Matrix::zeros(0, 0);
        self.gram_yy = Matrix::zeros(0, 0);
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            });
        }
        Ok(())
    }

    fn evict_oldest(&mut self) {
        self.pairs.pop_front();
        let k = self.pairs.len();
        let shrink = |g: &Matrix| g.view((1, 1), (k, k)).clone_owned();
        self.gram_ss = shrink(&self.gram_ss);
        self.gram_sy = shrink(&self.gram_sy);
        self.gram_yy = shrink(&self.gram_yy);
    }

    fn append(&mut self, pair: CurvaturePair) {
        let k = self.pairs.len();
        let grow = |g: &Matrix| {
            let mut out = Matrix::zeros(k + 1, k + 1);
            out.view_mut((0, 0), (k, k)).copy_from(g);
            out
        };
        let mut ss = grow(&self.gram_ss);
        let mut sy = grow(&self.gram_sy);
        let mut yy = grow(&self.gram_yy);
        for (j, old) in self.pairs.iter().enumerate() {
            let a = old.s.dot(&pair.s);
            ss[(j, k)] = a;
            ss[(k, j)] = a;
            sy[(j, k)] = old.s.dot(&pair.y);
            sy[(k, j)] = pair.s.dot(&old.y);
            let b = old.y.dot(&pair.y);
            yy[(j, k)] = b;
            yy[(k, j)] = b;
        }
        ss[(k, k)] = pair.ss;
        sy[(k, k)] = pair.sy;
        yy[(k, k)] = pair.yy;
        self.gram_ss = ss;
        self.gram_sy = sy;
        self.gram_yy = yy;
        self.pairs.push_back(pair);
    }

    /// Splits `SᵀY` into its strictly lower, diagonal and upper (with
    /// diagonal) parts.
    pub fn triangular_views(&self) -> Result<TriangularViews> {
        if self.is_empty() {
            return Err(Error::EmptyHistory);
        }
        let sy = &self.gram_sy;
        let k = sy.nrows();
        let lower = Matrix::from_fn(k, k, |i, j| if i > j { sy[(i, j)] } else { 0.0 });
        let upper = Matrix::from_fn(k, k, |i, j| if i <= j { sy[(i, j)] } else { 0.0 });
        Ok(TriangularViews {
            lower,
            diag: sy.diagonal(),
            upper,
        })
    }

    /// `(SᵀS, SᵀY, YᵀY)` recomputed from the stored columns. Used to audit the
    /// incrementally maintained blocks.
    pub fn recomputed_grams(&self) -> (Matrix, Matrix, Matrix) {
        let k = self.len();
        let p: Vec<&CurvaturePair> = self.pairs.iter().collect();
        (
            Matrix::from_fn(k, k, |i, j| p[i].s.dot(&p[j].s)),
            Matrix::from_fn(k, k, |i, j| p[i].s.dot(&p[j].y)),
            Matrix::from_fn(k, k, |i, j| p[i].y.dot(&p[j].y)),
        )
    }

    /// `Sᵀx`.
    pub fn s_dot(&self, x: &Vector) -> Vector {
        Vector::from_iterator(self.len(), self.pairs.iter().map(|p| p.s.dot(x)))
    }

    /// `Yᵀx`.
    pub fn y_dot(&self, x: &Vector) -> Vector {
        Vector::from_iterator(self.len(), self.pairs.iter().map(|p| p.y.dot(x)))
    }

    /// `S a + Y b`.
    pub fn combine(&self, a: &Vector, b: &Vector) -> Vector {
        debug_assert_eq!(a.len(), self.len());
        debug_assert_eq!(b.len(), self.len());
        let mut out = Vector::zeros(self.dim);
        for (i, p) in self.pairs.iter().enumerate() {
            if a[i] != 0.0 {
                out.axpy(a[i], &p.s, 1.0);
            }
            if b[i] != 0.0 {
                out.axpy(b[i], &p.y, 1.0);
            }
        }
        out
    }
}

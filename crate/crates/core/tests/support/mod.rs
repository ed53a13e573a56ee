//! Dense reference computations shared by the oracle suites.
#![allow(dead_code)]

use lmtr_core::{Matrix, PairBuffer, SpectralFactorization, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub const C3: f64 = 1e-8;
pub const EPS_R: f64 = 1e-14;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_vec(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// `GᵀG/n + ½I` with Gaussian `G`.
pub fn spd(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let g = Matrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    g.transpose() * g / n as f64 + Matrix::identity(n, n) * 0.5
}

/// A buffer holding `pairs` admissible pairs with `y = As + noise`.
pub fn random_buffer(rng: &mut ChaCha8Rng, n: usize, pairs: usize) -> PairBuffer {
    let a = spd(rng, n);
    let mut buffer = PairBuffer::new(pairs, n);
    while buffer.len() < pairs {
        let s = normal_vec(rng, n);
        let y = &a * &s + normal_vec(rng, n) * (0.2 * s.norm() / (n as f64).sqrt());
        buffer.try_push(s, y, C3).expect("consistent dimensions");
    }
    buffer
}

/// A random instance in the ranges used by the acceptance criteria.
pub struct Instance {
    pub buffer: PairBuffer,
    pub gamma: f64,
    pub gamma_perp: f64,
}

pub fn random_instance(rng: &mut ChaCha8Rng, max_n: usize, max_pairs: usize) -> Instance {
    let n = rng.random_range(2..=max_n);
    let pairs = rng.random_range(1..=max_pairs);
    Instance {
        buffer: random_buffer(rng, n, pairs),
        gamma: rng.random_range(0.5..5.0),
        gamma_perp: rng.random_range(0.5..10.0),
    }
}

/// Applies the BFGS update for every stored pair, oldest first, starting
/// from `b0`.
pub fn dense_recursion(b0: &Matrix, buffer: &PairBuffer) -> Matrix {
    let mut b = b0.clone();
    for pair in buffer.pairs() {
        let bs = &b * &pair.s;
        let sbs = pair.s.dot(&bs);
        b -= &bs * bs.transpose() / sbs;
        b += &pair.y * pair.y.transpose() / pair.sy;
    }
    b
}

/// `P∥` as an explicit `n × r` matrix, one column per unit coordinate.
pub fn explicit_par(fac: &SpectralFactorization, buffer: &PairBuffer) -> Matrix {
    let r = fac.rank();
    let mut p = Matrix::zeros(buffer.dim(), r);
    for j in 0..r {
        let mut e = Vector::zeros(r);
        e[j] = 1.0;
        p.set_column(j, &fac.apply_par(buffer, &e).unwrap());
    }
    p
}

/// `I − P∥P∥ᵀ`.
pub fn perp_projector(p_par: &Matrix) -> Matrix {
    let n = p_par.nrows();
    Matrix::identity(n, n) - p_par * p_par.transpose()
}

/// Orthonormal basis of the complement of `Range(P∥)`, from a QR
/// factorization of `[P∥ | I]`. Empty when `P∥` is square.
pub fn perp_basis(p_par: &Matrix) -> Matrix {
    let (n, r) = p_par.shape();
    let mut a = Matrix::zeros(n, r + n);
    a.view_mut((0, 0), (n, r)).copy_from(p_par);
    a.view_mut((0, r), (n, n)).fill_with_identity();
    a.qr().q().columns(r, n - r).into_owned()
}

/// `γP∥P∥ᵀ + γ⊥P⊥P⊥ᵀ` with `P⊥P⊥ᵀ = I − P∥P∥ᵀ`.
pub fn dense_b0(p_par: &Matrix, gamma: f64, gamma_perp: f64) -> Matrix {
    p_par * p_par.transpose() * gamma + perp_projector(p_par) * gamma_perp
}

/// The same matrix as `γI + (γ⊥ − γ)P⊥P⊥ᵀ` with an explicit complement
/// basis, so changing `γ⊥` only touches directions outside `Range(P∥)`
/// even when `P∥` is not orthonormal to working precision.
pub fn dense_b0_split(p_par: &Matrix, gamma: f64, gamma_perp: f64) -> Matrix {
    let n = p_par.nrows();
    let q = perp_basis(p_par);
    Matrix::identity(n, n) * gamma + &q * q.transpose() * (gamma_perp - gamma)
}

/// `P∥(Λ̂ + γI)P∥ᵀ + γ⊥P⊥P⊥ᵀ`.
pub fn spectral_matrix(fac: &SpectralFactorization, p_par: &Matrix, gamma_perp: f64) -> Matrix {
    let lam = Matrix::from_diagonal(&fac.lambdas());
    p_par * lam * p_par.transpose() + perp_projector(p_par) * gamma_perp
}

pub fn max_abs(m: &Matrix) -> f64 {
    m.amax()
}

/// Minimum of `φ` over `points` equispaced samples of `[lo, hi]`,
/// endpoints included.
pub fn grid_min(lo: f64, hi: f64, points: usize, phi: impl Fn(f64) -> f64) -> f64 {
    let step = (hi - lo) / (points - 1) as f64;
    (0..points)
        .map(|i| {
            phi(if i + 1 == points {
                hi
            } else {
                lo + step * i as f64
            })
        })
        .fold(f64::INFINITY, f64::min)
}

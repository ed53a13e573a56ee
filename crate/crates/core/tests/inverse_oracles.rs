mod support;

use lmtr_core::{InverseRep, Matrix, PairBuffer, SpectralFactorization, Vector};
use support::*;

fn apply_inverse(rep: &InverseRep, buffer: &PairBuffer) -> Matrix {
    let n = buffer.dim();
    let mut out = Matrix::zeros(n, n);
    for j in 0..n {
        let mut e = Vector::zeros(n);
        e[j] = 1.0;
        out.set_column(j, &rep.solve(buffer, &e).unwrap());
    }
    out
}

#[test]
fn dense_inverse_times_matrix_is_identity() {
    let mut rng = rng(11);
    for _ in 0..50 {
        let inst = random_instance(&mut rng, 30, 5);
        let buffer = &inst.buffer;
        let fac = SpectralFactorization::new(buffer, inst.gamma, EPS_R).unwrap();
        let p = explicit_par(&fac, buffer);
        let b = spectral_matrix(&fac, &p, inst.gamma_perp);
        let rep = InverseRep::new(buffer, inst.gamma, inst.gamma_perp, EPS_R).unwrap();
        let n = buffer.dim();
        let err = max_abs(&(b * apply_inverse(&rep, buffer) - Matrix::identity(n, n)));
        assert!(err <= 1e-9, "{err}");
    }
}

#[test]
fn conventional_inverse_matches_dense_inverse() {
    let mut rng = rng(12);
    for _ in 0..20 {
        let buffer = random_buffer(&mut rng, 15, 4);
        let b = dense_recursion(&(Matrix::identity(15, 15) * 2.0), &buffer);
        let rep = InverseRep::conventional(&buffer, 2.0).unwrap();
        let want = b.try_inverse().unwrap();
        assert!(max_abs(&(apply_inverse(&rep, &buffer) - want)) <= 1e-9);
    }
}

#[test]
fn inverse_handles_rank_deficient_history() {
    let mut rng = rng(13);
    let n = 10;
    let base = random_buffer(&mut rng, n, 2);
    let mut buffer = PairBuffer::new(4, n);
    for pair in base.pairs().chain(base.pairs()) {
        buffer.try_push(pair.s.clone(), pair.y.clone(), C3).unwrap();
    }
    let fac = SpectralFactorization::new(&buffer, 1.2, EPS_R).unwrap();
    let p = explicit_par(&fac, &buffer);
    let b = spectral_matrix(&fac, &p, 7.0);
    let rep = InverseRep::new(&buffer, 1.2, 7.0, EPS_R).unwrap();
    let err = max_abs(&(b * apply_inverse(&rep, &buffer) - Matrix::identity(n, n)));
    assert!(err <= 1e-8, "{err}");
}

#[test]
fn unconstrained_norm_matches_step_norm() {
    let mut rng = rng(14);
    for _ in 0..50 {
        let inst = random_instance(&mut rng, 50, 5);
        let rep = InverseRep::new(&inst.buffer, inst.gamma, inst.gamma_perp, EPS_R).unwrap();
        let g = normal_vec(&mut rng, inst.buffer.dim());
        let step = rep.unconstrained_step(&inst.buffer, &g).unwrap();
        let cheap = rep.unconstrained_norm(&inst.buffer, &g).unwrap();
        assert!((cheap - step.norm()).abs() <= 1e-10 * step.norm());
    }
}

#[test]
fn unconstrained_step_solves_newton_system() {
    // On a quadratic the step from the full model is the exact model minimizer.
    let mut rng = rng(15);
    let inst = random_instance(&mut rng, 25, 5);
    let fac = SpectralFactorization::new(&inst.buffer, inst.gamma, EPS_R).unwrap();
    let p = explicit_par(&fac, &inst.buffer);
    let b = spectral_matrix(&fac, &p, inst.gamma_perp);
    let g = normal_vec(&mut rng, inst.buffer.dim());
    let rep = InverseRep::new(&inst.buffer, inst.gamma, inst.gamma_perp, EPS_R).unwrap();
    let step = rep.unconstrained_step(&inst.buffer, &g).unwrap();
    assert!((b * step + g).amax() <= 1e-9);
}

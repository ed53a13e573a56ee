mod support;

use lmtr_core::par::Execution;
use lmtr_core::problems::{fd_check, fd_check_with, registry};
use lmtr_core::{Objective, Problem, ProblemKind, Vector};
use support::*;

#[test]
fn every_gradient_passes_finite_differences() {
    let mut rng = rng(31);
    for p in registry(12) {
        let x0 = p.start();
        for _ in 0..10 {
            let x = &x0 + normal_vec(&mut rng, p.n) * 0.5;
            let err = fd_check(&p, &x, 1e-6);
            assert!(err <= 1e-6, "{}: {err}", p.name());
        }
    }
}

#[test]
fn rosenbrock_fd_at_random_points() {
    let mut rng = rng(32);
    let p = Problem::new(ProblemKind::ExtRosenbrock, 10).unwrap();
    for _ in 0..10 {
        let x = normal_vec(&mut rng, 10);
        assert!(fd_check(&p, &x, 1e-6) <= 1e-6);
    }
}

#[test]
fn sequential_and_parallel_checks_agree() {
    let p = Problem::new(ProblemKind::BroydenTridiagonal, 64).unwrap();
    let x = p.start();
    assert_eq!(
        fd_check_with(&p, &x, 1e-6, Execution::Sequential),
        fd_check_with(&p, &x, 1e-6, Execution::Parallel)
    );
}

#[test]
fn registry_covers_required_families() {
    let names: Vec<&str> = registry(100).iter().map(|p| p.kind.name()).collect();
    assert!(names.len() >= 10);
    for want in [
        "testquad",
        "ext_rosenbrock",
        "gen_rosenbrock",
        "ext_powell",
        "trigonometric",
        "penalty",
        "cosine_mixture",
    ] {
        assert!(names.contains(&want), "{want}");
    }
}

#[test]
fn testquad_hint_and_start() {
    let p = Problem::new(ProblemKind::TestQuad, 7).unwrap();
    assert_eq!(p.f_opt_hint(), Some(0.0));
    assert_eq!(p.start(), Vector::from_element(7, 1.0));
    let expected: f64 = (1..=7).map(|i| 0.5 * i as f64).sum();
    assert!((p.value(&p.start()) - expected).abs() < 1e-12);
}

#[test]
fn unknown_name_is_not_found() {
    assert!(matches!(
        Problem::by_name("nope", 10),
        Err(lmtr_core::Error::ProblemNotFound(_))
    ));
}

use lmtr_core::{
    minimize, minimize_with_observer, Objective, Problem, ProblemKind, SolverConfig, Status,
    StepKind, StopRule, Vector,
};

struct Sphere(usize);

impl Objective for Sphere {
    fn name(&self) -> &str {
        "sphere"
    }
    fn dim(&self) -> usize {
        self.0
    }
    fn value(&self, x: &Vector) -> f64 {
        0.5 * x.norm_squared()
    }
    fn gradient(&self, x: &Vector) -> Vector {
        x.clone()
    }
    fn start(&self) -> Vector {
        Vector::from_element(self.0, 1.0)
    }
}

#[test]
fn sphere_reaches_tolerance() {
    let p = Sphere(10);
    let cfg = SolverConfig {
        keep_trace: true,
        ..SolverConfig::default()
    };
    let res = minimize(&p, &p.start(), &cfg).unwrap();
    assert_eq!(res.status, Status::Converged);
    assert!(res.g_norm_final <= 1e-10 * res.x_final.norm().max(1.0));
    let trace = res.trace.unwrap();
    assert_eq!(trace[0].step, StepKind::LineSearch);
    assert!(trace[1..].iter().any(|t| t.step == StepKind::Unconstrained));
}

#[test]
fn extended_rosenbrock_converges() {
    let p = Problem::new(ProblemKind::ExtRosenbrock, 100).unwrap();
    let res = minimize(&p, &p.start(), &SolverConfig::default()).unwrap();
    assert_eq!(res.status, Status::Converged);
    assert!(res.g_norm_final <= 1e-10 * res.x_final.norm().max(1.0));
    assert!(res.iterations <= res.total_steps);
}

#[test]
fn absolute_rule_is_respected() {
    let p = Problem::new(ProblemKind::ExtPowell, 40).unwrap();
    let cfg = SolverConfig {
        stop_rule: StopRule::AbsoluteInfNorm,
        epsilon: 1e-6,
        ..SolverConfig::default()
    };
    let res = minimize(&p, &p.start(), &cfg).unwrap();
    assert_eq!(res.status, Status::Converged);
    assert!(p.gradient(&res.x_final).amax() <= 1e-6);
}

fn trajectory(p: &Problem, cfg: &SolverConfig, steps: usize) -> Vec<Vector> {
    let mut xs = Vec::new();
    let cfg = SolverConfig {
        max_iter: steps,
        ..cfg.clone()
    };
    minimize_with_observer(p, &p.start(), &cfg, |v| xs.push(v.x.clone())).unwrap();
    xs
}

#[test]
fn blend_without_max_term_reproduces_conventional_trajectory() {
    for kind in [
        ProblemKind::ExtRosenbrock,
        ProblemKind::TestQuad,
        ProblemKind::ExtBeale,
        ProblemKind::BroydenTridiagonal,
        ProblemKind::ExtWood,
    ] {
        let p = Problem::new(kind, 100).unwrap();
        let a = trajectory(&p, &SolverConfig::dense(1.0, 0.0, true), 50);
        let b = trajectory(&p, &SolverConfig::conventional(), 50);
        assert_eq!(a.len(), b.len(), "{kind}");
        for (xa, xb) in a.iter().zip(&b) {
            assert!((xa - xb).amax() <= 1e-12, "{kind}");
        }
    }
}

#[test]
fn dense_only_in_constrained_branch_with_equal_scales_is_conventional() {
    let p = Problem::new(ProblemKind::GenRosenbrock, 50).unwrap();
    let a = trajectory(&p, &SolverConfig::dense(1.0, 0.0, false), 80);
    let b = trajectory(&p, &SolverConfig::conventional(), 80);
    assert_eq!(a, b);
}

#[test]
fn run_reports_bounded_scales_and_clean_pairs() {
    for p in lmtr_core::problems::registry(60) {
        let res = minimize(&p, &p.start(), &SolverConfig::default()).unwrap();
        assert!(res.stats.scales_bounded(), "{}", p.name());
        assert!(res.stats.c2().is_finite() && res.stats.c2() > 0.0);
        assert_eq!(res.stats.pair_violations, 0);
    }
}

/// `½‖x‖²` whose gradient turns non-finite near the origin.
struct Poisoned;

impl Objective for Poisoned {
    fn name(&self) -> &str {
        "poisoned"
    }
    fn dim(&self) -> usize {
        3
    }
    fn value(&self, x: &Vector) -> f64 {
        0.5 * x.norm_squared()
    }
    fn gradient(&self, x: &Vector) -> Vector {
        if x.norm() < 0.5 {
            Vector::from_element(3, f64::NAN)
        } else {
            x.clone()
        }
    }
    fn start(&self) -> Vector {
        Vector::from_element(3, 1.0)
    }
}

#[test]
fn non_finite_gradient_keeps_last_good_iterate() {
    let res = minimize(&Poisoned, &Poisoned.start(), &SolverConfig::default()).unwrap();
    assert_eq!(res.status, Status::NumericalFailure);
    assert!(res.x_final.norm() >= 0.5);
    assert!(res.f_final.is_finite());
}

#[test]
fn iteration_cap_is_reported() {
    let p = Problem::new(ProblemKind::GenRosenbrock, 100).unwrap();
    let cfg = SolverConfig {
        max_iter: 5,
        ..SolverConfig::default()
    };
    let res = minimize(&p, &p.start(), &cfg).unwrap();
    assert_eq!(res.status, Status::MaxIter);
    assert_eq!(res.total_steps, 5);
}

#[test]
fn near_solution_takes_full_steps() {
    let p = Problem::new(ProblemKind::TestQuad, 30).unwrap();
    let x0 = Vector::from_element(30, 1e-6);
    let cfg = SolverConfig {
        keep_trace: true,
        ..SolverConfig::default()
    };
    let res = minimize(&p, &x0, &cfg).unwrap();
    let trace = res.trace.unwrap();
    assert_eq!(trace[1].step, StepKind::Unconstrained);
}

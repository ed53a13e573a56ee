//! Scalable unconstrained test problems with analytic gradients.
//!
//! Every problem is defined for any admissible `n` and has a standard
//! starting point. Wherever a problem has a known minimum value of zero the
//! formulas avoid `1 − cos` style cancellation so that function differences
//! stay meaningful near the solution.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::par::{self, Execution};
use crate::{Error, Result, Vector};

/// A smooth objective `f: Rⁿ → R` with gradient.
pub trait Objective: Sync {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    fn value(&self, x: &Vector) -> f64;
    fn gradient(&self, x: &Vector) -> Vector;
    fn start(&self) -> Vector;
    fn f_opt_hint(&self) -> Option<f64> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    /// `½ Σ aᵢxᵢ²` with `aᵢ` spread linearly over `[1, κ]`.
    TestQuad,
    ExtRosenbrock,
    /// Chained Rosenbrock coupling consecutive coordinates.
    GenRosenbrock,
    ExtPowell,
    Trigonometric,
    /// `a Σ(xᵢ − 1)² + ((Σxᵢ² − n)/n)²`, minimized at `x = 1`.
    Penalty,
    /// `(x₁ − 1)² + Σᵢ₌₂ i(2xᵢ² − xᵢ₋₁)²`.
    DixonPrice,
    /// `Σ xᵢ² + 0.2 Σ sin²(5πxᵢ/2)`, nonconvex.
    CosineMixture,
    ExtWood,
    ExtBeale,
    BroydenTridiagonal,
    ExtHimmelblau,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 12] = [
        ProblemKind::TestQuad,
        ProblemKind::ExtRosenbrock,
        ProblemKind::GenRosenbrock,
        ProblemKind::ExtPowell,
        ProblemKind::Trigonometric,
        ProblemKind::Penalty,
        ProblemKind::DixonPrice,
        ProblemKind::CosineMixture,
        ProblemKind::ExtWood,
        ProblemKind::ExtBeale,
        ProblemKind::BroydenTridiagonal,
        ProblemKind::ExtHimmelblau,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::TestQuad => "testquad",
            ProblemKind::ExtRosenbrock => "ext_rosenbrock",
            ProblemKind::GenRosenbrock => "gen_rosenbrock",
            ProblemKind::ExtPowell => "ext_powell",
            ProblemKind::Trigonometric => "trigonometric",
            ProblemKind::Penalty => "penalty",
            ProblemKind::DixonPrice => "dixon_price",
            ProblemKind::CosineMixture => "cosine_mixture",
            ProblemKind::ExtWood => "ext_wood",
            ProblemKind::ExtBeale => "ext_beale",
            ProblemKind::BroydenTridiagonal => "broyden_tridiagonal",
            ProblemKind::ExtHimmelblau => "ext_himmelblau",
        }
    }

    /// Block size the dimension must be a multiple of.
    pub fn block(self) -> usize {
        match self {
            ProblemKind::ExtPowell | ProblemKind::ExtWood => 4,
            ProblemKind::ExtRosenbrock | ProblemKind::ExtBeale | ProblemKind::ExtHimmelblau => 2,
            ProblemKind::GenRosenbrock => 2,
            _ => 1,
        }
    }

    /// Largest admissible dimension not exceeding `n`.
    pub fn fit_dim(self, n: usize) -> usize {
        let b = self.block();
        (n / b * b).max(b)
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProblemKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::ProblemNotFound(s.to_string()))
    }
}

/// A registry problem instantiated at a dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub kind: ProblemKind,
    pub n: usize,
    /// Condition number of [`ProblemKind::TestQuad`]; ignored elsewhere.
    pub condition: f64,
}

const PENALTY_A: f64 = 1e-5;

impl Problem {
    pub fn new(kind: ProblemKind, n: usize) -> Result<Self> {
        if n == 0 || !n.is_multiple_of(kind.block()) {
            return Err(Error::InvalidParameter(format!(
                "{kind} needs a positive dimension divisible by {}, got {n}",
                kind.block()
            )));
        }
        Ok(Self {
            kind,
            n,
            condition: n.max(2) as f64,
        })
    }

    pub fn by_name(name: &str, n: usize) -> Result<Self> {
        Self::new(name.parse()?, n)
    }

    pub fn with_condition(mut self, condition: f64) -> Self {
        self.condition = condition;
        self
    }

    fn quad_weight(&self, i: usize) -> f64 {
        if self.n == 1 {
            1.0
        } else {
            1.0 + (self.condition - 1.0) * i as f64 / (self.n - 1) as f64
        }
    }
}

/// Every registered problem at (the nearest admissible size to) `n`.
pub fn registry(n: usize) -> Vec<Problem> {
    ProblemKind::ALL
        .into_iter()
        .map(|k| Problem::new(k, k.fit_dim(n)).expect("fitted dimension"))
        .collect()
}

/// `(Σxᵢ² − n)/n`, summed as `Σ(xᵢ − 1)(xᵢ + 1)` to keep accuracy near `x = 1`.
fn penalty_excess(x: &Vector) -> f64 {
    x.iter().map(|xi| (xi - 1.0) * (xi + 1.0)).sum::<f64>() / x.len() as f64
}

/// `2 sin²(t/2) = 1 − cos t` without cancellation.
fn one_minus_cos(t: f64) -> f64 {
    let h = (0.5 * t).sin();
    2.0 * h * h
}

impl Objective for Problem {
    fn name(&self) -> &str {
        self.kind.name()
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn f_opt_hint(&self) -> Option<f64> {
        match self.kind {
            ProblemKind::Trigonometric | ProblemKind::GenRosenbrock => None,
            _ => Some(0.0),
        }
    }

    fn start(&self) -> Vector {
        let n = self.n;
        match self.kind {
            ProblemKind::TestQuad => Vector::from_element(n, 1.0),
            ProblemKind::ExtRosenbrock | ProblemKind::GenRosenbrock => {
                Vector::from_fn(n, |i, _| if i % 2 == 0 { -1.2 } else { 1.0 })
            }
            ProblemKind::ExtPowell => Vector::from_fn(n, |i, _| [3.0, -1.0, 0.0, 1.0][i % 4]),
            ProblemKind::Trigonometric => Vector::from_element(n, 1.0 / n as f64),
            ProblemKind::Penalty => Vector::from_fn(n, |i, _| (i + 1) as f64 / n as f64),
            ProblemKind::DixonPrice => Vector::from_element(n, 1.0),
            ProblemKind::CosineMixture => {
                Vector::from_fn(n, |i, _| if i % 2 == 0 { 0.15 } else { -0.15 })
            }
            ProblemKind::ExtWood => Vector::from_fn(n, |i, _| [-3.0, -1.0, -3.0, -1.0][i % 4]),
            ProblemKind::ExtBeale => Vector::from_fn(n, |i, _| if i % 2 == 0 { 1.0 } else { 0.8 }),
            ProblemKind::BroydenTridiagonal => Vector::from_element(n, -1.0),
            ProblemKind::ExtHimmelblau => Vector::from_element(n, 1.0),
        }
    }

    fn value(&self, x: &Vector) -> f64 {
        assert_eq!(x.len(), self.n, "dimension mismatch in {}", self.name());
        let n = self.n;
        match self.kind {
            ProblemKind::TestQuad => {
                0.5 * x
                    .iter()
                    .enumerate()
                    .map(|(i, xi)| self.quad_weight(i) * xi * xi)
                    .sum::<f64>()
            }
            ProblemKind::ExtRosenbrock => x
                .as_slice()
                .chunks_exact(2)
                .map(|p| {
                    let a = p[1] - p[0] * p[0];
                    let b = 1.0 - p[0];
                    100.0 * a * a + b * b
                })
                .sum(),
            ProblemKind::GenRosenbrock => (0..n - 1)
                .map(|i| {
                    let a = x[i + 1] - x[i] * x[i];
                    let b = 1.0 - x[i];
                    100.0 * a * a + b * b
                })
                .sum(),
            ProblemKind::ExtPowell => x
                .as_slice()
                .chunks_exact(4)
                .map(|q| {
                    let a = q[0] + 10.0 * q[1];
                    let b = q[2] - q[3];
                    let c = q[1] - 2.0 * q[2];
                    let d = q[0] - q[3];
                    a * a + 5.0 * b * b + c.powi(4) + 10.0 * d.powi(4)
                })
                .sum(),
            ProblemKind::Trigonometric => {
                let base: f64 = x.iter().map(|&t| one_minus_cos(t)).sum();
                trig_residuals(x, base).iter().map(|r| r * r).sum()
            }
            ProblemKind::Penalty => {
                let fit: f64 = x.iter().map(|xi| (xi - 1.0) * (xi - 1.0)).sum();
                let t = penalty_excess(x);
                PENALTY_A * fit + t * t
            }
            ProblemKind::DixonPrice => {
                let head = (x[0] - 1.0) * (x[0] - 1.0);
                head + (1..x.len())
                    .map(|i| {
                        let r = 2.0 * x[i] * x[i] - x[i - 1];
                        (i + 1) as f64 * r * r
                    })
                    .sum::<f64>()
            }
            ProblemKind::CosineMixture => x
                .iter()
                .map(|&t| {
                    let s = (2.5 * std::f64::consts::PI * t).sin();
                    t * t + 0.2 * s * s
                })
                .sum(),
            ProblemKind::ExtWood => x
                .as_slice()
                .chunks_exact(4)
                .map(|q| {
                    let a = q[0] * q[0] - q[1];
                    let b = q[2] * q[2] - q[3];
                    let (u, w) = (q[1] - 1.0, q[3] - 1.0);
                    100.0 * a * a
                        + (q[0] - 1.0).powi(2)
                        + (q[2] - 1.0).powi(2)
                        + 90.0 * b * b
                        + 10.1 * (u * u + w * w)
                        + 19.8 * u * w
                })
                .sum(),
            ProblemKind::ExtBeale => x
                .as_slice()
                .chunks_exact(2)
                .map(|p| {
                    beale_terms(p[0], p[1])
                        .iter()
                        .map(|(r, _, _)| r * r)
                        .sum::<f64>()
                })
                .sum(),
            ProblemKind::BroydenTridiagonal => broyden_residuals(x).iter().map(|r| r * r).sum(),
            ProblemKind::ExtHimmelblau => x
                .as_slice()
                .chunks_exact(2)
                .map(|p| {
                    let a = p[0] * p[0] + p[1] - 11.0;
                    let b = p[0] + p[1] * p[1] - 7.0;
                    a * a + b * b
                })
                .sum(),
        }
    }

    fn gradient(&self, x: &Vector) -> Vector {
        assert_eq!(x.len(), self.n, "dimension mismatch in {}", self.name());
        let n = self.n;
        let mut g = Vector::zeros(n);
        match self.kind {
            ProblemKind::TestQuad => {
                for i in 0..n {
                    g[i] = self.quad_weight(i) * x[i];
                }
            }
            ProblemKind::ExtRosenbrock => {
                for j in (0..n).step_by(2) {
                    let a = x[j + 1] - x[j] * x[j];
                    g[j] = -400.0 * x[j] * a - 2.0 * (1.0 - x[j]);
                    g[j + 1] = 200.0 * a;
                }
            }
            ProblemKind::GenRosenbrock => {
                for i in 0..n - 1 {
                    let a = x[i + 1] - x[i] * x[i];
                    g[i] += -400.0 * x[i] * a - 2.0 * (1.0 - x[i]);
                    g[i + 1] += 200.0 * a;
                }
            }
            ProblemKind::ExtPowell => {
                for j in (0..n).step_by(4) {
                    let a = x[j] + 10.0 * x[j + 1];
                    let b = x[j + 2] - x[j + 3];
                    let c = x[j + 1] - 2.0 * x[j + 2];
                    let d = x[j] - x[j + 3];
                    let c3 = 4.0 * c.powi(3);
                    let d3 = 40.0 * d.powi(3);
                    g[j] = 2.0 * a + d3;
                    g[j + 1] = 20.0 * a + c3;
                    g[j + 2] = 10.0 * b - 2.0 * c3;
                    g[j + 3] = -10.0 * b - d3;
                }
            }
            ProblemKind::Trigonometric => {
                let base: f64 = x.iter().map(|&t| one_minus_cos(t)).sum();
                let r = trig_residuals(x, base);
                let total: f64 = r.iter().sum();
                for j in 0..n {
                    let (s, c) = x[j].sin_cos();
                    g[j] = 2.0 * s * total + 2.0 * r[j] * ((j + 1) as f64 * s - c);
                }
            }
            ProblemKind::Penalty => {
                let t = penalty_excess(x);
                for i in 0..n {
                    g[i] = 2.0 * PENALTY_A * (x[i] - 1.0) + 4.0 * t * x[i] / n as f64;
                }
            }
            ProblemKind::DixonPrice => {
                g[0] = 2.0 * (x[0] - 1.0);
                for i in 1..n {
                    let w = 2.0 * (i + 1) as f64 * (2.0 * x[i] * x[i] - x[i - 1]);
                    g[i] += 4.0 * x[i] * w;
                    g[i - 1] -= w;
                }
            }
            ProblemKind::CosineMixture => {
                let k = 5.0 * std::f64::consts::PI;
                for i in 0..n {
                    g[i] = 2.0 * x[i] + 0.1 * k * (k * x[i]).sin();
                }
            }
            ProblemKind::ExtWood => {
                for j in (0..n).step_by(4) {
                    let a = x[j] * x[j] - x[j + 1];
                    let b = x[j + 2] * x[j + 2] - x[j + 3];
                    let (u, w) = (x[j + 1] - 1.0, x[j + 3] - 1.0);
                    g[j] = 400.0 * a * x[j] + 2.0 * (x[j] - 1.0);
                    g[j + 1] = -200.0 * a + 20.2 * u + 19.8 * w;
                    g[j + 2] = 360.0 * b * x[j + 2] + 2.0 * (x[j + 2] - 1.0);
                    g[j + 3] = -180.0 * b + 20.2 * w + 19.8 * u;
                }
            }
            ProblemKind::ExtBeale => {
                for j in (0..n).step_by(2) {
                    for (r, d0, d1) in beale_terms(x[j], x[j + 1]) {
                        g[j] += 2.0 * r * d0;
                        g[j + 1] += 2.0 * r * d1;
                    }
                }
            }
            ProblemKind::BroydenTridiagonal => {
                let r = broyden_residuals(x);
                for i in 0..n {
                    // ∂rᵢ/∂xᵢ = 3 − 4xᵢ, ∂rᵢ₊₁/∂xᵢ = −1, ∂rᵢ₋₁/∂xᵢ = −2.
                    let mut gi = 2.0 * r[i] * (3.0 - 4.0 * x[i]);
                    if i + 1 < n {
                        gi -= 2.0 * r[i + 1];
                    }
                    if i > 0 {
                        gi -= 4.0 * r[i - 1];
                    }
                    g[i] = gi;
                }
            }
            ProblemKind::ExtHimmelblau => {
                for j in (0..n).step_by(2) {
                    let a = x[j] * x[j] + x[j + 1] - 11.0;
                    let b = x[j] + x[j + 1] * x[j + 1] - 7.0;
                    g[j] = 4.0 * a * x[j] + 2.0 * b;
                    g[j + 1] = 2.0 * a + 4.0 * b * x[j + 1];
                }
            }
        }
        g
    }
}

/// `rᵢ = Σⱼ(1 − cos xⱼ) + i(1 − cos xᵢ) − sin xᵢ`, `i` one-based.
fn trig_residuals(x: &Vector, base: f64) -> Vec<f64> {
    x.iter()
        .enumerate()
        .map(|(i, &t)| base + (i + 1) as f64 * one_minus_cos(t) - t.sin())
        .collect()
}

/// Beale residuals with their partial derivatives.
fn beale_terms(a: f64, b: f64) -> [(f64, f64, f64); 3] {
    let b2 = b * b;
    let b3 = b2 * b;
    [
        (1.5 - a * (1.0 - b), -(1.0 - b), a),
        (2.25 - a * (1.0 - b2), -(1.0 - b2), 2.0 * a * b),
        (2.625 - a * (1.0 - b3), -(1.0 - b3), 3.0 * a * b2),
    ]
}

/// `rᵢ = (3 − 2xᵢ)xᵢ − xᵢ₋₁ − 2xᵢ₊₁ + 1` with zero boundary values.
fn broyden_residuals(x: &Vector) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let prev = if i > 0 { x[i - 1] } else { 0.0 };
            let next = if i + 1 < n { x[i + 1] } else { 0.0 };
            (3.0 - 2.0 * x[i]) * x[i] - prev - 2.0 * next + 1.0
        })
        .collect()
}

/// Worst coordinate error of the analytic gradient against central
/// differences with steps `hᵢ = h·max(1, |xᵢ|)`, each error measured
/// relative to `max(1, |gᵢ|)`.
pub fn fd_check<O: Objective + ?Sized>(problem: &O, x: &Vector, h: f64) -> f64 {
    fd_check_with(problem, x, h, Execution::default())
}

/// [`fd_check`] with an explicit execution mode for the coordinate loop.
pub fn fd_check_with<O: Objective + ?Sized>(
    problem: &O,
    x: &Vector,
    h: f64,
    exec: Execution,
) -> f64 {
    assert!(h > 0.0, "finite-difference step must be positive");
    let g = problem.gradient(x);
    let errors = par::map_range(x.len(), exec, |i| {
        let hi = h * x[i].abs().max(1.0);
        let mut xp = x.clone();
        xp[i] += hi;
        let fp = problem.value(&xp);
        xp[i] = x[i] - hi;
        let fm = problem.value(&xp);
        let fd = (fp - fm) / (2.0 * hi);
        (fd - g[i]).abs() / g[i].abs().max(1.0)
    });
    errors.into_iter().fold(0.0, f64::max)
}

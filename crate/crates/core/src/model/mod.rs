//! Declarative description of the parabolic problem
//!
//! ```text
//! u_t = a(t,x) u_xx + b(t,x) u_x + c(t,x) u + f(t,x),   x in (0, 1)
//! ```
//!
//! with boundary conditions at both ends and an initial profile. Coefficients
//! may depend on the state pointwise or through non-local functionals of the
//! whole profile; they are always evaluated on a concrete [`GridProfile`].

mod boundary;
mod field;
mod functional;
mod signal;
mod state_fn;

use serde::Serialize;

pub use boundary::{BoundaryCondition, Side};
pub use field::{CoefficientField, SeparableTerm, SpatialShape};
pub use functional::{Functional, FunctionalTerm, ProfileMeasure};
pub use signal::DisturbanceSignal;
pub use state_fn::StateFn;

use crate::error::{Error, Result};
use crate::grid::{GridProfile, SpatialGrid};

/// Number of time points in the validation probe lattice.
pub const PROBE_TIMES: usize = 33;

#[derive(Debug, Clone)]
pub struct PdeProblem {
    pub a: CoefficientField,
    pub b: CoefficientField,
    pub c: CoefficientField,
    pub f: CoefficientField,
    pub left: BoundaryCondition,
    pub right: BoundaryCondition,
    pub horizon: f64,
    pub initial: GridProfile,
}

impl PdeProblem {
    /// Heat equation `u_t = u_xx` with homogeneous Dirichlet data.
    pub fn heat(initial: GridProfile, horizon: f64) -> Self {
        Self {
            a: CoefficientField::constant(1.0),
            b: CoefficientField::zero(),
            c: CoefficientField::zero(),
            f: CoefficientField::zero(),
            left: BoundaryCondition::dirichlet(DisturbanceSignal::Zero),
            right: BoundaryCondition::dirichlet(DisturbanceSignal::Zero),
            horizon,
            initial,
        }
    }

    pub fn grid(&self) -> SpatialGrid {
        self.initial.grid()
    }

    pub fn boundary(&self, side: Side) -> &BoundaryCondition {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }
}

/// Per-node coefficient values at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientArrays {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub f: Vec<f64>,
}

impl CoefficientArrays {
    pub fn zeros(n_nodes: usize) -> Self {
        Self {
            a: vec![0.0; n_nodes],
            b: vec![0.0; n_nodes],
            c: vec![0.0; n_nodes],
            f: vec![0.0; n_nodes],
        }
    }
}

/// Evaluates `a, b, c, f` at every node for the state `profile` at time `t`.
pub fn evaluate_coefficients(
    problem: &PdeProblem,
    t: f64,
    profile: &GridProfile,
) -> Result<CoefficientArrays> {
    let mut out = CoefficientArrays::zeros(profile.grid().n_nodes());
    evaluate_coefficients_into(problem, t, profile, &mut out)?;
    Ok(out)
}

/// Buffer-reusing form of [`evaluate_coefficients`].
pub fn evaluate_coefficients_into(
    problem: &PdeProblem,
    t: f64,
    profile: &GridProfile,
    out: &mut CoefficientArrays,
) -> Result<()> {
    let grid = profile.grid();
    if grid != problem.grid() {
        return Err(Error::InvalidGrid(format!(
            "profile has {} cells, problem has {}",
            grid.n_cells(),
            problem.grid().n_cells()
        )));
    }
    if !(t >= 0.0 && t <= problem.horizon * (1.0 + 1e-12)) {
        return Err(Error::InvalidConfig(format!(
            "time {t} outside [0, {}]",
            problem.horizon
        )));
    }
    let fields: [(&'static str, &CoefficientField, &mut Vec<f64>); 4] = [
        ("a", &problem.a, &mut out.a),
        ("b", &problem.b, &mut out.b),
        ("c", &problem.c, &mut out.c),
        ("f", &problem.f, &mut out.f),
    ];
    for (name, field, buf) in fields {
        field.evaluate(t, profile, buf)?;
        if let Some(i) = buf.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonfiniteCoefficient {
                name,
                t,
                x: grid.x(i),
            });
        }
    }
    if let Some(i) = out.a.iter().position(|&v| v < 0.0) {
        return Err(Error::NonpositiveDiffusion {
            t,
            x: grid.x(i),
            value: out.a[i],
        });
    }
    Ok(())
}

/// One violated admissibility condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "issue", rename_all = "snake_case")]
pub enum ValidationIssue {
    NonpositiveDiffusion { t: f64, x: f64, value: f64 },
    NonfiniteCoefficient { name: String, t: f64, x: f64 },
    InvalidRobinParameter { side: Side, mu: f64 },
    NegativeBoundaryFunctional { side: Side, value: f64 },
    InvalidSignal { location: String, message: String },
    InvalidHorizon { horizon: f64 },
    EvaluationFailed { t: f64, message: String },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_admissible(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn has_nonpositive_diffusion(&self) -> bool {
        self.issues
            .iter()
            .any(|i| matches!(i, ValidationIssue::NonpositiveDiffusion { .. }))
    }

    pub fn has_invalid_robin(&self) -> bool {
        self.issues
            .iter()
            .any(|i| matches!(i, ValidationIssue::InvalidRobinParameter { .. }))
    }
}

/// Smoke-screens a problem on a lattice of [`PROBE_TIMES`] times times the
/// spatial grid, with state-dependent coefficients evaluated on the initial
/// profile. Only the first diffusion or finiteness failure per time point is
/// reported.
pub fn validate_problem(problem: &PdeProblem) -> ValidationReport {
    let mut issues = Vec::new();
    if !(problem.horizon.is_finite() && problem.horizon > 0.0) {
        issues.push(ValidationIssue::InvalidHorizon {
            horizon: problem.horizon,
        });
        return ValidationReport { issues };
    }

    for (side, bc) in [(Side::Left, &problem.left), (Side::Right, &problem.right)] {
        if let Err(e) = bc.signal().validate() {
            issues.push(ValidationIssue::InvalidSignal {
                location: format!("{side} boundary"),
                message: e.to_string(),
            });
        }
        match bc {
            BoundaryCondition::Robin { mu, .. } if !(*mu > 0.0) => {
                issues.push(ValidationIssue::InvalidRobinParameter { side, mu: *mu });
            }
            BoundaryCondition::NonlocalRobin { beta, .. } => {
                let value = beta.eval(&problem.initial);
                if value < 0.0 || beta.range().0 < 0.0 {
                    issues.push(ValidationIssue::NegativeBoundaryFunctional { side, value });
                }
            }
            _ => {}
        }
    }

    let grid = problem.grid();
    let mut buf = CoefficientArrays::zeros(grid.n_nodes());
    for k in 0..PROBE_TIMES {
        let t = problem.horizon * k as f64 / (PROBE_TIMES - 1) as f64;
        match evaluate_coefficients_into(problem, t, &problem.initial, &mut buf) {
            Ok(()) => {}
            Err(Error::NonpositiveDiffusion { t, x, value }) => {
                issues.push(ValidationIssue::NonpositiveDiffusion { t, x, value })
            }
            Err(Error::NonfiniteCoefficient { name, t, x }) => {
                issues.push(ValidationIssue::NonfiniteCoefficient {
                    name: name.to_string(),
                    t,
                    x,
                })
            }
            Err(e) => issues.push(ValidationIssue::EvaluationFailed {
                t,
                message: e.to_string(),
            }),
        }
    }
    ValidationReport { issues }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> SpatialGrid {
        SpatialGrid::new(n).unwrap()
    }

    #[test]
    fn heat_coefficients_are_constant() {
        let p = GridProfile::from_fn(grid(16), |x| x * (1.0 - x)).unwrap();
        let problem = PdeProblem::heat(p.clone(), 1.0);
        let arrays = evaluate_coefficients(&problem, 0.3, &p).unwrap();
        assert!(arrays.a.iter().all(|&v| v == 1.0));
        for v in [&arrays.b, &arrays.c, &arrays.f] {
            assert!(v.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn nonlocal_kappa_on_zero_profile() {
        let zero = GridProfile::zeros(grid(16));
        let mut problem = PdeProblem::heat(zero.clone(), 1.0);
        problem.a = CoefficientField::NonLocal {
            functional: Functional::constant(0.5).with_term(1.0, ProfileMeasure::SupNormSquared),
        };
        let arrays = evaluate_coefficients(&problem, 0.0, &zero).unwrap();
        assert!(arrays.a.iter().all(|&v| v == 0.5));
        assert!(arrays.b.iter().chain(&arrays.c).all(|&v| v == 0.0));
    }

    #[test]
    fn pointwise_reaction_sin_of_one() {
        let ones = GridProfile::from_fn(grid(8), |_| 1.0).unwrap();
        let mut problem = PdeProblem::heat(ones.clone(), 1.0);
        problem.c = CoefficientField::state(StateFn::Sin {
            amplitude: 1.0,
            frequency: 1.0,
            offset: 0.0,
        });
        let arrays = evaluate_coefficients(&problem, 0.0, &ones).unwrap();
        // Taylor oracle for sin(1), summed to 25 terms.
        let oracle: f64 = (0..25)
            .map(|k| {
                let n = 2 * k + 1;
                let fact: f64 = (1..=n).map(|j| j as f64).product();
                (-1.0f64).powi(k) / fact
            })
            .sum();
        for &c in &arrays.c {
            assert!((c - oracle).abs() < 1e-15);
        }
    }

    #[test]
    fn negative_diffusion_is_an_error_and_reported() {
        let p = GridProfile::zeros(grid(8));
        let mut problem = PdeProblem::heat(p.clone(), 1.0);
        problem.a = CoefficientField::constant(-1.0);
        assert!(matches!(
            evaluate_coefficients(&problem, 0.0, &p),
            Err(Error::NonpositiveDiffusion { .. })
        ));
        let report = validate_problem(&problem);
        assert!(report.has_nonpositive_diffusion());
        assert_eq!(report.issues.len(), PROBE_TIMES);
    }

    #[test]
    fn heat_problem_is_admissible() {
        let p = GridProfile::from_fn(grid(32), |x| (std::f64::consts::PI * x).sin()).unwrap();
        assert!(validate_problem(&PdeProblem::heat(p, 1.0)).is_admissible());
    }

    #[test]
    fn robin_mu_zero_is_reported() {
        let p = GridProfile::zeros(grid(8));
        let mut problem = PdeProblem::heat(p, 1.0);
        problem.left = BoundaryCondition::robin(0.0, 1.0, DisturbanceSignal::Zero);
        let report = validate_problem(&problem);
        assert!(report.has_invalid_robin());
        assert!(!report.has_nonpositive_diffusion());
    }

    #[test]
    fn nonfinite_coefficient_is_an_error() {
        let p = GridProfile::zeros(grid(8));
        let mut problem = PdeProblem::heat(p.clone(), 1.0);
        problem.f = CoefficientField::constant(f64::INFINITY);
        assert!(matches!(
            evaluate_coefficients(&problem, 0.0, &p),
            Err(Error::NonfiniteCoefficient { name: "f", .. })
        ));
    }

    #[test]
    fn evaluation_is_deterministic() {
        let p = GridProfile::from_fn(grid(64), |x| (7.0 * x).sin() * 3.0).unwrap();
        let mut problem = PdeProblem::heat(p.clone(), 1.0);
        problem.a = CoefficientField::state(StateFn::Tanh {
            amplitude: 0.75,
            scale: 1.3,
            offset: 1.25,
        });
        problem.f = CoefficientField::separable(
            DisturbanceSignal::sinusoid(0.3, 2.0),
            SpatialShape::Sine {
                amplitude: 1.0,
                wavenumber: 3.0,
                phase: 0.1,
            },
        );
        let first = evaluate_coefficients(&problem, 0.25, &p).unwrap();
        let second = evaluate_coefficients(&problem, 0.25, &p).unwrap();
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&first.a), bits(&second.a));
        assert_eq!(bits(&first.f), bits(&second.f));
    }
}

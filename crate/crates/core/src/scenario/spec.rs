use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::{default_tolerance, BoundaryTermSpec};
use crate::certificate::{
    check_certificate, maximize_decay_rate, synthesize_cosine_certificate, synthesize_sine_certificate,
    CoefficientBounds, Interval, WeightCertificate, WeightFamily, WeightFunction, DEFAULT_CHECK_GRID,
};
use crate::error::{Error, Result};
use crate::grid::{GridProfile, SpatialGrid};
use crate::model::{BoundaryCondition, CoefficientField, DisturbanceSignal, PdeProblem, SpatialShape, StateFn};
use crate::solver::{Scheme, SolverConfig};

/// Fraction of `pi^2` kept as headroom when the sine certificate picks its own `sigma`.
pub const SINE_HEADROOM: f64 = 0.02;

/// One runnable scenario, normally read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// Certificate synthesis is expected to fail; the run passes when it does.
    #[serde(default)]
    pub expect_infeasible: bool,
    pub problem: ProblemSpec,
    pub certificate: CertificateSpec,
    #[serde(default)]
    pub bounds: BoundsSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub transform: Option<TransformSection>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub n_cells: usize,
    pub horizon: f64,
    /// Summed to form `u(0, x)`; empty means zero.
    #[serde(default)]
    pub initial: Vec<SpatialShape>,
    #[serde(default = "unit_diffusion")]
    pub a: CoefficientField,
    #[serde(default)]
    pub b: CoefficientField,
    #[serde(default)]
    pub c: CoefficientField,
    #[serde(default)]
    pub f: CoefficientField,
    #[serde(default = "homogeneous_dirichlet")]
    pub left: BoundaryCondition,
    #[serde(default = "homogeneous_dirichlet")]
    pub right: BoundaryCondition,
}

fn unit_diffusion() -> CoefficientField {
    CoefficientField::constant(1.0)
}

fn homogeneous_dirichlet() -> BoundaryCondition {
    BoundaryCondition::dirichlet(DisturbanceSignal::Zero)
}

impl ProblemSpec {
    pub fn build(&self) -> Result<PdeProblem> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidConfig(format!("horizon {} must be > 0", self.horizon)));
        }
        let grid = SpatialGrid::new(self.n_cells)?;
        let initial = GridProfile::from_fn(grid, |x| self.initial.iter().map(|s| s.eval(x)).sum())?;
        Ok(PdeProblem {
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.clone(),
            f: self.f.clone(),
            left: self.left.clone(),
            right: self.right.clone(),
            horizon: self.horizon,
            initial,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum CertificateSpec {
    /// `sin(theta x + phi)` from the reaction-ratio bound. Without `sigma`
    /// the largest value with `sup (sigma + c) / a <= (1 - SINE_HEADROOM) pi^2`
    /// is used.
    Sine {
        #[serde(default)]
        sigma: Option<f64>,
    },
    /// Best member of a weight family's parameter lattice.
    Search { family: WeightFamily },
    /// `cos(theta x)` for Robin data at `x = 1`, `a >= kappa_star`, `b = c = 0`,
    /// with `theta tan(theta)` just below `lambda_fraction * lambda1`. Smaller
    /// fractions trade decay rate for a larger `lambda1 cos(theta) - theta sin(theta)`.
    CosineRobin {
        kappa_star: f64,
        lambda1: f64,
        #[serde(default = "one")]
        lambda_fraction: f64,
    },
    /// `sin((pi - 2 phi) x + phi)` with `sigma = kappa_star (pi - 2 phi)^2` for
    /// the transformed problem; `phi` comes from the transform section.
    Kirchhoff,
    Explicit {
        weight: WeightFunction,
        sigma: f64,
        #[serde(default)]
        margin: f64,
        #[serde(default = "default_check_grid")]
        grid: usize,
    },
}

fn one() -> f64 {
    1.0
}

fn default_check_grid() -> usize {
    DEFAULT_CHECK_GRID
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSpec {
    /// Absolute decay rates.
    #[serde(default)]
    pub zetas: Vec<f64>,
    /// Decay rates as fractions of the certificate's `sigma`.
    #[serde(default)]
    pub zeta_fractions: Vec<f64>,
    /// Derived from the boundary conditions when absent.
    #[serde(default)]
    pub boundary_terms: Option<BoundaryTermSpec>,
    /// Defaults to [`default_tolerance`] of the grid.
    #[serde(default)]
    pub tol_bound: Option<f64>,
}

impl Default for BoundsSpec {
    fn default() -> Self {
        Self {
            zetas: Vec::new(),
            zeta_fractions: vec![0.0, 0.5, 0.9],
            boundary_terms: None,
            tol_bound: None,
        }
    }
}

impl BoundsSpec {
    /// Sorted, de-duplicated decay rates for a certificate with rate `sigma`.
    pub fn resolve_zetas(&self, sigma: f64) -> Vec<f64> {
        let mut zetas: Vec<f64> = self
            .zetas
            .iter()
            .copied()
            .chain(self.zeta_fractions.iter().map(|f| f * sigma))
            .collect();
        zetas.sort_by(f64::total_cmp);
        zetas.dedup();
        zetas
    }

    pub fn tolerance(&self, grid: SpatialGrid) -> f64 {
        self.tol_bound.unwrap_or_else(|| default_tolerance(grid))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default = "default_cfl")]
    pub cfl_safety: f64,
    /// Number of output intervals on `[0, horizon]`.
    #[serde(default = "default_outputs")]
    pub outputs: usize,
    #[serde(default)]
    pub max_steps: Option<usize>,
    #[serde(default)]
    pub max_dt: Option<f64>,
}

fn default_cfl() -> f64 {
    0.4
}

fn default_outputs() -> usize {
    20
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            scheme: Scheme::default(),
            cfl_safety: default_cfl(),
            outputs: default_outputs(),
            max_steps: None,
            max_dt: None,
        }
    }
}

impl SolverSpec {
    pub fn config(&self, horizon: f64) -> SolverConfig {
        let mut config = SolverConfig::uniform(self.scheme, horizon, self.outputs);
        config.cfl_safety = self.cfl_safety;
        config.max_dt = self.max_dt;
        if let Some(steps) = self.max_steps {
            config.max_steps = steps;
        }
        config
    }
}

/// Tabulation domain and angle for problems of the form
/// `u_t = kappa(u) u_xx + g(u) u_x^2` with Dirichlet data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformSection {
    pub u_lo: f64,
    pub u_hi: f64,
    pub phi: f64,
}

impl TransformSection {
    /// `(kappa, g, kappa_star)` read off the problem's coefficients.
    pub fn functions(&self, problem: &PdeProblem) -> Result<(StateFn, StateFn, f64)> {
        let CoefficientField::State { function: kappa } = &problem.a else {
            return Err(Error::InvalidConfig(
                "the transform needs a state-dependent diffusion a = kappa(u)".into(),
            ));
        };
        let g = match &problem.b {
            CoefficientField::StateTimesGradient { function } => function.clone(),
            b if b.is_zero() => StateFn::constant(0.0),
            _ => {
                return Err(Error::InvalidConfig(
                    "the transform needs b = g(u) u_x or b = 0".into(),
                ))
            }
        };
        let kappa_star = kappa.range().0;
        if !(kappa_star > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "kappa has lower bound {kappa_star}, which is not positive"
            )));
        }
        if !(self.phi > 0.0 && self.phi < 0.5 * PI) {
            return Err(Error::InvalidConfig(format!("phi {} outside (0, pi/2)", self.phi)));
        }
        Ok((kappa.clone(), g, kappa_star))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Directory for the JSON report and CSV traces.
    #[serde(default)]
    pub directory: Option<String>,
}

/// A certificate together with the bounds it was checked against.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedCertificate {
    pub certificate: WeightCertificate,
    pub bounds: CoefficientBounds,
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Scenario(e.to_string()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Scenario(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// Builds the problem the envelopes are evaluated on: the transformed
    /// problem when a transform section is present.
    pub fn build_problem(&self) -> Result<PdeProblem> {
        self.problem.build()
    }

    /// Resolves or synthesizes the certificate for `problem`.
    pub fn resolve_certificate(&self, problem: &PdeProblem) -> Result<ResolvedCertificate> {
        let from_problem = || CoefficientBounds::from_problem(problem);
        let (certificate, bounds) = match &self.certificate {
            CertificateSpec::Sine { sigma } => {
                let bounds = from_problem()?;
                let sigma = match sigma {
                    Some(s) => *s,
                    None => largest_sine_sigma(&bounds)?,
                };
                (synthesize_sine_certificate(&bounds, sigma)?, bounds)
            }
            CertificateSpec::Search { family } => {
                let bounds = from_problem()?;
                (maximize_decay_rate(&bounds, *family)?, bounds)
            }
            CertificateSpec::CosineRobin {
                kappa_star,
                lambda1,
                lambda_fraction,
            } => {
                if !(*lambda_fraction > 0.0 && *lambda_fraction <= 1.0) {
                    return Err(Error::InvalidConfig(format!(
                        "lambda_fraction {lambda_fraction} outside (0, 1]"
                    )));
                }
                let synth = synthesize_cosine_certificate(*kappa_star, lambda1 * lambda_fraction)?;
                let bounds = from_problem()?;
                let cert = recheck(&bounds, synth.certificate)?;
                (cert, bounds)
            }
            CertificateSpec::Kirchhoff => {
                let section = self.transform.as_ref().ok_or_else(|| {
                    Error::InvalidConfig("the kirchhoff certificate needs a transform section".into())
                })?;
                if !(section.phi > 0.0 && section.phi < 0.5 * PI) {
                    return Err(Error::InvalidConfig(format!("phi {} outside (0, pi/2)", section.phi)));
                }
                // `problem` is the transformed one here; its diffusion is kappa(gamma^{-1}(w)).
                let kappa_star = problem.a.range().0;
                if !(kappa_star > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "diffusion lower bound {kappa_star} is not positive"
                    )));
                }
                let theta = PI - 2.0 * section.phi;
                let bounds = CoefficientBounds::new(
                    Interval::new(kappa_star, f64::INFINITY),
                    Interval::point(0.0),
                    Interval::point(0.0),
                )?;
                let sigma = kappa_star * theta * theta * (1.0 - 8.0 * f64::EPSILON);
                let weight = WeightFunction::sine(theta, section.phi);
                let cert = check_certificate(&bounds, &weight, sigma, 0.0, DEFAULT_CHECK_GRID)?;
                (require_verified(cert)?, bounds)
            }
            CertificateSpec::Explicit {
                weight,
                sigma,
                margin,
                grid,
            } => {
                let bounds = from_problem()?;
                let cert = check_certificate(&bounds, weight, *sigma, *margin, *grid)?;
                (require_verified(cert)?, bounds)
            }
        };
        Ok(ResolvedCertificate { certificate, bounds })
    }

    /// The boundary-term mode, explicit or derived from the boundary conditions.
    pub fn boundary_terms(&self) -> Result<BoundaryTermSpec> {
        if let Some(spec) = &self.bounds.boundary_terms {
            return Ok(spec.clone());
        }
        derive_boundary_terms(&self.problem.left, &self.problem.right)
    }
}

fn require_verified(cert: WeightCertificate) -> Result<WeightCertificate> {
    if cert.is_verified() {
        Ok(cert)
    } else {
        Err(Error::InfeasibleCertificate(format!(
            "{:?} certificate with sigma = {} ({:?}, worst residual {:e} at x = {})",
            cert.weight.family_name(),
            cert.sigma,
            cert.verdict,
            cert.worst_point.residual,
            cert.worst_point.x
        )))
    }
}

/// Re-checks a synthesized certificate against the problem's own bounds.
fn recheck(bounds: &CoefficientBounds, cert: WeightCertificate) -> Result<WeightCertificate> {
    require_verified(check_certificate(
        bounds,
        &cert.weight,
        cert.sigma,
        cert.margin,
        cert.check_grid_size,
    )?)
}

/// Largest `sigma` with `(sigma + c_hi) / a_lo = (1 - SINE_HEADROOM) pi^2`.
pub fn largest_sine_sigma(bounds: &CoefficientBounds) -> Result<f64> {
    let sigma = (1.0 - SINE_HEADROOM) * PI * PI * bounds.a.lo - bounds.c.hi;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InfeasibleCertificate(format!(
            "no positive sigma keeps sup (sigma + c) / a below pi^2 (a >= {}, c <= {})",
            bounds.a.lo, bounds.c.hi
        )));
    }
    Ok(sigma)
}

/// Boundary-term mode matching a pair of boundary conditions.
pub fn derive_boundary_terms(left: &BoundaryCondition, right: &BoundaryCondition) -> Result<BoundaryTermSpec> {
    use BoundaryCondition as Bc;
    Ok(match (left, right) {
        (Bc::Dirichlet { .. }, Bc::Dirichlet { .. }) => BoundaryTermSpec::Dirichlet,
        (Bc::Robin { mu, lambda, .. }, Bc::Dirichlet { .. }) => BoundaryTermSpec::RobinLeft {
            mu0: *mu,
            lambda0: *lambda,
        },
        (Bc::Dirichlet { .. }, Bc::Robin { mu, lambda, .. }) => BoundaryTermSpec::RobinRight {
            mu1: *mu,
            lambda1: *lambda,
        },
        (
            Bc::Robin {
                mu: mu0,
                lambda: lambda0,
                ..
            },
            Bc::Robin {
                mu: mu1,
                lambda: lambda1,
                ..
            },
        ) => BoundaryTermSpec::RobinBoth {
            mu0: *mu0,
            lambda0: *lambda0,
            mu1: *mu1,
            lambda1: *lambda1,
        },
        (
            Bc::NonlocalRobin {
                lambda: lambda0,
                beta: beta0,
                ..
            },
            Bc::NonlocalRobin {
                lambda: lambda1,
                beta: beta1,
                ..
            },
        ) => BoundaryTermSpec::Nonlocal {
            lambda0: *lambda0,
            lambda1: *lambda1,
            beta0: beta0.clone(),
            beta1: beta1.clone(),
        },
        _ => {
            return Err(Error::InvalidConfig(
                "no default boundary-term mode for this pair of conditions; set bounds.boundary_terms".into(),
            ))
        }
    })
}

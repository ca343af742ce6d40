//! Weight certificates `(eta, sigma)` for the differential inequality
//!
//! ```text
//! a(t,x) eta''(x) + b(t,x) eta'(x) + (sigma + c(t,x)) eta(x) <= 0
//! ```
//!
//! decided on a check grid against interval bounds of the coefficients, plus
//! the boundary sign conditions used with Robin data, synthesis rules for the
//! sine and cosine families and a lattice search for the largest decay rate.

mod weight;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use weight::{CubicTable, WeightFunction};

use crate::error::{Error, Result};
use crate::model::PdeProblem;

/// Smallest accepted check grid.
pub const MIN_CHECK_GRID: usize = 64;
/// Check grid used by synthesis and search.
pub const DEFAULT_CHECK_GRID: usize = 512;
/// Number of parameter points per family in [`maximize_decay_rate`].
pub const SEARCH_LATTICE: usize = 512;
/// Relative slack `eps_theta` pushing sine synthesis inside the feasible set.
pub const SINE_SLACK: f64 = 1e-3;
/// Relative slack `eps_b` in the cosine constraint `theta tan(theta) <= lambda1 (1 - eps_b)`.
pub const COSINE_SLACK: f64 = 1e-3;

/// Closed interval `[lo, hi]`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    /// `max_{s in [lo, hi]} s * v`, with `0 * inf = 0`.
    pub fn max_product(&self, v: f64) -> f64 {
        if v > 0.0 {
            self.hi * v
        } else if v < 0.0 {
            self.lo * v
        } else {
            0.0
        }
    }

    fn is_valid(&self) -> bool {
        !self.lo.is_nan() && !self.hi.is_nan() && self.lo <= self.hi
    }
}

/// Interval enclosures of `a`, `b`, `c` over the whole `(t, x, state)` domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientBounds {
    pub a: Interval,
    pub b: Interval,
    pub c: Interval,
}

impl CoefficientBounds {
    pub fn new(a: Interval, b: Interval, c: Interval) -> Result<Self> {
        let bounds = Self { a, b, c };
        bounds.validate()?;
        Ok(bounds)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, iv) in [("a", self.a), ("b", self.b), ("c", self.c)] {
            if !iv.is_valid() {
                return Err(Error::InvalidBounds(format!(
                    "{name} interval [{}, {}] is empty",
                    iv.lo, iv.hi
                )));
            }
        }
        if !(self.a.lo >= 0.0) {
            return Err(Error::InvalidBounds(format!(
                "diffusion lower bound {} is negative",
                self.a.lo
            )));
        }
        Ok(())
    }

    /// Enclosures derived from the declared coefficient fields.
    pub fn from_problem(problem: &PdeProblem) -> Result<Self> {
        let (alo, ahi) = problem.a.range();
        let (blo, bhi) = problem.b.range();
        let (clo, chi) = problem.c.range();
        Self::new(
            Interval::new(alo, ahi),
            Interval::new(blo, bhi),
            Interval::new(clo, chi),
        )
    }

    /// `sup (sigma + c) / a` over the box, for advection-free bounds.
    pub fn reaction_ratio(&self, sigma: f64) -> Result<f64> {
        if self.b.lo != 0.0 || self.b.hi != 0.0 {
            return Err(Error::InvalidBounds(
                "reaction ratio needs b = 0".into(),
            ));
        }
        let top = sigma + self.c.hi;
        if top >= 0.0 {
            if !(self.a.lo > 0.0) {
                return Err(Error::InvalidBounds(
                    "reaction ratio needs a strictly positive diffusion bound".into(),
                ));
            }
            Ok(top / self.a.lo)
        } else if self.a.hi.is_infinite() {
            Ok(0.0)
        } else {
            Ok(top / self.a.hi)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Verified,
    Refuted,
    Inconclusive,
}

/// How the worst residual is compared with `-margin`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `R <= -margin` verifies; `R > 0` refutes.
    #[default]
    NonStrict,
    /// `R < -margin` verifies; `R >= 0` refutes.
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstPoint {
    pub x: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightCertificate {
    pub weight: WeightFunction,
    pub sigma: f64,
    pub margin: f64,
    pub check_grid_size: usize,
    #[serde(default)]
    pub comparison: Comparison,
    pub verdict: Verdict,
    pub worst_point: WorstPoint,
    /// `min eta` over the check grid.
    pub min_weight: f64,
}

impl WeightCertificate {
    pub fn is_verified(&self) -> bool {
        self.verdict == Verdict::Verified
    }
}

/// Corner-maximized residual at `x`, without the `sigma eta` term.
fn base_residual(bounds: &CoefficientBounds, weight: &WeightFunction, x: f64) -> (f64, f64) {
    let eta = weight.value(x);
    let base = bounds.a.max_product(weight.second_derivative(x))
        + bounds.b.max_product(weight.first_derivative(x))
        + bounds.c.max_product(eta);
    (base, eta)
}

/// Decides the certificate inequality on `grid_size + 1` equispaced nodes
/// with non-strict comparison.
pub fn check_certificate(
    bounds: &CoefficientBounds,
    weight: &WeightFunction,
    sigma: f64,
    margin: f64,
    grid_size: usize,
) -> Result<WeightCertificate> {
    check_certificate_with(bounds, weight, sigma, margin, grid_size, Comparison::NonStrict)
}

pub fn check_certificate_with(
    bounds: &CoefficientBounds,
    weight: &WeightFunction,
    sigma: f64,
    margin: f64,
    grid_size: usize,
    comparison: Comparison,
) -> Result<WeightCertificate> {
    if grid_size < MIN_CHECK_GRID {
        return Err(Error::InvalidConfig(format!(
            "check grid {grid_size} is below {MIN_CHECK_GRID}"
        )));
    }
    if !(margin >= 0.0 && margin.is_finite()) {
        return Err(Error::InvalidConfig(format!("margin {margin} must be >= 0")));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidConfig(format!("sigma {sigma} must be > 0")));
    }
    bounds.validate()?;
    weight.validate()?;

    let mut worst = WorstPoint {
        x: 0.0,
        residual: f64::NEG_INFINITY,
    };
    let mut min_weight = f64::INFINITY;
    for j in 0..=grid_size {
        let x = j as f64 / grid_size as f64;
        let (base, eta) = base_residual(bounds, weight, x);
        if !(eta > 0.0) {
            return Err(Error::InvalidWeight(format!("eta({x}) = {eta}")));
        }
        min_weight = min_weight.min(eta);
        let residual = base + sigma * eta;
        // NaN residuals (inf - inf) count as refuting.
        if residual > worst.residual || residual.is_nan() {
            worst = WorstPoint { x, residual };
            if residual.is_nan() {
                break;
            }
        }
    }
    let r = worst.residual;
    let verdict = match comparison {
        _ if r.is_nan() => Verdict::Refuted,
        Comparison::NonStrict if r <= -margin => Verdict::Verified,
        Comparison::NonStrict if r > 0.0 => Verdict::Refuted,
        Comparison::Strict if r < -margin => Verdict::Verified,
        Comparison::Strict if r >= 0.0 => Verdict::Refuted,
        _ => Verdict::Inconclusive,
    };
    Ok(WeightCertificate {
        weight: weight.clone(),
        sigma,
        margin,
        check_grid_size: grid_size,
        comparison,
        verdict,
        worst_point: worst,
        min_weight,
    })
}

/// Lipschitz constant of the residual `x -> R(x)` for finite bounds.
pub fn residual_lipschitz(bounds: &CoefficientBounds, weight: &WeightFunction, sigma: f64) -> f64 {
    let mag = |iv: Interval| iv.lo.abs().max(iv.hi.abs());
    let d1 = (0..=1024)
        .map(|k| weight.first_derivative(k as f64 / 1024.0).abs())
        .fold(0.0, f64::max);
    let d2 = (0..=1024)
        .map(|k| weight.second_derivative(k as f64 / 1024.0).abs())
        .fold(0.0, f64::max);
    // The scans undersample by at most one grid spacing times the next derivative.
    let d3 = weight.third_derivative_bound();
    let d2 = d2 + d3 / 1024.0;
    let d1 = d1 + d2 / 1024.0;
    mag(bounds.a) * d3 + mag(bounds.b) * d2 + (sigma.abs() + mag(bounds.c)) * d1
}

/// Values of the Robin sign conditions for a weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySignReport {
    /// `mu0 eta'(0) - lambda0 eta(0)`
    pub left_value: f64,
    /// `mu1 eta'(1) + lambda1 eta(1)`
    pub right_value: f64,
    /// `left_value < 0`
    pub left_holds: bool,
    /// `right_value > 0`
    pub right_holds: bool,
    pub both_hold: bool,
    pub left_denominator: f64,
    pub right_denominator: f64,
}

pub fn check_boundary_signs(
    weight: &WeightFunction,
    mu0: f64,
    lambda0: f64,
    mu1: f64,
    lambda1: f64,
) -> BoundarySignReport {
    let left_value = mu0 * weight.first_derivative(0.0) - lambda0 * weight.value(0.0);
    let right_value = mu1 * weight.first_derivative(1.0) + lambda1 * weight.value(1.0);
    let left_holds = left_value < 0.0;
    let right_holds = right_value > 0.0;
    BoundarySignReport {
        left_value,
        right_value,
        left_holds,
        right_holds,
        both_hold: left_holds && right_holds,
        left_denominator: left_value.abs(),
        right_denominator: right_value,
    }
}

/// `theta` used when the reaction ratio bound is non-positive.
const FLAT_SINE_THETA: f64 = 0.01;

/// Sine parameters `(theta, phi)` with `theta^2 >= S` and `phi = (pi - theta) / 2`.
pub fn sine_parameters(s_bound: f64) -> Result<(f64, f64)> {
    if s_bound.is_nan() || s_bound >= PI * PI {
        return Err(Error::InfeasibleCertificate(format!(
            "reaction ratio bound {s_bound} is not below pi^2"
        )));
    }
    let theta = if s_bound <= 0.0 {
        FLAT_SINE_THETA
    } else {
        let root = s_bound.sqrt();
        (s_bound * (1.0 + SINE_SLACK)).sqrt().min(0.5 * (root + PI))
    };
    Ok((theta, 0.5 * (PI - theta)))
}

/// Sine certificate for advection-free bounds at the requested `sigma`.
pub fn synthesize_sine_certificate(
    bounds: &CoefficientBounds,
    sigma: f64,
) -> Result<WeightCertificate> {
    let s_bound = bounds.reaction_ratio(sigma)?;
    let (theta, phi) = sine_parameters(s_bound)?;
    let cert = check_certificate(
        bounds,
        &WeightFunction::sine(theta, phi),
        sigma,
        0.0,
        DEFAULT_CHECK_GRID,
    )?;
    if !cert.is_verified() {
        return Err(Error::InfeasibleCertificate(format!(
            "sine weight theta = {theta} does not verify (worst residual {})",
            cert.worst_point.residual
        )));
    }
    Ok(cert)
}

/// Sine certificate from a bound `S >= sup (sigma + c) / a` alone, checked on
/// the normalized problem `a = 1`, `b = 0`, `sigma + c = S`.
pub fn synthesize_sine_certificate_for_ratio(s_bound: f64) -> Result<WeightCertificate> {
    sine_parameters(s_bound)?;
    let sigma = s_bound.max(1.0);
    let bounds = CoefficientBounds::new(
        Interval::point(1.0),
        Interval::point(0.0),
        Interval::point(s_bound - sigma),
    )?;
    synthesize_sine_certificate(&bounds, sigma)
}

/// Largest `theta` in `(0, pi/2)` with `theta tan(theta) <= target`, found by
/// bisection and returned as the feasible end of the final bracket.
pub fn cosine_theta(target: f64) -> f64 {
    let g = |theta: f64| theta * theta.tan() - target;
    let (mut lo, mut hi) = (0.0_f64, PI / 2.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[derive(Debug, Clone, PartialEq)]
pub struct CosineSynthesis {
    pub theta: f64,
    pub sigma: f64,
    pub certificate: WeightCertificate,
}

/// `eta = cos(theta x)` with `theta tan(theta) <= lambda1 (1 - eps_b)` and
/// `sigma = kappa_star theta^2`, verified for `a >= kappa_star`, `b = c = 0`.
pub fn synthesize_cosine_certificate(kappa_star: f64, lambda1: f64) -> Result<CosineSynthesis> {
    if !(kappa_star > 0.0 && kappa_star.is_finite()) || !(lambda1 > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "need kappa_star > 0 and lambda1 > 0, got {kappa_star}, {lambda1}"
        )));
    }
    let theta = cosine_theta(lambda1 * (1.0 - COSINE_SLACK));
    // The residual vanishes identically at a = kappa_star; shave a few ulps so
    // that rounding in the check cannot flip its sign.
    let sigma = kappa_star * theta * theta * (1.0 - 8.0 * f64::EPSILON);
    let bounds = CoefficientBounds::new(
        Interval::new(kappa_star, f64::INFINITY),
        Interval::point(0.0),
        Interval::point(0.0),
    )?;
    let certificate = check_certificate(
        &bounds,
        &WeightFunction::cosine(theta),
        sigma,
        0.0,
        DEFAULT_CHECK_GRID,
    )?;
    if !certificate.is_verified() {
        return Err(Error::InfeasibleCertificate(format!(
            "cosine weight theta = {theta} does not verify"
        )));
    }
    Ok(CosineSynthesis {
        theta,
        sigma,
        certificate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightFamily {
    Sine,
    Cosine,
    Exponential,
}

impl WeightFamily {
    /// The deterministic parameter lattice searched for this family.
    pub fn lattice(self) -> Vec<WeightFunction> {
        let n = SEARCH_LATTICE;
        match self {
            Self::Sine => (1..=n)
                .map(|k| {
                    let theta = PI * k as f64 / (n + 1) as f64;
                    WeightFunction::sine(theta, 0.5 * (PI - theta))
                })
                .collect(),
            Self::Cosine => (1..=n)
                .map(|k| WeightFunction::cosine(0.5 * PI * k as f64 / (n + 1) as f64))
                .collect(),
            Self::Exponential => (0..=n)
                .map(|k| WeightFunction::exponential(-10.0 + 20.0 * k as f64 / n as f64, 0.0))
                .collect(),
        }
    }
}

/// Largest `sigma` for which `weight` verifies on the check grid, if any.
///
/// The residual is affine in `sigma`, so the bound is read off node by node
/// and then confirmed by [`check_certificate`].
pub fn largest_sigma(
    bounds: &CoefficientBounds,
    weight: &WeightFunction,
    grid_size: usize,
) -> Result<Option<WeightCertificate>> {
    weight.validate()?;
    let sigma = (0..=grid_size)
        .map(|j| {
            let (base, eta) = base_residual(bounds, weight, j as f64 / grid_size as f64);
            -base / eta
        })
        .fold(f64::INFINITY, |m, s| if s.is_nan() { f64::NEG_INFINITY } else { m.min(s) });
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Ok(None);
    }
    let mut candidate = sigma;
    for _ in 0..8 {
        let cert = check_certificate(bounds, weight, candidate, 0.0, grid_size)?;
        if cert.is_verified() {
            return Ok(Some(cert));
        }
        candidate *= 1.0 - 1e-12;
    }
    Ok(None)
}

/// Searches the family lattice for the certificate with the largest
/// verified `sigma`. Ties resolve to the first lattice point.
pub fn maximize_decay_rate(
    bounds: &CoefficientBounds,
    family: WeightFamily,
) -> Result<WeightCertificate> {
    bounds.validate()?;
    let results: Vec<Option<WeightCertificate>> = family
        .lattice()
        .par_iter()
        .map(|w| largest_sigma(bounds, w, DEFAULT_CHECK_GRID))
        .collect::<Result<_>>()?;
    results
        .into_iter()
        .flatten()
        .fold(None, |best: Option<WeightCertificate>, cert| match best {
            Some(b) if b.sigma >= cert.sigma => Some(b),
            _ => Some(cert),
        })
        .ok_or_else(|| {
            Error::InfeasibleCertificate(format!(
                "no {family:?} lattice point certifies a positive decay rate"
            ))
        })
}

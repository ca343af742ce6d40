//! Weighted sup-norms, boundary terms `r0`/`r1` and the fading-memory
//! envelope
//!
//! ```text
//! rhs(t) = max( exp(-zeta t) |u[0]|_eta,
//!               sup_{0 < s <= t} max(r0(s), r1(s), |f[s]|_eta / (sigma - zeta)) exp(-zeta (t - s)) )
//! ```
//!
//! maintained incrementally along a trajectory.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::certificate::{check_boundary_signs, WeightFunction};
use crate::error::{Error, Result};
use crate::grid::{GridProfile, SpatialGrid};
use crate::model::{DisturbanceSignal, Functional};

/// Robin denominators at or below this magnitude are rejected.
pub const DENOMINATOR_FLOOR: f64 = 1e-12;
/// Default admissible `zeta / sigma`.
pub const DEFAULT_MAX_ZETA_FRACTION: f64 = 0.95;

/// Default bound tolerance `1e-6 + 10 h^2`.
pub fn default_tolerance(grid: SpatialGrid) -> f64 {
    1e-6 + 10.0 * grid.h() * grid.h()
}

/// `|u|_eta = max_i |u_i| / eta(x_i)` with `eta` cached on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedNorm {
    weight: WeightFunction,
    grid: SpatialGrid,
    eta: Vec<f64>,
}

impl WeightedNorm {
    pub fn new(weight: WeightFunction, grid: SpatialGrid) -> Result<Self> {
        let eta: Vec<f64> = grid.nodes().map(|x| weight.value(x)).collect();
        if let Some(i) = eta.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidWeight(format!(
                "eta({}) = {} is not positive",
                grid.x(i),
                eta[i]
            )));
        }
        Ok(Self { weight, grid, eta })
    }

    pub fn weight(&self) -> &WeightFunction {
        &self.weight
    }

    pub fn grid(&self) -> SpatialGrid {
        self.grid
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn min_eta(&self) -> f64 {
        self.eta.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_eta(&self) -> f64 {
        self.eta.iter().copied().fold(0.0, f64::max)
    }

    pub fn norm_of(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.eta.len());
        values
            .iter()
            .zip(&self.eta)
            .fold(0.0_f64, |m, (u, e)| m.max(u.abs() / e))
    }

    /// Interior-node norm used for the forcing term.
    pub fn interior_norm_of(&self, values: &[f64]) -> f64 {
        let n = self.eta.len() - 1;
        self.norm_of_range(values, 1, n)
    }

    fn norm_of_range(&self, values: &[f64], start: usize, end: usize) -> f64 {
        values[start..end]
            .iter()
            .zip(&self.eta[start..end])
            .fold(0.0_f64, |m, (u, e)| m.max(u.abs() / e))
    }
}

/// `max_i |u(x_i)| / eta(x_i)`.
pub fn weighted_sup_norm(profile: &GridProfile, norm: &WeightedNorm) -> f64 {
    norm.norm_of(profile.values())
}

/// Running `sup_{s <= t} g(s) exp(-zeta (t - s))` over the samples seen so far.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingMemoryTracker {
    zeta: f64,
    current_max: f64,
    last_time: Option<f64>,
}

impl FadingMemoryTracker {
    pub fn new(zeta: f64) -> Result<Self> {
        if !(zeta >= 0.0 && zeta.is_finite()) {
            return Err(Error::InvalidConfig(format!("tracker decay {zeta} must be >= 0")));
        }
        Ok(Self {
            zeta,
            current_max: 0.0,
            last_time: None,
        })
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn current_max(&self) -> f64 {
        self.current_max
    }

    pub fn last_time(&self) -> Option<f64> {
        self.last_time
    }

    pub fn update(&mut self, t: f64, g: f64) -> Result<f64> {
        if !(g >= 0.0 && g.is_finite()) {
            return Err(Error::InvalidTrackerInput(g));
        }
        if let Some(last) = self.last_time {
            if t < last {
                return Err(Error::NonmonotoneTime { t, last });
            }
            self.current_max *= (-self.zeta * (t - last)).exp();
        }
        self.current_max = self.current_max.max(g);
        self.last_time = Some(t);
        Ok(self.current_max)
    }

    /// Value at `t >= last_time` without recording a sample.
    pub fn value_at(&self, t: f64) -> f64 {
        match self.last_time {
            Some(last) => self.current_max * (-self.zeta * (t - last).max(0.0)).exp(),
            None => 0.0,
        }
    }
}

/// Which boundary terms enter the envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryTermSpec {
    /// `r0 = |u(0)| / eta(0)`, `r1 = |u(1)| / eta(1)`.
    #[default]
    Dirichlet,
    /// User gains `g0, g1 > 0` and `k0, k1 >= 1` as functions of time.
    General {
        g0: DisturbanceSignal,
        g1: DisturbanceSignal,
        k0: DisturbanceSignal,
        k1: DisturbanceSignal,
    },
    RobinLeft { mu0: f64, lambda0: f64 },
    RobinRight { mu1: f64, lambda1: f64 },
    RobinBoth {
        mu0: f64,
        lambda0: f64,
        mu1: f64,
        lambda1: f64,
    },
    /// Gains for `u_x(0) = (lambda0 + beta0) u + d0`, `u_x(1) = -(lambda1 + beta1) u + d1`:
    /// `g0 = 1 / (beta0 + lambda0)`, `g1 = 1 / (beta1 + lambda1 + eta'(1)/eta(1))`, `k0 = k1 = 1`.
    Nonlocal {
        lambda0: f64,
        lambda1: f64,
        beta0: Functional,
        beta1: Functional,
    },
}

/// Boundary values and one-sided derivatives at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySample {
    pub u0: f64,
    pub u1: f64,
    pub ux0: f64,
    pub ux1: f64,
}

impl BoundarySample {
    pub fn from_profile(profile: &GridProfile) -> Self {
        Self {
            u0: profile.left(),
            u1: profile.right(),
            ux0: profile.left_derivative(),
            ux1: profile.right_derivative(),
        }
    }
}

fn general_left(u0: f64, ux0: f64, g0: f64, k0: f64, weight: &WeightFunction) -> f64 {
    let (e, de) = (weight.value(0.0), weight.first_derivative(0.0));
    let direct = u0.abs() / e;
    let mixed = g0 / e * (ux0 - (de / e + k0 / g0) * u0).abs();
    direct.min(mixed)
}

fn general_right(u1: f64, ux1: f64, g1: f64, k1: f64, weight: &WeightFunction) -> f64 {
    let (e, de) = (weight.value(1.0), weight.first_derivative(1.0));
    let direct = u1.abs() / e;
    let mixed = g1 / e * (ux1 - (de / e - k1 / g1) * u1).abs();
    direct.min(mixed)
}

fn check_gains(g: f64, k: f64, side: &str) -> Result<()> {
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::InvalidGainFunction(format!("g{side} = {g} must be > 0")));
    }
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::InvalidGainFunction(format!("k{side} = {k} must be >= 1")));
    }
    Ok(())
}

fn robin_left(sample: &BoundarySample, mu0: f64, lambda0: f64, weight: &WeightFunction) -> Result<f64> {
    let signs = check_boundary_signs(weight, mu0, lambda0, 1.0, 0.0);
    if !signs.left_holds {
        return Err(Error::BoundarySignViolated(format!(
            "mu0 eta'(0) - lambda0 eta(0) = {} is not negative",
            signs.left_value
        )));
    }
    if signs.left_denominator <= DENOMINATOR_FLOOR {
        return Err(Error::DegenerateDenominator(signs.left_denominator));
    }
    let direct = sample.u0.abs() / weight.value(0.0);
    let mixed = (mu0 * sample.ux0 - lambda0 * sample.u0).abs() / signs.left_denominator;
    Ok(direct.min(mixed))
}

fn robin_right(sample: &BoundarySample, mu1: f64, lambda1: f64, weight: &WeightFunction) -> Result<f64> {
    let signs = check_boundary_signs(weight, 1.0, 0.0, mu1, lambda1);
    if !signs.right_holds {
        return Err(Error::BoundarySignViolated(format!(
            "mu1 eta'(1) + lambda1 eta(1) = {} is not positive",
            signs.right_value
        )));
    }
    if signs.right_denominator <= DENOMINATOR_FLOOR {
        return Err(Error::DegenerateDenominator(signs.right_denominator));
    }
    let direct = sample.u1.abs() / weight.value(1.0);
    let mixed = (mu1 * sample.ux1 + lambda1 * sample.u1).abs() / signs.right_denominator;
    Ok(direct.min(mixed))
}

/// `(r0, r1)` at time `t`. Always `r0 <= |u0| / eta(0)` and `r1 <= |u1| / eta(1)`.
pub fn boundary_terms(
    spec: &BoundaryTermSpec,
    t: f64,
    sample: &BoundarySample,
    profile: &GridProfile,
    weight: &WeightFunction,
) -> Result<(f64, f64)> {
    let dirichlet_left = || sample.u0.abs() / weight.value(0.0);
    let dirichlet_right = || sample.u1.abs() / weight.value(1.0);
    match spec {
        BoundaryTermSpec::Dirichlet => Ok((dirichlet_left(), dirichlet_right())),
        BoundaryTermSpec::General { g0, g1, k0, k1 } => {
            let (g0, g1, k0, k1) = (g0.eval(t), g1.eval(t), k0.eval(t), k1.eval(t));
            check_gains(g0, k0, "0")?;
            check_gains(g1, k1, "1")?;
            Ok((
                general_left(sample.u0, sample.ux0, g0, k0, weight),
                general_right(sample.u1, sample.ux1, g1, k1, weight),
            ))
        }
        BoundaryTermSpec::RobinLeft { mu0, lambda0 } => {
            Ok((robin_left(sample, *mu0, *lambda0, weight)?, dirichlet_right()))
        }
        BoundaryTermSpec::RobinRight { mu1, lambda1 } => {
            Ok((dirichlet_left(), robin_right(sample, *mu1, *lambda1, weight)?))
        }
        BoundaryTermSpec::RobinBoth {
            mu0,
            lambda0,
            mu1,
            lambda1,
        } => Ok((
            robin_left(sample, *mu0, *lambda0, weight)?,
            robin_right(sample, *mu1, *lambda1, weight)?,
        )),
        BoundaryTermSpec::Nonlocal {
            lambda0,
            lambda1,
            beta0,
            beta1,
        } => {
            let (b0, b1) = (beta0.eval(profile), beta1.eval(profile));
            if b0 < 0.0 || b1 < 0.0 {
                return Err(Error::NegativeBoundaryFunctional(b0.min(b1)));
            }
            let den0 = b0 + lambda0;
            let den1 = b1 + lambda1 + weight.first_derivative(1.0) / weight.value(1.0);
            for den in [den0, den1] {
                if !(den > DENOMINATOR_FLOOR) {
                    return Err(Error::DegenerateDenominator(den));
                }
            }
            Ok((
                general_left(sample.u0, sample.ux0, 1.0 / den0, 1.0, weight),
                general_right(sample.u1, sample.ux1, 1.0 / den1, 1.0, weight),
            ))
        }
    }
}

/// One row of a [`BoundTrace`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub rhs_ic: f64,
    pub rhs_boundary: f64,
    pub rhs_forcing: f64,
    pub r0: f64,
    pub r1: f64,
    pub violation: bool,
}

/// Time series of the weighted norm against its envelope for one `zeta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTrace {
    pub zeta: f64,
    pub sigma: f64,
    pub tol_bound: f64,
    pub rows: Vec<BoundRow>,
    /// `(t, lhs - rhs)` for every observed instant exceeding the tolerance.
    pub violations: Vec<(f64, f64)>,
    /// Largest `lhs - rhs` over all observed instants.
    pub max_excess: f64,
    /// Largest `lhs / rhs` over observed instants with `rhs > 0`.
    pub max_ratio: f64,
    pub time_of_max_ratio: f64,
    /// Instants where `r0 > |u0|/eta(0)` or `r1 > |u1|/eta(1)`.
    pub dominance_failures: usize,
    pub observed: usize,
}

impl BoundTrace {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    /// CSV with columns `t, lhs, rhs, rhs_ic, rhs_boundary, rhs_forcing, violation`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "lhs", "rhs", "rhs_ic", "rhs_boundary", "rhs_forcing", "violation"])?;
        for r in &self.rows {
            w.write_record([
                fmt17(r.t),
                fmt17(r.lhs),
                fmt17(r.rhs),
                fmt17(r.rhs_ic),
                fmt17(r.rhs_boundary),
                fmt17(r.rhs_forcing),
                u8::from(r.violation).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// 17 significant digits.
pub(crate) fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Parameters of one envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeConfig {
    pub sigma: f64,
    pub zeta: f64,
    pub tol_bound: f64,
    pub max_zeta_fraction: f64,
}

impl EnvelopeConfig {
    pub fn new(sigma: f64, zeta: f64, tol_bound: f64) -> Self {
        Self {
            sigma,
            zeta,
            tol_bound,
            max_zeta_fraction: DEFAULT_MAX_ZETA_FRACTION,
        }
    }
}

/// Builds a [`BoundTrace`] one instant at a time.
#[derive(Debug, Clone)]
pub struct Envelope {
    config: EnvelopeConfig,
    norm: WeightedNorm,
    spec: BoundaryTermSpec,
    initial: Option<f64>,
    last_time: Option<f64>,
    boundary: FadingMemoryTracker,
    forcing: FadingMemoryTracker,
    trace: BoundTrace,
}

impl Envelope {
    pub fn new(config: EnvelopeConfig, norm: WeightedNorm, spec: BoundaryTermSpec) -> Result<Self> {
        let EnvelopeConfig {
            sigma,
            zeta,
            tol_bound,
            max_zeta_fraction,
        } = config;
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!("sigma {sigma} must be > 0")));
        }
        if !(zeta >= 0.0 && zeta < sigma && zeta <= max_zeta_fraction * sigma) {
            return Err(Error::InvalidZeta { zeta, sigma });
        }
        if !(tol_bound >= 0.0) {
            return Err(Error::InvalidConfig(format!("tolerance {tol_bound} must be >= 0")));
        }
        Ok(Self {
            config,
            norm,
            spec,
            initial: None,
            last_time: None,
            boundary: FadingMemoryTracker::new(zeta)?,
            forcing: FadingMemoryTracker::new(zeta)?,
            trace: BoundTrace {
                zeta,
                sigma,
                tol_bound,
                rows: Vec::new(),
                violations: Vec::new(),
                max_excess: f64::NEG_INFINITY,
                max_ratio: 0.0,
                time_of_max_ratio: 0.0,
                dominance_failures: 0,
                observed: 0,
            },
        })
    }

    pub fn norm(&self) -> &WeightedNorm {
        &self.norm
    }

    /// Observes the state at time `t`. The first call fixes the initial
    /// term; later calls feed the boundary and forcing suprema.
    /// `forcing` holds `f` at every node. Appends a row when `record` is set.
    pub fn update(
        &mut self,
        t: f64,
        profile: &GridProfile,
        sample: &BoundarySample,
        forcing: &[f64],
        record: bool,
    ) -> Result<BoundRow> {
        if let Some(last) = self.last_time {
            if t <= last {
                return Err(Error::NonmonotoneTime { t, last });
            }
        }
        self.last_time = Some(t);
        let weight = self.norm.weight().clone();
        let lhs = self.norm.norm_of(profile.values());
        let (r0, r1) = boundary_terms(&self.spec, t, sample, profile, &weight)?;
        if r0 > sample.u0.abs() / weight.value(0.0) || r1 > sample.u1.abs() / weight.value(1.0) {
            self.trace.dominance_failures += 1;
        }

        let EnvelopeConfig { sigma, zeta, .. } = self.config;
        let row = match self.initial {
            None => {
                self.initial = Some(lhs);
                BoundRow {
                    t,
                    lhs,
                    rhs: lhs,
                    rhs_ic: lhs,
                    rhs_boundary: 0.0,
                    rhs_forcing: 0.0,
                    r0,
                    r1,
                    violation: false,
                }
            }
            Some(initial) => {
                let rhs_ic = (-zeta * t).exp() * initial;
                let rhs_boundary = self.boundary.update(t, r0.max(r1))?;
                let f_norm = self.norm.interior_norm_of(forcing);
                let rhs_forcing = self.forcing.update(t, f_norm / (sigma - zeta))?;
                let rhs = rhs_ic.max(rhs_boundary).max(rhs_forcing);
                BoundRow {
                    t,
                    lhs,
                    rhs,
                    rhs_ic,
                    rhs_boundary,
                    rhs_forcing,
                    r0,
                    r1,
                    violation: lhs > rhs + self.config.tol_bound,
                }
            }
        };

        let trace = &mut self.trace;
        trace.observed += 1;
        let excess = row.lhs - row.rhs;
        trace.max_excess = trace.max_excess.max(excess);
        if row.violation {
            trace.violations.push((t, excess));
        }
        if row.rhs > 0.0 {
            let ratio = row.lhs / row.rhs;
            if ratio > trace.max_ratio {
                trace.max_ratio = ratio;
                trace.time_of_max_ratio = t;
            }
        }
        if record {
            trace.rows.push(row);
        }
        Ok(row)
    }

    pub fn trace(&self) -> &BoundTrace {
        &self.trace
    }

    pub fn into_trace(self) -> BoundTrace {
        self.trace
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    fn grid(n: usize) -> SpatialGrid {
        SpatialGrid::new(n).unwrap()
    }

    #[test]
    fn weighted_norm_basics() {
        let g = grid(64);
        let w = WeightFunction::sine(3.0, 0.05);
        let norm = WeightedNorm::new(w.clone(), g).unwrap();
        assert_eq!(weighted_sup_norm(&GridProfile::zeros(g), &norm), 0.0);
        let same = GridProfile::from_fn(g, |x| w.value(x)).unwrap();
        assert!((weighted_sup_norm(&same, &norm) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn weighted_norm_against_dense_scan() {
        let norm = WeightedNorm::new(WeightFunction::cosine(0.5), grid(1024)).unwrap();
        let u = GridProfile::from_fn(grid(1024), |x| (PI * x).sin()).unwrap();
        let value = weighted_sup_norm(&u, &norm);
        let n = 1_000_000;
        let (mut best, mut arg) = (0.0, 0.0);
        for k in 0..=n {
            let x = k as f64 / n as f64;
            let r = (PI * x).sin() / (0.5 * x).cos();
            if r > best {
                best = r;
                arg = x;
            }
        }
        assert!(arg > 0.5);
        assert!((value - best).abs() < 1e-6, "{value} vs {best}");
    }

    #[test]
    fn tracker_examples() {
        let mut t = FadingMemoryTracker::new(0.0).unwrap();
        for (s, g) in [(0.0, 1.0), (1.0, 3.0), (2.0, 2.0)] {
            t.update(s, g).unwrap();
        }
        assert_eq!(t.current_max(), 3.0);

        let mut t = FadingMemoryTracker::new(1.0).unwrap();
        t.update(0.0, E).unwrap();
        t.update(1.0, 0.0).unwrap();
        assert!((t.current_max() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tracker_matches_brute_force_on_sin_squared() {
        let zeta = 0.5;
        let samples: Vec<(f64, f64)> = (0..1000)
            .map(|k| {
                let s = 2.0 * k as f64 / 999.0;
                (s, (3.0 * s).sin().powi(2) + 0.1)
            })
            .collect();
        let mut t = FadingMemoryTracker::new(zeta).unwrap();
        for &(s, g) in &samples {
            t.update(s, g).unwrap();
        }
        let brute = samples
            .iter()
            .map(|&(s, g)| g * (-zeta * (2.0 - s)).exp())
            .fold(0.0, f64::max);
        assert!((t.current_max() - brute).abs() <= 1e-12 * brute);
    }

    #[test]
    fn tracker_rejects_time_reversal() {
        let mut t = FadingMemoryTracker::new(0.3).unwrap();
        t.update(1.0, 1.0).unwrap();
        assert!(matches!(t.update(0.5, 1.0), Err(Error::NonmonotoneTime { .. })));
        assert!(matches!(t.update(2.0, -1.0), Err(Error::InvalidTrackerInput(_))));
    }

    #[test]
    fn dirichlet_terms() {
        let w = WeightFunction::sine(3.0, 0.05);
        let p = GridProfile::zeros(grid(8));
        let sample = BoundarySample {
            u0: 2.0,
            u1: -1.0,
            ux0: 0.0,
            ux1: 0.0,
        };
        let (r0, r1) = boundary_terms(&BoundaryTermSpec::Dirichlet, 0.0, &sample, &p, &w).unwrap();
        assert_eq!(r0, 2.0 / 0.05_f64.sin());
        assert_eq!(r1, 1.0 / 3.05_f64.sin());
    }

    #[test]
    fn robin_terms_vanish_on_homogeneous_data() {
        let w = WeightFunction::cosine(0.5);
        let (mu0, lambda0, mu1, lambda1) = (1.0, 2.0, 1.0, 1.0);
        let (u0, u1) = (0.7, -1.3);
        let sample = BoundarySample {
            u0,
            u1,
            ux0: lambda0 * u0 / mu0,
            ux1: -lambda1 * u1 / mu1,
        };
        let spec = BoundaryTermSpec::RobinBoth {
            mu0,
            lambda0,
            mu1,
            lambda1,
        };
        let p = GridProfile::zeros(grid(8));
        let (r0, r1) = boundary_terms(&spec, 0.0, &sample, &p, &w).unwrap();
        assert_eq!((r0, r1), (0.0, 0.0));
    }

    #[test]
    fn robin_sign_violation_is_reported() {
        let w = WeightFunction::sine(3.0, 0.1);
        let spec = BoundaryTermSpec::RobinRight {
            mu1: 1.0,
            lambda1: 0.0,
        };
        let sample = BoundarySample {
            u0: 0.0,
            u1: 1.0,
            ux0: 0.0,
            ux1: 0.0,
        };
        let p = GridProfile::zeros(grid(8));
        assert!(matches!(
            boundary_terms(&spec, 0.0, &sample, &p, &w),
            Err(Error::BoundarySignViolated(_))
        ));
    }

    #[test]
    fn nonlocal_left_term_reduces_to_disturbance_over_lambda() {
        let theta = 0.6;
        let w = WeightFunction::cosine(theta);
        let (lambda0, lambda1) = (2.0, 1.5);
        let beta = Functional::default().with_term(0.5, crate::model::ProfileMeasure::SupNorm);
        let p = GridProfile::from_fn(grid(16), |x| 0.4 * (1.0 + x)).unwrap();
        let beta_value = beta.eval(&p);
        let (u0, d0) = (0.4, 0.3);
        let sample = BoundarySample {
            u0,
            u1: 0.8,
            ux0: (lambda0 + beta_value) * u0 + d0,
            ux1: 0.0,
        };
        let spec = BoundaryTermSpec::Nonlocal {
            lambda0,
            lambda1,
            beta0: beta.clone(),
            beta1: beta,
        };
        let (r0, _) = boundary_terms(&spec, 0.0, &sample, &p, &w).unwrap();
        let expected = (d0 / (lambda0 + beta_value)).min(u0);
        assert!((r0 - expected).abs() < 1e-15);
        assert!(r0 <= d0 / lambda0);
    }

    #[test]
    fn general_gains_are_validated() {
        let w = WeightFunction::cosine(0.5);
        let p = GridProfile::zeros(grid(8));
        let sample = BoundarySample {
            u0: 1.0,
            u1: 1.0,
            ux0: 0.0,
            ux1: 0.0,
        };
        let bad = BoundaryTermSpec::General {
            g0: DisturbanceSignal::constant(1.0),
            g1: DisturbanceSignal::constant(1.0),
            k0: DisturbanceSignal::constant(0.5),
            k1: DisturbanceSignal::constant(1.0),
        };
        assert!(matches!(
            boundary_terms(&bad, 0.0, &sample, &p, &w),
            Err(Error::InvalidGainFunction(_))
        ));
    }

    #[test]
    fn envelope_without_inputs_is_pure_exponential() {
        let g = grid(32);
        let w = WeightFunction::sine(3.0, 0.07);
        let norm = WeightedNorm::new(w, g).unwrap();
        let zero_f = vec![0.0; g.n_nodes()];
        let mut env =
            Envelope::new(EnvelopeConfig::new(8.0, 2.0, 1e-9), norm, BoundaryTermSpec::Dirichlet)
                .unwrap();
        let u0 = GridProfile::from_fn(g, |x| (PI * x).sin()).unwrap();
        let first = env.update(0.0, &u0, &BoundarySample::from_profile(&u0), &zero_f, true).unwrap();
        for k in 1..10 {
            let t = 0.1 * k as f64;
            let u = GridProfile::from_fn(g, |x| (-PI * PI * t).exp() * (PI * x).sin()).unwrap();
            let row = env.update(t, &u, &BoundarySample::from_profile(&u), &zero_f, true).unwrap();
            assert!((row.rhs - (-2.0 * t).exp() * first.lhs).abs() < 1e-15);
            assert!(!row.violation);
        }
    }

    #[test]
    fn envelope_constant_dirichlet_data() {
        let g = grid(16);
        let w = WeightFunction::sine(2.0, 0.3);
        let norm = WeightedNorm::new(w.clone(), g).unwrap();
        let zero_f = vec![0.0; g.n_nodes()];
        let d = 0.8;
        let mut env =
            Envelope::new(EnvelopeConfig::new(3.0, 1.0, 1e-9), norm, BoundaryTermSpec::Dirichlet)
                .unwrap();
        let zero = GridProfile::zeros(g);
        env.update(0.0, &zero, &BoundarySample::from_profile(&zero), &zero_f, true).unwrap();
        let expected = d * (1.0 / w.value(0.0)).max(1.0 / w.value(1.0));
        for k in 1..20 {
            let u = GridProfile::from_fn(g, |_| d).unwrap();
            let row = env
                .update(0.05 * k as f64, &u, &BoundarySample::from_profile(&u), &zero_f, true)
                .unwrap();
            assert!((row.rhs_boundary - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn envelope_rejects_large_zeta() {
        let norm = WeightedNorm::new(WeightFunction::cosine(0.5), grid(8)).unwrap();
        for zeta in [1.0, 1.2, 0.96, -0.1] {
            assert!(matches!(
                Envelope::new(
                    EnvelopeConfig::new(1.0, zeta, 0.0),
                    norm.clone(),
                    BoundaryTermSpec::Dirichlet
                ),
                Err(Error::InvalidZeta { .. })
            ));
        }
    }

    #[test]
    fn csv_has_fixed_columns() {
        let g = grid(8);
        let norm = WeightedNorm::new(WeightFunction::cosine(0.5), g).unwrap();
        let mut env =
            Envelope::new(EnvelopeConfig::new(1.0, 0.5, 0.0), norm, BoundaryTermSpec::Dirichlet)
                .unwrap();
        let u = GridProfile::from_fn(g, |x| x).unwrap();
        let f = vec![0.0; g.n_nodes()];
        env.update(0.0, &u, &BoundarySample::from_profile(&u), &f, true).unwrap();
        env.update(0.1, &u, &BoundarySample::from_profile(&u), &f, true).unwrap();
        let mut buf = Vec::new();
        env.trace().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,lhs,rhs,rhs_ic,rhs_boundary,rhs_forcing,violation"
        );
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 7);
        assert_eq!(row[1].parse::<f64>().unwrap(), env.trace().rows[0].lhs);
    }
}

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{DisturbanceSignal, Functional, StateFn};
use crate::error::{Error, Result};
use crate::grid::GridProfile;
use crate::transform::TransformSpec;

/// Spatial factor of a separable `(t, x)` field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpatialShape {
    Constant {
        value: f64,
    },
    /// `amplitude * sin(wavenumber * x + phase)`
    Sine {
        amplitude: f64,
        wavenumber: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `amplitude * sin(mode * pi * x)`
    SineMode {
        amplitude: f64,
        mode: f64,
    },
    Polynomial {
        coefficients: Vec<f64>,
    },
}

impl SpatialShape {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::Sine {
                amplitude,
                wavenumber,
                phase,
            } => amplitude * (wavenumber * x + phase).sin(),
            Self::SineMode { amplitude, mode } => amplitude * (mode * std::f64::consts::PI * x).sin(),
            Self::Polynomial { coefficients } => {
                coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
            }
        }
    }

    /// Upper bound on `|s(x)|` over `[0, 1]`.
    pub fn abs_bound(&self) -> f64 {
        match self {
            Self::Constant { value } => value.abs(),
            Self::Sine { amplitude, .. } | Self::SineMode { amplitude, .. } => amplitude.abs(),
            Self::Polynomial { coefficients } => coefficients.iter().map(|c| c.abs()).sum(),
        }
    }
}

/// One `time(t) * space(x)` product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeparableTerm {
    pub time: DisturbanceSignal,
    pub space: SpatialShape,
}

/// A coefficient `a`, `b`, `c` or `f` of the parabolic equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientField {
    Constant { value: f64 },
    /// Closed form in `(t, x)`: a sum of separable terms.
    SpaceTime { terms: Vec<SeparableTerm> },
    /// Pointwise in the state, `r(u(t, x))`.
    State { function: StateFn },
    /// Non-local: one value for the whole profile, `kappa(u[t])`.
    NonLocal { functional: Functional },
    /// `g(u) * du/dx`; as an advection coefficient this realizes the
    /// gradient-squared term `g(u) (du/dx)^2`.
    StateTimesGradient { function: StateFn },
    /// `r(gamma^{-1}(w))`, produced by [`crate::transform::transform_problem`].
    #[serde(skip)]
    StateThroughInverse {
        function: StateFn,
        transform: Arc<TransformSpec>,
    },
}

impl Default for CoefficientField {
    fn default() -> Self {
        Self::Constant { value: 0.0 }
    }
}

impl CoefficientField {
    pub fn constant(value: f64) -> Self {
        Self::Constant { value }
    }

    pub fn zero() -> Self {
        Self::Constant { value: 0.0 }
    }

    pub fn state(function: StateFn) -> Self {
        Self::State { function }
    }

    pub fn separable(time: DisturbanceSignal, space: SpatialShape) -> Self {
        Self::SpaceTime {
            terms: vec![SeparableTerm { time, space }],
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Constant { value } => *value == 0.0,
            Self::SpaceTime { terms } => terms.is_empty(),
            _ => false,
        }
    }

    /// Fills `out[i]` with the field at node `i` of `profile`'s grid.
    pub fn evaluate(&self, t: f64, profile: &GridProfile, out: &mut [f64]) -> Result<()> {
        let grid = profile.grid();
        let u = profile.values();
        debug_assert_eq!(out.len(), u.len());
        match self {
            Self::Constant { value } => out.fill(*value),
            Self::SpaceTime { terms } => {
                out.fill(0.0);
                for term in terms {
                    let amplitude = term.time.eval(t);
                    for (i, slot) in out.iter_mut().enumerate() {
                        *slot += amplitude * term.space.eval(grid.x(i));
                    }
                }
            }
            Self::State { function } => {
                for (slot, &ui) in out.iter_mut().zip(u) {
                    *slot = function.eval(ui);
                }
            }
            Self::NonLocal { functional } => out.fill(functional.eval(profile)),
            Self::StateTimesGradient { function } => {
                for (i, slot) in out.iter_mut().enumerate() {
                    *slot = function.eval(u[i]) * profile.derivative_at(i);
                }
            }
            Self::StateThroughInverse {
                function,
                transform,
            } => {
                if let StateFn::Constant { value } = function {
                    // No inverse needed, but the table domain still applies.
                    let (lo, hi) = transform.range();
                    if let Some(&w) = u.iter().find(|&&w| !(w >= lo && w <= hi)) {
                        return Err(Error::TableDomainExceeded { value: w, lo, hi });
                    }
                    out.fill(*value);
                    return Ok(());
                }
                for (slot, &wi) in out.iter_mut().zip(u) {
                    *slot = function.eval(transform.gamma_inverse(wi)?);
                }
            }
        }
        Ok(())
    }

    /// Enclosure of the field's values over all admissible arguments.
    /// Unbounded directions are reported as infinities.
    pub fn range(&self) -> (f64, f64) {
        match self {
            Self::Constant { value } => (*value, *value),
            Self::SpaceTime { terms } => {
                let bound: f64 = terms
                    .iter()
                    .map(|t| t.time.abs_bound() * t.space.abs_bound())
                    .sum();
                (-bound, bound)
            }
            Self::State { function } | Self::StateThroughInverse { function, .. } => {
                function.range()
            }
            Self::NonLocal { functional } => functional.range(),
            Self::StateTimesGradient { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

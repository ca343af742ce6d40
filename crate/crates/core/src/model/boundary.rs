use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{DisturbanceSignal, Functional};
use crate::error::{Error, Result};
use crate::grid::GridProfile;
use crate::transform::TransformSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// Boundary condition at one end of `[0, 1]`.
///
/// Sign conventions follow the outward normal:
///
/// | form            | `x = 0`                          | `x = 1`                           |
/// |-----------------|----------------------------------|-----------------------------------|
/// | `Dirichlet`     | `u = d`                          | `u = d`                           |
/// | `Robin`         | `mu u_x - lambda u = d`          | `mu u_x + lambda u = d`           |
/// | `NonlocalRobin` | `u_x = (lambda + beta(u)) u + d` | `u_x = -(lambda + beta(u)) u + d` |
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryCondition {
    Dirichlet {
        data: DisturbanceSignal,
        /// Data is passed through `gamma` before it is imposed.
        #[serde(skip)]
        through: Option<Arc<TransformSpec>>,
    },
    Robin {
        mu: f64,
        lambda: f64,
        #[serde(default)]
        data: DisturbanceSignal,
    },
    NonlocalRobin {
        lambda: f64,
        beta: Functional,
        #[serde(default)]
        data: DisturbanceSignal,
    },
}

impl BoundaryCondition {
    pub fn dirichlet(data: DisturbanceSignal) -> Self {
        Self::Dirichlet {
            data,
            through: None,
        }
    }

    pub fn robin(mu: f64, lambda: f64, data: DisturbanceSignal) -> Self {
        Self::Robin { mu, lambda, data }
    }

    pub fn nonlocal_robin(lambda: f64, beta: Functional, data: DisturbanceSignal) -> Self {
        Self::NonlocalRobin { lambda, beta, data }
    }

    pub fn signal(&self) -> &DisturbanceSignal {
        match self {
            Self::Dirichlet { data, .. }
            | Self::Robin { data, .. }
            | Self::NonlocalRobin { data, .. } => data,
        }
    }

    pub fn is_dirichlet(&self) -> bool {
        matches!(self, Self::Dirichlet { .. })
    }

    /// The disturbance value `d(t)` (after the optional transform).
    pub fn data_at(&self, t: f64) -> Result<f64> {
        match self {
            Self::Dirichlet {
                data,
                through: Some(transform),
            } => transform.gamma(data.eval(t)),
            other => Ok(other.signal().eval(t)),
        }
    }

    /// For derivative conditions, the pair `(mu, lambda_eff)` so that the
    /// condition reads `mu u_x -/+ lambda_eff u = d`. Non-local `beta` is
    /// evaluated on `profile`.
    pub fn robin_coefficients(&self, profile: &GridProfile) -> Result<Option<(f64, f64)>> {
        match self {
            Self::Dirichlet { .. } => Ok(None),
            Self::Robin { mu, lambda, .. } => Ok(Some((*mu, *lambda))),
            Self::NonlocalRobin { lambda, beta, .. } => {
                let b = beta.eval(profile);
                if !(b >= 0.0) {
                    return Err(Error::NegativeBoundaryFunctional(b));
                }
                Ok(Some((1.0, lambda + b)))
            }
        }
    }
}

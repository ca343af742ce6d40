use serde::{Deserialize, Serialize};

use crate::grid::GridProfile;

/// Non-negative profile measures a non-local functional may combine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileMeasure {
    SupNorm,
    SupNormSquared,
    L2Norm,
    L2NormSquared,
}

impl ProfileMeasure {
    pub fn eval(self, profile: &GridProfile) -> f64 {
        match self {
            Self::SupNorm => profile.sup_norm(),
            Self::SupNormSquared => profile.sup_norm().powi(2),
            Self::L2Norm => profile.l2_norm(),
            Self::L2NormSquared => profile.l2_norm().powi(2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalTerm {
    pub coefficient: f64,
    pub measure: ProfileMeasure,
}

/// Affine combination `constant + sum_k c_k * m_k(u)` of profile measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Functional {
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub terms: Vec<FunctionalTerm>,
}

impl Functional {
    pub fn constant(value: f64) -> Self {
        Self {
            constant: value,
            terms: Vec::new(),
        }
    }

    pub fn with_term(mut self, coefficient: f64, measure: ProfileMeasure) -> Self {
        self.terms.push(FunctionalTerm {
            coefficient,
            measure,
        });
        self
    }

    pub fn eval(&self, profile: &GridProfile) -> f64 {
        self.terms
            .iter()
            .fold(self.constant, |acc, term| {
                acc + term.coefficient * term.measure.eval(profile)
            })
    }

    /// Enclosure over all profiles; every measure ranges over `[0, inf)`.
    pub fn range(&self) -> (f64, f64) {
        let lo = if self.terms.iter().any(|t| t.coefficient < 0.0) {
            f64::NEG_INFINITY
        } else {
            self.constant
        };
        let hi = if self.terms.iter().any(|t| t.coefficient > 0.0) {
            f64::INFINITY
        } else {
            self.constant
        };
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SpatialGrid;

    #[test]
    fn zero_profile_collapses_to_constant() {
        let kappa = Functional::constant(0.7).with_term(0.1, ProfileMeasure::SupNormSquared);
        let zero = GridProfile::zeros(SpatialGrid::new(8).unwrap());
        assert_eq!(kappa.eval(&zero), 0.7);
        assert_eq!(kappa.range(), (0.7, f64::INFINITY));
    }

    #[test]
    fn measures_on_constant_profile() {
        let p = GridProfile::from_fn(SpatialGrid::new(8).unwrap(), |_| -2.0).unwrap();
        let f = Functional::default()
            .with_term(1.0, ProfileMeasure::SupNorm)
            .with_term(1.0, ProfileMeasure::L2NormSquared);
        assert!((f.eval(&p) - 6.0).abs() < 1e-14);
    }
}

use serde::{Deserialize, Serialize};

/// Scalar nonlinearity `u -> r(u)` from a bounded closed library.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateFn {
    Constant {
        value: f64,
    },
    /// `offset + amplitude * sin(frequency * u)`
    Sin {
        amplitude: f64,
        #[serde(default = "one")]
        frequency: f64,
        #[serde(default)]
        offset: f64,
    },
    /// `offset + amplitude * tanh(scale * u)`
    Tanh {
        amplitude: f64,
        #[serde(default = "one")]
        scale: f64,
        #[serde(default)]
        offset: f64,
    },
    /// `clamp(sum_k coefficients[k] * u^k, lo, hi)`
    ClippedPolynomial {
        coefficients: Vec<f64>,
        lo: f64,
        hi: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl StateFn {
    pub fn constant(value: f64) -> Self {
        Self::Constant { value }
    }

    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::Sin {
                amplitude,
                frequency,
                offset,
            } => offset + amplitude * (frequency * u).sin(),
            Self::Tanh {
                amplitude,
                scale,
                offset,
            } => offset + amplitude * (scale * u).tanh(),
            Self::ClippedPolynomial {
                coefficients,
                lo,
                hi,
            } => coefficients
                .iter()
                .rev()
                .fold(0.0, |acc, c| acc * u + c)
                .clamp(*lo, *hi),
        }
    }

    /// Guaranteed enclosure of the range over all of ℝ.
    pub fn range(&self) -> (f64, f64) {
        match self {
            Self::Constant { value } => (*value, *value),
            Self::Sin {
                amplitude, offset, ..
            }
            | Self::Tanh {
                amplitude, offset, ..
            } => (offset - amplitude.abs(), offset + amplitude.abs()),
            Self::ClippedPolynomial { lo, hi, .. } => (*lo, *hi),
        }
    }

    /// True when `r(-u) = r(u)` for every `u`.
    pub fn is_even(&self) -> bool {
        match self {
            Self::Constant { .. } => true,
            Self::Sin {
                amplitude,
                frequency,
                ..
            } => *amplitude == 0.0 || *frequency == 0.0,
            Self::Tanh {
                amplitude, scale, ..
            } => *amplitude == 0.0 || *scale == 0.0,
            Self::ClippedPolynomial { coefficients, .. } => coefficients
                .iter()
                .skip(1)
                .step_by(2)
                .all(|c| *c == 0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin_at_one() {
        let r = StateFn::Sin {
            amplitude: 1.0,
            frequency: 1.0,
            offset: 0.0,
        };
        // sin(1) to 18 digits
        assert!((r.eval(1.0) - 0.841_470_984_807_896_5).abs() < 1e-15);
    }

    #[test]
    fn clipped_polynomial_respects_clip() {
        let r = StateFn::ClippedPolynomial {
            coefficients: vec![1.0, 0.0, 1.0],
            lo: 0.0,
            hi: 2.0,
        };
        assert_eq!(r.eval(0.5), 1.25);
        assert_eq!(r.eval(3.0), 2.0);
        assert_eq!(r.range(), (0.0, 2.0));
        assert!(r.is_even());
    }

    #[test]
    fn range_encloses_samples() {
        let fns = [
            StateFn::Tanh {
                amplitude: -0.75,
                scale: 2.0,
                offset: 1.25,
            },
            StateFn::Sin {
                amplitude: 3.0,
                frequency: 0.7,
                offset: -1.0,
            },
        ];
        for f in &fns {
            let (lo, hi) = f.range();
            for k in -200..=200 {
                let v = f.eval(k as f64 * 0.1);
                assert!(lo <= v && v <= hi);
            }
        }
    }
}

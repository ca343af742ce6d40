use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A boundary or forcing input `d(t)` from a closed vocabulary of
/// continuous signals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DisturbanceSignal {
    #[default]
    Zero,
    Constant {
        value: f64,
    },
    /// `offset + amplitude * sin(frequency * t + phase)`
    Sinusoid {
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        offset: f64,
    },
    /// `offset + amplitude * exp(-rate * t)`
    DecayingExponential {
        amplitude: f64,
        rate: f64,
        #[serde(default)]
        offset: f64,
    },
    /// Linear interpolation between samples, held constant outside them.
    PiecewiseLinear { times: Vec<f64>, values: Vec<f64> },
}

impl DisturbanceSignal {
    pub fn constant(value: f64) -> Self {
        Self::Constant { value }
    }

    pub fn sinusoid(amplitude: f64, frequency: f64) -> Self {
        Self::Sinusoid {
            amplitude,
            frequency,
            phase: 0.0,
            offset: 0.0,
        }
    }

    pub fn piecewise_linear(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let signal = Self::PiecewiseLinear { times, values };
        signal.validate()?;
        Ok(signal)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidSignal(format!("{name} must be finite")))
            }
        };
        match self {
            Self::Zero => Ok(()),
            Self::Constant { value } => finite("value", *value),
            Self::Sinusoid {
                amplitude,
                frequency,
                phase,
                offset,
            } => {
                finite("amplitude", *amplitude)?;
                finite("frequency", *frequency)?;
                finite("phase", *phase)?;
                finite("offset", *offset)
            }
            Self::DecayingExponential {
                amplitude,
                rate,
                offset,
            } => {
                finite("amplitude", *amplitude)?;
                finite("offset", *offset)?;
                if !(rate.is_finite() && *rate >= 0.0) {
                    return Err(Error::InvalidSignal(
                        "decay rate must be finite and non-negative".into(),
                    ));
                }
                Ok(())
            }
            Self::PiecewiseLinear { times, values } => {
                if times.is_empty() || times.len() != values.len() {
                    return Err(Error::InvalidSignal(format!(
                        "need matching non-empty samples, got {} times and {} values",
                        times.len(),
                        values.len()
                    )));
                }
                if times.iter().chain(values).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidSignal("samples must be finite".into()));
                }
                if times.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidSignal(
                        "sample times must be strictly increasing".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Constant { value } => *value,
            Self::Sinusoid {
                amplitude,
                frequency,
                phase,
                offset,
            } => offset + amplitude * (frequency * t + phase).sin(),
            Self::DecayingExponential {
                amplitude,
                rate,
                offset,
            } => offset + amplitude * (-rate * t).exp(),
            Self::PiecewiseLinear { times, values } => {
                let k = times.partition_point(|&s| s <= t);
                if k == 0 {
                    values[0]
                } else if k == times.len() {
                    values[k - 1]
                } else {
                    let (t0, t1) = (times[k - 1], times[k]);
                    let w = (t - t0) / (t1 - t0);
                    values[k - 1] + w * (values[k] - values[k - 1])
                }
            }
        }
    }

    /// Upper bound on `|d(t)|` for `t >= 0`.
    pub fn abs_bound(&self) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Constant { value } => value.abs(),
            Self::Sinusoid {
                amplitude, offset, ..
            } => offset.abs() + amplitude.abs(),
            Self::DecayingExponential {
                amplitude, offset, ..
            } => offset.abs() + amplitude.abs(),
            Self::PiecewiseLinear { values, .. } => {
                values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
            }
        }
    }

    /// Lipschitz constant in `t` on `t >= 0`.
    pub fn lipschitz_bound(&self) -> f64 {
        match self {
            Self::Zero | Self::Constant { .. } => 0.0,
            Self::Sinusoid {
                amplitude,
                frequency,
                ..
            } => (amplitude * frequency).abs(),
            Self::DecayingExponential {
                amplitude, rate, ..
            } => (amplitude * rate).abs(),
            Self::PiecewiseLinear { times, values } => times
                .windows(2)
                .zip(values.windows(2))
                .map(|(t, v)| ((v[1] - v[0]) / (t[1] - t[0])).abs())
                .fold(0.0, f64::max),
        }
    }
}

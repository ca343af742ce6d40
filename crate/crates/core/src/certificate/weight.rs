use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid used for the dense positivity scan of a weight.
const POSITIVITY_SCAN: usize = 4096;

/// Positive `C²` weight `eta` on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightFunction {
    /// `sin(theta x + phi)`
    Sine { theta: f64, phi: f64 },
    /// `cos(theta x)`
    Cosine { theta: f64 },
    /// `exp(-rho x) + offset`
    Exponential {
        rho: f64,
        #[serde(default)]
        offset: f64,
    },
    /// Natural cubic spline through equally spaced samples on `[0, 1]`.
    TabulatedCubic(CubicTable),
}

impl WeightFunction {
    pub fn sine(theta: f64, phi: f64) -> Self {
        Self::Sine { theta, phi }
    }

    pub fn cosine(theta: f64) -> Self {
        Self::Cosine { theta }
    }

    pub fn exponential(rho: f64, offset: f64) -> Self {
        Self::Exponential { rho, offset }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Self::Sine { .. } => "sine",
            Self::Cosine { .. } => "cosine",
            Self::Exponential { .. } => "exponential",
            Self::TabulatedCubic(_) => "tabulated_cubic",
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Self::Sine { theta, phi } => (theta * x + phi).sin(),
            Self::Cosine { theta } => (theta * x).cos(),
            Self::Exponential { rho, offset } => (-rho * x).exp() + offset,
            Self::TabulatedCubic(table) => table.eval(x).0,
        }
    }

    pub fn first_derivative(&self, x: f64) -> f64 {
        match self {
            Self::Sine { theta, phi } => theta * (theta * x + phi).cos(),
            Self::Cosine { theta } => -theta * (theta * x).sin(),
            Self::Exponential { rho, .. } => -rho * (-rho * x).exp(),
            Self::TabulatedCubic(table) => table.eval(x).1,
        }
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        match self {
            Self::Sine { theta, phi } => -theta * theta * (theta * x + phi).sin(),
            Self::Cosine { theta } => -theta * theta * (theta * x).cos(),
            Self::Exponential { rho, .. } => rho * rho * (-rho * x).exp(),
            Self::TabulatedCubic(table) => table.eval(x).2,
        }
    }

    /// Upper bound on `|eta'''|` over `[0, 1]`.
    pub fn third_derivative_bound(&self) -> f64 {
        match self {
            Self::Sine { theta, .. } | Self::Cosine { theta } => theta.abs().powi(3),
            Self::Exponential { rho, .. } => rho.abs().powi(3) * (-rho).exp().max(1.0),
            Self::TabulatedCubic(table) => table.third_derivative_bound(),
        }
    }

    /// Family-specific analytic positivity condition followed by a dense scan.
    pub fn validate(&self) -> Result<()> {
        let params_finite = match self {
            Self::Sine { theta, phi } => theta.is_finite() && phi.is_finite(),
            Self::Cosine { theta } => theta.is_finite(),
            Self::Exponential { rho, offset } => rho.is_finite() && offset.is_finite(),
            Self::TabulatedCubic(_) => true,
        };
        if !params_finite {
            return Err(Error::InvalidWeight("non-finite parameter".into()));
        }
        match *self {
            Self::Sine { theta, phi } => {
                let (lo, hi) = (phi.min(theta + phi), phi.max(theta + phi));
                if !(lo > 0.0 && hi < PI) {
                    return Err(Error::InvalidWeight(format!(
                        "sin(theta x + phi) needs 0 < phi and theta + phi < pi, got theta = {theta}, phi = {phi}"
                    )));
                }
            }
            Self::Cosine { theta } => {
                if !(theta > 0.0 && theta < PI / 2.0) {
                    return Err(Error::InvalidWeight(format!(
                        "cos(theta x) needs 0 < theta < pi/2, got {theta}"
                    )));
                }
            }
            Self::Exponential { rho, offset } => {
                let min = (-rho.max(0.0)).exp() + offset;
                if !(min > 0.0) {
                    return Err(Error::InvalidWeight(format!(
                        "exp(-rho x) + offset has minimum {min} <= 0"
                    )));
                }
            }
            Self::TabulatedCubic(_) => {}
        }
        for k in 0..=POSITIVITY_SCAN {
            let x = k as f64 / POSITIVITY_SCAN as f64;
            let v = self.value(x);
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidWeight(format!("eta({x}) = {v}")));
            }
        }
        Ok(())
    }
}

/// Natural cubic spline on a uniform grid of `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CubicTableRepr", into = "CubicTableRepr")]
pub struct CubicTable {
    values: Vec<f64>,
    second: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CubicTableRepr {
    values: Vec<f64>,
}

impl TryFrom<CubicTableRepr> for CubicTable {
    type Error = Error;

    fn try_from(repr: CubicTableRepr) -> Result<Self> {
        CubicTable::new(repr.values)
    }
}

impl From<CubicTable> for CubicTableRepr {
    fn from(table: CubicTable) -> Self {
        CubicTableRepr {
            values: table.values,
        }
    }
}

impl CubicTable {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::InvalidWeight(
                "tabulated weight needs at least 3 samples".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidWeight("non-finite sample".into()));
        }
        let n = values.len() - 1;
        let h = 1.0 / n as f64;
        // Natural spline: M_0 = M_n = 0, interior rows M_{i-1} + 4 M_i + M_{i+1} = rhs.
        let mut second = vec![0.0; n + 1];
        if n >= 2 {
            let m = n - 1;
            let mut diag = vec![4.0; m];
            let mut rhs: Vec<f64> = (1..n)
                .map(|i| 6.0 * (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (h * h))
                .collect();
            for k in 1..m {
                let w = 1.0 / diag[k - 1];
                diag[k] -= w;
                rhs[k] -= w * rhs[k - 1];
            }
            second[m] = rhs[m - 1] / diag[m - 1];
            for k in (0..m - 1).rev() {
                second[k + 1] = (rhs[k] - second[k + 2]) / diag[k];
            }
        }
        Ok(Self { values, second })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(s, s', s'')` at `x`, clamped to `[0, 1]`.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let n = self.values.len() - 1;
        let h = 1.0 / n as f64;
        let x = x.clamp(0.0, 1.0);
        let i = ((x * n as f64).floor() as usize).min(n - 1);
        let (x0, x1) = (i as f64 * h, (i + 1) as f64 * h);
        let (a, b) = ((x1 - x) / h, (x - x0) / h);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let s = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let ds = (y1 - y0) / h - (3.0 * a * a - 1.0) * h / 6.0 * m0 + (3.0 * b * b - 1.0) * h / 6.0 * m1;
        let d2s = a * m0 + b * m1;
        (s, ds, d2s)
    }

    fn third_derivative_bound(&self) -> f64 {
        let n = self.values.len() - 1;
        self.second
            .windows(2)
            .map(|w| ((w[1] - w[0]) * n as f64).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn families() -> Vec<WeightFunction> {
        vec![
            WeightFunction::sine(3.0, 0.05),
            WeightFunction::sine(2.0, 0.5),
            WeightFunction::cosine(0.5),
            WeightFunction::cosine(1.4),
            WeightFunction::exponential(2.0, 0.0),
            WeightFunction::exponential(-1.5, 0.3),
            WeightFunction::TabulatedCubic(
                CubicTable::new((0..=32).map(|k| 1.0 + 0.3 * (k as f64 / 32.0).powi(2)).collect())
                    .unwrap(),
            ),
        ]
    }

    #[test]
    fn derivatives_match_central_differences() {
        for w in families() {
            w.validate().unwrap();
            let mut errs = Vec::new();
            for h in [1e-2, 5e-3] {
                let mut worst = (0.0_f64, 0.0_f64);
                for k in 1..100 {
                    let x = k as f64 / 100.0;
                    let d1 = (w.value(x + h) - w.value(x - h)) / (2.0 * h);
                    let d2 = (w.value(x + h) - 2.0 * w.value(x) + w.value(x - h)) / (h * h);
                    worst.0 = worst.0.max((d1 - w.first_derivative(x)).abs());
                    worst.1 = worst.1.max((d2 - w.second_derivative(x)).abs());
                }
                errs.push(worst);
            }
            // O(h^2): halving h cuts the error by about 4 (or it is already tiny).
            for k in 0..2 {
                let (coarse, fine) = if k == 0 {
                    (errs[0].0, errs[1].0)
                } else {
                    (errs[0].1, errs[1].1)
                };
                assert!(
                    fine < 1e-7 || coarse / fine > 3.0,
                    "{}: {coarse} -> {fine}",
                    w.family_name()
                );
            }
        }
    }

    #[test]
    fn positivity_conditions() {
        assert!(WeightFunction::sine(3.0, 0.2).validate().is_err());
        assert!(WeightFunction::sine(2.0, 0.0).validate().is_err());
        assert!(WeightFunction::cosine(1.6).validate().is_err());
        assert!(WeightFunction::cosine(0.0).validate().is_err());
        assert!(WeightFunction::exponential(1.0, -0.5).validate().is_err());
        assert!(WeightFunction::exponential(1.0, -0.3).validate().is_ok());
        let dips = CubicTable::new(vec![1.0, -0.1, 1.0]).unwrap();
        assert!(WeightFunction::TabulatedCubic(dips).validate().is_err());
    }

    #[test]
    fn spline_interpolates_nodes_and_reproduces_lines() {
        let t = CubicTable::new(vec![1.0, 1.5, 2.0, 2.5, 3.0]).unwrap();
        for k in 0..=4 {
            let x = k as f64 / 4.0;
            let (s, ds, d2s) = t.eval(x);
            assert!((s - (1.0 + 2.0 * x)).abs() < 1e-14);
            assert!((ds - 2.0).abs() < 1e-12);
            assert!(d2s.abs() < 1e-10);
        }
    }

    #[test]
    fn json_round_trip_keeps_family() {
        for w in families() {
            let text = serde_json::to_string(&w).unwrap();
            let back: WeightFunction = serde_json::from_str(&text).unwrap();
            assert_eq!(back.family_name(), w.family_name());
            assert!((back.value(0.37) - w.value(0.37)).abs() < 1e-15);
        }
    }
}

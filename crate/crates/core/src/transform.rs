//! Kirchhoff-type change of variables for `u_t = kappa(u) u_xx + g(u) u_x^2`.
//!
//! With `gamma(u) = int_0^u exp(int_0^s g/kappa) ds` the state `w = gamma(u)`
//! solves the quasi-linear problem `w_t = kappa(gamma^{-1}(w)) w_xx`. The map is
//! tabulated once on a finite domain; nothing outside the table is
//! extrapolated.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bounds::FadingMemoryTracker;
use crate::error::{Error, Result};
use crate::grid::GridProfile;
use crate::model::{BoundaryCondition, CoefficientField, PdeProblem, StateFn};

/// Nodes on each side of zero, zero included.
pub const HALF_TABLE_NODES: usize = 2049;
pub const QUADRATURE_TOL: f64 = 1e-10;
const INVERSE_TOL: f64 = 1e-10;
const INVERSE_STEP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TransformTable", into = "TransformTable")]
pub struct TransformSpec {
    kappa: StateFn,
    g: StateFn,
    kappa_star: f64,
    nodes: Vec<f64>,
    gamma: Vec<f64>,
    /// `int_0^s g/kappa` at each node; `gamma' = exp(inner)`.
    inner: Vec<f64>,
    zero_index: usize,
}

/// On-disk form of a [`TransformSpec`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformTable {
    pub kappa: StateFn,
    pub g: StateFn,
    pub kappa_star: f64,
    pub nodes: Vec<f64>,
    pub gamma: Vec<f64>,
    pub inner: Vec<f64>,
}

impl From<TransformSpec> for TransformTable {
    fn from(spec: TransformSpec) -> Self {
        Self {
            kappa: spec.kappa,
            g: spec.g,
            kappa_star: spec.kappa_star,
            nodes: spec.nodes,
            gamma: spec.gamma,
            inner: spec.inner,
        }
    }
}

impl TryFrom<TransformTable> for TransformSpec {
    type Error = Error;

    fn try_from(table: TransformTable) -> Result<Self> {
        let n = table.nodes.len();
        if n < 3 || table.gamma.len() != n || table.inner.len() != n {
            return Err(Error::InvalidTable("node arrays have inconsistent lengths".into()));
        }
        let zero_index = table
            .nodes
            .iter()
            .position(|&x| x == 0.0)
            .ok_or_else(|| Error::InvalidTable("zero is not a table node".into()))?;
        let spec = Self {
            kappa: table.kappa,
            g: table.g,
            kappa_star: table.kappa_star,
            nodes: table.nodes,
            gamma: table.gamma,
            inner: table.inner,
            zero_index,
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive_step(&f, a, b, fa, fm, fb, whole, tol, 40)
}

impl TransformSpec {
    /// Tabulates `gamma` on `[u_lo, u_hi]` (which must contain zero in its
    /// interior) with [`HALF_TABLE_NODES`] equispaced nodes on each side.
    pub fn build(kappa: StateFn, g: StateFn, kappa_star: f64, u_lo: f64, u_hi: f64) -> Result<Self> {
        if !(u_lo < 0.0 && u_hi > 0.0 && u_lo.is_finite() && u_hi.is_finite()) {
            return Err(Error::InvalidTable(format!(
                "domain [{u_lo}, {u_hi}] must be finite and straddle zero"
            )));
        }
        let m = HALF_TABLE_NODES - 1;
        let mut nodes: Vec<f64> = (0..m).map(|k| u_lo * (m - k) as f64 / m as f64).collect();
        nodes.extend((0..=m).map(|k| u_hi * k as f64 / m as f64));
        let zero_index = m;
        let ratio = |s: f64| g.eval(s) / kappa.eval(s);

        let n = nodes.len();
        let mut inner = vec![0.0; n];
        let mut gamma = vec![0.0; n];
        let mut fill = |range: &mut dyn Iterator<Item = (usize, usize)>| {
            for (from, to) in range {
                let (a, b) = (nodes[from], nodes[to]);
                let base = inner[from];
                let tol = QUADRATURE_TOL * (b - a).abs();
                let outer = |s: f64| (base + adaptive_simpson(ratio, a, s, tol)).exp();
                inner[to] = base + adaptive_simpson(ratio, a, b, tol);
                gamma[to] = gamma[from] + adaptive_simpson(outer, a, b, tol);
            }
        };
        fill(&mut (zero_index..n - 1).map(|j| (j, j + 1)));
        fill(&mut (1..=zero_index).rev().map(|j| (j, j - 1)));

        let spec = Self {
            kappa,
            g,
            kappa_star,
            nodes,
            gamma,
            inner,
            zero_index,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if !(self.kappa_star > 0.0) {
            return Err(Error::InvalidTable(format!(
                "kappa_star {} must be positive",
                self.kappa_star
            )));
        }
        if self.nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidTable("nodes are not strictly increasing".into()));
        }
        if let Some(j) = self.gamma.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidTable(format!(
                "gamma is not strictly increasing at node {j}"
            )));
        }
        if self.gamma[self.zero_index] != 0.0 || self.inner[self.zero_index] != 0.0 {
            return Err(Error::InvalidTable("gamma(0) must be exactly 0".into()));
        }
        if self.inner.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidTable("non-finite derivative table".into()));
        }
        if let Some(&u) = self.nodes.iter().find(|&&u| !(self.kappa.eval(u) >= self.kappa_star)) {
            return Err(Error::InvalidTable(format!(
                "kappa({u}) = {} is below kappa_star {}",
                self.kappa.eval(u),
                self.kappa_star
            )));
        }
        Ok(())
    }

    pub fn kappa(&self) -> &StateFn {
        &self.kappa
    }

    pub fn g(&self) -> &StateFn {
        &self.g
    }

    pub fn kappa_star(&self) -> f64 {
        self.kappa_star
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.nodes[0], *self.nodes.last().unwrap())
    }

    /// `(gamma(u_lo), gamma(u_hi))`.
    pub fn range(&self) -> (f64, f64) {
        (self.gamma[0], *self.gamma.last().unwrap())
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn table(&self) -> &[f64] {
        &self.gamma
    }

    fn segment(&self, u: f64) -> usize {
        let j = self.nodes.partition_point(|&x| x <= u);
        j.clamp(1, self.nodes.len() - 1) - 1
    }

    fn hermite(&self, j: usize, u: f64) -> (f64, f64) {
        let (x0, x1) = (self.nodes[j], self.nodes[j + 1]);
        let h = x1 - x0;
        let s = (u - x0) / h;
        let (y0, y1) = (self.gamma[j], self.gamma[j + 1]);
        let (d0, d1) = (self.inner[j].exp() * h, self.inner[j + 1].exp() * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let value = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * d0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * d1;
        let slope = ((6.0 * s2 - 6.0 * s) * y0
            + (3.0 * s2 - 4.0 * s + 1.0) * d0
            + (-6.0 * s2 + 6.0 * s) * y1
            + (3.0 * s2 - 2.0 * s) * d1)
            / h;
        (value, slope)
    }

    fn check_domain(&self, u: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        if u >= lo && u <= hi {
            Ok(())
        } else {
            Err(Error::TableDomainExceeded { value: u, lo, hi })
        }
    }

    pub fn gamma(&self, u: f64) -> Result<f64> {
        self.check_domain(u)?;
        if u == 0.0 {
            return Ok(0.0);
        }
        Ok(self.hermite(self.segment(u), u).0)
    }

    /// `gamma'(u)` of the interpolant.
    pub fn gamma_derivative(&self, u: f64) -> Result<f64> {
        self.check_domain(u)?;
        Ok(self.hermite(self.segment(u), u).1)
    }

    pub fn gamma_inverse(&self, w: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(w >= lo && w <= hi) {
            return Err(Error::TableDomainExceeded { value: w, lo, hi });
        }
        if w == 0.0 {
            return Ok(0.0);
        }
        let j = self.gamma.partition_point(|&y| y <= w).clamp(1, self.gamma.len() - 1) - 1;
        let (mut a, mut b) = (self.nodes[j], self.nodes[j + 1]);
        let tol = INVERSE_TOL * (1.0 + w.abs());
        let mut u = a + (b - a) * (w - self.gamma[j]) / (self.gamma[j + 1] - self.gamma[j]);
        for _ in 0..100 {
            let (value, slope) = self.hermite(j, u);
            let residual = value - w;
            // A small residual alone is not enough where gamma' is small.
            if residual.abs() <= tol && (residual / slope).abs() <= INVERSE_STEP_TOL * (1.0 + u.abs()) {
                return Ok(u);
            }
            if residual > 0.0 {
                b = u;
            } else {
                a = u;
            }
            let newton = u - residual / slope;
            u = if slope > 0.0 && newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
        }
        Ok(u)
    }

    /// `(gamma_1(s), gamma_2(s)) = (min, max)(gamma(s), -gamma(-s))`.
    pub fn gamma_envelopes(&self, s: f64) -> Result<(f64, f64)> {
        if !(s >= 0.0) {
            return Err(Error::InvalidConfig(format!("envelope argument {s} must be >= 0")));
        }
        let plus = self.gamma(s)?;
        let minus = -self.gamma(-s)?;
        Ok((plus.min(minus), plus.max(minus)))
    }

    /// Largest `s` with `+-s` in the table.
    pub fn symmetric_radius(&self) -> f64 {
        let (lo, hi) = self.domain();
        hi.min(-lo)
    }

    /// Inverse of `gamma_1` by bisection on `[0, symmetric_radius]`.
    pub fn gamma1_inverse(&self, v: f64) -> Result<f64> {
        let radius = self.symmetric_radius();
        let top = self.gamma_envelopes(radius)?.0;
        if !(v >= 0.0 && v <= top) {
            return Err(Error::TableDomainExceeded { value: v, lo: 0.0, hi: top });
        }
        if v == 0.0 {
            return Ok(0.0);
        }
        let (mut a, mut b) = (0.0, radius);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if self.gamma_envelopes(m)?.0 < v {
                a = m;
            } else {
                b = m;
            }
        }
        Ok(b)
    }

    /// Largest admissible `zeta` for the angle `phi`: `kappa_star (pi - 2 phi)^2`.
    pub fn decay_limit(&self, phi: f64) -> f64 {
        self.kappa_star * (std::f64::consts::PI - 2.0 * phi).powi(2)
    }

    fn check_gain_args(&self, phi: f64, zeta: f64, s: f64, t: f64) -> Result<()> {
        if !(phi > 0.0 && phi < FRAC_PI_2) {
            return Err(Error::InvalidConfig(format!("phi {phi} outside (0, pi/2)")));
        }
        if !(s >= 0.0 && t >= 0.0) {
            return Err(Error::InvalidConfig(format!("gain arguments s = {s}, t = {t} must be >= 0")));
        }
        let limit = self.decay_limit(phi);
        if !(zeta >= 0.0) || (t > 0.0 && zeta >= limit) {
            return Err(Error::InvalidZeta { zeta, sigma: limit });
        }
        Ok(())
    }

    /// `omega_zeta(s, t) = gamma_1^{-1}(exp(-zeta t) gamma_2(s) / sin(phi))`.
    pub fn iss_gain(&self, phi: f64, zeta: f64, s: f64, t: f64) -> Result<f64> {
        self.check_gain_args(phi, zeta, s, t)?;
        let g2 = self.gamma_envelopes(s)?.1;
        self.gamma1_inverse((-zeta * t).exp() * g2 / phi.sin())
    }

    pub fn save_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn load_json(text: &str) -> Result<Self> {
        let table: TransformTable = serde_json::from_str(text)?;
        Self::try_from(table)
    }
}

/// Maps `problem`, of the form `u_t = kappa(u) u_xx + g(u) u_x^2` with Dirichlet
/// data, to the problem for `w = gamma(u)`.
pub fn transform_problem(spec: &Arc<TransformSpec>, original: &PdeProblem) -> Result<PdeProblem> {
    let shape_ok = matches!(&original.a, CoefficientField::State { function } if *function == spec.kappa)
        && match &original.b {
            CoefficientField::StateTimesGradient { function } => *function == spec.g,
            other => other.is_zero() && spec.g == StateFn::constant(0.0),
        }
        && original.c.is_zero()
        && original.f.is_zero();
    if !shape_ok {
        return Err(Error::InvalidConfig(
            "problem is not of the form kappa(u) u_xx + g(u) u_x^2 with the transform's kappa and g".into(),
        ));
    }
    let mapped = |bc: &BoundaryCondition| match bc {
        BoundaryCondition::Dirichlet { data, through: None } => Ok(BoundaryCondition::Dirichlet {
            data: data.clone(),
            through: Some(spec.clone()),
        }),
        _ => Err(Error::InvalidConfig(
            "the transformation needs plain Dirichlet boundary conditions".into(),
        )),
    };
    let initial = map_profile(&original.initial, |u| spec.gamma(u))?;
    Ok(PdeProblem {
        a: CoefficientField::StateThroughInverse {
            function: spec.kappa.clone(),
            transform: spec.clone(),
        },
        b: CoefficientField::zero(),
        c: CoefficientField::zero(),
        f: CoefficientField::zero(),
        left: mapped(&original.left)?,
        right: mapped(&original.right)?,
        horizon: original.horizon,
        initial,
    })
}

/// Applies `op` nodewise.
pub fn map_profile(profile: &GridProfile, op: impl Fn(f64) -> Result<f64>) -> Result<GridProfile> {
    let values = profile.values().iter().map(|&v| op(v)).collect::<Result<Vec<_>>>()?;
    GridProfile::new(profile.grid(), values)
}

/// Right-hand side of the fading-memory gain estimate, evaluated
/// incrementally along a trajectory.
///
/// Since `gamma_1^{-1}` is increasing, the supremum over past disturbance
/// samples reduces to a fading maximum of `gamma_2(|d|)`.
#[derive(Debug, Clone)]
pub struct GainEnvelope {
    spec: Arc<TransformSpec>,
    phi: f64,
    zeta: f64,
    initial: f64,
    tracker: FadingMemoryTracker,
}

impl GainEnvelope {
    pub fn new(spec: Arc<TransformSpec>, phi: f64, zeta: f64, initial_sup: f64) -> Result<Self> {
        spec.check_gain_args(phi, zeta, initial_sup, 1.0)?;
        let initial = spec.gamma_envelopes(initial_sup)?.1;
        Ok(Self {
            spec,
            phi,
            zeta,
            initial,
            tracker: FadingMemoryTracker::new(zeta)?,
        })
    }

    /// Feeds the boundary data at time `t > 0`.
    pub fn observe(&mut self, t: f64, d0: f64, d1: f64) -> Result<()> {
        let g2 = self.spec.gamma_envelopes(d0.abs().max(d1.abs()))?.1;
        self.tracker.update(t, g2)?;
        Ok(())
    }

    /// Bound on `|u[t]|_inf` from everything observed up to `t`.
    pub fn bound(&self, t: f64) -> Result<f64> {
        let memory = self.tracker.value_at(t);
        let argument = ((-self.zeta * t).exp() * self.initial).max(memory) / self.phi.sin();
        self.spec.gamma1_inverse(argument)
    }

    /// [`Self::observe`] followed by [`Self::bound`].
    pub fn update(&mut self, t: f64, d0: f64, d1: f64) -> Result<f64> {
        self.observe(t, d0, d1)?;
        self.bound(t)
    }

    /// The bound at `t = 0`, `omega_zeta(|u[0]|, 0)`.
    pub fn at_start(&self) -> Result<f64> {
        self.spec.gamma1_inverse(self.initial / self.phi.sin())
    }
}

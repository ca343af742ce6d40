//! Method-of-lines time integration on a uniform grid.
//!
//! Interior nodes use second-order central differences. Boundary nodes are
//! not integrated: after every stage they are closed algebraically from the
//! interior, either by imposing Dirichlet data or by solving the second-order
//! one-sided Robin relation for the boundary value.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bounds::fmt17;
use crate::error::{Error, Result};
use crate::grid::GridProfile;
use crate::model::{evaluate_coefficients_into, BoundaryCondition, CoefficientArrays, PdeProblem};

/// `|u|_inf` above this is reported as blow-up.
pub const BLOW_UP_LIMIT: f64 = 1e12;
/// Boundary solves with a smaller leading coefficient are rejected.
pub const SINGULAR_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    ExplicitRk4,
    /// Backward Euler diffusion, forward Euler advection/reaction/forcing.
    SemiImplicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default = "default_cfl")]
    pub cfl_safety: f64,
    pub output_times: Vec<f64>,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    /// Optional cap on the step; the semi-implicit scheme defaults to `h`.
    #[serde(default)]
    pub max_dt: Option<f64>,
}

fn default_cfl() -> f64 {
    0.4
}

fn default_max_steps() -> usize {
    50_000_000
}

impl SolverConfig {
    /// `n_outputs + 1` equispaced output times on `[0, horizon]`.
    pub fn uniform(scheme: Scheme, horizon: f64, n_outputs: usize) -> Self {
        let n = n_outputs.max(1);
        let mut output_times: Vec<f64> =
            (0..=n).map(|k| horizon * k as f64 / n as f64).collect();
        output_times[n] = horizon;
        Self {
            scheme,
            cfl_safety: default_cfl(),
            output_times,
            max_steps: default_max_steps(),
            max_dt: None,
        }
    }

    pub fn validate(&self, horizon: f64) -> Result<()> {
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "cfl_safety {} outside (0, 1]",
                self.cfl_safety
            )));
        }
        if self.output_times.is_empty() {
            return Err(Error::InvalidConfig("no output times".into()));
        }
        if self.output_times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidConfig(
                "output times must be strictly increasing".into(),
            ));
        }
        let (first, last) = (self.output_times[0], *self.output_times.last().unwrap());
        if !(first >= 0.0) || last != horizon {
            return Err(Error::InvalidConfig(format!(
                "output times must lie in [0, {horizon}] and end at the horizon"
            )));
        }
        if let Some(dt) = self.max_dt {
            if !(dt > 0.0) {
                return Err(Error::InvalidConfig(format!("max_dt {dt} must be > 0")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub profile: GridProfile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    /// `(u_x(t, 0), u_x(t, 1))` per snapshot, second-order one-sided.
    pub boundary_derivatives: Vec<(f64, f64)>,
    /// Accepted step sizes.
    pub step_sizes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub times: Vec<f64>,
    pub sup_norms: Vec<f64>,
    pub u_left: Vec<f64>,
    pub u_right: Vec<f64>,
    pub ux_left: Vec<f64>,
    pub ux_right: Vec<f64>,
    pub steps: usize,
}

impl Trajectory {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.snapshots.iter().map(|s| s.t)
    }

    pub fn final_profile(&self) -> &GridProfile {
        &self.snapshots.last().expect("trajectory has snapshots").profile
    }

    pub fn summary(&self) -> TrajectorySummary {
        TrajectorySummary {
            times: self.times().collect(),
            sup_norms: self.snapshots.iter().map(|s| s.profile.sup_norm()).collect(),
            u_left: self.snapshots.iter().map(|s| s.profile.left()).collect(),
            u_right: self.snapshots.iter().map(|s| s.profile.right()).collect(),
            ux_left: self.boundary_derivatives.iter().map(|d| d.0).collect(),
            ux_right: self.boundary_derivatives.iter().map(|d| d.1).collect(),
            steps: self.step_sizes.len(),
        }
    }

    /// Long-format CSV `t, x, u`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "x", "u"])?;
        for snap in &self.snapshots {
            let grid = snap.profile.grid();
            for (i, u) in snap.profile.values().iter().enumerate() {
                w.write_record([fmt17(snap.t), fmt17(grid.x(i)), fmt17(*u)])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// What an observer sees after each accepted step (and once at the start).
#[derive(Debug, Clone, Copy)]
pub struct StepView<'a> {
    pub t: f64,
    pub step: usize,
    pub profile: &'a GridProfile,
    /// The step landed on an output time.
    pub is_output: bool,
}

/// Interior time derivative; boundary entries are zero.
pub fn step_spatial_operator(
    problem: &PdeProblem,
    t: f64,
    profile: &GridProfile,
) -> Result<Vec<f64>> {
    let mut coeffs = CoefficientArrays::zeros(profile.grid().n_nodes());
    evaluate_coefficients_into(problem, t, profile, &mut coeffs)?;
    let mut out = vec![0.0; profile.grid().n_nodes()];
    interior_derivative(profile, &coeffs, &mut out);
    Ok(out)
}

fn interior_derivative(profile: &GridProfile, k: &CoefficientArrays, out: &mut [f64]) {
    let u = profile.values();
    let h = profile.grid().h();
    let (inv_h2, inv_2h) = (1.0 / (h * h), 0.5 / h);
    let n = u.len() - 1;
    out[0] = 0.0;
    out[n] = 0.0;
    for i in 1..n {
        let d2 = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv_h2;
        let d1 = (u[i + 1] - u[i - 1]) * inv_2h;
        out[i] = k.a[i] * d2 + k.b[i] * d1 + k.c[i] * u[i] + k.f[i];
    }
}

/// Closes the boundary rows of `profile` at time `t`.
pub fn apply_boundary(problem: &PdeProblem, t: f64, profile: &GridProfile) -> Result<GridProfile> {
    let mut closed = profile.clone();
    close_boundary(problem, t, &mut closed)?;
    Ok(closed)
}

fn close_boundary(problem: &PdeProblem, t: f64, profile: &mut GridProfile) -> Result<()> {
    let left = boundary_value(&problem.left, t, profile, true)?;
    let right = boundary_value(&problem.right, t, profile, false)?;
    let n = profile.grid().n_cells();
    let values = profile.values_mut();
    values[0] = left;
    values[n] = right;
    Ok(())
}

fn boundary_value(bc: &BoundaryCondition, t: f64, profile: &GridProfile, left: bool) -> Result<f64> {
    let d = bc.data_at(t)?;
    let Some((mu, lambda)) = bc.robin_coefficients(profile)? else {
        return Ok(d);
    };
    let u = profile.values();
    let n = u.len() - 1;
    let h = profile.grid().h();
    let lead = 1.5 * mu / h + lambda;
    if lead.abs() < SINGULAR_FLOOR {
        return Err(Error::SingularBoundarySolve(lead));
    }
    Ok(if left {
        (mu * (4.0 * u[1] - u[2]) / (2.0 * h) - d) / lead
    } else {
        (d + mu * (4.0 * u[n - 1] - u[n - 2]) / (2.0 * h)) / lead
    })
}

/// Coefficients of a linear boundary row `sum_j coef_j u_j = rhs` at the new time.
struct BoundaryRow {
    /// Coefficients on the boundary node and its two neighbours going inward.
    coef: [f64; 3],
    rhs: f64,
}

fn boundary_row(bc: &BoundaryCondition, t: f64, profile: &GridProfile, left: bool) -> Result<BoundaryRow> {
    let d = bc.data_at(t)?;
    let Some((mu, lambda)) = bc.robin_coefficients(profile)? else {
        return Ok(BoundaryRow {
            coef: [1.0, 0.0, 0.0],
            rhs: d,
        });
    };
    let h = profile.grid().h();
    let lead = 1.5 * mu / h + lambda;
    if lead.abs() < SINGULAR_FLOOR {
        return Err(Error::SingularBoundarySolve(lead));
    }
    let (c1, c2) = (-2.0 * mu / h, 0.5 * mu / h);
    // left: -(mu u_x - lambda u0) = -d ; right: mu u_x + lambda uN = d
    Ok(BoundaryRow {
        coef: [lead, c1, c2],
        rhs: if left { -d } else { d },
    })
}

struct Workspace {
    coeffs: CoefficientArrays,
    stage: GridProfile,
    k: [Vec<f64>; 4],
}

impl Workspace {
    fn new(profile: &GridProfile) -> Self {
        let n = profile.grid().n_nodes();
        Self {
            coeffs: CoefficientArrays::zeros(n),
            stage: profile.clone(),
            k: [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        }
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Largest admissible step for the current coefficients.
fn step_limit(config: &SolverConfig, h: f64, coeffs: &CoefficientArrays) -> f64 {
    let (a, b, c) = (max_abs(&coeffs.a), max_abs(&coeffs.b), max_abs(&coeffs.c));
    let cfl = config.cfl_safety;
    let mut dt = match config.scheme {
        Scheme::ExplicitRk4 => {
            let den = 2.0 * a + h * b;
            if den > 0.0 {
                cfl * h * h / den
            } else {
                f64::INFINITY
            }
        }
        Scheme::SemiImplicit => {
            let mut dt = config.max_dt.unwrap_or(h);
            if b > 0.0 {
                dt = dt.min(cfl * h / b);
            }
            dt
        }
    };
    if c > 0.0 {
        dt = dt.min(cfl / c);
    }
    if let Some(cap) = config.max_dt {
        dt = dt.min(cap);
    }
    dt
}

fn rk4_step(
    problem: &PdeProblem,
    t: f64,
    dt: f64,
    u: &mut GridProfile,
    ws: &mut Workspace,
) -> Result<()> {
    // k1 uses ws.coeffs evaluated at (t, u) by the caller.
    interior_derivative(u, &ws.coeffs, &mut ws.k[0]);
    let n = u.values().len();
    for (stage, (c, src)) in [(0.5, 0), (0.5, 1), (1.0, 2)].into_iter().enumerate() {
        let ts = t + c * dt;
        {
            let base = u.values();
            let k_src = &ws.k[src];
            let dst = ws.stage.values_mut();
            for i in 0..n {
                dst[i] = base[i] + c * dt * k_src[i];
            }
        }
        close_boundary(problem, ts, &mut ws.stage)?;
        evaluate_coefficients_into(problem, ts, &ws.stage, &mut ws.coeffs)?;
        let (_, tail) = ws.k.split_at_mut(stage + 1);
        interior_derivative(&ws.stage, &ws.coeffs, &mut tail[0]);
    }
    let values = u.values_mut();
    for (i, v) in values.iter_mut().enumerate().take(n) {
        *v += dt / 6.0 * (ws.k[0][i] + 2.0 * ws.k[1][i] + 2.0 * ws.k[2][i] + ws.k[3][i]);
    }
    close_boundary(problem, t + dt, u)
}

fn semi_implicit_step(
    problem: &PdeProblem,
    t: f64,
    dt: f64,
    u: &mut GridProfile,
    ws: &mut Workspace,
) -> Result<()> {
    let grid = u.grid();
    let n = grid.n_cells();
    let h = grid.h();
    let k = &ws.coeffs;
    let old = u.values();

    let mut lower = vec![0.0; n + 1];
    let mut diag = vec![0.0; n + 1];
    let mut upper = vec![0.0; n + 1];
    let mut rhs = vec![0.0; n + 1];
    for i in 1..n {
        let alpha = dt * k.a[i] / (h * h);
        lower[i] = -alpha;
        diag[i] = 1.0 + 2.0 * alpha;
        upper[i] = -alpha;
        let d1 = (old[i + 1] - old[i - 1]) / (2.0 * h);
        rhs[i] = old[i] + dt * (k.b[i] * d1 + k.c[i] * old[i] + k.f[i]);
    }

    let t_new = t + dt;
    let left = boundary_row(&problem.left, t_new, u, true)?;
    let right = boundary_row(&problem.right, t_new, u, false)?;

    // Eliminate the second-neighbour entry of each boundary row with the
    // adjacent interior row so the system stays tridiagonal.
    let eliminate = |row: &BoundaryRow, near_lower: f64, near_diag: f64, near_upper: f64, near_rhs: f64| -> Result<(f64, f64, f64)> {
        if row.coef[2] == 0.0 {
            return Ok((row.coef[0], row.coef[1], row.rhs));
        }
        // `near_upper` multiplies the second neighbour in the adjacent row.
        if near_upper == 0.0 {
            return Err(Error::InvalidConfig(
                "semi-implicit Robin closure needs positive diffusion next to the boundary".into(),
            ));
        }
        let m = row.coef[2] / near_upper;
        Ok((
            row.coef[0] - m * near_lower,
            row.coef[1] - m * near_diag,
            row.rhs - m * near_rhs,
        ))
    };
    let (d0, u0c, r0) = eliminate(&left, lower[1], diag[1], upper[1], rhs[1])?;
    diag[0] = d0;
    upper[0] = u0c;
    rhs[0] = r0;
    let (dn, ln, rn) = eliminate(&right, upper[n - 1], diag[n - 1], lower[n - 1], rhs[n - 1])?;
    diag[n] = dn;
    lower[n] = ln;
    rhs[n] = rn;

    let solution = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;
    u.values_mut().copy_from_slice(&solution);
    Ok(())
}

/// Thomas algorithm; `lower[0]` and `upper[n]` are ignored.
fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot.abs() < SINGULAR_FLOOR {
        return Err(Error::SingularBoundarySolve(pivot));
    }
    c[0] = upper[0] / pivot;
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i] * c[i - 1];
        if pivot.abs() < SINGULAR_FLOOR {
            return Err(Error::SingularBoundarySolve(pivot));
        }
        c[i] = if i + 1 < n { upper[i] / pivot } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / pivot;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    Ok(x)
}

pub fn integrate(problem: &PdeProblem, config: &SolverConfig) -> Result<Trajectory> {
    integrate_observed(problem, config, |_| Ok(()))
}

/// Integrates to the horizon, landing exactly on every output time, and
/// calls `observer` at `t = 0` and after every accepted step.
pub fn integrate_observed<F>(problem: &PdeProblem, config: &SolverConfig, mut observer: F) -> Result<Trajectory>
where
    F: FnMut(&StepView<'_>) -> Result<()>,
{
    config.validate(problem.horizon)?;
    let h = problem.grid().h();
    let mut u = apply_boundary(problem, 0.0, &problem.initial)?;
    let mut ws = Workspace::new(&u);
    let mut traj = Trajectory {
        snapshots: Vec::with_capacity(config.output_times.len()),
        boundary_derivatives: Vec::with_capacity(config.output_times.len()),
        step_sizes: Vec::new(),
    };
    let record = |traj: &mut Trajectory, t: f64, u: &GridProfile| {
        traj.boundary_derivatives
            .push((u.left_derivative(), u.right_derivative()));
        traj.snapshots.push(Snapshot { t, profile: u.clone() });
    };

    let mut t = 0.0;
    let mut next = 0;
    let at_start = config.output_times[0] == 0.0;
    if at_start {
        record(&mut traj, t, &u);
        next = 1;
    }
    observer(&StepView {
        t,
        step: 0,
        profile: &u,
        is_output: at_start,
    })?;

    while next < config.output_times.len() {
        let target = config.output_times[next];
        evaluate_coefficients_into(problem, t, &u, &mut ws.coeffs)?;
        let mut dt = step_limit(config, h, &ws.coeffs);
        let remaining = target - t;
        let landing = dt >= remaining * (1.0 - 1e-12);
        if landing {
            dt = remaining;
        } else if dt > 0.5 * remaining {
            // Split what is left evenly instead of leaving a sliver.
            dt = 0.5 * remaining;
        }
        match config.scheme {
            Scheme::ExplicitRk4 => rk4_step(problem, t, dt, &mut u, &mut ws)?,
            Scheme::SemiImplicit => semi_implicit_step(problem, t, dt, &mut u, &mut ws)?,
        }
        t = if landing { target } else { t + dt };
        traj.step_sizes.push(dt);
        let steps = traj.step_sizes.len();
        if steps > config.max_steps {
            return Err(Error::StepBudgetExceeded(config.max_steps));
        }
        let norm = u.values().iter().fold(0.0_f64, |m, v| {
            if v.is_nan() {
                f64::NAN
            } else {
                m.max(v.abs())
            }
        });
        if !(norm <= BLOW_UP_LIMIT) {
            return Err(Error::BlowUp { t, norm });
        }
        if landing {
            record(&mut traj, t, &u);
            next += 1;
        }
        observer(&StepView {
            t,
            step: steps,
            profile: &u,
            is_output: landing,
        })?;
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SpatialGrid;
    use crate::model::{CoefficientField, DisturbanceSignal, Functional, ProfileMeasure, StateFn};
    use std::f64::consts::PI;

    fn grid(n: usize) -> SpatialGrid {
        SpatialGrid::new(n).unwrap()
    }

    fn sine_profile(n: usize) -> GridProfile {
        GridProfile::from_fn(grid(n), |x| (PI * x).sin()).unwrap()
    }

    #[test]
    fn heat_operator_is_second_order() {
        let mut errors = Vec::new();
        for n in [32, 64, 128] {
            let p = sine_profile(n);
            let problem = PdeProblem::heat(p.clone(), 1.0);
            let du = step_spatial_operator(&problem, 0.0, &p).unwrap();
            let err = (1..n)
                .map(|i| (du[i] + PI * PI * (PI * p.grid().x(i)).sin()).abs())
                .fold(0.0, f64::max);
            errors.push(err);
        }
        for w in errors.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
        }
    }

    #[test]
    fn constants_are_stationary() {
        let k = 2.5;
        let p = GridProfile::from_fn(grid(16), |_| k).unwrap();
        let mut problem = PdeProblem::heat(p.clone(), 1.0);
        problem.left = BoundaryCondition::dirichlet(DisturbanceSignal::constant(k));
        problem.right = BoundaryCondition::dirichlet(DisturbanceSignal::constant(k));
        let du = step_spatial_operator(&problem, 0.0, &p).unwrap();
        assert!(du.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gradient_squared_term_on_linear_profile() {
        let p = GridProfile::from_fn(grid(10), |x| x).unwrap();
        let mut problem = PdeProblem::heat(p.clone(), 1.0);
        problem.b = CoefficientField::StateTimesGradient {
            function: StateFn::constant(1.0),
        };
        let du = step_spatial_operator(&problem, 0.0, &p).unwrap();
        for &v in &du[1..10] {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dirichlet_closure() {
        let p = GridProfile::zeros(grid(8));
        let mut problem = PdeProblem::heat(p.clone(), 10.0);
        problem.left = BoundaryCondition::dirichlet(DisturbanceSignal::sinusoid(1.0, 1.0));
        let closed = apply_boundary(&problem, PI / 2.0, &p).unwrap();
        assert_eq!(closed.left(), 1.0);
    }

    #[test]
    fn neumann_closure_on_flat_data() {
        let p = GridProfile::from_fn(grid(8), |_| 5.0).unwrap();
        let mut problem = PdeProblem::heat(p.clone(), 1.0);
        problem.left = BoundaryCondition::robin(1.0, 0.0, DisturbanceSignal::Zero);
        let mut probe = p.clone();
        probe.values_mut()[0] = -100.0;
        let closed = apply_boundary(&problem, 0.0, &probe).unwrap();
        assert!((closed.left() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn nonlocal_closure_scalar_solve() {
        let n = 100;
        let p = GridProfile::from_fn(grid(n), |_| 1.0).unwrap();
        let mut problem = PdeProblem::heat(p.clone(), 1.0);
        problem.left = BoundaryCondition::nonlocal_robin(
            1.0,
            Functional::default().with_term(1.0, ProfileMeasure::SupNorm),
            DisturbanceSignal::Zero,
        );
        let closed = apply_boundary(&problem, 0.0, &p).unwrap();
        // (-3 u0 + 4 - 1) / 0.02 = 2 u0
        assert!((closed.left() - 3.0 / 3.04).abs() < 1e-14);
    }

    #[test]
    fn singular_closure_is_rejected() {
        let n = 4;
        let p = GridProfile::zeros(grid(n));
        let mut problem = PdeProblem::heat(p.clone(), 1.0);
        // 3 mu / (2h) + lambda = 0 with h = 1/4, mu = 1
        problem.right = BoundaryCondition::robin(1.0, -6.0, DisturbanceSignal::Zero);
        assert!(matches!(
            apply_boundary(&problem, 0.0, &p),
            Err(Error::SingularBoundarySolve(_))
        ));
    }

    #[test]
    fn heat_decay_matches_analytic() {
        let n = 64;
        let problem = PdeProblem::heat(sine_profile(n), 0.1);
        let traj = integrate(&problem, &SolverConfig::uniform(Scheme::ExplicitRk4, 0.1, 10)).unwrap();
        assert_eq!(traj.snapshots.len(), 11);
        for snap in &traj.snapshots {
            let exact = (-PI * PI * snap.t).exp();
            assert!((snap.profile.sup_norm() - exact).abs() < 1e-3);
        }
    }

    #[test]
    fn semi_implicit_heat_decay() {
        let n = 64;
        let problem = PdeProblem::heat(sine_profile(n), 0.1);
        let mut config = SolverConfig::uniform(Scheme::SemiImplicit, 0.1, 10);
        config.max_dt = Some(1e-4);
        let traj = integrate(&problem, &config).unwrap();
        let exact = (-PI * PI * 0.1f64).exp();
        assert!((traj.final_profile().sup_norm() - exact).abs() < 2e-3);
    }

    #[test]
    fn semi_implicit_robin_matches_explicit() {
        let n = 64;
        let p = GridProfile::from_fn(grid(n), |x| 1.0 + 0.5 * (PI * x).cos()).unwrap();
        let mut problem = PdeProblem::heat(p, 0.2);
        problem.left = BoundaryCondition::robin(1.0, 2.0, DisturbanceSignal::sinusoid(0.3, 4.0));
        problem.right = BoundaryCondition::nonlocal_robin(
            1.0,
            Functional::default().with_term(0.5, ProfileMeasure::SupNorm),
            DisturbanceSignal::constant(0.1),
        );
        let explicit = integrate(&problem, &SolverConfig::uniform(Scheme::ExplicitRk4, 0.2, 4)).unwrap();
        let mut cfg = SolverConfig::uniform(Scheme::SemiImplicit, 0.2, 4);
        cfg.max_dt = Some(2e-5);
        let semi = integrate(&problem, &cfg).unwrap();
        let diff = explicit
            .final_profile()
            .values()
            .iter()
            .zip(semi.final_profile().values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-3, "diff {diff}");
        // Robin relation holds at the final snapshot.
        let fin = explicit.final_profile();
        let d0 = 0.3 * (4.0 * 0.2f64).sin();
        assert!((fin.left_derivative() - 2.0 * fin.left() - d0).abs() < 1e-10);
    }

    #[test]
    fn zero_data_stays_zero() {
        let problem = PdeProblem::heat(GridProfile::zeros(grid(32)), 0.5);
        let traj = integrate(&problem, &SolverConfig::uniform(Scheme::ExplicitRk4, 0.5, 5)).unwrap();
        assert!(traj.snapshots.iter().all(|s| s.profile.sup_norm() == 0.0));
    }

    #[test]
    fn blow_up_and_budget() {
        let mut problem = PdeProblem::heat(sine_profile(8), 50.0);
        problem.c = CoefficientField::constant(20.0);
        let mut cfg = SolverConfig::uniform(Scheme::ExplicitRk4, 50.0, 1);
        assert!(matches!(integrate(&problem, &cfg), Err(Error::BlowUp { .. })));
        cfg.max_steps = 10;
        assert!(matches!(
            integrate(&problem, &cfg),
            Err(Error::StepBudgetExceeded(10))
        ));
    }

    #[test]
    fn config_validation() {
        let mut cfg = SolverConfig::uniform(Scheme::ExplicitRk4, 1.0, 4);
        assert!(cfg.validate(1.0).is_ok());
        assert!(cfg.validate(2.0).is_err());
        cfg.cfl_safety = 0.0;
        assert!(cfg.validate(1.0).is_err());
        cfg.cfl_safety = 0.4;
        cfg.output_times = vec![0.0, 0.5, 0.5, 1.0];
        assert!(cfg.validate(1.0).is_err());
    }

    #[test]
    fn integration_is_deterministic() {
        let mut problem = PdeProblem::heat(sine_profile(32), 0.05);
        problem.c = CoefficientField::state(StateFn::Sin {
            amplitude: 2.0,
            frequency: 1.0,
            offset: 0.0,
        });
        let cfg = SolverConfig::uniform(Scheme::ExplicitRk4, 0.05, 3);
        let a = integrate(&problem, &cfg).unwrap();
        let b = integrate(&problem, &cfg).unwrap();
        assert_eq!(a, b);
    }
}

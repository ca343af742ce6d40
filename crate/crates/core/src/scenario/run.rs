use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::{ResolvedCertificate, Scenario};
use crate::bounds::{
    BoundTrace, BoundaryTermSpec, BoundarySample, Envelope, EnvelopeConfig, FadingMemoryTracker, WeightedNorm,
};
use crate::certificate::{WeightCertificate, WeightFunction};
use crate::error::{Error, Result};
use crate::grid::GridProfile;
use crate::model::{validate_problem, PdeProblem};
use crate::solver::{integrate, integrate_observed, Trajectory};
use crate::transform::{map_profile, transform_problem, GainEnvelope, TransformSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Pass,
    /// Certificate synthesis failed as the scenario declared it would.
    ExpectedInfeasible,
    BoundViolation,
    Infeasible,
    ModelError,
}

impl RunStatus {
    pub fn passed(self) -> bool {
        matches!(self, Self::Pass | Self::ExpectedInfeasible)
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Self::Pass | Self::ExpectedInfeasible => 0,
            Self::BoundViolation => 1,
            Self::Infeasible => 2,
            Self::ModelError => 3,
        }
    }
}

/// Pipeline stage at which a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Model,
    Certificate,
    Simulation,
    Bounds,
    Transform,
}

/// Check of the envelope written directly in terms of the disturbances,
/// `max(|d0| / den0, |d1| / den1)`, next to the one built from `r0`, `r1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceCheck {
    pub denominators: (f64, f64),
    /// Samples where `r0 > |d0| / den0 + tol` or `r1 > |d1| / den1 + tol`.
    pub component_failures: usize,
    pub max_component_excess: f64,
    pub violations: usize,
    pub max_excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaSummary {
    pub zeta: f64,
    pub tol_bound: f64,
    pub observed: usize,
    pub violations: usize,
    pub max_excess: f64,
    /// `sup_t lhs / rhs`.
    pub tightness: f64,
    pub time_of_max_ratio: f64,
    pub dominance_failures: usize,
    pub disturbance: Option<DisturbanceCheck>,
}

impl ZetaSummary {
    pub fn is_clean(&self) -> bool {
        self.violations == 0
            && self.dominance_failures == 0
            && self
                .disturbance
                .as_ref()
                .is_none_or(|d| d.violations == 0 && d.component_failures == 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainCheck {
    pub zeta: f64,
    pub violations: usize,
    /// `max_t (|u[t]|_inf - omega bound)`.
    pub max_excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformReport {
    pub phi: f64,
    pub kappa_star: f64,
    /// `max_t |gamma^{-1}(w[t]) - u[t]|_inf` over output times.
    pub conjugacy_error: f64,
    pub conjugacy_tolerance: f64,
    pub gain_checks: Vec<GainCheck>,
}

impl TransformReport {
    pub fn passed(&self) -> bool {
        self.conjugacy_error <= self.conjugacy_tolerance && self.gain_checks.iter().all(|g| g.violations == 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStats {
    pub steps: usize,
    pub initial_sup: f64,
    pub final_sup: f64,
    /// `max_t | |u[t]|_inf / |u[0]|_inf - 1 |` over output times.
    pub max_sup_drift: f64,
}

impl TrajectoryStats {
    fn of(traj: &Trajectory) -> Self {
        let initial = traj.snapshots[0].profile.sup_norm();
        let drift = traj
            .snapshots
            .iter()
            .map(|s| {
                if initial > 0.0 {
                    (s.profile.sup_norm() / initial - 1.0).abs()
                } else {
                    s.profile.sup_norm()
                }
            })
            .fold(0.0, f64::max);
        Self {
            steps: traj.step_sizes.len(),
            initial_sup: initial,
            final_sup: traj.final_profile().sup_norm(),
            max_sup_drift: drift,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub status: RunStatus,
    pub passed: bool,
    pub failure_stage: Option<Stage>,
    pub error: Option<String>,
    pub certificate: Option<WeightCertificate>,
    pub zetas: Vec<ZetaSummary>,
    pub trajectory: Option<TrajectoryStats>,
    pub transform: Option<TransformReport>,
    pub wall_clock_seconds: f64,
}

/// Everything a run produced; the report plus the raw data behind it.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    pub trajectory: Option<Trajectory>,
    pub traces: Vec<BoundTrace>,
}

struct Failure {
    stage: Stage,
    error: Error,
}

trait AtStage<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, Failure>;
}

impl<T> AtStage<T> for Result<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, Failure> {
        self.map_err(|error| Failure { stage, error })
    }
}

fn status_of_error(stage: Stage, error: &Error) -> RunStatus {
    match (stage, error) {
        (Stage::Certificate, Error::InfeasibleCertificate(_)) => RunStatus::Infeasible,
        _ => RunStatus::ModelError,
    }
}

fn empty_report(scenario: &Scenario) -> RunReport {
    RunReport {
        scenario: scenario.name.clone(),
        status: RunStatus::ModelError,
        passed: false,
        failure_stage: None,
        error: None,
        certificate: None,
        zetas: Vec::new(),
        trajectory: None,
        transform: None,
        wall_clock_seconds: 0.0,
    }
}

fn validated_problem(scenario: &Scenario) -> Result<PdeProblem> {
    let problem = scenario.build_problem()?;
    let report = validate_problem(&problem);
    if let Some(issue) = report.issues.first() {
        return Err(Error::InvalidConfig(format!(
            "problem is not admissible ({} issues, first: {issue:?})",
            report.issues.len()
        )));
    }
    Ok(problem)
}

/// The problem the envelopes are evaluated on, with its transform if any.
fn bounded_problem(scenario: &Scenario, problem: &PdeProblem) -> Result<(PdeProblem, Option<Arc<TransformSpec>>)> {
    match &scenario.transform {
        None => Ok((problem.clone(), None)),
        Some(section) => {
            let (kappa, g, kappa_star) = section.functions(problem)?;
            let spec = Arc::new(TransformSpec::build(kappa, g, kappa_star, section.u_lo, section.u_hi)?);
            Ok((transform_problem(&spec, problem)?, Some(spec)))
        }
    }
}

/// Resolves the certificate only.
pub fn certify(scenario: &Scenario) -> Result<ResolvedCertificate> {
    let problem = validated_problem(scenario)?;
    let (bounded, _) = bounded_problem(scenario, &problem)?;
    scenario.resolve_certificate(&bounded)
}

/// Integrates the scenario's problem without any bound checking.
pub fn simulate(scenario: &Scenario) -> Result<Trajectory> {
    let problem = validated_problem(scenario)?;
    integrate(&problem, &scenario.solver.config(problem.horizon))
}

/// Denominators of the disturbance form of the envelope for the non-local
/// Robin mode: `r0 <= |d0| / (lambda0 eta(0))`, `r1 <= |d1| / (lambda1 eta(1) + eta'(1))`.
pub fn disturbance_denominators(spec: &BoundaryTermSpec, weight: &WeightFunction) -> Option<(f64, f64)> {
    match spec {
        BoundaryTermSpec::Nonlocal { lambda0, lambda1, .. } => Some((
            lambda0 * weight.value(0.0),
            lambda1 * weight.value(1.0) + weight.first_derivative(1.0),
        )),
        _ => None,
    }
}

struct DisturbanceTracker {
    denominators: (f64, f64),
    memory: FadingMemoryTracker,
    check: DisturbanceCheck,
}

/// Runs the envelopes of every requested `zeta` along one trajectory.
fn bound_trajectory(
    scenario: &Scenario,
    problem: &PdeProblem,
    resolved: &ResolvedCertificate,
) -> Result<(Trajectory, Vec<BoundTrace>, Vec<ZetaSummary>)> {
    let cert = &resolved.certificate;
    let grid = problem.grid();
    let tol = scenario.bounds.tolerance(grid);
    let spec = scenario.boundary_terms()?;
    let norm = WeightedNorm::new(cert.weight.clone(), grid)?;
    let zetas = scenario.bounds.resolve_zetas(cert.sigma);
    let mut envelopes = zetas
        .iter()
        .map(|&zeta| Envelope::new(EnvelopeConfig::new(cert.sigma, zeta, tol), norm.clone(), spec.clone()))
        .collect::<Result<Vec<_>>>()?;
    let denominators = disturbance_denominators(&spec, &cert.weight);
    let mut disturbance: Vec<Option<DisturbanceTracker>> = zetas
        .iter()
        .map(|&zeta| {
            denominators
                .map(|denominators| {
                    Ok::<_, Error>(DisturbanceTracker {
                        denominators,
                        memory: FadingMemoryTracker::new(zeta)?,
                        check: DisturbanceCheck {
                            denominators,
                            component_failures: 0,
                            max_component_excess: f64::NEG_INFINITY,
                            violations: 0,
                            max_excess: f64::NEG_INFINITY,
                        },
                    })
                })
                .transpose()
        })
        .collect::<Result<_>>()?;

    let mut forcing = vec![0.0; grid.n_nodes()];
    let config = scenario.solver.config(problem.horizon);
    let trajectory = integrate_observed(problem, &config, |view| {
        problem.f.evaluate(view.t, view.profile, &mut forcing)?;
        let sample = BoundarySample::from_profile(view.profile);
        let (d0, d1) = (problem.left.data_at(view.t)?.abs(), problem.right.data_at(view.t)?.abs());
        for (envelope, dist) in envelopes.iter_mut().zip(disturbance.iter_mut()) {
            let row = envelope.update(view.t, view.profile, &sample, &forcing, view.is_output)?;
            if let (Some(dist), true) = (dist.as_mut(), view.t > 0.0) {
                let (den0, den1) = dist.denominators;
                let (c0, c1) = (d0 / den0, d1 / den1);
                let component_excess = (row.r0 - c0).max(row.r1 - c1);
                let check = &mut dist.check;
                check.max_component_excess = check.max_component_excess.max(component_excess);
                if component_excess > tol {
                    check.component_failures += 1;
                }
                let memory = dist.memory.update(view.t, c0.max(c1))?;
                let rhs = row.rhs_ic.max(row.rhs_forcing).max(memory);
                let excess = row.lhs - rhs;
                check.max_excess = check.max_excess.max(excess);
                if excess > tol {
                    check.violations += 1;
                }
            }
        }
        Ok(())
    })?;

    let traces: Vec<BoundTrace> = envelopes.into_iter().map(Envelope::into_trace).collect();
    let summaries = traces
        .iter()
        .zip(disturbance)
        .map(|(trace, dist)| ZetaSummary {
            zeta: trace.zeta,
            tol_bound: trace.tol_bound,
            observed: trace.observed,
            violations: trace.violations.len(),
            max_excess: trace.max_excess,
            tightness: trace.max_ratio,
            time_of_max_ratio: trace.time_of_max_ratio,
            dominance_failures: trace.dominance_failures,
            disturbance: dist.map(|d| d.check),
        })
        .collect();
    Ok((trajectory, traces, summaries))
}

/// Direct simulation, conjugacy against the transformed trajectory, and the
/// gain estimate along the direct trajectory.
fn check_transform(
    scenario: &Scenario,
    problem: &PdeProblem,
    spec: &Arc<TransformSpec>,
    transformed: &Trajectory,
    zetas: &[f64],
) -> Result<TransformReport> {
    let section = scenario.transform.as_ref().expect("transform section present");
    let tol = scenario.bounds.tolerance(problem.grid());
    let config = scenario.solver.config(problem.horizon);
    let initial_sup = problem.initial.sup_norm();
    let mut gains = zetas
        .iter()
        .map(|&zeta| {
            Ok((
                GainEnvelope::new(spec.clone(), section.phi, zeta, initial_sup)?,
                GainCheck {
                    zeta,
                    violations: 0,
                    max_excess: f64::NEG_INFINITY,
                },
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let direct = integrate_observed(problem, &config, |view| {
        let (d0, d1) = (problem.left.data_at(view.t)?, problem.right.data_at(view.t)?);
        for (gain, check) in gains.iter_mut() {
            if view.t > 0.0 {
                gain.observe(view.t, d0, d1)?;
            }
            if view.is_output {
                let bound = if view.t > 0.0 { gain.bound(view.t)? } else { gain.at_start()? };
                let excess = view.profile.sup_norm() - bound;
                check.max_excess = check.max_excess.max(excess);
                if excess > tol {
                    check.violations += 1;
                }
            }
        }
        Ok(())
    })?;

    let mut conjugacy_error: f64 = 0.0;
    for (u, w) in direct.snapshots.iter().zip(&transformed.snapshots) {
        let back = map_profile(&w.profile, |v| spec.gamma_inverse(v))?;
        let err = back
            .values()
            .iter()
            .zip(u.profile.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        conjugacy_error = conjugacy_error.max(err);
    }
    let h = problem.grid().h();
    Ok(TransformReport {
        phi: section.phi,
        kappa_star: spec.kappa_star(),
        conjugacy_error,
        conjugacy_tolerance: 20.0 * h * h,
        gain_checks: gains.into_iter().map(|(_, c)| c).collect(),
    })
}

fn run_inner(scenario: &Scenario, report: &mut RunReport) -> std::result::Result<(Option<Trajectory>, Vec<BoundTrace>), Failure> {
    let problem = validated_problem(scenario).at(Stage::Model)?;
    let (bounded, transform) = bounded_problem(scenario, &problem).at(Stage::Transform)?;
    let resolved = match scenario.resolve_certificate(&bounded) {
        Ok(resolved) => resolved,
        Err(error @ Error::InfeasibleCertificate(_)) if scenario.expect_infeasible => {
            let trajectory = integrate(&bounded, &scenario.solver.config(bounded.horizon)).at(Stage::Simulation)?;
            report.trajectory = Some(TrajectoryStats::of(&trajectory));
            report.status = RunStatus::ExpectedInfeasible;
            report.error = Some(error.to_string());
            return Ok((Some(trajectory), Vec::new()));
        }
        Err(error) => return Err(Failure { stage: Stage::Certificate, error }),
    };
    report.certificate = Some(resolved.certificate.clone());
    if scenario.expect_infeasible {
        report.status = RunStatus::BoundViolation;
        report.error = Some("certificate verified although the scenario expects infeasibility".into());
        return Ok((None, Vec::new()));
    }
    let (trajectory, traces, summaries) = bound_trajectory(scenario, &bounded, &resolved).at(Stage::Bounds)?;
    report.trajectory = Some(TrajectoryStats::of(&trajectory));
    let mut clean = summaries.iter().all(ZetaSummary::is_clean);
    if let Some(spec) = transform {
        let zetas: Vec<f64> = summaries.iter().map(|z| z.zeta).collect();
        let tr = check_transform(scenario, &problem, &spec, &trajectory, &zetas).at(Stage::Transform)?;
        clean &= tr.passed();
        report.transform = Some(tr);
    }
    report.zetas = summaries;
    report.status = if clean { RunStatus::Pass } else { RunStatus::BoundViolation };
    Ok((Some(trajectory), traces))
}

/// Certificate, integration and envelopes for every `zeta`; never panics on
/// a bad scenario, the failure is recorded in the report instead.
pub fn run_scenario(scenario: &Scenario) -> RunOutcome {
    let start = Instant::now();
    let mut report = empty_report(scenario);
    let (trajectory, traces) = match run_inner(scenario, &mut report) {
        Ok(out) => out,
        Err(Failure { stage, error }) => {
            report.status = status_of_error(stage, &error);
            report.failure_stage = Some(stage);
            report.error = Some(error.to_string());
            (None, Vec::new())
        }
    };
    report.passed = report.status.passed();
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    RunOutcome {
        report,
        trajectory,
        traces,
    }
}

/// Runs scenarios in parallel; reports come back sorted by scenario name.
pub fn run_batch(scenarios: &[Scenario]) -> Vec<RunReport> {
    let mut reports: Vec<RunReport> = scenarios.par_iter().map(|s| run_scenario(s).report).collect();
    reports.sort_by(|a, b| a.scenario.cmp(&b.scenario));
    reports
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub zeta: f64,
    pub zeta_fraction: f64,
    pub tightness: f64,
    pub max_excess: f64,
    pub violations: usize,
}

/// Tightness `sup_t lhs / rhs` for each `zeta`, sorted by `zeta`.
pub fn sweep_zeta(scenario: &Scenario, zeta_grid: &[f64]) -> Result<Vec<SweepRow>> {
    let problem = validated_problem(scenario)?;
    let (bounded, _) = bounded_problem(scenario, &problem)?;
    let resolved = scenario.resolve_certificate(&bounded)?;
    let sigma = resolved.certificate.sigma;
    if let Some(&bad) = zeta_grid.iter().find(|&&z| !(z >= 0.0 && z <= 0.95 * sigma)) {
        return Err(Error::InvalidZeta { zeta: bad, sigma });
    }
    let mut sweep = scenario.clone();
    sweep.bounds.zetas = zeta_grid.to_vec();
    sweep.bounds.zeta_fractions.clear();
    let (_, _, summaries) = bound_trajectory(&sweep, &bounded, &resolved)?;
    Ok(summaries
        .into_iter()
        .map(|s| SweepRow {
            zeta: s.zeta,
            zeta_fraction: s.zeta / sigma,
            tightness: s.tightness,
            max_excess: s.max_excess,
            violations: s.violations,
        })
        .collect())
}

/// Writes `<name>.json`, `<name>_trajectory.csv` and one
/// `<name>_bound_<k>.csv` per `zeta` into `dir`; returns the paths written.
pub fn write_outputs(outcome: &RunOutcome, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let json = dir.join(format!("{}.json", sanitize(&outcome.report.scenario)));
    write_outputs_at(outcome, &json)
}

/// Writes the JSON report to `json_path` and the CSV traces beside it,
/// named after the report's file stem.
pub fn write_outputs_at(outcome: &RunOutcome, json_path: &Path) -> Result<Vec<PathBuf>> {
    let dir = json_path.parent().unwrap_or_else(|| Path::new("."));
    let stem = json_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| sanitize(&outcome.report.scenario));
    let mut written = Vec::new();
    std::fs::write(json_path, serde_json::to_string_pretty(&outcome.report)?)?;
    written.push(json_path.to_path_buf());
    if let Some(traj) = &outcome.trajectory {
        let path = dir.join(format!("{stem}_trajectory.csv"));
        traj.write_csv(std::fs::File::create(&path)?)?;
        written.push(path);
    }
    for (k, trace) in outcome.traces.iter().enumerate() {
        let path = dir.join(format!("{stem}_bound_{k}.csv"));
        trace.write_csv(std::fs::File::create(&path)?)?;
        written.push(path);
    }
    Ok(written)
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' })
        .collect()
}

/// `gamma^{-1}` applied to a transformed profile.
pub fn untransform(spec: &TransformSpec, profile: &GridProfile) -> Result<GridProfile> {
    map_profile(profile, |w| spec.gamma_inverse(w))
}

// The weighted-norm envelope built by hand along a trajectory.

use std::f64::consts::PI;

use isslab::bounds::{BoundaryTermSpec, BoundarySample, Envelope, EnvelopeConfig, FadingMemoryTracker, WeightedNorm};
use isslab::certificate::synthesize_sine_certificate_for_ratio;
use isslab::grid::{GridProfile, SpatialGrid};
use isslab::model::{BoundaryCondition, DisturbanceSignal, PdeProblem};
use isslab::solver::{integrate_observed, Scheme, SolverConfig};

pub fn run_example() -> isslab::Result<()> {
    // a bare tracker: sup_s g(s) exp(-zeta (t - s))
    let mut tracker = FadingMemoryTracker::new(2.0)?;
    for (t, g) in [(0.0, 1.0), (0.5, 0.2), (1.0, 0.0), (1.5, 0.5)] {
        println!("tracker t = {t:.1}  g = {g:.1}  value = {:.4}", tracker.update(t, g)?);
    }

    // heat with a wobbling left end
    let grid = SpatialGrid::new(64)?;
    let mut problem = PdeProblem::heat(GridProfile::from_fn(grid, |x| (PI * x).sin())?, 1.0);
    problem.left = BoundaryCondition::dirichlet(DisturbanceSignal::sinusoid(0.3, 6.0));

    let cert = synthesize_sine_certificate_for_ratio(0.0)?;
    let norm = WeightedNorm::new(cert.weight.clone(), grid)?;
    let config = EnvelopeConfig::new(cert.sigma, 0.5 * cert.sigma, 1e-6);
    let mut envelope = Envelope::new(config, norm, BoundaryTermSpec::Dirichlet)?;
    let zero_forcing = vec![0.0; grid.n_nodes()];

    let solver = SolverConfig::uniform(Scheme::ExplicitRk4, problem.horizon, 10);
    integrate_observed(&problem, &solver, |view| {
        let sample = BoundarySample::from_profile(view.profile);
        envelope.update(view.t, view.profile, &sample, &zero_forcing, view.is_output)?;
        Ok(())
    })?;

    let trace = envelope.trace();
    for row in &trace.rows {
        println!(
            "t = {:.2}  lhs = {:.4}  rhs = {:.4}  (ic {:.4}, boundary {:.4})",
            row.t, row.lhs, row.rhs, row.rhs_ic, row.rhs_boundary
        );
    }
    println!(
        "{} steps observed, {} violations, max lhs/rhs {:.3}",
        trace.observed,
        trace.violations.len(),
        trace.max_ratio
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> isslab::Result<()> {
    run_example()
}

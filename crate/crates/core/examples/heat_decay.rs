// Integrates the heat equation and compares with the exact decay.

use std::f64::consts::PI;

use isslab::grid::{GridProfile, SpatialGrid};
use isslab::model::PdeProblem;
use isslab::solver::{integrate, Scheme, SolverConfig};

pub fn run_example() -> isslab::Result<()> {
    let grid = SpatialGrid::new(128)?;
    let initial = GridProfile::from_fn(grid, |x| (PI * x).sin())?;
    let problem = PdeProblem::heat(initial, 0.3);

    for scheme in [Scheme::ExplicitRk4, Scheme::SemiImplicit] {
        let mut config = SolverConfig::uniform(scheme, problem.horizon, 6);
        // backward Euler is only first order in time; its default step is h
        if scheme == Scheme::SemiImplicit {
            config.max_dt = Some(1e-4);
        }
        let traj = integrate(&problem, &config)?;
        println!("{scheme:?}: {} steps", traj.step_sizes.len());
        for snap in &traj.snapshots {
            let exact = (-PI * PI * snap.t).exp();
            println!(
                "  t = {:.3}  sup = {:.6}  exact = {:.6}  error = {:.1e}",
                snap.t,
                snap.profile.sup_norm(),
                exact,
                (snap.profile.sup_norm() - exact).abs()
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> isslab::Result<()> {
    run_example()
}

//! Scenario files, the built-in registry, and the run pipeline
//! (certificate, integration, envelopes, report).

mod builtins;
mod random;
mod run;
mod spec;

pub use builtins::{all_builtins, builtin, builtin_names, BUILTIN_NAMES};
pub use random::{random_reaction_diffusion, random_signal, RandomScenarioOptions, ReactionKind};
pub use run::{
    certify, disturbance_denominators, run_batch, run_scenario, simulate, sweep_zeta, untransform, write_outputs,
    write_outputs_at,
    DisturbanceCheck, GainCheck, RunOutcome, RunReport, RunStatus, Stage, SweepRow, TrajectoryStats,
    TransformReport, ZetaSummary,
};
pub use spec::{
    derive_boundary_terms, largest_sine_sigma, BoundsSpec, CertificateSpec, OutputSpec, ProblemSpec,
    ResolvedCertificate, Scenario, SolverSpec, TransformSection, SINE_HEADROOM,
};

/// A built-in name or a path to a TOML file.
pub fn resolve(name_or_path: &str) -> crate::Result<Scenario> {
    match builtin(name_or_path) {
        Some(s) => Ok(s),
        None => Scenario::load(name_or_path),
    }
}

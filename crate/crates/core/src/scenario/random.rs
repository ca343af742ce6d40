use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::spec::*;
use crate::model::{BoundaryCondition, CoefficientField, DisturbanceSignal, SpatialShape, StateFn};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReactionKind {
    Sin,
    Tanh,
    ClippedPolynomial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomScenarioOptions {
    pub n_cells: usize,
    pub horizon: f64,
    pub outputs: usize,
    pub reactions: Vec<ReactionKind>,
    /// `|r(u)| <= max_reaction`.
    pub max_reaction: f64,
    /// Bound on boundary data, forcing amplitude and initial amplitude.
    pub max_input: f64,
    /// Diffusion `kappa(u)` ranges over `[kappa_lo, kappa_hi]`.
    pub kappa_lo: f64,
    pub kappa_hi: f64,
}

impl Default for RandomScenarioOptions {
    fn default() -> Self {
        Self {
            n_cells: 64,
            horizon: 0.5,
            outputs: 20,
            reactions: vec![ReactionKind::Sin, ReactionKind::Tanh],
            max_reaction: 3.0,
            max_input: 1.0,
            kappa_lo: 0.5,
            kappa_hi: 2.0,
        }
    }
}

/// A bounded input drawn from the five signal kinds.
pub fn random_signal(rng: &mut impl Rng, amplitude: f64) -> DisturbanceSignal {
    let a = rng.gen_range(-amplitude..=amplitude);
    match rng.gen_range(0..5) {
        0 => DisturbanceSignal::Zero,
        1 => DisturbanceSignal::constant(a),
        2 => DisturbanceSignal::Sinusoid {
            amplitude: a,
            frequency: rng.gen_range(0.5..20.0),
            phase: rng.gen_range(0.0..std::f64::consts::TAU),
            offset: 0.0,
        },
        3 => DisturbanceSignal::DecayingExponential {
            amplitude: a,
            rate: rng.gen_range(0.1..10.0),
            offset: 0.0,
        },
        _ => {
            // Triangular pulse.
            let start = rng.gen_range(0.0..0.3);
            let width = rng.gen_range(0.02..0.2);
            DisturbanceSignal::PiecewiseLinear {
                times: vec![start, start + width, start + 2.0 * width],
                values: vec![0.0, a, 0.0],
            }
        }
    }
}

fn random_reaction(rng: &mut impl Rng, kind: ReactionKind, bound: f64) -> StateFn {
    let amplitude = rng.gen_range(0.1 * bound..=bound);
    match kind {
        ReactionKind::Sin => StateFn::Sin {
            amplitude,
            frequency: rng.gen_range(0.5..3.0),
            offset: 0.0,
        },
        ReactionKind::Tanh => StateFn::Tanh {
            amplitude,
            scale: rng.gen_range(0.5..3.0),
            offset: 0.0,
        },
        ReactionKind::ClippedPolynomial => StateFn::ClippedPolynomial {
            coefficients: (0..4).map(|_| rng.gen_range(-bound..bound)).collect(),
            lo: -bound,
            hi: bound,
        },
    }
}

/// Reaction-diffusion scenario with state-dependent diffusion and reaction,
/// Dirichlet inputs and a separable in-domain input; deterministic in `seed`.
pub fn random_reaction_diffusion(seed: u64, options: &RandomScenarioOptions) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = 0.5 * (options.kappa_hi - options.kappa_lo);
    let mid = 0.5 * (options.kappa_hi + options.kappa_lo);
    let kappa = if rng.gen_bool(0.5) {
        StateFn::Tanh {
            amplitude: half,
            scale: rng.gen_range(0.5..2.0),
            offset: mid,
        }
    } else {
        StateFn::Sin {
            amplitude: half,
            frequency: rng.gen_range(0.5..2.0),
            offset: mid,
        }
    };
    let kind = *options.reactions.choose(&mut rng).expect("at least one reaction kind");
    let reaction = random_reaction(&mut rng, kind, options.max_reaction);
    let m = options.max_input;
    let initial = (1..=3)
        .map(|k| SpatialShape::SineMode {
            amplitude: rng.gen_range(-m..=m) / k as f64,
            mode: k as f64,
        })
        .collect();
    let forcing = CoefficientField::separable(
        random_signal(&mut rng, m),
        SpatialShape::Sine {
            amplitude: 1.0,
            wavenumber: rng.gen_range(1.0..4.0) * std::f64::consts::PI,
            phase: rng.gen_range(0.0..std::f64::consts::TAU),
        },
    );
    let left = BoundaryCondition::dirichlet(random_signal(&mut rng, m));
    let right = BoundaryCondition::dirichlet(random_signal(&mut rng, m));
    Scenario {
        name: format!("random-{seed:05}"),
        description: format!("random reaction-diffusion scenario, seed {seed}"),
        expect_infeasible: false,
        problem: ProblemSpec {
            n_cells: options.n_cells,
            horizon: options.horizon,
            initial,
            a: CoefficientField::state(kappa),
            b: CoefficientField::zero(),
            c: CoefficientField::state(reaction),
            f: forcing,
            left,
            right,
        },
        certificate: CertificateSpec::Sine { sigma: None },
        bounds: BoundsSpec::default(),
        solver: SolverSpec {
            outputs: options.outputs,
            ..SolverSpec::default()
        },
        transform: None,
        output: OutputSpec::default(),
    }
}

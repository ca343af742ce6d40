use std::f64::consts::PI;

use super::spec::*;
use crate::certificate::WeightFamily;
use crate::model::{
    BoundaryCondition, CoefficientField, DisturbanceSignal, Functional, ProfileMeasure, SpatialShape, StateFn,
};
use crate::solver::Scheme;

pub const BUILTIN_NAMES: [&str; 6] = [
    "heat-dirichlet-decay",
    "sharpness-pi-squared",
    "reaction-diffusion-iss",
    "nonlocal-robin-heat",
    "kirchhoff-heat",
    "heat-exponential-search",
];

pub fn builtin_names() -> &'static [&'static str] {
    &BUILTIN_NAMES
}

pub fn builtin(name: &str) -> Option<Scenario> {
    Some(match name {
        "heat-dirichlet-decay" => heat_dirichlet_decay(),
        "sharpness-pi-squared" => sharpness_pi_squared(),
        "reaction-diffusion-iss" => reaction_diffusion_iss(),
        "nonlocal-robin-heat" => nonlocal_robin_heat(),
        "kirchhoff-heat" => kirchhoff_heat(),
        "heat-exponential-search" => heat_exponential_search(),
        _ => return None,
    })
}

pub fn all_builtins() -> Vec<Scenario> {
    BUILTIN_NAMES.iter().filter_map(|n| builtin(n)).collect()
}

fn sine_mode(amplitude: f64, mode: f64) -> SpatialShape {
    SpatialShape::SineMode { amplitude, mode }
}

fn base(name: &str, description: &str, n_cells: usize, horizon: f64, certificate: CertificateSpec) -> Scenario {
    Scenario {
        name: name.into(),
        description: description.into(),
        expect_infeasible: false,
        problem: ProblemSpec {
            n_cells,
            horizon,
            initial: vec![sine_mode(1.0, 1.0)],
            a: CoefficientField::constant(1.0),
            b: CoefficientField::zero(),
            c: CoefficientField::zero(),
            f: CoefficientField::zero(),
            left: BoundaryCondition::dirichlet(DisturbanceSignal::Zero),
            right: BoundaryCondition::dirichlet(DisturbanceSignal::Zero),
        },
        certificate,
        bounds: BoundsSpec::default(),
        solver: SolverSpec::default(),
        transform: None,
        output: OutputSpec::default(),
    }
}

fn heat_dirichlet_decay() -> Scenario {
    let mut s = base(
        "heat-dirichlet-decay",
        "u_t = u_xx, u = 0 at both ends, u(0, x) = sin(pi x)",
        256,
        0.5,
        CertificateSpec::Sine { sigma: None },
    );
    s.solver.outputs = 50;
    s
}

fn heat_exponential_search() -> Scenario {
    let mut s = base(
        "heat-exponential-search",
        "heat decay certified with the best exponential weight",
        64,
        0.5,
        CertificateSpec::Search {
            family: WeightFamily::Exponential,
        },
    );
    s.problem.b = CoefficientField::constant(1.0);
    s
}

fn sharpness_pi_squared() -> Scenario {
    let mut s = base(
        "sharpness-pi-squared",
        "u_t = u_xx + pi^2 u keeps sin(pi x) stationary, so no decay certificate exists",
        512,
        1.0,
        CertificateSpec::Sine { sigma: None },
    );
    s.expect_infeasible = true;
    s.problem.c = CoefficientField::constant(PI * PI);
    s.solver.scheme = Scheme::SemiImplicit;
    s.solver.outputs = 100;
    s
}

fn reaction_diffusion_iss() -> Scenario {
    let mut s = base(
        "reaction-diffusion-iss",
        "state-dependent diffusion and reaction with boundary and in-domain inputs",
        64,
        0.5,
        CertificateSpec::Sine { sigma: None },
    );
    s.problem.initial = vec![sine_mode(1.0, 1.0), sine_mode(0.3, 3.0)];
    s.problem.a = CoefficientField::state(StateFn::Tanh {
        amplitude: 0.75,
        scale: 1.0,
        offset: 1.25,
    });
    s.problem.c = CoefficientField::state(StateFn::Sin {
        amplitude: 2.0,
        frequency: 1.0,
        offset: 0.0,
    });
    s.problem.f = CoefficientField::separable(DisturbanceSignal::sinusoid(0.5, 6.0), sine_mode(1.0, 2.0));
    s.problem.left = BoundaryCondition::dirichlet(DisturbanceSignal::sinusoid(0.3, 4.0));
    s.problem.right = BoundaryCondition::dirichlet(DisturbanceSignal::PiecewiseLinear {
        times: vec![0.0, 0.1, 0.2, 0.3],
        values: vec![0.0, 0.0, 0.4, 0.0],
    });
    s
}

/// Diffusion `1 + 0.1 |u|_inf^2` and boundary feedback `beta = 0.5 |u|_inf`.
fn nonlocal_robin_heat() -> Scenario {
    let kappa_star = 1.0;
    let (lambda0, lambda1) = (1.0, 2.0);
    let beta = Functional::default().with_term(0.5, ProfileMeasure::SupNorm);
    let mut s = base(
        "nonlocal-robin-heat",
        "non-local diffusion with non-linear, non-local Robin feedback at both ends",
        64,
        1.0,
        CertificateSpec::CosineRobin {
            kappa_star,
            lambda1,
            lambda_fraction: 0.5,
        },
    );
    s.problem.initial = vec![
        SpatialShape::Constant { value: 1.0 },
        SpatialShape::Sine {
            amplitude: 0.5,
            wavenumber: PI,
            phase: 0.5 * PI,
        },
    ];
    s.problem.a = CoefficientField::NonLocal {
        functional: Functional::constant(kappa_star).with_term(0.1, ProfileMeasure::SupNormSquared),
    };
    s.problem.left = BoundaryCondition::nonlocal_robin(lambda0, beta.clone(), DisturbanceSignal::sinusoid(0.5, 3.0));
    s.problem.right = BoundaryCondition::nonlocal_robin(
        lambda1,
        beta,
        DisturbanceSignal::Sinusoid {
            amplitude: 0.3,
            frequency: 5.0,
            phase: 1.0,
            offset: 0.0,
        },
    );
    s.bounds.zeta_fractions = vec![0.0, 0.5];
    s
}

/// `u_t = u_xx + u_x^2`, mapped to the heat equation by `w = exp(u) - 1`.
fn kirchhoff_heat() -> Scenario {
    let mut s = base(
        "kirchhoff-heat",
        "u_t = kappa(u) u_xx + g(u) u_x^2 checked through its Kirchhoff transform",
        256,
        0.2,
        CertificateSpec::Kirchhoff,
    );
    s.problem.initial = vec![sine_mode(0.5, 1.0)];
    s.problem.a = CoefficientField::state(StateFn::constant(1.0));
    s.problem.b = CoefficientField::StateTimesGradient {
        function: StateFn::constant(1.0),
    };
    s.problem.left = BoundaryCondition::dirichlet(DisturbanceSignal::sinusoid(0.2, 4.0));
    s.problem.right = BoundaryCondition::dirichlet(DisturbanceSignal::DecayingExponential {
        amplitude: -0.1,
        rate: 5.0,
        offset: 0.1,
    });
    s.transform = Some(TransformSection {
        u_lo: -5.0,
        u_hi: 5.0,
        phi: 1.2,
    });
    s.bounds.zeta_fractions = vec![0.0, 0.5];
    s
}

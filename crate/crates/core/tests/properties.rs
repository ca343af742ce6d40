use std::f64::consts::PI;

use proptest::prelude::*;

use isslab::bounds::{
    boundary_terms, weighted_sup_norm, BoundarySample, BoundaryTermSpec, Envelope, EnvelopeConfig,
    FadingMemoryTracker, WeightedNorm,
};
use isslab::certificate::{
    check_boundary_signs, check_certificate, largest_sigma, residual_lipschitz, synthesize_cosine_certificate,
    synthesize_sine_certificate_for_ratio, CoefficientBounds, Interval, WeightFunction,
};
use isslab::grid::{GridProfile, SpatialGrid};
use isslab::model::{evaluate_coefficients, DisturbanceSignal, PdeProblem, StateFn};
use isslab::scenario::{random_reaction_diffusion, RandomScenarioOptions};
use isslab::solver::{integrate_observed, Scheme, SolverConfig};
use isslab::transform::TransformSpec;

fn weight_strategy() -> impl Strategy<Value = WeightFunction> {
    prop_oneof![
        (0.05..3.0f64, 0.2..1.0f64).prop_map(|(theta, s)| WeightFunction::sine(theta, 0.5 * (PI - theta) * s)),
        (0.05..1.5f64).prop_map(WeightFunction::cosine),
        (-5.0..5.0f64, 0.0..1.0f64).prop_map(|(rho, offset)| WeightFunction::exponential(rho, offset)),
    ]
}

fn bounds_strategy() -> impl Strategy<Value = CoefficientBounds> {
    (0.3..2.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, -2.0..1.0f64, 0.0..2.0f64).prop_map(
        |(a_lo, a_w, b, b_s, c_hi, c_w)| {
            CoefficientBounds::new(
                Interval::new(a_lo, a_lo + a_w),
                Interval::new(-b, b * b_s),
                Interval::new(c_hi - c_w, c_hi),
            )
            .unwrap()
        },
    )
}

fn signal_strategy() -> impl Strategy<Value = DisturbanceSignal> {
    prop_oneof![
        Just(DisturbanceSignal::Zero),
        (-2.0..2.0f64).prop_map(DisturbanceSignal::constant),
        (-2.0..2.0f64, 0.1..20.0f64, 0.0..6.3f64, -1.0..1.0f64).prop_map(|(amplitude, frequency, phase, offset)| {
            DisturbanceSignal::Sinusoid {
                amplitude,
                frequency,
                phase,
                offset,
            }
        }),
        (-2.0..2.0f64, 0.0..10.0f64)
            .prop_map(|(amplitude, rate)| DisturbanceSignal::DecayingExponential { amplitude, rate, offset: 0.0 }),
        prop::collection::vec(-2.0..2.0f64, 2..8).prop_map(|values| {
            let times = (0..values.len()).map(|k| k as f64 * 0.2).collect();
            DisturbanceSignal::piecewise_linear(times, values).unwrap()
        }),
    ]
}

fn profile_strategy(n: usize) -> impl Strategy<Value = GridProfile> {
    prop::collection::vec(-3.0..3.0f64, n + 1)
        .prop_map(move |v| GridProfile::new(SpatialGrid::new(n).unwrap(), v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn diffusion_is_nonnegative_on_random_scenarios(seed in 0u64..10_000, profile in profile_strategy(64), t in 0.0..0.5f64) {
        let scenario = random_reaction_diffusion(seed, &RandomScenarioOptions::default());
        let problem = scenario.build_problem().unwrap();
        let k = evaluate_coefficients(&problem, t, &profile).unwrap();
        prop_assert!(k.a.iter().all(|&a| a >= 0.0));
        let again = evaluate_coefficients(&problem, t, &profile).unwrap();
        prop_assert!(k.a.iter().zip(&again.a).all(|(x, y)| x.to_bits() == y.to_bits()));
        prop_assert!(k.c.iter().zip(&again.c).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn signals_respect_their_lipschitz_bound(signal in signal_strategy(), t in 0.0..2.0f64, dt in 1e-6..1e-2f64) {
        let lip = signal.lipschitz_bound();
        let jump = (signal.eval(t + dt) - signal.eval(t)).abs();
        prop_assert!(jump <= lip * dt * (1.0 + 1e-9) + 1e-15, "jump {jump} over {dt} with L = {lip}");
    }

    #[test]
    fn refinement_moves_worst_residual_by_at_most_lipschitz_times_h(
        bounds in bounds_strategy(), weight in weight_strategy(), sigma in 0.01..15.0f64
    ) {
        let coarse = check_certificate(&bounds, &weight, sigma, 0.0, 64).unwrap();
        let fine = check_certificate(&bounds, &weight, sigma, 0.0, 4096).unwrap();
        let lip = residual_lipschitz(&bounds, &weight, sigma);
        prop_assert!(fine.worst_point.residual <= coarse.worst_point.residual + lip / 64.0 + 1e-12);
        let m = lip / 64.0;
        if check_certificate(&bounds, &weight, sigma, m, 64).unwrap().is_verified() {
            prop_assert!(fine.is_verified());
        }
    }

    #[test]
    fn lowering_sigma_keeps_verification(
        bounds in bounds_strategy(), weight in weight_strategy(), scale in 0.05..1.0f64,
        margin_frac in 0.0..1.0f64, frac in 0.01..1.0f64
    ) {
        let best = largest_sigma(&bounds, &weight, 256).unwrap();
        prop_assume!(best.is_some());
        let sigma = best.unwrap().sigma * scale;
        let slack = -check_certificate(&bounds, &weight, sigma, 0.0, 256).unwrap().worst_point.residual;
        let margin = slack * margin_frac;
        let cert = check_certificate(&bounds, &weight, sigma, margin, 256).unwrap();
        prop_assert!(cert.is_verified());
        let lower = sigma * frac;
        let lifted = margin + (sigma - lower) * cert.min_weight;
        let again = check_certificate(&bounds, &weight, lower, lifted * (1.0 - 1e-12), 256).unwrap();
        prop_assert!(again.is_verified());
    }

    #[test]
    fn boundary_signs_match_closed_forms(
        weight in weight_strategy(), mu0 in 0.0..2.0f64, lambda0 in 0.0..2.0f64,
        mu1 in 0.0..2.0f64, lambda1 in 0.0..2.0f64
    ) {
        let (e0, de0, e1, de1) = match weight {
            WeightFunction::Sine { theta, phi } => (
                phi.sin(), theta * phi.cos(), (theta + phi).sin(), theta * (theta + phi).cos(),
            ),
            WeightFunction::Cosine { theta } => (1.0, 0.0, theta.cos(), -theta * theta.sin()),
            WeightFunction::Exponential { rho, offset } => (
                1.0 + offset, -rho, (-rho).exp() + offset, -rho * (-rho).exp(),
            ),
            WeightFunction::TabulatedCubic(_) => unreachable!(),
        };
        let report = check_boundary_signs(&weight, mu0, lambda0, mu1, lambda1);
        prop_assert_eq!(report.left_holds, mu0 * de0 - lambda0 * e0 < 0.0);
        prop_assert_eq!(report.right_holds, mu1 * de1 + lambda1 * e1 > 0.0);
    }

    #[test]
    fn synthesized_certificates_self_verify(s in -5.0..9.8f64, kappa_star in 0.1..3.0f64, lambda1 in 0.05..50.0f64) {
        let sine = synthesize_sine_certificate_for_ratio(s).unwrap();
        let bounds = CoefficientBounds::new(Interval::point(1.0), Interval::point(0.0), Interval::point(s - sine.sigma)).unwrap();
        let recheck = check_certificate(&bounds, &sine.weight, sine.sigma, sine.margin, sine.check_grid_size).unwrap();
        prop_assert!(recheck.is_verified());

        let cosine = synthesize_cosine_certificate(kappa_star, lambda1).unwrap();
        let bounds = CoefficientBounds::new(
            Interval::new(kappa_star, kappa_star * 4.0), Interval::point(0.0), Interval::point(0.0),
        ).unwrap();
        let c = &cosine.certificate;
        let recheck = check_certificate(&bounds, &c.weight, c.sigma, c.margin, c.check_grid_size).unwrap();
        prop_assert!(recheck.is_verified());
    }

    #[test]
    fn weighted_norm_is_sandwiched(weight in weight_strategy(), profile in profile_strategy(128)) {
        let norm = WeightedNorm::new(weight, profile.grid()).unwrap();
        let w = weighted_sup_norm(&profile, &norm);
        let sup = profile.sup_norm();
        prop_assert!(sup / norm.max_eta() <= w * (1.0 + 1e-14));
        prop_assert!(w <= sup / norm.min_eta() * (1.0 + 1e-14));
    }

    #[test]
    fn tracker_matches_brute_force(
        zeta in 0.0..10.0f64,
        samples in prop::collection::vec((0.0..0.3f64, 0.0..5.0f64), 1..60)
    ) {
        let mut tracker = FadingMemoryTracker::new(zeta).unwrap();
        let mut t = 0.0;
        let mut seen = Vec::new();
        for (dt, g) in samples {
            t += dt;
            seen.push((t, g));
            let fast = tracker.update(t, g).unwrap();
            let brute = seen.iter().map(|&(s, gs)| gs * (-zeta * (t - s)).exp()).fold(0.0, f64::max);
            prop_assert!((fast - brute).abs() <= 1e-12 * brute.max(1e-300));
        }
    }

    #[test]
    fn envelope_components_are_monotone_in_zeta(
        weight in weight_strategy(), frac1 in 0.0..0.9f64, frac2 in 0.0..0.9f64,
        profiles in prop::collection::vec(profile_strategy(32), 2..8), forcing in profile_strategy(32)
    ) {
        let sigma = 2.0;
        let (z1, z2) = (sigma * frac1.min(frac2), sigma * frac1.max(frac2));
        let grid = SpatialGrid::new(32).unwrap();
        let norm = WeightedNorm::new(weight, grid).unwrap();
        let mut slow = Envelope::new(EnvelopeConfig::new(sigma, z1, 0.0), norm.clone(), BoundaryTermSpec::Dirichlet).unwrap();
        let mut fast = Envelope::new(EnvelopeConfig::new(sigma, z2, 0.0), norm, BoundaryTermSpec::Dirichlet).unwrap();
        // forcing held constant in time, so each tracker sits at its newest sample
        for (k, p) in profiles.iter().enumerate() {
            let t = 0.1 * k as f64;
            let sample = BoundarySample::from_profile(p);
            let r1 = slow.update(t, p, &sample, forcing.values(), false).unwrap();
            let r2 = fast.update(t, p, &sample, forcing.values(), false).unwrap();
            prop_assert!(r2.rhs_ic <= r1.rhs_ic);
            prop_assert!(r2.rhs_forcing >= r1.rhs_forcing * (1.0 - 1e-14));
        }
    }

    #[test]
    fn robin_and_general_terms_never_exceed_dirichlet(
        weight in weight_strategy(), profile in profile_strategy(32),
        mu0 in 0.0..2.0f64, lambda0 in 0.1..2.0f64, mu1 in 0.0..2.0f64, lambda1 in 0.1..2.0f64,
        g0 in 0.1..3.0f64, g1 in 0.1..3.0f64, k0 in 1.0..3.0f64, k1 in 1.0..3.0f64
    ) {
        let sample = BoundarySample::from_profile(&profile);
        let d0 = sample.u0.abs() / weight.value(0.0);
        let d1 = sample.u1.abs() / weight.value(1.0);
        let general = BoundaryTermSpec::General {
            g0: DisturbanceSignal::constant(g0),
            g1: DisturbanceSignal::constant(g1),
            k0: DisturbanceSignal::constant(k0),
            k1: DisturbanceSignal::constant(k1),
        };
        let robin = BoundaryTermSpec::RobinBoth { mu0, lambda0, mu1, lambda1 };
        for spec in [general, robin] {
            // Robin modes reject weights that break the sign conditions
            if let Ok((r0, r1)) = boundary_terms(&spec, 0.0, &sample, &profile, &weight) {
                prop_assert!(r0 <= d0 && r1 <= d1);
            }
        }
    }

    #[test]
    fn gamma_is_monotone_and_sandwiched(
        kappa in 0.5..2.0f64, g_amp in -1.0..1.0f64, us in prop::collection::vec(-3.0..3.0f64, 1..50)
    ) {
        let spec = TransformSpec::build(
            StateFn::constant(kappa),
            StateFn::Tanh { amplitude: g_amp, scale: 1.0, offset: 0.0 },
            kappa,
            -3.0,
            3.0,
        ).unwrap();
        prop_assert!(spec.table().windows(2).all(|w| w[0] < w[1]));
        let mut sorted = us.clone();
        sorted.sort_by(f64::total_cmp);
        let mut last = f64::NEG_INFINITY;
        for &u in &sorted {
            let g = spec.gamma(u).unwrap();
            prop_assert!(g >= last);
            let (g1, g2) = spec.gamma_envelopes(u.abs()).unwrap();
            prop_assert!(g1 <= g.abs() && g.abs() <= g2);
            last = g;
        }
        let mut abs: Vec<f64> = us.iter().map(|u| u.abs()).collect();
        abs.sort_by(f64::total_cmp);
        for w in abs.windows(2) {
            let (a1, a2) = spec.gamma_envelopes(w[0]).unwrap();
            let (b1, b2) = spec.gamma_envelopes(w[1]).unwrap();
            prop_assert!(a1 <= b1 && a2 <= b2);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn explicit_scheme_keeps_discrete_maximum_principle(
        a in 0.2..2.0f64, c in -3.0..0.0f64,
        amps in prop::collection::vec(-1.0..1.0f64, 1..5)
    ) {
        let grid = SpatialGrid::new(32).unwrap();
        let initial = GridProfile::from_fn(grid, |x| {
            amps.iter().enumerate().map(|(k, a)| a * ((k + 1) as f64 * PI * x).sin()).sum()
        }).unwrap();
        let mut problem = PdeProblem::heat(initial.clone(), 0.05);
        problem.a = isslab::model::CoefficientField::constant(a);
        problem.c = isslab::model::CoefficientField::constant(c);
        let config = SolverConfig::uniform(Scheme::ExplicitRk4, 0.05, 5);
        let mut prev = initial.values().to_vec();
        integrate_observed(&problem, &config, |view| {
            let v = view.profile.values();
            // boundary data is zero, so the range always contains 0
            let lo = prev.iter().copied().fold(0.0, f64::min);
            let hi = prev.iter().copied().fold(0.0, f64::max);
            for &x in v {
                assert!(x >= lo - 1e-14 && x <= hi + 1e-14, "{x} outside [{lo}, {hi}]");
            }
            prev = v.to_vec();
            Ok(())
        }).unwrap();
    }
}

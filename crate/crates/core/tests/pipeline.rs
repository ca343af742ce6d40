use isslab::scenario::{builtin, random_reaction_diffusion, run_scenario, sweep_zeta, RandomScenarioOptions, Scenario};
use isslab::bounds::default_tolerance;
use isslab::grid::SpatialGrid;
use isslab::Error;

const HEAT_TOML: &str = r#"
name = "file-heat"
description = "heat decay from a file"

[problem]
n_cells = 32
horizon = 0.2
initial = [{ kind = "sine_mode", amplitude = 1.0, mode = 1 }]

[certificate]
method = "sine"

[bounds]
zeta_fractions = [0.0, 0.5]

[solver]
outputs = 10
"#;

#[test]
fn scenario_file_runs_end_to_end() {
    let scenario = Scenario::from_toml_str(HEAT_TOML).unwrap();
    let report = run_scenario(&scenario).report;
    assert!(report.passed, "{report:?}");
    assert_eq!(report.zetas.len(), 2);
    let again = Scenario::from_toml_str(&scenario.to_toml_string().unwrap()).unwrap();
    assert_eq!(again, scenario);
}

#[test]
fn unknown_keys_are_rejected() {
    let text = HEAT_TOML.replace("outputs = 10", "outputs = 10\nsubsteps = 3");
    assert!(matches!(Scenario::from_toml_str(&text), Err(Error::Scenario(_))));
}

#[test]
fn builtin_runs_are_deterministic() {
    for name in ["reaction-diffusion-iss", "nonlocal-robin-heat"] {
        let s = builtin(name).unwrap();
        let mut a = run_scenario(&s).report;
        let mut b = run_scenario(&s).report;
        a.wall_clock_seconds = 0.0;
        b.wall_clock_seconds = 0.0;
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}

#[test]
fn sweep_tightness_never_exceeds_one_plus_tolerance() {
    let s = random_reaction_diffusion(17, &RandomScenarioOptions::default());
    let sigma = isslab::scenario::certify(&s).unwrap().certificate.sigma;
    let grid: Vec<f64> = (0..=5).map(|k| 0.19 * k as f64 * sigma).collect();
    let rows = sweep_zeta(&s, &grid).unwrap();
    assert_eq!(rows.len(), grid.len());
    let tol = default_tolerance(SpatialGrid::new(s.problem.n_cells).unwrap());
    for r in &rows {
        assert!(r.tightness <= 1.0 + tol, "{r:?}");
        assert_eq!(r.violations, 0);
    }
}

#[test]
fn zero_zeta_on_homogeneous_heat_is_a_maximum_principle() {
    let scenario = Scenario::from_toml_str(HEAT_TOML).unwrap();
    let outcome = run_scenario(&scenario);
    let trace = outcome.traces.iter().find(|t| t.zeta == 0.0).unwrap();
    let initial = trace.rows[0].lhs;
    for row in &trace.rows {
        // no inputs, no decay: the envelope is the initial weighted norm
        assert_eq!(row.rhs, initial);
        assert!(row.lhs <= initial + trace.tol_bound);
    }
}

#[test]
fn zeta_at_or_above_sigma_is_rejected() {
    let s = builtin("heat-exponential-search").unwrap();
    let sigma = isslab::scenario::certify(&s).unwrap().certificate.sigma;
    assert!(sweep_zeta(&s, &[sigma]).is_err());
    assert!(sweep_zeta(&s, &[-0.1]).is_err());
}

// Scenario files: parse TOML, run the full pipeline, write JSON and CSV.

use isslab::scenario::{run_scenario, write_outputs, Scenario};

const SCENARIO: &str = r#"
name = "logistic-ish"
description = "bounded reaction with a forced right end"

[problem]
n_cells = 48
horizon = 0.4
initial = [{ kind = "sine_mode", amplitude = 0.8, mode = 2 }]
a = { kind = "state", function = { kind = "tanh", amplitude = 0.3, offset = 1.0 } }
c = { kind = "state", function = { kind = "sin", amplitude = 2.0 } }
right = { kind = "dirichlet", data = { kind = "sinusoid", amplitude = 0.2, frequency = 8.0 } }

[certificate]
method = "sine"

[solver]
outputs = 8
"#;

pub fn run_example() -> isslab::Result<()> {
    let scenario = Scenario::from_toml_str(SCENARIO)?;
    let outcome = run_scenario(&scenario);
    let report = &outcome.report;
    println!("{}: {:?}", report.scenario, report.status);
    for z in &report.zetas {
        println!("  zeta {:.4}: tightness {:.4}, violations {}", z.zeta, z.tightness, z.violations);
    }

    let dir = std::env::temp_dir().join("isslab-scenario-file");
    for path in write_outputs(&outcome, &dir)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> isslab::Result<()> {
    run_example()
}

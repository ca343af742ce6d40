// Nonlocal Robin problem: the envelope written in terms of the disturbances.

use isslab::scenario::{builtin, run_scenario};

pub fn run_example() -> isslab::Result<()> {
    let mut scenario = builtin("nonlocal-robin-heat").expect("registered builtin");
    scenario.problem.n_cells = 32;
    let report = run_scenario(&scenario).report;
    println!("{}: {:?}", report.scenario, report.status);
    if let Some(cert) = &report.certificate {
        println!("weight {:?}, sigma {:.4}", cert.weight, cert.sigma);
    }
    for z in &report.zetas {
        println!("zeta {:.4}: {} violations, max excess {:.2e}", z.zeta, z.violations, z.max_excess);
        if let Some(d) = &z.disturbance {
            println!(
                "  |d0| / {:.4} and |d1| / {:.4}: {} component failures, max component excess {:.2e}",
                d.denominators.0, d.denominators.1, d.component_failures, d.max_component_excess
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> isslab::Result<()> {
    run_example()
}

// How tight the estimate is as the decay rate approaches sigma.

use isslab::scenario::{builtin, certify, sweep_zeta};

pub fn run_example() -> isslab::Result<()> {
    let scenario = builtin("heat-exponential-search").expect("registered builtin");
    let sigma = certify(&scenario)?.certificate.sigma;
    let grid: Vec<f64> = [0.0, 0.25, 0.5, 0.75, 0.95].iter().map(|f| f * sigma).collect();
    println!("sigma = {sigma:.4}");
    for row in sweep_zeta(&scenario, &grid)? {
        println!(
            "zeta {:.4} ({:.2} sigma)  tightness {:.4}  max excess {:+.2e}  violations {}",
            row.zeta, row.zeta_fraction, row.tightness, row.max_excess, row.violations
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> isslab::Result<()> {
    run_example()
}

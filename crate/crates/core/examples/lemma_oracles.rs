// Runs the sup-norm derivative oracles for a seed given on the command line.

use isslab::oracles::lemma_oracles_with;

pub fn run_example() -> isslab::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let report = lemma_oracles_with(seed, 50);
    for (name, stats) in [("lipschitz", &report.lipschitz), ("dini", &report.dini), ("contact", &report.contact)] {
        println!(
            "{name:<10} cases {:>4}  failures {}  worst margin {:+.3e}",
            stats.cases, stats.failures, stats.worst_margin
        );
    }
    println!("zero fields {}, passed {}", report.zero_fields, report.passed());
    Ok(())
}

#[allow(dead_code)]
fn main() -> isslab::Result<()> {
    run_example()
}

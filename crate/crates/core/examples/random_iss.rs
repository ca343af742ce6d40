//! Seeded random reaction-diffusion scenarios checked against their
//! fading-memory estimates.
//!
//! Usage: `cargo run --release --example random_iss -- [count] [first_seed]`

use isslab::scenario::{random_reaction_diffusion, run_batch, RandomScenarioOptions};

fn main() {
    let mut args = std::env::args().skip(1);
    let count: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(20);
    let first: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(0);
    let options = RandomScenarioOptions::default();
    let scenarios: Vec<_> = (first..first + count)
        .map(|seed| random_reaction_diffusion(seed, &options))
        .collect();
    let reports = run_batch(&scenarios);
    let mut worst: f64 = f64::NEG_INFINITY;
    for r in &reports {
        let excess = r.zetas.iter().map(|z| z.max_excess).fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(excess);
        let sigma = r.certificate.as_ref().map_or(f64::NAN, |c| c.sigma);
        println!(
            "{}  {:?}  sigma {:.3}  max excess {:+.3e}  {:.2}s {}",
            r.scenario,
            r.status,
            sigma,
            excess,
            r.wall_clock_seconds,
            r.error.as_deref().unwrap_or("")
        );
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    println!("{passed}/{} passed, worst excess {worst:+.3e}", reports.len());
}

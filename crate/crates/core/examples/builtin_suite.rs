//! Runs every built-in scenario and prints a one-line verdict for each.

use isslab::scenario::{all_builtins, run_batch};

fn main() {
    let reports = run_batch(&all_builtins());
    for r in &reports {
        println!(
            "{:<28} {:<20} {:>7.2}s  {}",
            r.scenario,
            format!("{:?}", r.status),
            r.wall_clock_seconds,
            r.error.as_deref().unwrap_or("")
        );
        for z in &r.zetas {
            println!(
                "    zeta {:>8.4}  tightness {:.4}  max excess {:+.3e}  violations {}  dominance failures {}",
                z.zeta, z.tightness, z.max_excess, z.violations, z.dominance_failures
            );
            if let Some(d) = &z.disturbance {
                println!("      disturbance form: {d:?}");
            }
        }
        if let Some(t) = &r.transform {
            println!("    transform: {t:?}");
        }
        if let Some(t) = &r.trajectory {
            println!("    trajectory: {t:?}");
        }
    }
}

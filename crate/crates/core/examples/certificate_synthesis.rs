// Synthesizing and checking decay-rate certificates.

use std::f64::consts::PI;

use isslab::certificate::{
    check_certificate, maximize_decay_rate, synthesize_cosine_certificate, synthesize_sine_certificate_for_ratio,
    CoefficientBounds, Interval, WeightFamily,
};

pub fn run_example() -> isslab::Result<()> {
    // u_t = u_xx + 5 u: sine weights work while the reaction stays below pi^2
    let sine = synthesize_sine_certificate_for_ratio(5.0)?;
    println!("sine, S = 5:        {:?} sigma {:.4}", sine.weight, sine.sigma);

    match synthesize_sine_certificate_for_ratio(PI * PI) {
        Ok(_) => println!("unexpected certificate at S = pi^2"),
        Err(e) => println!("sine, S = pi^2:     {e}"),
    }

    // Robin right end with lambda1 = 2 and kappa >= 0.5
    let cosine = synthesize_cosine_certificate(0.5, 2.0)?;
    println!("cosine:             theta {:.4} sigma {:.4}", cosine.theta, cosine.sigma);

    // advection pushes the best weight away from the symmetric sine
    let bounds = CoefficientBounds::new(Interval::new(1.0, 1.5), Interval::new(0.5, 1.0), Interval::new(-1.0, 0.5))?;
    let best = maximize_decay_rate(&bounds, WeightFamily::Sine)?;
    println!("search, sine:       {:?} sigma {:.4}", best.weight, best.sigma);

    // coarse check with a margin, then a fine check without
    let sigma = 0.8 * best.sigma;
    let coarse = check_certificate(&bounds, &best.weight, sigma, 0.01, 64)?;
    let fine = check_certificate(&bounds, &best.weight, sigma, 0.0, 4096)?;
    println!(
        "recheck:            coarse {:?} (worst {:.4} at x = {:.3}), fine {:?}",
        coarse.verdict, coarse.worst_point.residual, coarse.worst_point.x, fine.verdict
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> isslab::Result<()> {
    run_example()
}

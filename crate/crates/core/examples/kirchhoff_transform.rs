// Kirchhoff-type transform for u_t = (kappa(u) u_x)_x style problems.

use isslab::model::StateFn;
use isslab::transform::TransformSpec;

pub fn run_example() -> isslab::Result<()> {
    // kappa = 1, g = 1 gives gamma(u) = e^u - 1
    let spec = TransformSpec::build(StateFn::constant(1.0), StateFn::constant(1.0), 1.0, -4.0, 4.0)?;
    for u in [-2.0, -0.5, 0.0, 0.5, 2.0] {
        let w = spec.gamma(u)?;
        println!(
            "u = {u:+.1}  gamma = {w:+.6}  e^u - 1 = {:+.6}  back = {:+.12}",
            f64::exp_m1(u),
            spec.gamma_inverse(w)?
        );
    }

    let (g1, g2) = spec.gamma_envelopes(1.0)?;
    println!("gamma_1(1) = {g1:.4}, gamma_2(1) = {g2:.4}");

    let phi = 1.2;
    println!("decay limit for phi = {phi}: {:.4}", spec.decay_limit(phi));
    for t in [0.0, 0.5, 1.0] {
        println!("gain omega(0.5, {t}) = {:.4}", spec.iss_gain(phi, 0.3, 0.5, t)?);
    }

    let json = spec.save_json()?;
    let reloaded = TransformSpec::load_json(&json)?;
    println!("table of {} nodes survives JSON: {}", reloaded.nodes().len(), reloaded == spec);

    match spec.gamma(10.0) {
        Ok(_) => println!("unexpected value outside the table"),
        Err(e) => println!("outside the table: {e}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> isslab::Result<()> {
    run_example()
}

//! Learning-rate bound, rate constant and iteration count for τ-GDA near a
//! stable equilibrium, against the actual spectral radius of the step.

use taugda::{converge, game};

fn main() -> taugda::Result<()> {
    let g = game::quad_stack(4.0);
    let b = game::jacobian_blocks(&g, &[0.0; 4])?;
    for tau in [3.0, 5.0, 10.0] {
        let r = converge::rate_report(&b, tau, None)?;
        println!(
            "tau = {tau}: gamma = {:.4}, lambda_m = {:.3}, gamma1 = {:.4}, rate {:.4}, rho(I - gamma1 J) = {:.4}, k(1 -> 1e-6) = {}",
            r.gamma,
            r.lambda_m,
            r.gamma1,
            r.rate_base,
            r.step_spectral_radius.unwrap_or(f64::NAN),
            converge::iteration_bound(r.beta, r.alpha, 1.0, 1e-6)
        );
    }
    let t = game::torus();
    let b = game::jacobian_blocks(&t, &[0.0, 0.0])?;
    let r = converge::rate_report(&b, 2.0, None)?;
    let nb = converge::neighborhood_estimate(&t, &[0.0, 0.0], 2.0, r.alpha, r.beta, 0.1, 200, 0)?;
    println!("torus at the origin, tau = 2: L = {:.4}, delta = {:.4e}", nb.lipschitz, nb.delta);
    Ok(())
}

//! Tracks spec(J_τ) of the quadratic Stackelberg game over τ and compares it
//! with the large-τ split into slow and fast eigenvalues.

use taugda::{game, matlib, timescale};

fn main() -> taugda::Result<()> {
    let g = game::quad_stack(4.0);
    let b = game::jacobian_blocks(&g, &[0.0; 4])?;
    let taus = matlib::log_grid(0.1, 1e3, 9);
    let sweep = timescale::spectrum_sweep(&b, &taus)?;
    for (i, t) in taus.iter().enumerate() {
        let vals: Vec<String> = sweep.at(i).iter().map(|z| format!("{:.3}{:+.3}i", z.re, z.im)).collect();
        println!("tau = {t:9.3}: {}", vals.join("  "));
    }
    let grid = matlib::log_grid(0.1, 100.0, 2000);
    println!("realness changes at {:.4?}", timescale::realness_transitions(&b, &grid, 1e-7, 1e-8)?);
    for tau in [1e2, 1e3, 1e4] {
        println!("tau = {tau:e}: relative mismatch to the split {:.2e}", timescale::asymptotic_mismatch(&b, tau)?);
    }
    let sm = timescale::slow_manifold_gain(&b, 1e-3)?;
    println!("slow-manifold residual at eps = 1e-3: {:.2e}", sm.residual);
    Ok(())
}

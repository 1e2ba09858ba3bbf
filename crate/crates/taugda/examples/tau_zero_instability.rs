//! Instability threshold τ₀ for spurious critical points.

use taugda::game::{self, BuiltinParams};
use taugda::{matlib, timescale};

fn main() -> taugda::Result<()> {
    for v in [2.0, 5.0, 10.0] {
        let g = game::builtin("quad_spurious", &BuiltinParams { v, ..Default::default() })?;
        let b = game::jacobian_blocks(&g, &[0.0; 4])?;
        let c = timescale::tau_zero(&b, matlib::ZERO_RE_TOL)?;
        println!("quad_spurious v={v}: tau0 = {:.4}, P inertia {:?}", c.tau_zero, c.p_inertia);
        for (t, m) in c.verified_tau.iter().zip(&c.verified_margin) {
            println!("  tau = {t:.3}: max Re spec(-J) = {m:.4}");
        }
    }
    let g = game::jin_spurious(1.0);
    let b = game::jacobian_blocks(&g, &[0.0; 4])?;
    println!("jin_spurious: tau0 = {:.4}", timescale::tau_zero(&b, matlib::ZERO_RE_TOL)?.tau_zero);
    Ok(())
}

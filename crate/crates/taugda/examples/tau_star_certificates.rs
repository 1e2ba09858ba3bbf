//! τ* for the Stackelberg points of several games, with the guard-map root
//! as a second opinion.

use taugda::classify::{self, DEFINITE_TOL};
use taugda::game::{self, BuiltinParams};
use taugda::timescale;

fn main() -> taugda::Result<()> {
    for (name, p) in [
        ("quad_stack", BuiltinParams::default()),
        ("jin_dse", BuiltinParams { eps: 0.5, ..Default::default() }),
        ("torus", BuiltinParams::default()),
        ("poly_landscape", BuiltinParams::default()),
    ] {
        for pt in game::builtin_critical_points(name, &p, 1e-10)?.points {
            if !classify::classify_point(&pt.blocks, DEFINITE_TOL).kind.is_dse() {
                continue;
            }
            let c = timescale::tau_star_eig(&pt.blocks)?;
            println!(
                "{name} at {:.3?}: tau* = {:.6}, guard root = {:?}, margin at {:.3} = {:.2e}",
                pt.x, c.tau_star, c.guard_root, c.margin_tau, c.stability_margin
            );
        }
    }
    Ok(())
}

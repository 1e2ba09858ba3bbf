//! Region-of-attraction scans on the torus game for several τ.

use std::f64::consts::PI;

use taugda::classify::{self, DEFINITE_TOL};
use taugda::game::{self, BuiltinParams};
use taugda::simulate::{self, GridSpec};

fn main() -> taugda::Result<()> {
    let g = game::torus();
    let eqs: Vec<Vec<f64>> = game::builtin_critical_points("torus", &BuiltinParams::default(), 1e-10)?
        .points
        .into_iter()
        .filter(|p| classify::classify_point(&p.blocks, DEFINITE_TOL).kind.is_dse())
        .map(|p| p.x)
        .collect();
    println!("equilibria: {eqs:.3?}");
    let grid = GridSpec::square(-PI, PI, 24, 2);
    for tau in [1.0, 2.0, 5.0, 10.0] {
        let roa = simulate::roa_scan(&g, &grid, tau, 0.04, 20_000, &eqs, 1e-3)?;
        println!("tau = {tau:>4}: cells per equilibrium {:?}, unresolved {}", roa.counts(), roa.unresolved());
        if tau == 2.0 {
            for row in 0..24 {
                let line: String = (0..24)
                    .map(|c| match roa.cells[row * 24 + c].label {
                        simulate::UNRESOLVED => '.',
                        l => char::from(b'A' + l as u8),
                    })
                    .collect();
                println!("  {line}");
            }
        }
    }
    Ok(())
}

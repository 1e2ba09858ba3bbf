//! Deterministic τ-GDA on the polynomial game with a spurious critical point:
//! a small τ is attracted by the spurious origin, a large τ escapes it.

use taugda::game;
use taugda::simulate::{self, RunOptions};

fn main() -> taugda::Result<()> {
    let g = game::poly_spurious();
    let x0 = [-1.5, 2.5, 2.5, 3.0];
    for tau in [0.75, 5.0] {
        let opts = RunOptions::new(400_000).stride(50_000).reference(&[0.0; 4]);
        let rec = simulate::run_gda(&g, &x0, 5e-4, tau, &opts)?;
        println!("tau = {tau}: converged = {} after {} steps", rec.converged, rec.final_step);
        println!("  final x = {:.4?}, distance to origin {:.3e}", rec.final_x, rec.final_distance().unwrap_or(f64::NAN));
    }
    let rec = simulate::run_gda(&g, &x0, 5e-4, 5.0, &RunOptions::new(2000).stride(500))?;
    print!("{}", String::from_utf8_lossy(&rec.to_csv()?));
    Ok(())
}

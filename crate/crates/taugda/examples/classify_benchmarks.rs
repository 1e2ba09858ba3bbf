//! Finds and classifies the critical points of every builtin game.

use taugda::classify::{self, DEFINITE_TOL};
use taugda::game::{self, BuiltinParams, BUILTIN_NAMES};

fn main() -> taugda::Result<()> {
    let p = BuiltinParams::default();
    for name in BUILTIN_NAMES {
        let search = game::builtin_critical_points(name, &p, 1e-10)?;
        println!("{name}: {} critical point(s)", search.points.len());
        for pt in &search.points {
            let c = classify::classify_point(&pt.blocks, DEFINITE_TOL);
            let x: Vec<String> = pt.x.iter().map(|v| format!("{v:.4}")).collect();
            println!("  ({}) {}", x.join(", "), c.kind.as_str());
        }
    }
    Ok(())
}

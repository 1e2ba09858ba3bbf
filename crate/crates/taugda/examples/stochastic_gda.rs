//! Stochastic τ-GDA with a decaying power schedule and EMA-averaged iterates.

use taugda::game;
use taugda::matlib;
use taugda::simulate::{self, NoiseModel, RunOptions, StepSchedule};

fn main() -> taugda::Result<()> {
    let m = matlib::from_rows(
        4,
        4,
        &[1.0, 0.0, 0.5, 0.0, 0.0, 0.5, 0.0, 0.5, 0.5, 0.0, -1.0, 0.0, 0.0, 0.5, 0.0, -0.5],
    );
    let g = game::quadratic("quad_nash", 2, m);
    let schedule = StepSchedule::Power { gamma0: 0.5, p: 0.75 };
    let opts = RunOptions::new(100_000).stride(0).reference(&[0.0; 4]).ema(&[0.01, 0.001]).no_early_stop();
    for seed in 0..5 {
        let rec = simulate::run_sgda(&g, &[1.0; 4], schedule, 5.0, &NoiseModel::gaussian(0.1, seed), &opts)?;
        let ema: Vec<String> = rec
            .ema
            .iter()
            .map(|e| {
                let last = e.iterates.last().expect("recorded");
                format!("beta {}: {:.2e}", e.beta, last.iter().map(|v| v * v).sum::<f64>().sqrt())
            })
            .collect();
        println!("seed {seed}: final distance {:.2e}; EMA {}", rec.final_distance().unwrap_or(f64::NAN), ema.join(", "));
    }
    Ok(())
}

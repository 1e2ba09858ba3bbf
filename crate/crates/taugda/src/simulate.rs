//! Discrete τ-GDA: deterministic and stochastic runs, EMA tracking, vector
//! fields and region-of-attraction scans.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{self, ZeroSumGame};
use crate::io::fmt_f64;

pub const TRAJECTORY_SCHEMA: &str = "taugda.trajectory.v1";
pub const ROA_SCHEMA: &str = "taugda.roa.v1";
pub const FIELD_SCHEMA: &str = "taugda.field.v1";

/// Iterates beyond this norm count as divergence.
pub const DIVERGENCE_NORM: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepSchedule {
    Constant { gamma1: f64 },
    /// `γ₀/(k+1)^p`.
    Power { gamma0: f64, p: f64 },
}

impl StepSchedule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            StepSchedule::Constant { gamma1 } if gamma1 > 0.0 => Ok(()),
            StepSchedule::Power { gamma0, p } if gamma0 > 0.0 && p > 0.0 && p <= 1.0 => Ok(()),
            s => Err(Error::InvalidParameter(format!("invalid step schedule {s:?}"))),
        }
    }

    pub fn at(&self, k: usize) -> f64 {
        match *self {
            StepSchedule::Constant { gamma1 } => gamma1,
            StepSchedule::Power { gamma0, p } => gamma0 / ((k + 1) as f64).powf(p),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    None,
    /// Independent zero-mean Gaussian per coordinate; a single `sigma`
    /// entry applies to every coordinate.
    Gaussian { sigma: Vec<f64>, seed: u64 },
}

impl NoiseModel {
    pub fn gaussian(sigma: f64, seed: u64) -> Self {
        NoiseModel::Gaussian { sigma: vec![sigma], seed }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if let NoiseModel::Gaussian { sigma, .. } = self {
            if sigma.is_empty() || (sigma.len() != 1 && sigma.len() != dim) {
                return Err(Error::Dimension(format!("noise sigma needs 1 or {dim} entries")));
            }
            if sigma.iter().any(|s| !(*s >= 0.0)) {
                return Err(Error::InvalidParameter("noise sigma must be >= 0".into()));
            }
        }
        Ok(())
    }
}

/// Recording and stopping options shared by every run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub steps: usize,
    /// EMA weights `β` in `x̄_k = βx_k + (1−β)x̄_{k−1}`.
    pub ema_betas: Vec<f64>,
    pub reference: Option<Vec<f64>>,
    /// Stop once `‖g(x_k)‖` falls below this; `None` uses `1e-8·(1+‖x_k‖)`.
    pub stop_tol: Option<f64>,
    pub early_stop: bool,
    /// Record every `stride`-th step (the last step is always recorded);
    /// 0 records only the final state.
    pub stride: usize,
}

impl RunOptions {
    pub fn new(steps: usize) -> Self {
        RunOptions { steps, ema_betas: Vec::new(), reference: None, stop_tol: None, early_stop: true, stride: 1 }
    }

    pub fn reference(mut self, r: &[f64]) -> Self {
        self.reference = Some(r.to_vec());
        self
    }

    pub fn stride(mut self, s: usize) -> Self {
        self.stride = s;
        self
    }

    pub fn ema(mut self, betas: &[f64]) -> Self {
        self.ema_betas = betas.to_vec();
        self
    }

    pub fn no_early_stop(mut self) -> Self {
        self.early_stop = false;
        self
    }

    pub fn stop_tol(mut self, tol: f64) -> Self {
        self.stop_tol = Some(tol);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmaTrack {
    pub beta: f64,
    pub iterates: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub tau: f64,
    pub schedule: StepSchedule,
    /// Step index of each recorded row.
    pub steps: Vec<usize>,
    pub iterates: Vec<Vec<f64>>,
    pub grad_norms: Vec<f64>,
    /// Distance to the reference point, when one was given.
    pub distances: Vec<f64>,
    pub ema: Vec<EmaTrack>,
    pub converged: bool,
    pub converged_step: Option<usize>,
    pub diverged: bool,
    pub final_x: Vec<f64>,
    pub final_step: usize,
}

impl TrajectoryRecord {
    pub fn final_distance(&self) -> Option<f64> {
        self.distances.last().copied()
    }

    /// Header and rows: `step, x_0.., grad_norm, [distance], [ema_<β>_x_i..]`.
    pub fn csv_table(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let n = self.final_x.len();
        let mut header = vec!["step".to_string()];
        header.extend((0..n).map(|i| format!("x_{i}")));
        header.push("grad_norm".into());
        let has_dist = !self.distances.is_empty();
        if has_dist {
            header.push("distance".into());
        }
        for e in &self.ema {
            header.extend((0..n).map(|i| format!("ema_{}_x_{i}", e.beta)));
        }
        let rows = (0..self.steps.len())
            .map(|r| {
                let mut row = vec![self.steps[r].to_string()];
                row.extend(self.iterates[r].iter().map(|v| fmt_f64(*v)));
                row.push(fmt_f64(self.grad_norms[r]));
                if has_dist {
                    row.push(fmt_f64(self.distances[r]));
                }
                for e in &self.ema {
                    row.extend(e.iterates[r].iter().map(|v| fmt_f64(*v)));
                }
                row
            })
            .collect();
        (header, rows)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let (h, r) = self.csv_table();
        crate::io::csv_bytes(TRAJECTORY_SCHEMA, &h, &r)
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Deterministic τ-GDA `x_{k+1} = x_k − γ₁Λ_τ g(x_k)`.
pub fn run_gda(game: &ZeroSumGame, x0: &[f64], gamma1: f64, tau: f64, opts: &RunOptions) -> Result<TrajectoryRecord> {
    run_sgda(game, x0, StepSchedule::Constant { gamma1 }, tau, &NoiseModel::None, opts)
}

/// Stochastic τ-GDA `x_{k+1} = x_k − γ_k(Λ_τ g(x_k) + w_{k+1})`; the noise
/// enters unscaled by τ. Deterministic given the noise seed.
pub fn run_sgda(
    game: &ZeroSumGame,
    x0: &[f64],
    schedule: StepSchedule,
    tau: f64,
    noise: &NoiseModel,
    opts: &RunOptions,
) -> Result<TrajectoryRecord> {
    schedule.validate()?;
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!("tau must be > 0, got {tau}")));
    }
    let dim = game.dim();
    if x0.len() != dim {
        return Err(Error::Dimension(format!("x0 has {} coordinates, game needs {dim}", x0.len())));
    }
    if let Some(r) = &opts.reference {
        if r.len() != dim {
            return Err(Error::Dimension("reference point has the wrong dimension".into()));
        }
    }
    if opts.ema_betas.iter().any(|b| !(*b > 0.0 && *b <= 1.0)) {
        return Err(Error::InvalidParameter("EMA weights must lie in (0, 1]".into()));
    }
    noise.validate(dim)?;
    let mut rng = match noise {
        NoiseModel::Gaussian { seed, .. } => Some(ChaCha8Rng::seed_from_u64(*seed)),
        NoiseModel::None => None,
    };
    let sigma_of = |i: usize| match noise {
        NoiseModel::Gaussian { sigma, .. } => sigma[if sigma.len() == 1 { 0 } else { i }],
        NoiseModel::None => 0.0,
    };

    let mut x = x0.to_vec();
    game.wrap(&mut x);
    let mut emas: Vec<Vec<f64>> = opts.ema_betas.iter().map(|_| x.clone()).collect();
    let mut rec = TrajectoryRecord {
        tau,
        schedule,
        steps: Vec::new(),
        iterates: Vec::new(),
        grad_norms: Vec::new(),
        distances: Vec::new(),
        ema: opts.ema_betas.iter().map(|&beta| EmaTrack { beta, iterates: Vec::new() }).collect(),
        converged: false,
        converged_step: None,
        diverged: false,
        final_x: x.clone(),
        final_step: 0,
    };
    let record = |rec: &mut TrajectoryRecord, k: usize, x: &[f64], gn: f64, emas: &[Vec<f64>]| {
        rec.steps.push(k);
        rec.iterates.push(x.to_vec());
        rec.grad_norms.push(gn);
        if let Some(r) = &opts.reference {
            rec.distances.push(game.distance(x, r));
        }
        for (t, e) in rec.ema.iter_mut().zip(emas) {
            t.iterates.push(e.clone());
        }
    };

    let mut k = 0;
    loop {
        let g = match game::grad(game, &x) {
            Ok(g) => g,
            Err(Error::NonFinite(_)) => {
                rec.diverged = true;
                break;
            }
            Err(e) => return Err(e),
        };
        let gn = norm(&g);
        let tol = opts.stop_tol.unwrap_or(1e-8 * (1.0 + norm(&x)));
        let stop = opts.early_stop && gn <= tol;
        let last = stop || k == opts.steps;
        if last || (opts.stride > 0 && k % opts.stride == 0) {
            record(&mut rec, k, &x, gn, &emas);
        }
        if stop {
            rec.converged = true;
            rec.converged_step = Some(k);
        }
        if last {
            break;
        }
        let step = schedule.at(k);
        for i in 0..dim {
            let scale = if i < game.n1 { 1.0 } else { tau };
            let w = match rng.as_mut() {
                Some(r) => sigma_of(i) * r.sample::<f64, _>(StandardNormal),
                None => 0.0,
            };
            // effective per-player step first, so runs match an explicit γ₁τ step bit for bit
            x[i] -= (step * scale) * g[i] + step * w;
        }
        game.wrap(&mut x);
        k += 1;
        if x.iter().any(|v| !v.is_finite()) || norm(&x) > DIVERGENCE_NORM {
            rec.diverged = true;
            break;
        }
        for (e, &b) in emas.iter_mut().zip(&opts.ema_betas) {
            for (ei, xi) in e.iter_mut().zip(&x) {
                *ei = b * xi + (1.0 - b) * *ei;
            }
        }
    }
    if rec.diverged {
        // keep the last finite state for inspection
        if let Some(last) = rec.iterates.last() {
            rec.final_x = last.clone();
        }
        rec.final_step = k;
    } else {
        rec.final_x = x;
        rec.final_step = k;
    }
    Ok(rec)
}

/// One axis of a scan grid: `n` cell centres of `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn point(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * (self.hi - self.lo) / self.n as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub axes: Vec<Axis>,
}

impl GridSpec {
    pub fn square(lo: f64, hi: f64, n: usize, dim: usize) -> Self {
        GridSpec { axes: vec![Axis { lo, hi, n }; dim] }
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.n).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cell `idx` in row-major order (last axis fastest).
    pub fn point(&self, mut idx: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.axes.len()];
        for (d, a) in self.axes.iter().enumerate().rev() {
            out[d] = a.point(idx % a.n);
            idx /= a.n;
        }
        out
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if self.axes.len() != dim {
            return Err(Error::Dimension(format!("grid has {} axes, game needs {dim}", self.axes.len())));
        }
        if self.axes.iter().any(|a| a.n == 0 || !(a.hi >= a.lo)) {
            return Err(Error::InvalidParameter("grid axes need n >= 1 and hi >= lo".into()));
        }
        Ok(())
    }
}

pub const UNRESOLVED: i64 = -1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoaCell {
    pub x0: Vec<f64>,
    /// Index into the equilibrium list, or [`UNRESOLVED`].
    pub label: i64,
    pub steps: usize,
    pub final_x: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoaGrid {
    pub grid: GridSpec,
    pub tau: f64,
    pub gamma1: f64,
    pub equilibria: Vec<Vec<f64>>,
    pub cells: Vec<RoaCell>,
}

impl RoaGrid {
    pub fn unresolved(&self) -> usize {
        self.cells.iter().filter(|c| c.label == UNRESOLVED).count()
    }

    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.equilibria.len()];
        for cell in &self.cells {
            if cell.label >= 0 {
                c[cell.label as usize] += 1;
            }
        }
        c
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let n = self.grid.axes.len();
        let mut header = vec!["cell".to_string()];
        header.extend((0..n).map(|i| format!("x0_{i}")));
        header.push("label".into());
        header.push("steps".into());
        header.extend((0..n).map(|i| format!("final_{i}")));
        let rows: Vec<Vec<String>> = self
            .cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let mut r = vec![i.to_string()];
                r.extend(c.x0.iter().map(|v| fmt_f64(*v)));
                r.push(c.label.to_string());
                r.push(c.steps.to_string());
                r.extend(c.final_x.iter().map(|v| fmt_f64(*v)));
                r
            })
            .collect();
        crate::io::csv_bytes(ROA_SCHEMA, &header, &rows)
    }
}

/// Runs τ-GDA from every grid cell (in parallel) and labels each by the
/// first equilibrium within `match_tol` of the final iterate.
pub fn roa_scan(
    game: &ZeroSumGame,
    grid: &GridSpec,
    tau: f64,
    gamma1: f64,
    steps: usize,
    equilibria: &[Vec<f64>],
    match_tol: f64,
) -> Result<RoaGrid> {
    grid.validate(game.dim())?;
    if equilibria.iter().any(|e| e.len() != game.dim()) {
        return Err(Error::Dimension("equilibrium with the wrong dimension".into()));
    }
    let opts = RunOptions::new(steps).stride(0);
    let cells: Result<Vec<RoaCell>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x0 = grid.point(i);
            let rec = run_gda(game, &x0, gamma1, tau, &opts)?;
            let label = if rec.diverged {
                UNRESOLVED
            } else {
                equilibria
                    .iter()
                    .position(|e| game.distance(&rec.final_x, e) <= match_tol)
                    .map_or(UNRESOLVED, |p| p as i64)
            };
            Ok(RoaCell { x0, label, steps: rec.final_step, final_x: rec.final_x })
        })
        .collect();
    Ok(RoaGrid { grid: grid.clone(), tau, gamma1, equilibria: equilibria.to_vec(), cells: cells? })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub x: Vec<f64>,
    /// `−Λ_τ g(x)`.
    pub field: Vec<f64>,
    pub magnitude: f64,
}

pub fn vector_field(game: &ZeroSumGame, grid: &GridSpec, tau: f64) -> Result<Vec<FieldSample>> {
    grid.validate(game.dim())?;
    (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.point(i);
            let g = game::grad(game, &x)?;
            let field: Vec<f64> =
                g.iter().enumerate().map(|(j, v)| if j < game.n1 { -v } else { -tau * v }).collect();
            Ok(FieldSample { magnitude: norm(&field), x, field })
        })
        .collect()
}

pub fn field_csv(samples: &[FieldSample]) -> Result<Vec<u8>> {
    let n = samples.first().map_or(0, |s| s.x.len());
    let mut header: Vec<String> = (0..n).map(|i| format!("x_{i}")).collect();
    header.extend((0..n).map(|i| format!("f_{i}")));
    header.push("magnitude".into());
    let rows: Vec<Vec<String>> = samples
        .iter()
        .map(|s| {
            let mut r: Vec<String> = s.x.iter().map(|v| fmt_f64(*v)).collect();
            r.extend(s.field.iter().map(|v| fmt_f64(*v)));
            r.push(fmt_f64(s.magnitude));
            r
        })
        .collect();
    crate::io::csv_bytes(FIELD_SCHEMA, &header, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_at_critical_point() {
        let g = game::quad_stack(4.0);
        let r = run_gda(&g, &[0.0; 4], 1e-3, 2.0, &RunOptions::new(10)).unwrap();
        assert!(r.converged);
        assert_eq!(r.final_step, 0);
        assert_eq!(r.final_x, vec![0.0; 4]);
    }

    #[test]
    fn zero_noise_equals_deterministic() {
        let g = game::quad_stack(4.0);
        let opts = RunOptions::new(200).no_early_stop();
        let a = run_gda(&g, &[1.0, 2.0, 3.0, 4.0], 1e-3, 5.0, &opts).unwrap();
        let b = run_sgda(
            &g,
            &[1.0, 2.0, 3.0, 4.0],
            StepSchedule::Constant { gamma1: 1e-3 },
            5.0,
            &NoiseModel::gaussian(0.0, 3),
            &opts,
        )
        .unwrap();
        assert_eq!(a.iterates, b.iterates);
    }

    #[test]
    fn same_seed_same_path() {
        let g = game::quad_stack(4.0);
        let opts = RunOptions::new(100);
        let run = |seed| {
            run_sgda(&g, &[1.0; 4], StepSchedule::Power { gamma0: 0.1, p: 0.75 }, 5.0, &NoiseModel::gaussian(0.1, seed), &opts)
                .unwrap()
        };
        assert_eq!(run(7).iterates, run(7).iterates);
        assert_ne!(run(7).iterates, run(8).iterates);
    }

    #[test]
    fn ema_weights_new_iterate_by_beta() {
        let g = game::quad_stack(4.0);
        let opts = RunOptions::new(3).ema(&[0.25]).no_early_stop();
        let r = run_gda(&g, &[1.0, 0.0, 0.0, 0.0], 1e-2, 1.0, &opts).unwrap();
        let e = &r.ema[0].iterates;
        for k in 1..e.len() {
            for (i, got) in e[k].iter().enumerate() {
                let want = 0.25 * r.iterates[k][i] + 0.75 * e[k - 1][i];
                assert!((got - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn divergence_is_flagged() {
        let g = game::quad_stack(4.0);
        let r = run_gda(&g, &[1.0; 4], 10.0, 1.0, &RunOptions::new(10_000)).unwrap();
        assert!(r.diverged);
        assert!(!r.converged);
    }

    #[test]
    fn field_scaling_and_zero() {
        let g = game::quad_stack(4.0);
        let grid = GridSpec { axes: vec![Axis { lo: -1.0, hi: 1.0, n: 3 }; 4] };
        let f1 = vector_field(&g, &grid, 1.0).unwrap();
        let f2 = vector_field(&g, &grid, 2.0).unwrap();
        for (a, b) in f1.iter().zip(&f2) {
            assert_eq!(&a.field[..2], &b.field[..2]);
            assert_eq!(a.field[2] * 2.0, b.field[2]);
            assert_eq!(a.field[3] * 2.0, b.field[3]);
        }
        let origin = GridSpec { axes: vec![Axis { lo: 0.0, hi: 0.0, n: 1 }; 4] };
        assert_eq!(vector_field(&g, &origin, 3.0).unwrap()[0].magnitude, 0.0);
    }

    #[test]
    fn single_cell_at_equilibrium() {
        let g = game::torus();
        let grid = GridSpec { axes: vec![Axis { lo: 0.0, hi: 0.0, n: 1 }; 2] };
        let r = roa_scan(&g, &grid, 2.0, 0.04, 100, &[vec![0.0, 0.0]], 1e-3).unwrap();
        assert_eq!(r.cells[0].label, 0);
    }

    #[test]
    fn csv_has_schema_row() {
        let g = game::quad_stack(4.0);
        let r = run_gda(&g, &[1.0; 4], 1e-3, 5.0, &RunOptions::new(3).reference(&[0.0; 4])).unwrap();
        let text = String::from_utf8(r.to_csv().unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), format!("# schema={TRAJECTORY_SCHEMA}"));
        assert!(lines.next().unwrap().starts_with("step,x_0,x_1,x_2,x_3,grad_norm,distance"));
    }
}

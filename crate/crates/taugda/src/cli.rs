//! Command-line front end: argument parsing, dispatch and output.
//!
//! Exit codes: 0 success, 2 usage error, 3 precondition refusal (the point or
//! the parameters do not meet an operation's requirements), 4 numerical
//! failure. On failure a JSON object `{"status": "error", "kind", "reason",
//! "exit_code"}` is printed to stderr.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::classify::{self, Classification, DEFINITE_TOL};
use crate::converge::{self, NeighborhoodEstimate, RateReport};
use crate::error::{Error, Result};
use crate::game::{self, BuiltinParams, CriticalPoint, ZeroSumGame};
use crate::ganlab::{self, RealizableReport};
use crate::io::{self, fmt_f64};
use crate::matlib::{self, Mat, Spectrum};
use crate::simulate::{self, Axis, GridSpec, NoiseModel, RunOptions, StepSchedule};
use crate::timescale::{self, TauStarCertificate, TauZeroCertificate};

#[derive(Parser, Debug)]
#[command(name = "taugda", version, about = "Timescale-separated gradient descent-ascent: thresholds, rates and simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GameArgs {
    /// Builtin game id.
    #[arg(long)]
    pub game: String,
    #[arg(long, default_value_t = 4.0)]
    pub v: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Covariance-GAN target standard deviation (target `σ²I`).
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
}

impl GameArgs {
    fn params(&self) -> BuiltinParams {
        BuiltinParams { v: self.v, eps: self.eps, mu: self.mu, sigma: self.sigma, d: self.d }
    }

    fn build(&self) -> Result<ZeroSumGame> {
        game::builtin(&self.game, &self.params())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct OutArgs {
    /// Output file (written atomically); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Find and classify the critical points of a game.
    Classify {
        #[command(flatten)]
        game: GameArgs,
        /// Definiteness tolerance (relative to 1 + ‖block‖).
        #[arg(long, default_value_t = DEFINITE_TOL)]
        tol: f64,
        /// Residual tolerance for the Newton search.
        #[arg(long, default_value_t = 1e-10)]
        newton_tol: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Stability threshold τ* at a point, or at every Stackelberg point.
    TauStar {
        #[command(flatten)]
        game: GameArgs,
        /// Comma-separated point (refined to a nearby critical point).
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Instability threshold τ₀ at a non-equilibrium critical point.
    TauZero {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        /// Zero-real-part tolerance for the Lyapunov solves.
        #[arg(long, default_value_t = matlib::ZERO_RE_TOL)]
        tol: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Eigenvalues of J_τ over a τ grid.
    Sweep {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        /// `lo:hi:n` or `lo:hi:n:log`.
        #[arg(long, default_value = "0.01:100:400:log")]
        tau_grid: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run deterministic or stochastic τ-GDA from one start.
    Simulate {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        /// Constant step, or γ₀ of the power schedule when `--power` is set.
        #[arg(long, default_value_t = 1e-3)]
        gamma1: f64,
        /// Exponent p of the schedule γ₀/(k+1)^p.
        #[arg(long)]
        power: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        steps: usize,
        /// Comma-separated EMA weights β.
        #[arg(long)]
        ema: Option<String>,
        /// Per-coordinate Gaussian noise level (0 disables noise).
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Record every n-th step.
        #[arg(long, default_value_t = 1)]
        stride: usize,
        /// Reference point for the distance column; defaults to the origin
        /// when it is a critical point.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        /// Gradient-norm stopping tolerance (default 1e-8·(1+‖x‖)).
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Label a grid of starts by the equilibrium τ-GDA reaches.
    Roa {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, default_value_t = 1e-3)]
        gamma1: f64,
        #[arg(long, default_value_t = 20_000)]
        steps: usize,
        /// `lo:hi:n` applied to every coordinate (cell centres).
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// `x,y;x,y;...`; defaults to the game's Nash and Stackelberg points.
        #[arg(long, allow_hyphen_values = true)]
        equilibria: Option<String>,
        #[arg(long, default_value_t = 1e-3)]
        match_tol: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Sample the field −Λ_τ g on a grid.
    Field {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Learning-rate bound, rate constant and neighbourhood estimate.
    Rate {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        /// Margin α ∈ (0, γ); defaults to γ/2.
        #[arg(long)]
        alpha: Option<f64>,
        /// Initial distance for the iteration bound.
        #[arg(long)]
        r0: Option<f64>,
        /// Target accuracy for the iteration bound.
        #[arg(long, default_value_t = 1e-6)]
        eps_target: f64,
        #[arg(long, default_value_t = 0.1)]
        probe_radius: f64,
        #[arg(long, default_value_t = 200)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Regularized-GAN analysis at the GAN's equilibrium.
    Gan {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        /// Evaluate over a τ grid instead of a single τ.
        #[arg(long)]
        tau_grid: Option<String>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        out: OutArgs,
    },
}

/// Parses `lo:hi:n[:log]`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Usage(format!("grid '{s}' must be lo:hi:n or lo:hi:n:log"));
    if parts.len() != 3 && parts.len() != 4 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    let log = match parts.get(3) {
        None => false,
        Some(&"log") => true,
        Some(_) => return Err(bad()),
    };
    if n == 0 || !(hi >= lo) {
        return Err(Error::InvalidParameter(format!("grid '{s}' needs n >= 1 and hi >= lo")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    if log {
        if !(lo > 0.0) {
            return Err(Error::InvalidParameter("log grid needs lo > 0".into()));
        }
        Ok(matlib::log_grid(lo, hi, n))
    } else {
        Ok((0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect())
    }
}

fn parse_number(t: &str) -> Result<f64> {
    let t = t.trim();
    let pi = std::f64::consts::PI;
    match t {
        "pi" => Ok(pi),
        "-pi" => Ok(-pi),
        _ => t.parse().map_err(|_| Error::Usage(format!("'{t}' is not a number"))),
    }
}

/// Comma-separated numbers; `pi` and `-pi` are accepted.
pub fn parse_point(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_number).collect()
}

fn parse_axis(s: &str) -> Result<Axis> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Usage(format!("grid '{s}' must be lo:hi:n")));
    }
    let n = parts[2].trim().parse().map_err(|_| Error::Usage(format!("bad cell count in '{s}'")))?;
    Ok(Axis { lo: parse_number(parts[0])?, hi: parse_number(parts[1])?, n })
}

fn emit(out: &OutArgs, bytes: Vec<u8>) -> Result<()> {
    match &out.out {
        Some(p) => io::write_atomic(p, &bytes),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&bytes)?;
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(out: &OutArgs, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    bytes.push(b'\n');
    emit(out, bytes)
}

fn csv_or_json<T: Serialize>(
    out: &OutArgs,
    default: Format,
    value: &T,
    csv: impl FnOnce() -> Result<Vec<u8>>,
) -> Result<()> {
    match out.format.unwrap_or(default) {
        Format::Json => emit_json(out, value),
        Format::Csv => emit(out, csv()?),
    }
}

fn table_csv(schema: &str, header: &[&str], rows: Vec<Vec<String>>) -> Result<Vec<u8>> {
    let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
    io::csv_bytes(schema, &header, &rows)
}

/// Newton-refines a user point to a nearby critical point.
fn refine_point(g: &ZeroSumGame, x: &[f64]) -> Result<CriticalPoint> {
    if x.len() != g.dim() {
        return Err(Error::Dimension(format!("point has {} coordinates, game needs {}", x.len(), g.dim())));
    }
    game::find_critical_points(g, &[x.to_vec()], 1e-10, 100)
        .points
        .into_iter()
        .next()
        .ok_or_else(|| Error::Precondition("no critical point found near the given point".into()))
}

fn points_for(args: &GameArgs, g: &ZeroSumGame, point: &Option<String>) -> Result<Vec<CriticalPoint>> {
    match point {
        Some(p) => Ok(vec![refine_point(g, &parse_point(p)?)?]),
        None => {
            let s = game::builtin_critical_points(&args.game, &args.params(), 1e-10)?;
            if s.points.is_empty() {
                return Err(Error::NonConvergence("critical-point search found nothing".into()));
            }
            Ok(s.points)
        }
    }
}

/// The given point, else the first Stackelberg point, else the first point.
fn single_point(args: &GameArgs, g: &ZeroSumGame, point: &Option<String>) -> Result<CriticalPoint> {
    let mut pts = points_for(args, g, point)?;
    let pos = pts
        .iter()
        .position(|p| classify::classify_point(&p.blocks, DEFINITE_TOL).kind.is_dse())
        .unwrap_or(0);
    Ok(pts.swap_remove(pos))
}

#[derive(Serialize, Deserialize)]
pub struct ClassifiedPoint {
    pub x: Vec<f64>,
    pub gnorm: f64,
    #[serde(flatten)]
    pub classification: Classification,
}

#[derive(Serialize, Deserialize)]
pub struct ClassifyOutput {
    pub game: String,
    pub points: Vec<ClassifiedPoint>,
    pub dropped_seeds: usize,
}

#[derive(Serialize, Deserialize)]
pub struct TauStarOutput {
    pub game: String,
    pub point: Vec<f64>,
    #[serde(flatten)]
    pub certificate: TauStarCertificate,
}

#[derive(Serialize, Deserialize)]
pub struct GameTauStarOutput {
    pub game: String,
    pub tau_star: f64,
    pub points: Vec<TauStarOutput>,
}

#[derive(Serialize, Deserialize)]
pub struct TauZeroOutput {
    pub game: String,
    pub point: Vec<f64>,
    #[serde(flatten)]
    pub certificate: TauZeroCertificate,
}

#[derive(Serialize, Deserialize)]
pub struct RateOutput {
    pub game: String,
    pub point: Vec<f64>,
    pub tau: f64,
    #[serde(flatten)]
    pub report: RateReport,
    pub neighborhood: NeighborhoodEstimate,
}

#[derive(Clone, Serialize, Deserialize)]
pub struct GanRow {
    pub tau: f64,
    pub mu: f64,
    /// Closed-form spectrum, when the instance has one.
    pub closed_form: Option<Spectrum>,
    pub numeric: Spectrum,
    pub max_abs_diff: Option<f64>,
    pub real_spectrum: bool,
    pub stable: bool,
}

#[derive(Serialize, Deserialize)]
pub struct GanOutput {
    pub game: String,
    pub point: Vec<f64>,
    pub kind: String,
    pub realizable: RealizableReport,
    pub dimension_ok: bool,
    pub rows: Vec<GanRow>,
}

fn cmd_classify(args: &GameArgs, tol: f64, newton_tol: f64, out: &OutArgs) -> Result<()> {
    let s = game::builtin_critical_points(&args.game, &args.params(), newton_tol)?;
    let points: Vec<ClassifiedPoint> = s
        .points
        .iter()
        .map(|p| ClassifiedPoint { x: p.x.clone(), gnorm: p.gnorm, classification: classify::classify_point(&p.blocks, tol) })
        .collect();
    let res = ClassifyOutput { game: args.game.clone(), points, dropped_seeds: s.dropped };
    csv_or_json(out, Format::Json, &res, || {
        let rows = res
            .points
            .iter()
            .map(|p| {
                let e = &p.classification.evidence;
                let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
                vec![
                    p.x.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(" "),
                    p.classification.kind.as_str().to_string(),
                    fmt_f64(p.gnorm),
                    fmt_f64(e.d11_min),
                    fmt_f64(e.neg_d22_min),
                    opt(e.schur_min),
                ]
            })
            .collect();
        table_csv("taugda.classify.v1", &["x", "kind", "gnorm", "d11_min", "neg_d22_min", "schur_min"], rows)
    })
}

fn tau_star_csv(rows: &[TauStarOutput]) -> Result<Vec<u8>> {
    let rows = rows
        .iter()
        .map(|r| {
            vec![
                r.point.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(" "),
                fmt_f64(r.certificate.tau_star),
                r.certificate.guard_root.map(fmt_f64).unwrap_or_default(),
                fmt_f64(r.certificate.stability_margin),
            ]
        })
        .collect();
    table_csv("taugda.tau_star.v1", &["point", "tau_star", "guard_root", "stability_margin"], rows)
}

fn cmd_tau_star(args: &GameArgs, point: &Option<String>, out: &OutArgs) -> Result<()> {
    let g = args.build()?;
    let pts = points_for(args, &g, point)?;
    if point.is_some() {
        let p = &pts[0];
        let res = TauStarOutput { game: args.game.clone(), point: p.x.clone(), certificate: timescale::tau_star_eig(&p.blocks)? };
        return csv_or_json(out, Format::Json, &res, || tau_star_csv(std::slice::from_ref(&res)));
    }
    let summary = timescale::tau_star_game(&g, &pts)?;
    let mut rows = Vec::new();
    for p in &pts {
        if classify::classify_point(&p.blocks, DEFINITE_TOL).kind.is_dse() {
            rows.push(TauStarOutput { game: args.game.clone(), point: p.x.clone(), certificate: timescale::tau_star_eig(&p.blocks)? });
        }
    }
    let res = GameTauStarOutput { game: args.game.clone(), tau_star: summary.tau_star, points: rows };
    csv_or_json(out, Format::Json, &res, || tau_star_csv(&res.points))
}

fn cmd_tau_zero(args: &GameArgs, point: &Option<String>, tol: f64, out: &OutArgs) -> Result<()> {
    let g = args.build()?;
    let p = match point {
        Some(_) => single_point(args, &g, point)?,
        None => points_for(args, &g, point)?
            .into_iter()
            .find(|p| classify::classify_point(&p.blocks, DEFINITE_TOL).kind == classify::PointKind::Spurious)
            .ok_or_else(|| Error::Precondition("game has no spurious critical point".into()))?,
    };
    let res = TauZeroOutput { game: args.game.clone(), point: p.x.clone(), certificate: timescale::tau_zero(&p.blocks, tol)? };
    csv_or_json(out, Format::Json, &res, || {
        let c = &res.certificate;
        let rows = c
            .verified_tau
            .iter()
            .zip(&c.verified_margin)
            .map(|(t, m)| vec![fmt_f64(c.tau_zero), fmt_f64(*t), fmt_f64(*m)])
            .collect();
        table_csv("taugda.tau_zero.v1", &["tau_zero", "tau", "margin"], rows)
    })
}

fn cmd_sweep(args: &GameArgs, point: &Option<String>, grid: &str, out: &OutArgs) -> Result<()> {
    let g = args.build()?;
    let p = single_point(args, &g, point)?;
    let taus = parse_grid(grid)?;
    let sweep = timescale::spectrum_sweep(&p.blocks, &taus)?;
    csv_or_json(out, Format::Csv, &sweep, || {
        let n = sweep.tracks.len();
        let mut header = vec!["tau".to_string()];
        for k in 0..n {
            header.push(format!("lambda_{k}_re"));
            header.push(format!("lambda_{k}_im"));
        }
        let rows = (0..taus.len())
            .map(|i| {
                let mut r = vec![fmt_f64(taus[i])];
                for t in &sweep.tracks {
                    r.push(fmt_f64(t.values[i].re));
                    r.push(fmt_f64(t.values[i].im));
                }
                r
            })
            .collect::<Vec<_>>();
        io::csv_bytes("taugda.sweep.v1", &header, &rows)
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    args: &GameArgs,
    x0: &str,
    tau: f64,
    gamma1: f64,
    power: Option<f64>,
    steps: usize,
    ema: &Option<String>,
    noise: f64,
    seed: u64,
    stride: usize,
    point: &Option<String>,
    tol: Option<f64>,
    out: &OutArgs,
) -> Result<()> {
    let g = args.build()?;
    let x0 = parse_point(x0)?;
    let schedule = match power {
        Some(p) => StepSchedule::Power { gamma0: gamma1, p },
        None => StepSchedule::Constant { gamma1 },
    };
    let noise_model = if noise > 0.0 { NoiseModel::gaussian(noise, seed) } else { NoiseModel::None };
    let mut opts = RunOptions::new(steps).stride(stride.max(1));
    if let Some(e) = ema {
        opts = opts.ema(&parse_point(e)?);
    }
    if let Some(t) = tol {
        opts = opts.stop_tol(t);
    }
    if noise > 0.0 {
        opts = opts.no_early_stop();
    }
    let reference = match point {
        Some(p) => Some(parse_point(p)?),
        None => {
            let zero = vec![0.0; g.dim()];
            let gz = game::grad(&g, &zero)?;
            (gz.iter().all(|v| v.abs() <= 1e-12)).then_some(zero)
        }
    };
    if let Some(r) = &reference {
        opts = opts.reference(r);
    }
    let rec = simulate::run_sgda(&g, &x0, schedule, tau, &noise_model, &opts)?;
    csv_or_json(out, Format::Csv, &rec, || rec.to_csv())
}

fn parse_equilibria(s: &str) -> Result<Vec<Vec<f64>>> {
    s.split(';').filter(|t| !t.trim().is_empty()).map(parse_point).collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_roa(
    args: &GameArgs,
    tau: f64,
    gamma1: f64,
    steps: usize,
    grid: &str,
    equilibria: &Option<String>,
    match_tol: f64,
    out: &OutArgs,
) -> Result<()> {
    let g = args.build()?;
    let axis = parse_axis(grid)?;
    let spec = GridSpec { axes: vec![axis; g.dim()] };
    let eqs = match equilibria {
        Some(s) => parse_equilibria(s)?,
        None => game::builtin_critical_points(&args.game, &args.params(), 1e-10)?
            .points
            .into_iter()
            .filter(|p| classify::classify_point(&p.blocks, DEFINITE_TOL).kind.is_dse())
            .map(|p| p.x)
            .collect(),
    };
    let roa = simulate::roa_scan(&g, &spec, tau, gamma1, steps, &eqs, match_tol)?;
    csv_or_json(out, Format::Csv, &roa, || roa.to_csv())
}

fn cmd_field(args: &GameArgs, tau: f64, grid: &str, out: &OutArgs) -> Result<()> {
    let g = args.build()?;
    let spec = GridSpec { axes: vec![parse_axis(grid)?; g.dim()] };
    let f = simulate::vector_field(&g, &spec, tau)?;
    csv_or_json(out, Format::Csv, &f, || simulate::field_csv(&f))
}

#[allow(clippy::too_many_arguments)]
fn cmd_rate(
    args: &GameArgs,
    point: &Option<String>,
    tau: f64,
    alpha: Option<f64>,
    r0: Option<f64>,
    eps_target: f64,
    probe_radius: f64,
    probes: usize,
    seed: u64,
    out: &OutArgs,
) -> Result<()> {
    let g = args.build()?;
    let p = single_point(args, &g, point)?;
    let mut report = converge::rate_report(&p.blocks, tau, alpha)?;
    let nb = converge::neighborhood_estimate(&g, &p.x, tau, report.alpha, report.beta, probe_radius, probes, seed)?;
    report.delta = nb.delta;
    if let Some(r) = r0 {
        report.iteration_bound = Some(converge::iteration_bound(report.beta, report.alpha, r, eps_target));
    }
    let res = RateOutput { game: args.game.clone(), point: p.x, tau, report, neighborhood: nb };
    csv_or_json(out, Format::Json, &res, || {
        let r = &res.report;
        let row = vec![
            fmt_f64(res.tau),
            fmt_f64(r.gamma),
            fmt_f64(r.lambda_m.re),
            fmt_f64(r.lambda_m.im),
            fmt_f64(r.alpha),
            fmt_f64(r.gamma1),
            fmt_f64(r.beta),
            fmt_f64(r.rate_base),
            r.step_spectral_radius.map(fmt_f64).unwrap_or_default(),
            r.iteration_bound.map(|b| b.to_string()).unwrap_or_default(),
            fmt_f64(r.delta),
        ];
        table_csv(
            "taugda.rate.v1",
            &["tau", "gamma", "lambda_m_re", "lambda_m_im", "alpha", "gamma1", "beta", "rate_base", "step_spectral_radius", "iteration_bound", "delta"],
            vec![row],
        )
    })
}

fn gan_equilibrium(args: &GameArgs) -> Result<Vec<f64>> {
    match args.game.as_str() {
        "dirac_gan" | "dirac_gan_ns" => Ok(vec![0.0, 0.0]),
        "covariance_gan" => {
            let d = args.d;
            let mut x = vec![0.0; 2 * d * d];
            for i in 0..d {
                x[i * d + i] = args.sigma;
            }
            Ok(x)
        }
        other => Err(Error::Usage(format!("gan needs dirac_gan, dirac_gan_ns or covariance_gan, got '{other}'"))),
    }
}

fn cmd_gan(args: &GameArgs, tau: f64, tau_grid: &Option<String>, tol: f64, out: &OutArgs) -> Result<()> {
    let x = gan_equilibrium(args)?;
    let mu = args.mu;
    if !(mu >= 0.0) {
        return Err(Error::InvalidParameter(format!("mu must be >= 0, got {mu}")));
    }
    // unregularized blocks plus the penalty Hessian; the covariance game
    // needs μ > 0 to be built, so its penalty is removed by hand
    let (blocks0, reg) = match args.game.as_str() {
        "covariance_gan" => {
            let g = args.build()?;
            let mut b = game::jacobian_blocks(&g, &x)?;
            let n2 = b.n2();
            b.d22 += Mat::identity(n2, n2) * mu;
            (b, Mat::identity(n2, n2))
        }
        _ => {
            let g0 = game::builtin(&args.game, &BuiltinParams { mu: 0.0, ..args.params() })?;
            (game::jacobian_blocks(&g0, &x)?, Mat::identity(1, 1))
        }
    };
    let realizable = ganlab::realizable_check(&blocks0, &reg, mu, tol);
    let regularized = game::JacobianBlocks { d22: &blocks0.d22 - &reg * mu, ..blocks0.clone() };
    let kind = classify::classify_point(&regularized, DEFINITE_TOL).kind;
    let taus = match tau_grid {
        Some(s) => parse_grid(s)?,
        None => vec![tau],
    };
    let mut rows = Vec::with_capacity(taus.len());
    for &t in &taus {
        let j = ganlab::regularized_jacobian(&blocks0, &reg, t, mu)?;
        let numeric = matlib::eig(&j)?;
        let closed_form = match args.game.as_str() {
            "covariance_gan" if args.d == 1 => Some(ganlab::cov_spectrum_d1(args.sigma, mu, t)),
            "covariance_gan" => None,
            _ => Some(ganlab::dirac_spectrum(mu, t)),
        };
        let max_abs_diff = closed_form.as_ref().map(|cf| {
            let a = cf.sorted();
            let b = numeric.sorted();
            a.iter().zip(&b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
        });
        let band = matlib::REAL_IM_TOL * matlib::scale(&j);
        rows.push(GanRow {
            tau: t,
            mu,
            real_spectrum: numeric.max_abs_im() <= band,
            stable: numeric.min_re() > 0.0,
            closed_form,
            numeric,
            max_abs_diff,
        });
    }
    let res = GanOutput {
        game: args.game.clone(),
        point: x,
        kind: kind.as_str().to_string(),
        dimension_ok: realizable.dimension_ok,
        realizable,
        rows,
    };
    csv_or_json(out, Format::Json, &res, || {
        let n = res.rows.first().map_or(0, |r| r.numeric.len());
        let mut header = vec!["tau".to_string(), "mu".to_string()];
        for k in 0..n {
            header.push(format!("lambda_{k}_re"));
            header.push(format!("lambda_{k}_im"));
        }
        header.extend(["max_abs_diff", "real_spectrum", "stable"].map(String::from));
        let rows = res
            .rows
            .iter()
            .map(|r| {
                let mut v = vec![fmt_f64(r.tau), fmt_f64(r.mu)];
                for z in r.numeric.sorted() {
                    v.push(fmt_f64(z.re));
                    v.push(fmt_f64(z.im));
                }
                v.push(r.max_abs_diff.map(fmt_f64).unwrap_or_default());
                v.push(r.real_spectrum.to_string());
                v.push(r.stable.to_string());
                v
            })
            .collect::<Vec<_>>();
        io::csv_bytes("taugda.gan.v1", &header, &rows)
    })
}

pub fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Classify { game, tol, newton_tol, out } => cmd_classify(game, *tol, *newton_tol, out),
        Command::TauStar { game, point, out } => cmd_tau_star(game, point, out),
        Command::TauZero { game, point, tol, out } => cmd_tau_zero(game, point, *tol, out),
        Command::Sweep { game, point, tau_grid, out } => cmd_sweep(game, point, tau_grid, out),
        Command::Simulate { game, x0, tau, gamma1, power, steps, ema, noise, seed, stride, point, tol, out } => {
            cmd_simulate(game, x0, *tau, *gamma1, *power, *steps, ema, *noise, *seed, *stride, point, *tol, out)
        }
        Command::Roa { game, tau, gamma1, steps, grid, equilibria, match_tol, out } => {
            cmd_roa(game, *tau, *gamma1, *steps, grid, equilibria, *match_tol, out)
        }
        Command::Field { game, tau, grid, out } => cmd_field(game, *tau, grid, out),
        Command::Rate { game, point, tau, alpha, r0, eps_target, probe_radius, probes, seed, out } => {
            cmd_rate(game, point, *tau, *alpha, *r0, *eps_target, *probe_radius, *probes, *seed, out)
        }
        Command::Gan { game, tau, tau_grid, tol, out } => cmd_gan(game, *tau, tau_grid, *tol, out),
    }
}

#[derive(Serialize)]
struct Failure<'a> {
    status: &'static str,
    kind: &'a str,
    reason: String,
    exit_code: i32,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            let code = e.exit_code();
            let f = Failure { status: "error", kind: e.kind(), reason: e.to_string(), exit_code: code };
            eprintln!("{}", serde_json::to_string(&f).unwrap_or_else(|_| e.to_string()));
            code
        }
    }
}

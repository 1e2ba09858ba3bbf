//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero when any
//! criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use taugda::classify::{self, PointKind, DEFINITE_TOL};
use taugda::converge;
use taugda::game::{self, BuiltinParams, JacobianBlocks};
use taugda::ganlab;
use taugda::matlib::{self, Mat, C64};
use taugda::simulate::{self, GridSpec, NoiseModel, RunOptions, StepSchedule};
use taugda::timescale;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    check(elapsed.as_secs_f64() < limit_s, format!("runtime {:.2}s exceeds {limit_s}s", elapsed.as_secs_f64()))
}

fn params() -> BuiltinParams {
    BuiltinParams::default()
}

fn gauss(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Mat {
    DMatrix::from_fn(r, c, |_, _| rng.sample::<f64, _>(StandardNormal))
}

fn spd(rng: &mut ChaCha8Rng, n: usize) -> Mat {
    let a = gauss(rng, n, n);
    &a * a.transpose() / n as f64 + Mat::identity(n, n) * 0.2
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

fn min_re(j: &Mat) -> f64 {
    matlib::eig(j).expect("eig").values.iter().map(|z| z.re).fold(f64::INFINITY, f64::min)
}

fn c1_quadratic_tau_star() -> Outcome {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    for v in [1.0, 4.0, 10.0] {
        let g = game::builtin("quad_stack", &BuiltinParams { v, ..params() }).map_err(|e| e.to_string())?;
        let b = game::jacobian_blocks(&g, &[0.0; 4]).map_err(|e| e.to_string())?;
        let c = timescale::tau_star_eig(&b).map_err(|e| e.to_string())?;
        worst = worst.max((c.tau_star - 2.0).abs());
    }
    check(worst <= 1e-6, format!("max |tau* - 2| = {worst:e}"))?;
    within(t0.elapsed(), 1.0)?;
    Ok(format!("max |tau* - 2| = {worst:.1e} over v in {{1,4,10}}"))
}

fn c2_torus() -> Outcome {
    let t0 = Instant::now();
    let g = game::torus();
    let s = game::builtin_critical_points("torus", &params(), 1e-10).map_err(|e| e.to_string())?;
    let at = |target: [f64; 2]| -> Result<f64, String> {
        let p = s
            .points
            .iter()
            .find(|p| g.distance(&p.x, &target) < 1e-6)
            .ok_or_else(|| format!("no critical point found at {target:?}"))?;
        Ok(timescale::tau_star_eig(&p.blocks).map_err(|e| e.to_string())?.tau_star)
    };
    let a = at([0.0, 0.0])?;
    let b = at([PI, PI])?;
    check((a - 0.74).abs() <= 0.01, format!("tau*(0,0) = {a}"))?;
    check((b - 1.35).abs() <= 0.01, format!("tau*(pi,pi) = {b}"))?;
    within(t0.elapsed(), 5.0)?;
    Ok(format!("tau*(0,0) = {a:.4}, tau*(pi,pi) = {b:.4}"))
}

fn c3_scaling() -> Outcome {
    let mut worst: f64 = 0.0;
    for eps in [0.1, 1.0, 10.0] {
        let g = game::builtin("jin_dse", &BuiltinParams { eps, ..params() }).map_err(|e| e.to_string())?;
        let b = game::jacobian_blocks(&g, &[0.0, 0.0]).map_err(|e| e.to_string())?;
        let t = timescale::tau_star_eig(&b).map_err(|e| e.to_string())?.tau_star;
        worst = worst.max((t - 2.0 / eps).abs());
    }
    check(worst <= 1e-6, format!("max |tau* - 2/eps| = {worst:e}"))?;
    Ok(format!("max |tau* - 2/eps| = {worst:.1e}"))
}

/// Stackelberg blocks: `−d22 ≻ 0` and `S₁ ≻ 0` by construction, `d11`
/// generally indefinite.
fn random_dse(rng: &mut ChaCha8Rng) -> JacobianBlocks {
    let n1 = rng.random_range(1..=4);
    let n2 = rng.random_range(1..=4);
    let d22 = -spd(rng, n2);
    let d12 = gauss(rng, n1, n2) * 1.5;
    let s1 = spd(rng, n1);
    let d22_inv = d22.clone().try_inverse().expect("definite");
    let d11 = matlib::sym(&(s1 + &d12 * d22_inv * d12.transpose()));
    JacobianBlocks::new(d11, d12, d22).expect("block shapes")
}

fn c4_cross_validation() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut positive, mut worst_gap, mut worst_pair): (usize, f64, f64) = (0, 0.0, 0.0);
    for k in 0..100 {
        let b = random_dse(&mut rng);
        check(classify::classify_point(&b, DEFINITE_TOL).kind.is_dse(), format!("instance {k} is not Stackelberg"))?;
        let cert = timescale::tau_star_eig(&b).map_err(|e| format!("instance {k}: {e}"))?;
        let ts = cert.tau_star;
        let guard = timescale::tau_star_guard(&b, 1e3_f64.max(100.0 * ts), 10_000, 1e-10 * (1.0 + ts))
            .map_err(|e| e.to_string())?
            .unwrap_or(0.0);
        let gap = (ts - guard).abs();
        worst_gap = worst_gap.max(gap / (1.0 + ts));
        check(gap <= 1e-4 * (1.0 + ts), format!("instance {k}: eig route {ts}, guard route {guard}"))?;
        let probe = if ts > 0.0 { 1.01 * ts } else { 1.0 };
        let m = min_re(&timescale::assemble_j_tau(&b, probe));
        check(m > 0.0, format!("instance {k}: unstable at 1.01 tau* (min Re = {m:e})"))?;
        if ts > 0.0 {
            positive += 1;
            let neg = -timescale::assemble_j_tau(&b, ts);
            let spec = matlib::eig(&neg).map_err(|e| e.to_string())?;
            let rel = spec.min_pair_sum() / matlib::scale(&neg);
            worst_pair = worst_pair.max(rel);
            check(rel <= 1e-6, format!("instance {k}: min pair sum / scale = {rel:e} at tau*"))?;
        }
    }
    within(t0.elapsed(), 60.0)?;
    Ok(format!(
        "100 games ({positive} with tau* > 0); max route gap {worst_gap:.1e}, max boundary pair sum {worst_pair:.1e}"
    ))
}

fn c5_dne_all_tau() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violations = 0;
    for _ in 0..50 {
        let n1 = rng.random_range(1..=4);
        let n2 = rng.random_range(1..=4);
        let d11 = spd(&mut rng, n1);
        let d22 = -spd(&mut rng, n2);
        let d12 = gauss(&mut rng, n1, n2) * 2.0;
        let b = JacobianBlocks::new(d11, d12, d22).expect("shapes");
        for tau in [1e-3, 1e-1, 1.0, 10.0, 1e3] {
            if min_re(&timescale::assemble_j_tau(&b, tau)) <= 0.0 {
                violations += 1;
            }
        }
    }
    check(violations == 0, format!("{violations} unstable (instance, tau) pairs"))?;
    Ok("50 Nash instances stable at all 5 tau values".into())
}

fn c6_instability() -> Outcome {
    let g = game::builtin("quad_spurious", &BuiltinParams { v: 5.0, ..params() }).map_err(|e| e.to_string())?;
    let b = game::jacobian_blocks(&g, &[0.0; 4]).map_err(|e| e.to_string())?;
    let c = timescale::tau_zero(&b, matlib::ZERO_RE_TOL).map_err(|e| e.to_string())?;
    let t0 = c.tau_zero;
    check(t0.is_finite() && t0 >= 2.0 - 1e-6, format!("tau0 = {t0}"))?;
    for f in [1.01, 2.0, 10.0] {
        let m = min_re(&timescale::assemble_j_tau(&b, f * t0));
        check(m < 0.0, format!("not unstable at {f}·tau0 (min Re = {m})"))?;
    }
    // independent sweep of the leading real part over [1.5, 2.5]
    let taus: Vec<f64> = (0..=1000).map(|k| 1.5 + k as f64 * 1e-3).collect();
    let stable: Vec<bool> = taus.iter().map(|&t| min_re(&timescale::assemble_j_tau(&b, t)) > 1e-12).collect();
    let switches: Vec<f64> =
        (0..taus.len() - 1).filter(|&k| stable[k] != stable[k + 1]).map(|k| 0.5 * (taus[k] + taus[k + 1])).collect();
    check(
        switches.len() == 1 && (switches[0] - 2.0).abs() <= 0.01 && stable[0] && !stable[taus.len() - 1],
        format!("stability switches at {switches:?}"),
    )?;
    Ok(format!("tau0 = {t0:.4}, sweep switch at {:.4}", switches[0]))
}

fn c7_asymptotics() -> Outcome {
    let g = game::builtin("quad_stack", &params()).map_err(|e| e.to_string())?;
    let b = game::jacobian_blocks(&g, &[0.0; 4]).map_err(|e| e.to_string())?;
    let tau = 1e4;
    let lib = timescale::asymptotic_mismatch(&b, tau).map_err(|e| e.to_string())?;
    // second route: brute-force pairing over all permutations
    let actual = matlib::eig(&timescale::assemble_j_tau(&b, tau)).map_err(|e| e.to_string())?.values;
    let s1 = classify::schur_of_blocks(&b).map_err(|e| e.to_string())?;
    let mut pred: Vec<C64> = matlib::eig(&s1).map_err(|e| e.to_string())?.values;
    pred.extend(matlib::eig(&-&b.d22).map_err(|e| e.to_string())?.values.iter().map(|z| z * tau));
    let brute = best_permutation_error(&actual, &pred);
    check(lib <= 1e-2 && brute <= 1e-2, format!("mismatch {lib:e} (assignment) / {brute:e} (brute force)"))?;
    check((lib - brute).abs() <= 1e-12, format!("routes disagree: {lib:e} vs {brute:e}"))?;

    let grid = matlib::log_grid(0.1, 100.0, 2000);
    let t = timescale::realness_transitions(&b, &grid, 1e-7, 1e-6).map_err(|e| e.to_string())?;
    let has = |x: f64, tol: f64| t.iter().any(|v| (v - x).abs() <= tol);
    check(has(1.87, 0.02) && has(11.66, 0.1), format!("real-axis transitions at {t:?}"))?;
    Ok(format!("relative mismatch {lib:.1e}; transitions {t:.4?}"))
}

fn best_permutation_error(a: &[C64], b: &[C64]) -> f64 {
    fn rec(a: &[C64], b: &[C64], used: &mut Vec<bool>, i: usize, cur: f64, best: &mut f64) {
        if cur >= *best {
            return;
        }
        if i == a.len() {
            *best = cur;
            return;
        }
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                let e = (a[i] - b[j]).norm() / b[j].norm();
                rec(a, b, used, i + 1, cur.max(e), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    rec(a, b, &mut vec![false; b.len()], 0, 0.0, &mut best);
    best
}

fn c8_rate() -> Outcome {
    let g = game::builtin("quad_stack", &params()).map_err(|e| e.to_string())?;
    let origin = [0.0; 4];
    let b = game::jacobian_blocks(&g, &origin).map_err(|e| e.to_string())?;
    let tau = 5.0;
    let r = converge::rate_report(&b, tau, None).map_err(|e| e.to_string())?;
    let nb = converge::neighborhood_estimate(&g, &origin, tau, r.alpha, r.beta, 1.0, 100, 8).map_err(|e| e.to_string())?;

    let opts = RunOptions::new(1100).reference(&origin).no_early_stop();
    let rec = simulate::run_gda(&g, &[1.0, -1.0, 0.5, 0.5], r.gamma1, tau, &opts).map_err(|e| e.to_string())?;
    let d = &rec.distances;
    let contraction = (d[1100] / d[100]).powf(1.0 / 1000.0);
    let rho = r.step_spectral_radius.unwrap_or(f64::NAN);

    let mut rng = ChaCha8Rng::seed_from_u64(80);
    let radius = nb.delta.min(5.0);
    let mut over = Vec::new();
    let mut worst_slack = i64::MAX;
    for s in 0..10 {
        let dir: Vec<f64> = (0..4).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let rad = radius * rng.random_range(0.05..1.0);
        let x0: Vec<f64> = dir.iter().map(|v| v * rad / norm(&dir)).collect();
        let bound = converge::iteration_bound(r.beta, r.alpha, norm(&x0), 1e-6);
        let opts = RunOptions::new(4 * bound as usize + 1000).reference(&origin).no_early_stop();
        let rec = simulate::run_gda(&g, &x0, r.gamma1, tau, &opts).map_err(|e| e.to_string())?;
        let hit = rec.distances.iter().position(|&v| v <= 1e-6).ok_or(format!("start {s} never reached 1e-6"))?;
        let step = rec.steps[hit];
        if step as u64 > bound {
            over.push(format!("start {s}: {step} > {bound}"));
        }
        worst_slack = worst_slack.min(bound as i64 - step as i64);
    }
    let summary = format!(
        "contraction {contraction:.4} vs bound {:.4} + 0.02 (rho(I - gamma1 J) = {rho:.4}); iteration bound held for {}/10 starts (min slack {worst_slack})",
        r.rate_base,
        10 - over.len()
    );
    check(contraction <= r.rate_base + 0.02 && over.is_empty(), summary.clone())?;
    Ok(summary)
}

fn c9_spurious_avoidance() -> Outcome {
    let t0 = Instant::now();
    let g = game::poly_spurious();
    let x0 = [-1.5, 2.5, 2.5, 3.0];
    let nash: Vec<Vec<f64>> = game::builtin_critical_points("poly_spurious", &params(), 1e-10)
        .map_err(|e| e.to_string())?
        .points
        .into_iter()
        .filter(|p| classify::classify_point(&p.blocks, DEFINITE_TOL).kind == PointKind::Dne)
        .map(|p| p.x)
        .collect();
    let opts = RunOptions::new(400_000).stride(0);
    let slow = simulate::run_gda(&g, &x0, 5e-4, 0.75, &opts).map_err(|e| e.to_string())?;
    let d_slow = norm(&slow.final_x);
    check(d_slow <= 1e-3, format!("tau=0.75 ends at {:?}, {d_slow} from the origin", slow.final_x))?;
    let fast = simulate::run_gda(&g, &x0, 5e-4, 5.0, &opts).map_err(|e| e.to_string())?;
    let d_nash = nash.iter().map(|p| dist(p, &fast.final_x)).fold(f64::INFINITY, f64::min);
    let d_origin = norm(&fast.final_x);
    check(d_nash <= 1e-3 && d_origin >= 0.5, format!("tau=5 ends at {:?} ({d_nash} from a DNE)", fast.final_x))?;
    within(t0.elapsed(), 30.0)?;
    Ok(format!("tau=0.75 -> origin ({d_slow:.1e}); tau=5 -> DNE ({d_nash:.1e}), {d_origin:.2} from origin"))
}

fn c10_gan_closed_forms() -> Outcome {
    let grid = matlib::log_grid(0.05, 20.0, 20);
    let dirac0 = game::jacobian_blocks(
        &game::builtin("dirac_gan", &BuiltinParams { mu: 0.0, ..params() }).map_err(|e| e.to_string())?,
        &[0.0, 0.0],
    )
    .map_err(|e| e.to_string())?;
    let cov = game::builtin("covariance_gan", &BuiltinParams { mu: 1.0, sigma: 1.3, d: 1, ..params() })
        .map_err(|e| e.to_string())?;
    let mut cov0 = game::jacobian_blocks(&cov, &[1.3, 0.0]).map_err(|e| e.to_string())?;
    cov0.d22 += Mat::identity(1, 1);
    let reg = Mat::identity(1, 1);
    let mut worst: f64 = 0.0;
    let mut unstable = 0;
    for &tau in &grid {
        for &mu in &grid {
            for (b, cf) in [
                (&dirac0, ganlab::dirac_spectrum(mu, tau)),
                (&cov0, ganlab::cov_spectrum_d1(1.3, mu, tau)),
            ] {
                let num = matlib::eig(&ganlab::regularized_jacobian(b, &reg, tau, mu).map_err(|e| e.to_string())?)
                    .map_err(|e| e.to_string())?;
                let scale = 1.0 + num.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
                let err = cf.sorted().iter().zip(num.sorted()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                worst = worst.max(err / scale);
                if num.min_re() <= 0.0 {
                    unstable += 1;
                }
            }
        }
    }
    check(worst <= 1e-10, format!("closed form vs eig: {worst:e}"))?;
    check(unstable == 0, format!("{unstable} unstable (tau, mu) samples"))?;
    let mut wrong = Vec::new();
    for k in 1..=60 {
        let mu = 0.05 * k as f64;
        let j = ganlab::regularized_jacobian(&dirac0, &reg, 1.0, mu).map_err(|e| e.to_string())?;
        let real = matlib::eig(&j).map_err(|e| e.to_string())?.max_abs_im() <= 1e-6;
        if real != (mu >= 1.0 - 1e-12) {
            wrong.push(mu);
        }
    }
    check(wrong.is_empty(), format!("realness at tau=1 wrong for mu = {wrong:?}"))?;
    Ok(format!("max scaled error {worst:.1e} on 2x20x20 grid; real iff mu >= 1 on 60 values; all stable"))
}

fn c11_dimension() -> Outcome {
    let grid = [0.1, 1.0, 10.0, 100.0];
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let n2 = 1 + (seed as usize % 3);
        let n1 = 2 * n2 + 1 + (seed as usize % 2);
        let (b, reg) = ganlab::random_realizable(n1, n2, seed);
        for &tau in &grid {
            for &mu in &grid {
                let j = ganlab::regularized_jacobian(&b, &reg, tau, mu).map_err(|e| e.to_string())?;
                let spec = matlib::eig(&j).map_err(|e| e.to_string())?;
                let m = spec.values.iter().map(|z| z.re.abs()).fold(f64::INFINITY, f64::min);
                worst = worst.max(m);
                check(m <= 1e-8, format!("seed {seed} ({n1},{n2}) tau={tau} mu={mu}: min |Re| = {m:e}"))?;
            }
        }
    }
    Ok(format!("20 instances x 16 (tau, mu): worst min |Re| = {worst:.1e}"))
}

fn c12_stochastic() -> Outcome {
    let t0 = Instant::now();
    let m = matlib::from_rows(
        4,
        4,
        &[
            1.0, 0.0, 0.5, 0.0, //
            0.0, 0.5, 0.0, 0.5, //
            0.5, 0.0, -1.0, 0.0, //
            0.0, 0.5, 0.0, -0.5,
        ],
    );
    let g = game::quadratic("quad_dne", 2, m);
    let b = game::jacobian_blocks(&g, &[0.0; 4]).map_err(|e| e.to_string())?;
    check(classify::classify_point(&b, DEFINITE_TOL).kind == PointKind::Dne, "test game is not Nash".into())?;
    let schedule = StepSchedule::Power { gamma0: 0.5, p: 0.75 };
    let opts = RunOptions::new(100_000).stride(0).reference(&[0.0; 4]).no_early_stop();
    let runs: Vec<(bool, f64)> = (0..20u64)
        .map(|s| {
            let r = simulate::run_sgda(&g, &[1.0; 4], schedule, 5.0, &NoiseModel::gaussian(0.1, s), &opts)
                .expect("run");
            (r.diverged, norm(&r.final_x))
        })
        .collect();
    let diverged = runs.iter().filter(|r| r.0).count();
    let mut finals: Vec<f64> = runs.iter().map(|r| r.1).collect();
    finals.sort_by(f64::total_cmp);
    let median = 0.5 * (finals[9] + finals[10]);
    check(diverged == 0, format!("{diverged} seeds diverged"))?;
    check(median <= 1e-2, format!("median final distance {median}"))?;
    within(t0.elapsed(), 60.0)?;
    Ok(format!("median final distance {median:.2e}, max {:.2e}, no divergence", finals[19]))
}

fn c13_roa() -> Outcome {
    let torus = game::torus();
    let eqs: Vec<Vec<f64>> = game::builtin_critical_points("torus", &params(), 1e-10)
        .map_err(|e| e.to_string())?
        .points
        .into_iter()
        .filter(|p| classify::classify_point(&p.blocks, DEFINITE_TOL).kind.is_dse())
        .map(|p| p.x)
        .collect();
    let grid = GridSpec::square(-PI, PI, 40, 2);
    let mut notes = Vec::new();
    for tau in [1.0, 2.0, 5.0, 10.0] {
        let roa = simulate::roa_scan(&torus, &grid, tau, 0.04, 20_000, &eqs, 1e-3).map_err(|e| e.to_string())?;
        let u = roa.unresolved();
        if tau == 1.0 {
            check(u >= 1, "tau=1 resolved every cell".into())?;
        } else {
            check(u == 0, format!("tau={tau} left {u} unresolved cells"))?;
        }
        notes.push(format!("tau={tau}: {u} unresolved"));
    }

    let poly = game::poly_landscape();
    let opts = RunOptions::new(75_000).stride(0);
    let nash = [10.57, -8.95];
    let far_stack = [-11.03, -11.03];
    let a = simulate::run_gda(&poly, &[-10.0, -2.0], 1e-3, 1.0, &opts).map_err(|e| e.to_string())?;
    let b = simulate::run_gda(&poly, &[-10.0, -2.0], 1e-3, 2.0, &opts).map_err(|e| e.to_string())?;
    check(dist(&a.final_x, &nash) <= 0.01, format!("tau=1 from (-10,-2) ends at {:.3?}", a.final_x))?;
    check(
        dist(&b.final_x, &far_stack) <= 0.01,
        format!(
            "{}; poly landscape: tau=1 -> {:.3?}, but tau=2 -> {:.3?} instead of (-11.03, -11.03)",
            notes.join(", "),
            a.final_x,
            b.final_x
        ),
    )?;
    Ok(format!("{}; poly landscape flips (10.57,-8.95) -> (-11.03,-11.03)", notes.join(", ")))
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("tau* exactness, quadratic Stackelberg game", c1_quadratic_tau_star),
        ("tau* on the torus game", c2_torus),
        ("tau* scaling law 2/eps", c3_scaling),
        ("eigenvalue vs guard-map cross-validation", c4_cross_validation),
        ("Nash stability for every tau", c5_dne_all_tau),
        ("instability certificate tau0", c6_instability),
        ("asymptotic spectrum splitting", c7_asymptotics),
        ("learning-rate bound and rate", c8_rate),
        ("spurious critical point avoidance", c9_spurious_avoidance),
        ("GAN closed-form spectra", c10_gan_closed_forms),
        ("discriminator dimension necessity", c11_dimension),
        ("stochastic convergence", c12_stochastic),
        ("region of attraction reproduction", c13_roa),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let res = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t0.elapsed().as_secs_f64();
        match res {
            Ok(msg) => println!("PASS {:>2} {name} ({secs:.2}s): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2}s): {msg}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

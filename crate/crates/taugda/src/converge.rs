//! Local convergence of discrete τ-GDA near a stable critical point: the
//! learning-rate bound, the rate constant, iteration counts and the radius
//! of the neighbourhood where the linear rate applies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{self, ZeroSumGame};
use crate::matlib::{self, Spectrum, C64};
use crate::timescale;

/// `γ = min 2Re(λ)/|λ|²` over the spectrum and the minimizing eigenvalue.
/// Ties go to the smallest `|λ|`, then to the smallest `(Re, Im)`.
pub fn learning_rate_bound(spectrum: &Spectrum) -> Result<(f64, C64)> {
    if spectrum.is_empty() {
        return Err(Error::InvalidParameter("empty spectrum".into()));
    }
    if let Some(z) = spectrum.values.iter().find(|z| z.re <= 0.0) {
        return Err(Error::Precondition(format!(
            "eigenvalue {} + {}i has non-positive real part; J_tau is not stable",
            z.re, z.im
        )));
    }
    let key = |z: &C64| 2.0 * z.re / z.norm_sqr();
    let best = spectrum
        .values
        .iter()
        .min_by(|a, b| {
            key(a)
                .total_cmp(&key(b))
                .then(a.norm().total_cmp(&b.norm()))
                .then(a.re.total_cmp(&b.re))
                .then(a.im.total_cmp(&b.im))
        })
        .copied()
        .expect("non-empty");
    Ok((key(&best), best))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub gamma: f64,
    #[serde(with = "crate::io::complex")]
    pub lambda_m: C64,
    pub alpha: f64,
    pub gamma1: f64,
    pub beta: f64,
    /// Per-step contraction `(1 − α/(4β))^{1/2}`.
    pub rate_base: f64,
    /// `||1 − γ₁λ_m|² − (1 − α/β)|`.
    pub identity_residual: f64,
    pub iteration_bound: Option<u64>,
    /// `ρ(I − γ₁J_τ)`, the true asymptotic per-step rate. It can exceed
    /// `rate_base` when another eigenvalue than `λ_m` dominates the step matrix.
    pub step_spectral_radius: Option<f64>,
    /// Estimated neighbourhood radius; `inf` when `J_τ` is constant.
    #[serde(with = "crate::io::lenient_f64")]
    pub delta: f64,
}

pub fn rate_params(gamma: f64, lambda_m: C64, alpha: f64) -> Result<RateReport> {
    if !(alpha > 0.0 && alpha < gamma) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, {gamma}), got {alpha}")));
    }
    let gamma1 = gamma - alpha;
    let beta = 1.0 / (2.0 * lambda_m.re - alpha * lambda_m.norm_sqr());
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta = {beta} is not positive")));
    }
    let rate_base = (1.0 - alpha / (4.0 * beta)).sqrt();
    let lhs = (C64::new(1.0, 0.0) - lambda_m * gamma1).norm_sqr();
    let identity_residual = (lhs - (1.0 - alpha / beta)).abs();
    if identity_residual > 1e-10 * (1.0 + lhs) {
        return Err(Error::NonConvergence(format!("rate identity off by {identity_residual:e}")));
    }
    Ok(RateReport {
        gamma,
        lambda_m,
        alpha,
        gamma1,
        beta,
        rate_base,
        identity_residual,
        iteration_bound: None,
        step_spectral_radius: None,
        delta: f64::NAN,
    })
}

/// Rate report for `J_τ` at a point; `alpha` defaults to `γ/2`.
pub fn rate_report(blocks: &game::JacobianBlocks, tau: f64, alpha: Option<f64>) -> Result<RateReport> {
    let spec = matlib::eig(&timescale::assemble_j_tau(blocks, tau))?;
    let (gamma, lambda_m) = learning_rate_bound(&spec)?;
    let mut r = rate_params(gamma, lambda_m, alpha.unwrap_or(gamma / 2.0))?;
    let one = C64::new(1.0, 0.0);
    r.step_spectral_radius = Some(spec.values.iter().map(|l| (one - l * r.gamma1).norm()).fold(0.0, f64::max));
    Ok(r)
}

/// `⌈(4β/α)·log(r0/ε)⌉`, zero when `r0 ≤ ε`.
pub fn iteration_bound(beta: f64, alpha: f64, r0: f64, eps: f64) -> u64 {
    if r0 <= eps {
        return 0;
    }
    (4.0 * beta / alpha * (r0 / eps).ln()).ceil() as u64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeighborhoodEstimate {
    /// Largest observed `‖J_τ(x) − J_τ(x*)‖₂ / ‖x − x*‖`.
    pub lipschitz: f64,
    /// `α/(4Lβ)`, or `inf` when no variation of `J_τ` was observed.
    #[serde(with = "crate::io::lenient_f64")]
    pub delta: f64,
    pub probes: usize,
}

/// Probes `J_τ` at `probes` uniform points of the ball of radius
/// `probe_radius` around `x_star` to estimate its local Lipschitz constant.
#[allow(clippy::too_many_arguments)]
pub fn neighborhood_estimate(
    game: &ZeroSumGame,
    x_star: &[f64],
    tau: f64,
    alpha: f64,
    beta: f64,
    probe_radius: f64,
    probes: usize,
    seed: u64,
) -> Result<NeighborhoodEstimate> {
    if probes == 0 || !(probe_radius > 0.0) {
        return Err(Error::InvalidParameter("need probes >= 1 and probe_radius > 0".into()));
    }
    let j0 = timescale::assemble_j_tau(&game::jacobian_blocks(game, x_star)?, tau);
    let n = x_star.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lip: f64 = 0.0;
    for _ in 0..probes {
        let dir: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let dn = dir.iter().map(|a| a * a).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        let r = probe_radius * rng.random::<f64>().powf(1.0 / n as f64);
        if r == 0.0 {
            continue;
        }
        let x: Vec<f64> = x_star.iter().zip(&dir).map(|(a, d)| a + r * d / dn).collect();
        let j = timescale::assemble_j_tau(&game::jacobian_blocks(game, &x)?, tau);
        lip = lip.max(matlib::spectral_norm(&(j - &j0)) / r);
    }
    let delta = if lip <= 1e-12 * matlib::scale(&j0) { f64::INFINITY } else { alpha / (4.0 * lip * beta) };
    Ok(NeighborhoodEstimate { lipschitz: lip, delta, probes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(v: &[(f64, f64)]) -> Spectrum {
        Spectrum { values: v.iter().map(|&(a, b)| C64::new(a, b)).collect() }
    }

    #[test]
    fn bound_examples() {
        let (g, l) = learning_rate_bound(&spec(&[(3.0, 0.0)])).unwrap();
        assert_eq!((g, l), (2.0 / 3.0, C64::new(3.0, 0.0)));
        let (g, l) = learning_rate_bound(&spec(&[(1.0, 0.0), (4.0, 0.0)])).unwrap();
        assert_eq!((g, l.re), (0.5, 4.0));
        assert!(learning_rate_bound(&spec(&[(1.0, 0.0), (0.0, 1.0)])).is_err());
    }

    #[test]
    fn tie_break_prefers_smaller_modulus() {
        // 2Re/|λ|² = 1 for both 2 and 1 ± i
        let (_, l) = learning_rate_bound(&spec(&[(2.0, 0.0), (1.0, 1.0), (1.0, -1.0)])).unwrap();
        assert_eq!(l, C64::new(1.0, -1.0));
    }

    #[test]
    fn rate_example() {
        let r = rate_params(0.5, C64::new(4.0, 0.0), 0.25).unwrap();
        assert!((r.beta - 0.25).abs() < 1e-15);
        assert!((r.rate_base - 0.75f64.sqrt()).abs() < 1e-15);
        assert!(rate_params(0.5, C64::new(4.0, 0.0), 0.5).is_err());
    }

    #[test]
    fn step_radius_can_exceed_rate_base() {
        // λ_m = 18.81 is annihilated by γ₁ = γ/2; the pair 3 ± 5.57i then dominates
        let g = game::quad_stack(4.0);
        let b = game::jacobian_blocks(&g, &[0.0; 4]).unwrap();
        let r = rate_report(&b, 5.0, None).unwrap();
        let rho = r.step_spectral_radius.unwrap();
        assert!((r.rate_base - 0.75f64.sqrt()).abs() < 1e-12);
        assert!((rho - 0.8911).abs() < 1e-4 && rho > r.rate_base);
        // at τ = 3 the minimizer does dominate
        let r3 = rate_report(&b, 3.0, None).unwrap();
        assert!(r3.step_spectral_radius.unwrap() <= r3.rate_base);
    }

    #[test]
    fn iteration_bound_examples() {
        assert_eq!(iteration_bound(2.5, 1.0, std::f64::consts::E * 1e-3, 1e-3), 10);
        assert_eq!(iteration_bound(1.0, 1.0, 1e-3, 1e-3), 0);
    }

    #[test]
    fn quadratic_neighborhood_is_unbounded() {
        let g = game::quad_stack(4.0);
        let e = neighborhood_estimate(&g, &[0.0; 4], 5.0, 0.1, 1.0, 1.0, 50, 1).unwrap();
        assert!(e.delta.is_infinite());
        let json = serde_json::to_string(&e).unwrap();
        let back: NeighborhoodEstimate = serde_json::from_str(&json).unwrap();
        assert!(back.delta.is_infinite());
    }
}

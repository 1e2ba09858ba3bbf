//! Analytic GAN instances: the Dirac-GAN (saturating and non-saturating) with
//! a gradient penalty on the discriminator, and the covariance-learning GAN.
//! Also the regularized Jacobian and the realizable-structure check.
//!
//! The loss is fixed to `ℓ(t) = −log(1 + e^{−t})`, so `ℓ′(0) = ½` and
//! `ℓ″(0) = −¼`. For these instances the two usual penalties (on the data
//! distribution and on the generator distribution) coincide, `R = (μ/2)ω²`,
//! so a single penalty is modelled.

use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{JacobianBlocks, ZeroSumGame};
use crate::matlib::{self, Mat, Spectrum, C64};

pub const ELL_PRIME0: f64 = 0.5;
pub const ELL_SECOND0: f64 = -0.25;

/// `ℓ(t) = −log(1 + e^{−t})`, evaluated without overflow.
pub fn ell(t: f64) -> f64 {
    -softplus(-t)
}

/// `ℓ′(t) = 1 / (1 + e^{t})`.
pub fn ell1(t: f64) -> f64 {
    sigmoid(-t)
}

/// `ℓ″(t) = −σ(t)σ(−t)`.
pub fn ell2(t: f64) -> f64 {
    -sigmoid(t) * sigmoid(-t)
}

fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiracVariant {
    Saturating,
    NonSaturating,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiracGanSpec {
    pub mu: f64,
    pub variant: DiracVariant,
    pub ell_prime0: f64,
}

impl DiracGanSpec {
    pub fn new(mu: f64, variant: DiracVariant) -> Self {
        DiracGanSpec { mu, variant, ell_prime0: ELL_PRIME0 }
    }
}

/// Dirac-GAN over `(θ, ω)`: generator `δ_θ`, linear discriminator `ωx`.
///
/// Saturating: the zero-sum cost `f = ℓ(θω) + ℓ(0) − (μ/2)ω²`.
/// Non-saturating: the general-sum pair
/// `f₁ = −ℓ(−θω) + ℓ(0) − (μ/2)ω²`, `f₂ = −ℓ(θω) − ℓ(0) + (μ/2)ω²`. The
/// returned game carries `f₁` as its cost and the general-sum field
/// `(D_θf₁, D_ωf₂)` as its gradient; its blocks are `D²_θf₁`, `D_θωf₁`,
/// `−D²_ωf₂`, which reproduce the field Jacobian wherever the two mixed
/// partials agree (in particular at the critical point).
pub fn dirac_gan_game(spec: &DiracGanSpec) -> ZeroSumGame {
    let mu = spec.mu;
    match spec.variant {
        DiracVariant::Saturating => ZeroSumGame::new("dirac_gan", 1, 1, move |x| {
            ell(x[0] * x[1]) + ell(0.0) - 0.5 * mu * x[1] * x[1]
        })
        .expect("dirac dimensions")
        .with_grad(move |x| {
            let (th, om) = (x[0], x[1]);
            let d = ell1(th * om);
            vec![om * d, -(th * d - mu * om)]
        })
        .with_hessian(move |x| {
            let (th, om) = (x[0], x[1]);
            let t = th * om;
            JacobianBlocks {
                d11: Mat::from_element(1, 1, om * om * ell2(t)),
                d12: Mat::from_element(1, 1, ell1(t) + t * ell2(t)),
                d22: Mat::from_element(1, 1, th * th * ell2(t) - mu),
            }
        }),
        DiracVariant::NonSaturating => ZeroSumGame::new("dirac_gan_ns", 1, 1, move |x| {
            -ell(-x[0] * x[1]) + ell(0.0) - 0.5 * mu * x[1] * x[1]
        })
        .expect("dirac dimensions")
        .with_grad(move |x| {
            let (th, om) = (x[0], x[1]);
            let t = th * om;
            vec![om * ell1(-t), -th * ell1(t) + mu * om]
        })
        .with_hessian(move |x| {
            let (th, om) = (x[0], x[1]);
            let t = th * om;
            JacobianBlocks {
                d11: Mat::from_element(1, 1, -om * om * ell2(-t)),
                d12: Mat::from_element(1, 1, ell1(-t) - t * ell2(-t)),
                d22: Mat::from_element(1, 1, th * th * ell2(t) - mu),
            }
        }),
    }
}

/// Exact Jacobian of `Λ_τ·field` at `(θ, ω)` for either variant, built from
/// each player's own cost (no zero-sum assumption).
pub fn dirac_field_jacobian(spec: &DiracGanSpec, th: f64, om: f64, tau: f64) -> Mat {
    let mu = spec.mu;
    let t = th * om;
    let (j11, j12, j21, j22) = match spec.variant {
        // field = (ω ℓ′(θω), −θ ℓ′(θω) + μω)
        DiracVariant::Saturating => (
            om * om * ell2(t),
            ell1(t) + t * ell2(t),
            -(ell1(t) + t * ell2(t)),
            -th * th * ell2(t) + mu,
        ),
        // field = (ω ℓ′(−θω), −θ ℓ′(θω) + μω)
        DiracVariant::NonSaturating => (
            -om * om * ell2(-t),
            ell1(-t) - t * ell2(-t),
            -(ell1(t) + t * ell2(t)),
            -th * th * ell2(t) + mu,
        ),
    };
    matlib::from_rows(2, 2, &[j11, j12, tau * j21, tau * j22])
}

/// `J_(τ,μ) = [[D₁²f, D₁₂f], [−τD₁₂ᵀf, τ(−D₂²f + μ·reg_d22)]]` with `reg_d22`
/// the discriminator Hessian of the penalty without its `μ`.
pub fn regularized_jacobian(blocks: &JacobianBlocks, reg_d22: &Mat, tau: f64, mu: f64) -> Result<Mat> {
    let n2 = blocks.n2();
    if reg_d22.shape() != (n2, n2) {
        return Err(Error::Dimension(format!("reg_d22 is {:?}, expected {n2}x{n2}", reg_d22.shape())));
    }
    if !(tau > 0.0) || !(mu >= 0.0) {
        return Err(Error::InvalidParameter(format!("need tau > 0 and mu >= 0, got {tau}, {mu}")));
    }
    let lower = (-&blocks.d22 + reg_d22 * mu) * tau;
    Ok(matlib::block2x2(&blocks.d11, &blocks.d12, &(-blocks.d12.transpose() * tau), &lower))
}

/// Roots of `λ² − τμλ + τℓ′(0)² = 0` with `ℓ′(0) = ½`.
pub fn dirac_spectrum(mu: f64, tau: f64) -> Spectrum {
    dirac_spectrum_with(ELL_PRIME0, mu, tau)
}

pub fn dirac_spectrum_with(ell_prime0: f64, mu: f64, tau: f64) -> Spectrum {
    quadratic_pair(tau * mu, 4.0 * tau * ell_prime0 * ell_prime0)
}

/// `(b ± √(b² − c))/2` as a conjugate-closed pair.
fn quadratic_pair(b: f64, c: f64) -> Spectrum {
    let disc = b * b - c;
    let values = if disc >= 0.0 {
        let r = disc.sqrt();
        vec![C64::new((b + r) / 2.0, 0.0), C64::new((b - r) / 2.0, 0.0)]
    } else {
        let r = (-disc).sqrt();
        vec![Complex::new(b / 2.0, r / 2.0), Complex::new(b / 2.0, -r / 2.0)]
    };
    Spectrum { values }
}

/// Covariance GAN at `(V, W) = (σ, 0)`, `d = 1`:
/// `(τμ ± √(τ²μ² − 16τσ²))/2`.
pub fn cov_spectrum_d1(sigma: f64, mu: f64, tau: f64) -> Spectrum {
    quadratic_pair(tau * mu, 16.0 * tau * sigma * sigma)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovGanSpec {
    pub d: usize,
    #[serde(with = "crate::io::mat_rows")]
    pub sigma: Mat,
    pub mu: f64,
}

impl CovGanSpec {
    pub fn new(d: usize, sigma: Mat, mu: f64) -> Result<Self> {
        if d == 0 || sigma.shape() != (d, d) {
            return Err(Error::InvalidParameter(format!("sigma must be {d}x{d} with d >= 1")));
        }
        if (&sigma - sigma.transpose()).norm() > 1e-12 * matlib::scale(&sigma) {
            return Err(Error::InvalidParameter("sigma must be symmetric".into()));
        }
        if sigma.clone().cholesky().is_none() {
            return Err(Error::InvalidParameter("sigma must be positive definite".into()));
        }
        if !(mu > 0.0) {
            return Err(Error::InvalidParameter(format!("mu must be positive, got {mu}")));
        }
        Ok(CovGanSpec { d, sigma, mu })
    }
}

/// `f(V, W) = Σ_ij W_ij (Σ − VVᵀ)_ij − (μ/2) Tr(WᵀW)` with `V`, `W` flattened
/// row-major (player 1 = generator `V`, player 2 = discriminator `W`).
///
/// `D_Vf = −(W + Wᵀ)V` and `D_Wf = Σ − VVᵀ − μW`.
pub fn cov_gan_game(spec: &CovGanSpec) -> Result<ZeroSumGame> {
    let d = spec.d;
    let n = d * d;
    let (s1, s2) = (spec.sigma.clone(), spec.sigma.clone());
    let mu = spec.mu;
    let split = move |x: &[f64]| (Mat::from_row_slice(d, d, &x[..n]), Mat::from_row_slice(d, d, &x[n..]));
    let game = ZeroSumGame::new("covariance_gan", n, n, move |x| {
        let (v, w) = split(x);
        let resid = &s1 - &v * v.transpose();
        w.component_mul(&resid).sum() - 0.5 * mu * w.norm_squared()
    })?
    .with_grad(move |x| {
        let (v, w) = split(x);
        let dv = -(&w + w.transpose()) * &v;
        let dw = &s2 - &v * v.transpose() - &w * mu;
        let mut g: Vec<f64> = dv.transpose().iter().copied().collect();
        g.extend(dw.transpose().iter().map(|a| -a));
        g
    })
    .with_hessian(move |x| {
        let (v, w) = split(x);
        let d11 = -matlib::kron(&(&w + w.transpose()), &Mat::identity(d, d));
        let mut d12 = Mat::zeros(n, n);
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    // ∂(D_Vf)_ab / ∂W_cd = −(δ_ac V_db + δ_ad V_cb)
                    d12[(a * d + b, a * d + c)] -= v[(c, b)];
                    d12[(a * d + b, c * d + a)] -= v[(c, b)];
                }
            }
        }
        JacobianBlocks { d11, d12, d22: -Mat::identity(n, n) * mu }
    });
    Ok(game)
}

/// Structural conditions of the regularized-GAN stability theorem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizableReport {
    pub d11_norm: f64,
    pub d12_rank: usize,
    pub d12_full_rank: bool,
    pub min_eig_regularized: f64,
    /// Discriminator at least half the generator's dimension.
    pub dimension_ok: bool,
    /// `d11 ≈ 0`, `d12` of full rank and `−d22 + μ·reg_d22 ≻ 0`.
    pub passes: bool,
}

pub fn realizable_check(blocks: &JacobianBlocks, reg_d22: &Mat, mu: f64, tol: f64) -> RealizableReport {
    let d11_norm = blocks.d11.norm();
    let d12_rank = matlib::rank(&blocks.d12, 1e-10);
    let full = d12_rank == blocks.n1().min(blocks.n2());
    let reg = -&blocks.d22 + reg_d22 * mu;
    let min_eig = matlib::sym_eigenvalues(&reg).first().copied().unwrap_or(f64::INFINITY);
    let passes = d11_norm <= tol && full && min_eig > tol * matlib::scale(&reg);
    RealizableReport {
        d11_norm,
        d12_rank,
        d12_full_rank: full,
        min_eig_regularized: min_eig,
        dimension_ok: crate::classify::gan_dimension_check(blocks.n1(), blocks.n2()),
        passes,
    }
}

/// Random realizable-structure instance: `d11 = 0`, Gaussian `d12`,
/// `−d22 = CCᵀ/n2` (possibly rank deficient) and a positive definite penalty
/// Hessian `reg_d22`.
pub fn random_realizable(n1: usize, n2: usize, seed: u64) -> (JacobianBlocks, Mat) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = |r: usize, c: usize| Mat::from_fn(r, c, |_, _| rng.sample::<f64, _>(StandardNormal));
    let b = gauss(n1, n2);
    let c = gauss(n2, n2 / 2 + 1);
    let psd = &c * c.transpose() / n2 as f64;
    let r = gauss(n2, n2);
    let reg = &r * r.transpose() / n2 as f64 + Mat::identity(n2, n2) * 0.5;
    let blocks = JacobianBlocks { d11: Mat::zeros(n1, n1), d12: b, d22: -psd };
    (blocks, reg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game;

    #[test]
    fn loss_derivatives_at_zero() {
        assert!((ell1(0.0) - ELL_PRIME0).abs() < 1e-15);
        assert!((ell2(0.0) - ELL_SECOND0).abs() < 1e-15);
        let h = 1e-5;
        for t in [-3.0, -0.2, 0.0, 1.7] {
            assert!(((ell(t + h) - ell(t - h)) / (2.0 * h) - ell1(t)).abs() < 1e-9);
            assert!(((ell1(t + h) - ell1(t - h)) / (2.0 * h) - ell2(t)).abs() < 1e-9);
        }
    }

    #[test]
    fn dirac_jacobian_at_origin() {
        let mu = 0.7;
        let g = dirac_gan_game(&DiracGanSpec::new(mu, DiracVariant::Saturating));
        let b = game::jacobian_blocks(&g, &[0.0, 0.0]).unwrap();
        assert_eq!(b.d11[(0, 0)], 0.0);
        assert_eq!(b.d12[(0, 0)], ELL_PRIME0);
        assert_eq!(b.d22[(0, 0)], -mu);
        let j = regularized_jacobian(&b, &Mat::zeros(1, 1), 3.0, 0.0).unwrap();
        assert_eq!(j, matlib::from_rows(2, 2, &[0.0, 0.5, -1.5, 3.0 * mu]));
    }

    #[test]
    fn dirac_spectrum_cases() {
        let s = dirac_spectrum(0.0, 4.0);
        assert!(s.values.iter().all(|z| z.re == 0.0 && (z.im.abs() - 1.0).abs() < 1e-15));
        let s = dirac_spectrum(1.0, 1.0);
        assert!(s.values.iter().all(|z| (z.re - 0.5).abs() < 1e-15 && z.im == 0.0));
    }

    #[test]
    fn non_saturating_matches_at_origin() {
        for (mu, tau) in [(0.3, 1.0), (2.0, 7.0)] {
            let a = dirac_field_jacobian(&DiracGanSpec::new(mu, DiracVariant::Saturating), 0.0, 0.0, tau);
            let b = dirac_field_jacobian(&DiracGanSpec::new(mu, DiracVariant::NonSaturating), 0.0, 0.0, tau);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn covariance_spec_validation() {
        assert!(CovGanSpec::new(2, matlib::diag(&[1.0, -1.0]), 1.0).is_err());
        assert!(CovGanSpec::new(2, matlib::diag(&[1.0, 2.0]), 0.0).is_err());
        assert!(CovGanSpec::new(2, matlib::diag(&[1.0, 2.0]), 1.0).is_ok());
    }
}

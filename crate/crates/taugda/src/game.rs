//! Zero-sum games `(f, −f)` with derivative access, the benchmark suite and a
//! damped-Newton critical-point search.
//!
//! Player 1 owns the first `n1` coordinates and minimizes `f`; player 2 owns
//! the last `n2` and maximizes it. The gradient field is `g = (D₁f, −D₂f)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ganlab;
use crate::matlib::{self, Mat};

pub type CostFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type HessFn = Arc<dyn Fn(&[f64]) -> JacobianBlocks + Send + Sync>;

/// Relative step of the central-difference gradient.
pub const FD_GRAD_STEP: f64 = 1e-5;
/// Relative step of the central-difference Hessian.
pub const FD_HESS_STEP: f64 = 1e-4;

#[derive(Clone)]
pub struct ZeroSumGame {
    pub name: String,
    pub n1: usize,
    pub n2: usize,
    cost: CostFn,
    grad: Option<GradFn>,
    hess: Option<HessFn>,
    pub fd_step: f64,
    /// Coordinates live on `[−π, π)` and are wrapped after every update.
    pub periodic: bool,
}

impl fmt::Debug for ZeroSumGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ZeroSumGame")
            .field("name", &self.name)
            .field("n1", &self.n1)
            .field("n2", &self.n2)
            .field("analytic_grad", &self.grad.is_some())
            .field("analytic_hess", &self.hess.is_some())
            .field("periodic", &self.periodic)
            .finish()
    }
}

impl ZeroSumGame {
    pub fn new<F>(name: &str, n1: usize, n2: usize, cost: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if n1 == 0 || n2 == 0 {
            return Err(Error::InvalidParameter("both players need at least one coordinate".into()));
        }
        Ok(ZeroSumGame {
            name: name.to_string(),
            n1,
            n2,
            cost: Arc::new(cost),
            grad: None,
            hess: None,
            fd_step: FD_GRAD_STEP,
            periodic: false,
        })
    }

    /// Analytic `g(x) = (D₁f, −D₂f)`.
    pub fn with_grad<G>(mut self, g: G) -> Self
    where
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.grad = Some(Arc::new(g));
        self
    }

    /// Analytic Hessian blocks of `f`.
    pub fn with_hessian<H>(mut self, h: H) -> Self
    where
        H: Fn(&[f64]) -> JacobianBlocks + Send + Sync + 'static,
    {
        self.hess = Some(Arc::new(h));
        self
    }

    pub fn with_periodic(mut self) -> Self {
        self.periodic = true;
        self
    }

    pub fn dim(&self) -> usize {
        self.n1 + self.n2
    }

    pub fn has_analytic_grad(&self) -> bool {
        self.grad.is_some()
    }

    pub fn has_analytic_hessian(&self) -> bool {
        self.hess.is_some()
    }

    pub fn cost(&self, x: &[f64]) -> f64 {
        (self.cost)(x)
    }

    /// Maps periodic coordinates into `[−π, π)`; identity otherwise.
    pub fn wrap(&self, x: &mut [f64]) {
        if self.periodic {
            for v in x.iter_mut() {
                *v = wrap_angle(*v);
            }
        }
    }

    /// Euclidean distance, measured on the torus for periodic games.
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| {
                let d = if self.periodic { wrap_angle(x - y) } else { x - y };
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Dimension(format!("point has {} coordinates, game needs {}", x.len(), self.dim())));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("point has non-finite coordinates".into()));
        }
        Ok(())
    }
}

pub fn wrap_angle(v: f64) -> f64 {
    (v + PI).rem_euclid(2.0 * PI) - PI
}

/// Hessian blocks of `f` at a point: `d11 = D₁²f`, `d12 = D₁₂f`, `d22 = D₂²f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobianBlocks {
    #[serde(with = "crate::io::mat_rows")]
    pub d11: Mat,
    #[serde(with = "crate::io::mat_rows")]
    pub d12: Mat,
    #[serde(with = "crate::io::mat_rows")]
    pub d22: Mat,
}

impl JacobianBlocks {
    /// Symmetrizes the diagonal blocks.
    pub fn new(d11: Mat, d12: Mat, d22: Mat) -> Result<Self> {
        let (n1, n2) = d12.shape();
        if d11.shape() != (n1, n1) || d22.shape() != (n2, n2) {
            return Err(Error::Dimension(format!(
                "blocks {:?}, {:?}, {:?} do not conform",
                d11.shape(),
                d12.shape(),
                d22.shape()
            )));
        }
        Ok(JacobianBlocks { d11: matlib::sym(&d11), d12, d22: matlib::sym(&d22) })
    }

    /// Splits a full symmetric Hessian of `f`.
    pub fn from_hessian(h: &Mat, n1: usize) -> Self {
        let n2 = h.nrows() - n1;
        JacobianBlocks {
            d11: matlib::sym(&h.view((0, 0), (n1, n1)).into_owned()),
            d12: h.view((0, n1), (n1, n2)).into_owned(),
            d22: matlib::sym(&h.view((n1, n1), (n2, n2)).into_owned()),
        }
    }

    pub fn n1(&self) -> usize {
        self.d12.nrows()
    }

    pub fn n2(&self) -> usize {
        self.d12.ncols()
    }

    pub fn hessian(&self) -> Mat {
        matlib::block2x2(&self.d11, &self.d12, &self.d12.transpose(), &self.d22)
    }

    /// `J(x)`, the Jacobian of `g`; equal to `J_τ` at `τ = 1`.
    pub fn game_jacobian(&self) -> Mat {
        matlib::block2x2(&self.d11, &self.d12, &(-self.d12.transpose()), &(-&self.d22))
    }
}

/// `g(x) = (D₁f(x), −D₂f(x))`, analytic when available.
pub fn grad(game: &ZeroSumGame, x: &[f64]) -> Result<Vec<f64>> {
    game.check_point(x)?;
    let g = match &game.grad {
        Some(gf) => gf(x),
        None => {
            let mut g = fd_cost_gradient(game, x, game.fd_step)?;
            for v in g.iter_mut().skip(game.n1) {
                *v = -*v;
            }
            g
        }
    };
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("gradient evaluation".into()));
    }
    Ok(g)
}

/// Central differences of `f` itself (not of `g`).
fn fd_cost_gradient(game: &ZeroSumGame, x: &[f64], step: f64) -> Result<Vec<f64>> {
    let mut y = x.to_vec();
    let mut out = vec![0.0; x.len()];
    for i in 0..x.len() {
        let h = step * (1.0 + x[i].abs());
        y[i] = x[i] + h;
        let fp = game.cost(&y);
        y[i] = x[i] - h;
        let fm = game.cost(&y);
        y[i] = x[i];
        if !fp.is_finite() || !fm.is_finite() {
            return Err(Error::NonFinite(format!("cost in the stencil of coordinate {i}")));
        }
        out[i] = (fp - fm) / (2.0 * h);
    }
    Ok(out)
}

/// Gradient of `f` (undoing the player-2 sign flip of `g`).
fn cost_gradient(game: &ZeroSumGame, x: &[f64]) -> Result<Vec<f64>> {
    let mut g = grad(game, x)?;
    for v in g.iter_mut().skip(game.n1) {
        *v = -*v;
    }
    Ok(g)
}

/// Hessian blocks of `f` at `x`: analytic if provided, otherwise central
/// differences (of the analytic gradient when there is one, of `f` if not).
pub fn jacobian_blocks(game: &ZeroSumGame, x: &[f64]) -> Result<JacobianBlocks> {
    game.check_point(x)?;
    if let Some(h) = &game.hess {
        let b = h(x);
        if b.hessian().iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("analytic Hessian".into()));
        }
        return Ok(b);
    }
    let n = game.dim();
    let mut hm = Mat::zeros(n, n);
    let mut y = x.to_vec();
    if game.grad.is_some() {
        for j in 0..n {
            let h = FD_HESS_STEP * (1.0 + x[j].abs());
            y[j] = x[j] + h;
            let gp = cost_gradient(game, &y)?;
            y[j] = x[j] - h;
            let gm = cost_gradient(game, &y)?;
            y[j] = x[j];
            for i in 0..n {
                hm[(i, j)] = (gp[i] - gm[i]) / (2.0 * h);
            }
        }
    } else {
        let f0 = game.cost(x);
        let eval = |y: &[f64]| -> Result<f64> {
            let v = game.cost(y);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite("cost in the Hessian stencil".into()))
            }
        };
        for i in 0..n {
            let hi = FD_HESS_STEP * (1.0 + x[i].abs());
            y[i] = x[i] + hi;
            let fp = eval(&y)?;
            y[i] = x[i] - hi;
            let fm = eval(&y)?;
            y[i] = x[i];
            hm[(i, i)] = (fp - 2.0 * f0 + fm) / (hi * hi);
            for j in 0..i {
                let hj = FD_HESS_STEP * (1.0 + x[j].abs());
                let mut s = 0.0;
                for (si, sj, w) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
                    y[i] = x[i] + si * hi;
                    y[j] = x[j] + sj * hj;
                    s += w * eval(&y)?;
                }
                y[i] = x[i];
                y[j] = x[j];
                let v = s / (4.0 * hi * hj);
                hm[(i, j)] = v;
                hm[(j, i)] = v;
            }
        }
    }
    Ok(JacobianBlocks::from_hessian(&matlib::sym(&hm), game.n1))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub x: Vec<f64>,
    pub gnorm: f64,
    pub blocks: JacobianBlocks,
}

#[derive(Clone, Debug)]
pub struct CriticalSearch {
    pub points: Vec<CriticalPoint>,
    /// Seeds whose Newton run did not reach the tolerance.
    pub dropped: usize,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Damped Newton on `g = 0` from every seed, deduplicated.
///
/// Each step solves `J(x) s = −g(x)` and halves `s` (at most 30 times) until
/// `‖g‖` decreases. When `J` is singular or no halving helps, a short step
/// along `−Jᵀg` (gradient flow of `½‖g‖²`) is tried instead.
pub fn find_critical_points(
    game: &ZeroSumGame,
    seeds: &[Vec<f64>],
    tol: f64,
    max_iter: usize,
) -> CriticalSearch {
    let mut points: Vec<CriticalPoint> = Vec::new();
    let mut dropped = 0;
    for seed in seeds {
        match newton(game, seed, tol, max_iter) {
            Some(cp) => {
                let dup = points.iter().any(|p| {
                    let scale = 1.0 + norm(&cp.x);
                    game.distance(&p.x, &cp.x) <= 1e-6 * scale
                });
                if !dup {
                    points.push(cp);
                }
            }
            None => dropped += 1,
        }
    }
    CriticalSearch { points, dropped }
}

fn newton(game: &ZeroSumGame, seed: &[f64], tol: f64, max_iter: usize) -> Option<CriticalPoint> {
    let mut x = seed.to_vec();
    game.wrap(&mut x);
    let mut g = grad(game, &x).ok()?;
    let mut gn = norm(&g);
    for _ in 0..max_iter {
        if gn <= tol {
            break;
        }
        let j = jacobian_blocks(game, &x).ok()?.game_jacobian();
        let rhs = nalgebra::DVector::from_iterator(g.len(), g.iter().map(|v| -v));
        let newton_step = if matlib::min_singular_value(&j) > 1e-12 * matlib::scale(&j) {
            j.clone().lu().solve(&rhs)
        } else {
            None
        };
        let mut accepted = false;
        if let Some(s) = newton_step {
            let mut t = 1.0;
            for _ in 0..=30 {
                let mut y: Vec<f64> = x.iter().zip(s.iter()).map(|(a, b)| a + t * b).collect();
                game.wrap(&mut y);
                if let Ok(gy) = grad(game, &y) {
                    let gyn = norm(&gy);
                    if gyn < gn {
                        x = y;
                        g = gy;
                        gn = gyn;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
        }
        if !accepted {
            // descent direction for ½‖g‖²
            let d = -(j.transpose() * &rhs.map(|v| -v));
            let jn = matlib::spectral_norm(&j).max(1e-12);
            let mut t = 1.0 / (jn * jn);
            for _ in 0..=30 {
                let mut y: Vec<f64> = x.iter().zip(d.iter()).map(|(a, b)| a + t * b).collect();
                game.wrap(&mut y);
                if let Ok(gy) = grad(game, &y) {
                    let gyn = norm(&gy);
                    if gyn < gn {
                        x = y;
                        g = gy;
                        gn = gyn;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
        }
        if !accepted {
            break;
        }
    }
    if gn <= tol {
        let blocks = jacobian_blocks(game, &x).ok()?;
        Some(CriticalPoint { x, gnorm: gn, blocks })
    } else {
        None
    }
}

/// Uniform tensor grid of seeds, `per_axis` points per coordinate.
pub fn seed_grid(lo: &[f64], hi: &[f64], per_axis: usize) -> Vec<Vec<f64>> {
    assert_eq!(lo.len(), hi.len());
    let d = lo.len();
    let total = per_axis.pow(d as u32);
    (0..total)
        .map(|mut k| {
            (0..d)
                .map(|c| {
                    let i = k % per_axis;
                    k /= per_axis;
                    if per_axis == 1 {
                        0.5 * (lo[c] + hi[c])
                    } else {
                        lo[c] + (hi[c] - lo[c]) * i as f64 / (per_axis - 1) as f64
                    }
                })
                .collect()
        })
        .collect()
}

/// Parameters for [`builtin`]; unused fields are ignored by each benchmark.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuiltinParams {
    pub v: f64,
    pub eps: f64,
    pub mu: f64,
    /// Covariance-GAN target is `sigma²·I_d`.
    pub sigma: f64,
    pub d: usize,
}

impl Default for BuiltinParams {
    fn default() -> Self {
        BuiltinParams { v: 4.0, eps: 1.0, mu: 1.0, sigma: 1.0, d: 1 }
    }
}

pub const BUILTIN_NAMES: &[&str] = &[
    "quad_stack",
    "quad_spurious",
    "poly_spurious",
    "poly_landscape",
    "torus",
    "jin_dse",
    "jin_spurious",
    "dirac_gan",
    "dirac_gan_ns",
    "covariance_gan",
];

/// Benchmark games by id. See [`BUILTIN_NAMES`].
pub fn builtin(name: &str, p: &BuiltinParams) -> Result<ZeroSumGame> {
    let need_pos = |v: f64, what: &str| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("{what} must be positive, got {v}")))
        }
    };
    match name {
        "quad_stack" => {
            need_pos(p.v, "v")?;
            Ok(quad_stack(p.v))
        }
        "quad_spurious" => {
            need_pos(p.v, "v")?;
            Ok(quad_spurious(p.v))
        }
        "poly_spurious" => Ok(poly_spurious()),
        "poly_landscape" => Ok(poly_landscape()),
        "torus" => Ok(torus()),
        "jin_dse" => {
            need_pos(p.eps, "eps")?;
            Ok(jin_dse(p.eps))
        }
        "jin_spurious" => {
            need_pos(p.eps, "eps")?;
            Ok(jin_spurious(p.eps))
        }
        "dirac_gan" | "dirac_gan_ns" => {
            if !(p.mu >= 0.0) {
                return Err(Error::InvalidParameter(format!("mu must be >= 0, got {}", p.mu)));
            }
            let variant = if name == "dirac_gan" {
                ganlab::DiracVariant::Saturating
            } else {
                ganlab::DiracVariant::NonSaturating
            };
            Ok(ganlab::dirac_gan_game(&ganlab::DiracGanSpec::new(p.mu, variant)))
        }
        "covariance_gan" => {
            if p.d == 0 {
                return Err(Error::InvalidParameter("d must be >= 1".into()));
            }
            need_pos(p.sigma, "sigma")?;
            need_pos(p.mu, "mu")?;
            let sigma = Mat::identity(p.d, p.d) * (p.sigma * p.sigma);
            ganlab::cov_gan_game(&ganlab::CovGanSpec::new(p.d, sigma, p.mu)?)
        }
        _ => Err(Error::Usage(format!("unknown game '{name}'; known: {}", BUILTIN_NAMES.join(", ")))),
    }
}

/// Default Newton seeds for the critical-point search of each builtin.
pub fn builtin_seeds(name: &str, p: &BuiltinParams) -> Vec<Vec<f64>> {
    let cube = |n: usize, r: f64, k: usize| seed_grid(&vec![-r; n], &vec![r; n], k);
    match name {
        "quad_stack" | "quad_spurious" | "jin_spurious" => cube(4, 1.0, 3),
        "jin_dse" => cube(2, 1.0, 3),
        "torus" => cube(2, PI, 13),
        "poly_landscape" => cube(2, 15.0, 31),
        "poly_spurious" => {
            let mut s = seed_grid(&[-6.0, -1.0, -6.0, -1.0], &[3.0, 3.0, 3.0, 3.0], 6);
            s.extend(seed_grid(&[-6.0, -1.0, -100.0, -1.0], &[-3.0, 1.0, -80.0, 1.0], 4));
            s
        }
        "dirac_gan" | "dirac_gan_ns" => cube(2, 2.0, 5),
        "covariance_gan" => {
            let n = 2 * p.d * p.d;
            let r = 2.0 * p.sigma.max(p.sigma * p.sigma / p.mu.max(1e-12));
            if n <= 2 {
                cube(n, r, 9)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(0);
                (0..200).map(|_| (0..n).map(|_| rng.random_range(-r..r)).collect()).collect()
            }
        }
        _ => Vec::new(),
    }
}

/// Critical points of a builtin from its default seeds. For the polynomial
/// landscape, whose Gaussian envelope makes `g` numerically zero far from
/// the origin, roots outside `[−20, 20]²` are discarded and counted as dropped.
pub fn builtin_critical_points(name: &str, p: &BuiltinParams, tol: f64) -> Result<CriticalSearch> {
    let game = builtin(name, p)?;
    let mut search = find_critical_points(&game, &builtin_seeds(name, p), tol, 100);
    if name == "poly_landscape" {
        let before = search.points.len();
        search.points.retain(|c| c.x.iter().all(|v| v.abs() <= 20.0));
        search.dropped += before - search.points.len();
    }
    Ok(search)
}

/// `f = ½xᵀMx` for symmetric `M`.
pub fn quadratic(name: &str, n1: usize, m: Mat) -> ZeroSumGame {
    let n = m.nrows();
    let m = matlib::sym(&m);
    let (mc, mg, mh) = (m.clone(), m.clone(), m.clone());
    ZeroSumGame::new(name, n1, n - n1, move |x| {
        let v = nalgebra::DVector::from_column_slice(x);
        0.5 * v.dot(&(&mc * &v))
    })
    .expect("quadratic dimensions")
    .with_grad(move |x| {
        let v = nalgebra::DVector::from_column_slice(x);
        let mut g: Vec<f64> = (&mg * v).iter().copied().collect();
        for gi in g.iter_mut().skip(n1) {
            *gi = -*gi;
        }
        g
    })
    .with_hessian(move |_| JacobianBlocks::from_hessian(&mh, n1))
}

/// Quadratic game whose origin is a Stackelberg but not a Nash equilibrium;
/// stable exactly for `τ > 2`.
pub fn quad_stack(v: f64) -> ZeroSumGame {
    let m = matlib::from_rows(
        4,
        4,
        &[
            -v, 0.0, -v, 0.0, //
            0.0, v / 2.0, 0.0, v / 2.0, //
            -v, 0.0, -v / 2.0, 0.0, //
            0.0, v / 2.0, 0.0, -v,
        ],
    );
    quadratic("quad_stack", 2, m)
}

/// Quadratic game whose origin is spurious: stable for small `τ`, unstable
/// for every `τ > 2`.
pub fn quad_spurious(v: f64) -> ZeroSumGame {
    let m = matlib::from_rows(
        4,
        4,
        &[
            v / 2.0, 0.0, v / 2.0, 0.0, //
            0.0, -v / 4.0, 0.0, v / 2.0, //
            v / 2.0, 0.0, v / 4.0, 0.0, //
            0.0, v / 2.0, 0.0, -v / 2.0,
        ],
    );
    quadratic("quad_spurious", 2, m)
}

/// `f = −x² + 2√ε xy − (ε/2)y²`; Stackelberg with threshold `τ* = 2/ε`.
pub fn jin_dse(eps: f64) -> ZeroSumGame {
    let r = eps.sqrt();
    quadratic("jin_dse", 1, matlib::from_rows(2, 2, &[-2.0, 2.0 * r, 2.0 * r, -eps]))
}

/// Four-dimensional spurious counterpart of [`jin_dse`], unstable for `τ > 2/ε`.
pub fn jin_spurious(eps: f64) -> ZeroSumGame {
    let r = 2.0 * eps.sqrt();
    let m = matlib::from_rows(
        4,
        4,
        &[
            2.0, 0.0, r, 0.0, //
            0.0, -1.0, 0.0, r, //
            r, 0.0, eps, 0.0, //
            0.0, r, 0.0, -2.0 * eps,
        ],
    );
    quadratic("jin_spurious", 2, m)
}

/// `f = −0.15 cos x₁ + cos(x₁ − x₂) + 0.15 cos x₂` on the torus.
pub fn torus() -> ZeroSumGame {
    ZeroSumGame::new("torus", 1, 1, |x| {
        -0.15 * x[0].cos() + (x[0] - x[1]).cos() + 0.15 * x[1].cos()
    })
    .expect("torus dimensions")
    .with_grad(|x| {
        let s = (x[0] - x[1]).sin();
        vec![0.15 * x[0].sin() - s, -(s - 0.15 * x[1].sin())]
    })
    .with_hessian(|x| {
        let c = (x[0] - x[1]).cos();
        JacobianBlocks {
            d11: Mat::from_element(1, 1, 0.15 * x[0].cos() - c),
            d12: Mat::from_element(1, 1, c),
            d22: Mat::from_element(1, 1, -c - 0.15 * x[1].cos()),
        }
    })
    .with_periodic()
}

/// `f = −e^{−0.01(x₁²+x₂²)}((x₁ + 0.3x₂²)² + (x₂ + 0.3x₁²)²)`.
///
/// This placement of the 0.3 coefficients is the one whose critical points are
/// the Nash equilibrium (10.57, −8.95) and the Stackelberg equilibria
/// (−1.62, −1.62), (−11.03, −11.03) with `τ* = 1`.
pub fn poly_landscape() -> ZeroSumGame {
    fn parts(x: &[f64]) -> (f64, f64, [f64; 2], [[f64; 2]; 2]) {
        let (x1, x2) = (x[0], x[1]);
        let e = (-0.01 * (x1 * x1 + x2 * x2)).exp();
        let u = x1 + 0.3 * x2 * x2;
        let w = x2 + 0.3 * x1 * x1;
        let p = u * u + w * w;
        let dp = [2.0 * u + 1.2 * x1 * w, 1.2 * x2 * u + 2.0 * w];
        let hp = [
            [2.0 + 1.2 * w + 0.72 * x1 * x1, 1.2 * (x1 + x2)],
            [1.2 * (x1 + x2), 2.0 + 1.2 * u + 0.72 * x2 * x2],
        ];
        (e, p, dp, hp)
    }
    ZeroSumGame::new("poly_landscape", 1, 1, |x| {
        let (e, p, _, _) = parts(x);
        -e * p
    })
    .expect("poly_landscape dimensions")
    .with_grad(|x| {
        let (e, p, dp, _) = parts(x);
        let f1 = -e * (dp[0] - 0.02 * x[0] * p);
        let f2 = -e * (dp[1] - 0.02 * x[1] * p);
        vec![f1, -f2]
    })
    .with_hessian(|x| {
        let (e, p, dp, hp) = parts(x);
        let mut h = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let delta = if i == j { 1.0 } else { 0.0 };
                h[i][j] = -e
                    * (-0.02 * x[j] * (dp[i] - 0.02 * x[i] * p) + hp[i][j]
                        - 0.02 * delta * p
                        - 0.02 * x[i] * dp[j]);
            }
        }
        JacobianBlocks {
            d11: Mat::from_element(1, 1, h[0][0]),
            d12: Mat::from_element(1, 1, h[0][1]),
            d22: Mat::from_element(1, 1, h[1][1]),
        }
    })
}

/// Quartic game whose origin is spurious with the same Jacobian as
/// `quad_spurious(5)`; coordinates `(x₁₁, x₁₂, x₂₁, x₂₂)`.
pub fn poly_spurious() -> ZeroSumGame {
    // f = 1.25·q·s + t·r with
    // q = x11² + 2x11x21 + ½x21² − ½x12² + 2x12x22 − x22², s = (x11−1)², t = x11²,
    // r = (x11−1)² + (x12−1)² − (x21−1)² − (x22−1)².
    struct Parts {
        q: f64,
        dq: [f64; 4],
        hq: [[f64; 4]; 4],
        s: f64,
        ds: [f64; 4],
        hs: [[f64; 4]; 4],
        t: f64,
        dt: [f64; 4],
        ht: [[f64; 4]; 4],
        r: f64,
        dr: [f64; 4],
        hr: [[f64; 4]; 4],
    }
    fn parts(x: &[f64]) -> Parts {
        let (a, b, c, d) = (x[0], x[1], x[2], x[3]);
        let mut hq = [[0.0; 4]; 4];
        hq[0][0] = 2.0;
        hq[0][2] = 2.0;
        hq[2][0] = 2.0;
        hq[1][1] = -1.0;
        hq[1][3] = 2.0;
        hq[3][1] = 2.0;
        hq[2][2] = 1.0;
        hq[3][3] = -2.0;
        let mut e00 = [[0.0; 4]; 4];
        e00[0][0] = 2.0;
        let mut hr = [[0.0; 4]; 4];
        hr[0][0] = 2.0;
        hr[1][1] = 2.0;
        hr[2][2] = -2.0;
        hr[3][3] = -2.0;
        Parts {
            q: a * a + 2.0 * a * c + 0.5 * c * c - 0.5 * b * b + 2.0 * b * d - d * d,
            dq: [2.0 * a + 2.0 * c, -b + 2.0 * d, 2.0 * a + c, 2.0 * b - 2.0 * d],
            hq,
            s: (a - 1.0).powi(2),
            ds: [2.0 * (a - 1.0), 0.0, 0.0, 0.0],
            hs: e00,
            t: a * a,
            dt: [2.0 * a, 0.0, 0.0, 0.0],
            ht: e00,
            r: (a - 1.0).powi(2) + (b - 1.0).powi(2) - (c - 1.0).powi(2) - (d - 1.0).powi(2),
            dr: [2.0 * (a - 1.0), 2.0 * (b - 1.0), -2.0 * (c - 1.0), -2.0 * (d - 1.0)],
            hr,
        }
    }
    ZeroSumGame::new("poly_spurious", 2, 2, |x| {
        let p = parts(x);
        1.25 * p.q * p.s + p.t * p.r
    })
    .expect("poly_spurious dimensions")
    .with_grad(|x| {
        let p = parts(x);
        (0..4)
            .map(|i| {
                let v = 1.25 * (p.dq[i] * p.s + p.q * p.ds[i]) + p.dt[i] * p.r + p.t * p.dr[i];
                if i >= 2 {
                    -v
                } else {
                    v
                }
            })
            .collect()
    })
    .with_hessian(|x| {
        let p = parts(x);
        let mut h = Mat::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                h[(i, j)] = 1.25
                    * (p.hq[i][j] * p.s + p.dq[i] * p.ds[j] + p.dq[j] * p.ds[i] + p.q * p.hs[i][j])
                    + p.ht[i][j] * p.r
                    + p.dt[i] * p.dr[j]
                    + p.dt[j] * p.dr[i]
                    + p.t * p.hr[i][j];
            }
        }
        JacobianBlocks::from_hessian(&h, 2)
    })
}

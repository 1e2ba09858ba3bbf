//! Timescale thresholds for τ-GDA: the `J_τ` assembly, the guard map, the
//! stability threshold τ* (eigenproblem plus an independent root-finding
//! cross-check), the instability threshold τ₀, spectrum sweeps and the
//! large-τ asymptotics.

use serde::{Deserialize, Serialize};

use crate::classify::{self, Classification, DEFINITE_TOL};
use crate::error::{Error, Result};
use crate::game::{CriticalPoint, JacobianBlocks, ZeroSumGame};
use crate::matlib::{self, Inertia, Mat, Spectrum, C64};

/// `J_τ = [[D₁²f, D₁₂f], [−τD₁₂ᵀf, −τD₂²f]]`.
pub fn assemble_j_tau(blocks: &JacobianBlocks, tau: f64) -> Mat {
    matlib::block2x2(
        &blocks.d11,
        &blocks.d12,
        &(-blocks.d12.transpose() * tau),
        &(-&blocks.d22 * tau),
    )
}

/// Largest real part over `spec(−J_τ)`; negative iff the point is stable.
pub fn stability_margin(blocks: &JacobianBlocks, tau: f64) -> Result<f64> {
    Ok(matlib::eig(&-assemble_j_tau(blocks, tau))?.max_re())
}

/// `ν(τ) = det(−J_τ ⊞ −J_τ)`, with the sign and `log|ν|` kept separately so
/// large orders or large τ do not overflow.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GuardValue {
    pub value: f64,
    pub sign: f64,
    pub log_abs: f64,
}

pub fn guard_map_nu(blocks: &JacobianBlocks, tau: f64) -> Result<GuardValue> {
    let bp = matlib::boxplus(&-assemble_j_tau(blocks, tau))?;
    let n = bp.nrows();
    let lu = bp.lu();
    let mut sign: f64 = lu.p().determinant();
    let mut log_abs = 0.0;
    let u = lu.u();
    for i in 0..n {
        let d = u[(i, i)];
        if d == 0.0 {
            return Ok(GuardValue { value: 0.0, sign: 0.0, log_abs: f64::NEG_INFINITY });
        }
        sign *= d.signum();
        log_abs += d.abs().ln();
    }
    Ok(GuardValue { value: sign * log_abs.exp(), sign, log_abs })
}

/// Blocks of `−J` in the form the threshold eigenproblem is written in:
/// `A₁₁ = −D₁²f`, `A₁₂ = −D₁₂f`, `A₂₂ = D₂²f`. Every formula below goes
/// through this one conversion.
struct NegJ {
    a11: Mat,
    a12: Mat,
    a22: Mat,
}

impl NegJ {
    fn from_blocks(b: &JacobianBlocks) -> Self {
        NegJ { a11: -&b.d11, a12: -&b.d12, a22: b.d22.clone() }
    }
}

/// Threshold matrix whose largest positive real eigenvalue is τ*.
///
/// With `S₁ = A₁₁ + A₁₂A₂₂⁻¹A₁₂ᵀ`,
/// `M₁ = 2(A₁₂⊗I)H₂(A₂₂⊞A₂₂)⁻¹H₂⁺(A₁₂ᵀ⊗I)`,
/// `M₂ = I⊗A₂₂⁻¹ − 2(I⊗A₂₂⁻¹A₁₂ᵀ)H₁(S₁⊞S₁)⁻¹H₁⁺(I⊗A₁₂A₂₂⁻¹)`,
/// the matrix is `Q = −M₂(A₁₁⊗I + M₁)`: `ν(τ) = 0` exactly when `τ` is an
/// eigenvalue of `Q`.
pub fn tau_star_matrix(blocks: &JacobianBlocks) -> Result<Mat> {
    let (n1, n2) = (blocks.n1(), blocks.n2());
    let NegJ { a11, a12, a22 } = NegJ::from_blocks(blocks);
    let a22i = matlib::inv(&a22, "D22")?;
    let s1 = &a11 + &a12 * &a22i * a12.transpose();
    let (i1, i2) = (Mat::identity(n1, n1), Mat::identity(n2, n2));
    let (h1, h1p) = (matlib::duplication_matrix(n1), matlib::duplication_pinv(n1));
    let (h2, h2p) = (matlib::duplication_matrix(n2), matlib::duplication_pinv(n2));
    let bp22i = matlib::inv(&matlib::boxplus(&a22)?, "D22 boxplus")?;
    let bps1i = matlib::inv(&matlib::boxplus(&s1)?, "Schur complement boxplus")?;

    let m1 = matlib::kron(&a12, &i2) * h2 * bp22i * h2p * matlib::kron(&a12.transpose(), &i2) * 2.0;
    let m2 = matlib::kron(&i1, &a22i)
        - matlib::kron(&i1, &(&a22i * a12.transpose()))
            * h1
            * bps1i
            * h1p
            * matlib::kron(&i1, &(&a12 * &a22i))
            * 2.0;
    Ok(-m2 * (matlib::kron(&a11, &i2) + m1))
}

/// Imaginary-part band for reading real eigenvalues of the threshold matrix.
pub const Q_REAL_TOL: f64 = matlib::REAL_IM_TOL;
/// Boundary check: `−J_{τ*}` must have a pair sum this small (relative).
pub const BOUNDARY_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauStarCertificate {
    pub tau_star: f64,
    pub q_spectrum: Spectrum,
    /// Largest sign change of the guard map, when one was found.
    pub guard_root: Option<f64>,
    /// τ at which `stability_margin` was evaluated: `1.01·τ*`, or 1 when τ* = 0.
    pub margin_tau: f64,
    pub stability_margin: f64,
    /// `min |λ_i + λ_j|` over `spec(−J_{τ*})`, present when τ* > 0.
    pub boundary_pair_sum: Option<f64>,
    /// `1 + ‖J_{τ*}‖_F`, the scale `boundary_pair_sum` is compared against.
    pub boundary_scale: Option<f64>,
}

impl TauStarCertificate {
    pub fn boundary_ok(&self) -> bool {
        match (self.boundary_pair_sum, self.boundary_scale) {
            (Some(p), Some(s)) => p <= BOUNDARY_TOL * s,
            _ => true,
        }
    }
}

fn require_dse(blocks: &JacobianBlocks) -> Result<Classification> {
    let c = classify::classify_point(blocks, DEFINITE_TOL);
    if !c.kind.is_dse() {
        return Err(Error::Precondition(format!(
            "point is {} (evidence: {}), not a differential Stackelberg equilibrium",
            c.kind.as_str(),
            serde_json::to_string(&c.evidence).unwrap_or_default()
        )));
    }
    Ok(c)
}

/// τ* from the threshold eigenproblem, with guard-map and eigenvalue evidence.
pub fn tau_star_eig(blocks: &JacobianBlocks) -> Result<TauStarCertificate> {
    require_dse(blocks)?;
    let q = tau_star_matrix(blocks)?;
    let q_spectrum = matlib::eig(&q)?;
    let tau_star = matlib::largest_positive_real(&q_spectrum, Q_REAL_TOL * matlib::scale(&q));
    let tau_max = (100.0 * tau_star).max(1e3);
    let guard_root = tau_star_guard(blocks, tau_max, GUARD_GRID, 1e-10 * (1.0 + tau_star))?;
    let margin_tau = if tau_star > 0.0 { 1.01 * tau_star } else { 1.0 };
    let stability_margin = stability_margin(blocks, margin_tau)?;
    let (boundary_pair_sum, boundary_scale) = if tau_star > 0.0 {
        let j = assemble_j_tau(blocks, tau_star);
        (Some(matlib::eig(&-&j)?.min_pair_sum()), Some(matlib::scale(&j)))
    } else {
        (None, None)
    };
    Ok(TauStarCertificate {
        tau_star,
        q_spectrum,
        guard_root,
        margin_tau,
        stability_margin,
        boundary_pair_sum,
        boundary_scale,
    })
}

/// Default number of log-spaced guard-map nodes.
pub const GUARD_GRID: usize = 10_000;
/// Smallest τ the guard-map scan looks at.
pub const GUARD_TAU_MIN: f64 = 1e-6;

/// Largest sign change of `ν` on `[1e-6, tau_max]` (log-spaced nodes),
/// refined by bisection to width `tol`. `None` means no sign change; the
/// caller confirms stability at τ = 1 to read that as τ* = 0.
pub fn tau_star_guard(blocks: &JacobianBlocks, tau_max: f64, grid: usize, tol: f64) -> Result<Option<f64>> {
    if !(tau_max > GUARD_TAU_MIN) || grid < 2 {
        return Err(Error::InvalidParameter(format!("need tau_max > {GUARD_TAU_MIN} and grid >= 2")));
    }
    // the sign alone drives the bisection
    let f = |t: f64| guard_map_nu(blocks, t).map(|g| g.sign).unwrap_or(f64::NAN);
    let nodes = matlib::log_grid(GUARD_TAU_MIN, tau_max, grid);
    Ok(matlib::bracketed_root_largest_on(f, &nodes, tol))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauZeroCertificate {
    pub tau_zero: f64,
    pub p_inertia: Inertia,
    /// Sampled τ > τ₀ with their stability margins (all positive).
    pub verified_tau: Vec<f64>,
    pub verified_margin: Vec<f64>,
}

/// Instability threshold τ₀ for a non-Stackelberg critical point.
///
/// `S = S₁(−J)`, `L₀ = (D₂²f)⁻¹D₁₂ᵀf`, `(P₁, Q₁)` and `(P₂, Q₂)` inertia-matched
/// Lyapunov pairs of `S` and `D₂²f`. Then
/// `P = Tᵀ diag(P₁, P₂) T` with `T = [[I, 0], [L₀, I]]` satisfies
/// `(−J_τ)ᵀP + P(−J_τ) ≻ 0` for every `τ > τ₀`, where
/// `τ₀ = λmax(Q₂⁻¹(XᵀQ₁⁻¹X + Y))`, `X = P₁D₁₂f − S L₀ᵀP₂`,
/// `Y = P₂L₀D₁₂f + (P₂L₀D₁₂f)ᵀ`. `P` then carries the unstable inertia of `−J_τ`.
/// The bound is not tight.
pub fn tau_zero(blocks: &JacobianBlocks, tol: f64) -> Result<TauZeroCertificate> {
    let d22_inv = matlib::inv(&blocks.d22, "D22")?;
    let s = matlib::sym(&-(&blocks.d11 - &blocks.d12 * &d22_inv * blocks.d12.transpose()));
    let l0 = &d22_inv * blocks.d12.transpose();
    let (p1, q1) = matlib::inertia_lyapunov(&s, tol)?;
    let (p2, q2) = matlib::inertia_lyapunov(&blocks.d22, tol)?;
    let i1 = matlib::inertia_symmetric(&p1, tol);
    let i2 = matlib::inertia_symmetric(&p2, tol);
    let p_inertia = Inertia::new(i1.n_pos + i2.n_pos, i1.n_neg + i2.n_neg, i1.n_zero + i2.n_zero);
    if p_inertia.n_pos == 0 {
        return Err(Error::Precondition(
            "S1(-J) and D22 have no unstable direction; the point is a differential Stackelberg equilibrium".into(),
        ));
    }
    let x = &p1 * &blocks.d12 - &s * l0.transpose() * &p2;
    let pld = &p2 * &l0 * &blocks.d12;
    let y = &pld + pld.transpose();
    let m = x.transpose() * matlib::inv(&q1, "Q1")? * &x + y;
    let chol = q2
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NonFinite("Q2 lost positive definiteness".into()))?;
    let linv = matlib::inv(&chol.l(), "Cholesky factor of Q2")?;
    let sym_m = matlib::sym(&(&linv * m * linv.transpose()));
    let top = matlib::sym_eigenvalues(&sym_m).last().copied().unwrap_or(0.0);
    let tau_zero = top.max(0.0);

    let samples = if tau_zero > 0.0 {
        vec![1.01 * tau_zero, 2.0 * tau_zero, 10.0 * tau_zero]
    } else {
        vec![1e-3, 1.0, 10.0]
    };
    let mut verified_margin = Vec::with_capacity(samples.len());
    for &t in &samples {
        let mg = stability_margin(blocks, t)?;
        if !(mg > 1e-10) {
            return Err(Error::NonConvergence(format!(
                "tau_zero certificate failed: -J_tau is not unstable at tau = {t} (margin {mg:e})"
            )));
        }
        verified_margin.push(mg);
    }
    Ok(TauZeroCertificate { tau_zero, p_inertia, verified_tau: samples, verified_margin })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Track {
    #[serde(with = "crate::io::complex_vec")]
    pub values: Vec<C64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSweep {
    pub taus: Vec<f64>,
    /// `tracks[k].values[i]` is eigenvalue `k` at `taus[i]`.
    pub tracks: Vec<Track>,
}

impl SpectrumSweep {
    pub fn at(&self, i: usize) -> Vec<C64> {
        self.tracks.iter().map(|t| t.values[i]).collect()
    }
}

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method).
/// Returns `col[row]`.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let inf = f64::INFINITY;
    let (mut u, mut v) = (vec![0.0; n + 1], vec![0.0; n + 1]);
    let (mut p, mut way) = (vec![0usize; n + 1], vec![0usize; n + 1]);
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let (mut delta, mut j1) = (inf, 0);
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col = vec![0; n];
    for j in 1..=n {
        if p[j] > 0 {
            col[p[j] - 1] = j - 1;
        }
    }
    col
}

/// Permutation `perm` with `next[perm[k]]` continuing `prev[k]`: greedy
/// nearest neighbour, replaced by the optimal assignment when greedy costs
/// more than twice the optimum.
pub fn match_spectra(prev: &[C64], next: &[C64]) -> Vec<usize> {
    let n = prev.len();
    let cost: Vec<Vec<f64>> = prev.iter().map(|a| next.iter().map(|b| (a - b).norm()).collect()).collect();
    let mut used = vec![false; n];
    let mut greedy = Vec::with_capacity(n);
    let mut greedy_cost = 0.0;
    for row in &cost {
        let (j, c) = row
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(j, c)| (j, *c))
            .expect("square matching");
        used[j] = true;
        greedy.push(j);
        greedy_cost += c;
    }
    let opt = min_cost_assignment(&cost);
    let opt_cost: f64 = opt.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
    if greedy_cost > 2.0 * opt_cost {
        opt
    } else {
        greedy
    }
}

pub fn spectrum_sweep(blocks: &JacobianBlocks, taus: &[f64]) -> Result<SpectrumSweep> {
    if taus.is_empty() || taus.iter().any(|&t| !(t > 0.0)) || taus.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("tau grid must be positive and strictly increasing".into()));
    }
    let n = blocks.n1() + blocks.n2();
    let mut tracks = vec![Track { values: Vec::with_capacity(taus.len()) }; n];
    let mut prev: Option<Vec<C64>> = None;
    for &t in taus {
        let cur = matlib::eig(&assemble_j_tau(blocks, t))?.sorted();
        let ordered = match &prev {
            None => cur,
            Some(p) => {
                let perm = match_spectra(p, &cur);
                perm.iter().map(|&j| cur[j]).collect()
            }
        };
        for (k, z) in ordered.iter().enumerate() {
            tracks[k].values.push(*z);
        }
        prev = Some(ordered);
    }
    Ok(SpectrumSweep { taus: taus.to_vec(), tracks })
}

fn non_real_count(blocks: &JacobianBlocks, tau: f64, im_tol: f64) -> Result<usize> {
    Ok(matlib::eig(&assemble_j_tau(blocks, tau))?.values.iter().filter(|z| z.im.abs() > im_tol).count())
}

/// τ values where the number of eigenvalues with `|Im| > im_tol` changes,
/// scanned on `grid` and refined by bisection to width `tol`.
pub fn realness_transitions(blocks: &JacobianBlocks, grid: &[f64], im_tol: f64, tol: f64) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    let mut counts = Vec::with_capacity(grid.len());
    for &t in grid {
        counts.push(non_real_count(blocks, t, im_tol)?);
    }
    for k in 0..grid.len().saturating_sub(1) {
        if counts[k] == counts[k + 1] {
            continue;
        }
        let (mut a, mut b) = (grid[k], grid[k + 1]);
        let ca = counts[k];
        while b - a > tol {
            let m = 0.5 * (a + b);
            if non_real_count(blocks, m, im_tol)? == ca {
                a = m;
            } else {
                b = m;
            }
        }
        out.push(0.5 * (a + b));
    }
    Ok(out)
}

/// Large-τ prediction `spec(S₁(J)) ∪ τ·spec(−D₂²f)`.
pub fn asymptotic_split(blocks: &JacobianBlocks, tau: f64) -> Result<Spectrum> {
    if blocks.n2() == 0 {
        return matlib::eig(&blocks.d11);
    }
    let s1 = classify::schur_of_blocks(blocks)?;
    let mut values = matlib::eig(&s1)?.values;
    values.extend(matlib::eig(&-&blocks.d22)?.values.into_iter().map(|z| z * tau));
    Ok(Spectrum { values })
}

/// Largest relative error `|λ − λ̂|/|λ̂|` after optimally pairing
/// `spec(J_τ)` with the asymptotic prediction.
pub fn asymptotic_mismatch(blocks: &JacobianBlocks, tau: f64) -> Result<f64> {
    let pred = asymptotic_split(blocks, tau)?.values;
    let actual = matlib::eig(&assemble_j_tau(blocks, tau))?.values;
    let cost: Vec<Vec<f64>> = pred.iter().map(|p| actual.iter().map(|a| (a - p).norm()).collect()).collect();
    let perm = min_cost_assignment(&cost);
    Ok(perm
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j] / pred[i].norm().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlowManifold {
    #[serde(with = "crate::io::mat_rows")]
    pub gain: Mat,
    /// `‖A₂₁ − A₂₂L + εLA₁₁ − εLA₁₂L‖_F`.
    pub residual: f64,
}

/// First-order slow-manifold gain `L(ε) = A₂₂⁻¹A₂₁ + εA₂₂⁻²A₂₁A₀` with
/// `ε = 1/τ`, for `J = [[A₁₁, A₁₂], [A₂₁, A₂₂]]` at τ = 1 and
/// `A₀ = A₁₁ − A₁₂A₂₂⁻¹A₂₁`.
pub fn slow_manifold_gain(blocks: &JacobianBlocks, eps: f64) -> Result<SlowManifold> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be >= 0, got {eps}")));
    }
    let a11 = &blocks.d11;
    let a12 = &blocks.d12;
    let a21 = -blocks.d12.transpose();
    let a22 = -&blocks.d22;
    let a22i = matlib::inv(&a22, "D22")?;
    let l0 = &a22i * &a21;
    let a0 = a11 - a12 * &l0;
    let gain = &l0 + &a22i * &a22i * &a21 * a0 * eps;
    let r = &a21 - &a22 * &gain + &gain * a11 * eps - &gain * a12 * &gain * eps;
    Ok(SlowManifold { residual: r.norm(), gain })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameTauStar {
    pub tau_star: f64,
    pub per_point: Vec<(Vec<f64>, f64)>,
}

/// Largest τ* over the Stackelberg points among `points`.
pub fn tau_star_game(game: &ZeroSumGame, points: &[CriticalPoint]) -> Result<GameTauStar> {
    let _ = game;
    let mut per_point = Vec::new();
    for p in points {
        if classify::classify_point(&p.blocks, DEFINITE_TOL).kind.is_dse() {
            per_point.push((p.x.clone(), tau_star_eig(&p.blocks)?.tau_star));
        }
    }
    if per_point.is_empty() {
        return Err(Error::Precondition("no differential Stackelberg equilibrium among the points".into()));
    }
    let tau_star = per_point.iter().map(|(_, t)| *t).fold(0.0, f64::max);
    Ok(GameTauStar { tau_star, per_point })
}

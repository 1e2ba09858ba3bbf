//! Dense real matrix algebra for the stability constructions: Kronecker
//! products and sums, duplication matrices, the `⊞` operator, eigenvalues,
//! Schur complements, inertia and inertia-matched Lyapunov solves.
//!
//! Vectorization convention: `vec` stacks rows (row-major), `vech` stacks the
//! lower triangle row by row, `(0,0), (1,0), (1,1), (2,0), (2,1), (2,2), ...`.
//! With this pairing `vec(AXB) = (A ⊗ Bᵀ) vec(X)`.

use nalgebra::{Complex, DMatrix, DVector, Schur, SymmetricEigen, SVD};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Mat = DMatrix<f64>;
pub type C64 = Complex<f64>;

/// Relative band for classifying a real part as zero.
pub const ZERO_RE_TOL: f64 = 1e-9;
/// Relative band under which an imaginary part is treated as rounding noise.
pub const REAL_IM_TOL: f64 = 1e-7;
/// Relative tolerance used when pairing conjugate eigenvalues.
pub const PAIRING_TOL: f64 = 1e-10;

/// `1 + ‖A‖_F`, the scale used by every relative tolerance in the crate.
pub fn scale(a: &Mat) -> f64 {
    1.0 + a.norm()
}

/// Builds a matrix from row-major entries.
pub fn from_rows(rows: usize, cols: usize, entries: &[f64]) -> Mat {
    assert_eq!(rows * cols, entries.len(), "entry count must equal rows*cols");
    Mat::from_row_slice(rows, cols, entries)
}

pub fn diag(d: &[f64]) -> Mat {
    Mat::from_diagonal(&DVector::from_column_slice(d))
}

pub fn sym(a: &Mat) -> Mat {
    (a + a.transpose()) * 0.5
}

pub fn check_square(a: &Mat) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::NonSquare { rows: a.nrows(), cols: a.ncols() });
    }
    Ok(a.nrows())
}

fn check_finite(a: &Mat, what: &str) -> Result<()> {
    if a.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("{what} has non-finite entries")))
    }
}

/// `[[a, b], [c, d]]` from conforming blocks. Empty blocks are allowed.
pub fn block2x2(a: &Mat, b: &Mat, c: &Mat, d: &Mat) -> Mat {
    let (r1, c1) = a.shape();
    let (r2, c2) = d.shape();
    let mut m = Mat::zeros(r1 + r2, c1 + c2);
    m.view_mut((0, 0), (r1, c1)).copy_from(a);
    m.view_mut((0, c1), (r1, c2)).copy_from(b);
    m.view_mut((r1, 0), (r2, c1)).copy_from(c);
    m.view_mut((r1, c1), (r2, c2)).copy_from(d);
    m
}

pub fn blockdiag(a: &Mat, d: &Mat) -> Mat {
    block2x2(a, &Mat::zeros(a.nrows(), d.ncols()), &Mat::zeros(d.nrows(), a.ncols()), d)
}

/// Inverse with a relative conditioning guard.
pub fn inv(a: &Mat, what: &str) -> Result<Mat> {
    let n = check_square(a)?;
    if n == 0 {
        return Ok(Mat::zeros(0, 0));
    }
    if min_singular_value(a) <= 1e-13 * scale(a) {
        return Err(Error::Degenerate(format!("{what} is singular")));
    }
    a.clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Degenerate(format!("{what} is singular")))
}

pub fn min_singular_value(a: &Mat) -> f64 {
    if a.is_empty() {
        return f64::INFINITY;
    }
    SVD::new(a.clone(), false, false).singular_values.min()
}

pub fn spectral_norm(a: &Mat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    SVD::new(a.clone(), false, false).singular_values.max()
}

/// Numerical rank with threshold `tol·σmax`.
pub fn rank(a: &Mat, tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let s = SVD::new(a.clone(), false, false).singular_values;
    let smax = s.max();
    s.iter().filter(|&&v| v > tol * smax.max(f64::MIN_POSITIVE)).count()
}

/// Eigenvalues of the symmetric part of `a`, ascending.
pub fn sym_eigenvalues(a: &Mat) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut v: Vec<f64> = SymmetricEigen::new(sym(a)).eigenvalues.iter().copied().collect();
    v.sort_by(|x, y| x.total_cmp(y));
    v
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

/// `A ⊗ I_m + I_n ⊗ B`.
pub fn kron_sum(a: &Mat, b: &Mat) -> Result<Mat> {
    let n = check_square(a)?;
    let m = check_square(b)?;
    Ok(kron(a, &Mat::identity(m, m)) + kron(&Mat::identity(n, n), b))
}

/// Position of `(i, j)`, `j ≤ i`, inside `vech`.
pub fn vech_index(i: usize, j: usize) -> usize {
    debug_assert!(j <= i);
    i * (i + 1) / 2 + j
}

/// Row-major vectorization.
pub fn vec_rows(x: &Mat) -> DVector<f64> {
    DVector::from_iterator(x.len(), x.transpose().iter().copied())
}

pub fn vech(x: &Mat) -> DVector<f64> {
    let n = x.nrows();
    let mut v = DVector::zeros(n * (n + 1) / 2);
    for i in 0..n {
        for j in 0..=i {
            v[vech_index(i, j)] = x[(i, j)];
        }
    }
    v
}

/// `H_n` with `vec(X) = H_n vech(X)` for symmetric `X`.
pub fn duplication_matrix(n: usize) -> Mat {
    let m = n * (n + 1) / 2;
    let mut h = Mat::zeros(n * n, m);
    for i in 0..n {
        for j in 0..=i {
            let k = vech_index(i, j);
            h[(i * n + j, k)] = 1.0;
            h[(j * n + i, k)] = 1.0;
        }
    }
    h
}

/// `H_n⁺ = (H_nᵀH_n)⁻¹H_nᵀ`. `H_nᵀH_n` is diagonal (1 on diagonal slots, 2 off),
/// so the pseudo-inverse averages the two mirrored entries.
pub fn duplication_pinv(n: usize) -> Mat {
    let m = n * (n + 1) / 2;
    let mut p = Mat::zeros(m, n * n);
    for i in 0..n {
        for j in 0..=i {
            let k = vech_index(i, j);
            if i == j {
                p[(k, i * n + i)] = 1.0;
            } else {
                p[(k, i * n + j)] = 0.5;
                p[(k, j * n + i)] = 0.5;
            }
        }
    }
    p
}

/// `A ⊞ A = H_n⁺(A ⊕ A)H_n`, assembled entrywise: column `(p,q)` is
/// `vech(A E + E Aᵀ)` for the symmetric basis matrix `E` of that slot.
pub fn boxplus(a: &Mat) -> Result<Mat> {
    let n = check_square(a)?;
    let m = n * (n + 1) / 2;
    let mut out = Mat::zeros(m, m);
    for p in 0..n {
        for q in 0..=p {
            let col = vech_index(p, q);
            for i in 0..n {
                for j in 0..=i {
                    // (A E)_ij + (E Aᵀ)_ij with E = e_p e_qᵀ + e_q e_pᵀ (or e_p e_pᵀ)
                    let mut v = 0.0;
                    if q == j {
                        v += a[(i, p)];
                    }
                    if p == i {
                        v += a[(j, q)];
                    }
                    if p != q {
                        if p == j {
                            v += a[(i, q)];
                        }
                        if q == i {
                            v += a[(j, p)];
                        }
                    }
                    out[(vech_index(i, j), col)] = v;
                }
            }
        }
    }
    Ok(out)
}

/// Eigenvalues with multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    #[serde(with = "crate::io::complex_vec")]
    pub values: Vec<C64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_re(&self) -> f64 {
        self.values.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_re(&self) -> f64 {
        self.values.iter().map(|z| z.re).fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_im(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Values ordered by real part, then imaginary part.
    pub fn sorted(&self) -> Vec<C64> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    /// `min |λ_i + λ_j|` over `j ≤ i`: zero exactly when `⊞` is singular.
    pub fn min_pair_sum(&self) -> f64 {
        let v = &self.values;
        let mut best = f64::INFINITY;
        for i in 0..v.len() {
            for j in 0..=i {
                best = best.min((v[i] + v[j]).norm());
            }
        }
        best
    }
}

/// Diagonal similarity `D⁻¹AD` with power-of-two entries equalizing row and
/// column norms. Leaves the spectrum untouched and improves Schur accuracy.
fn balance(a: &Mat) -> Mat {
    const RADIX: f64 = 2.0;
    let n = a.nrows();
    let mut b = a.clone();
    for _ in 0..100 {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += b[(j, i)].abs();
                    r += b[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            while c < r / RADIX {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            while c > r * RADIX {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    b[(i, j)] /= f;
                    b[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
    b
}

/// Eigenvalues of a real square matrix via the real Schur form.
///
/// Non-real values are returned in exact conjugate pairs.
pub fn eig(a: &Mat) -> Result<Spectrum> {
    let n = check_square(a)?;
    check_finite(a, "eig input")?;
    if n == 0 {
        return Ok(Spectrum { values: Vec::new() });
    }
    if n == 1 {
        return Ok(Spectrum { values: vec![C64::new(a[(0, 0)], 0.0)] });
    }
    let b = balance(a);
    let schur = Schur::try_new(b, f64::EPSILON, 1000 * n.max(10))
        .ok_or_else(|| Error::NonConvergence(format!("real Schur iteration on a {n}x{n} matrix")))?;
    let mut values: Vec<C64> = schur.complex_eigenvalues().iter().copied().collect();
    if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonConvergence("real Schur produced non-finite eigenvalues".into()));
    }
    pair_conjugates(&mut values, PAIRING_TOL * scale(a));
    Ok(Spectrum { values })
}

/// Averages each non-real value with its nearest conjugate partner so the
/// multiset is exactly closed under conjugation.
fn pair_conjugates(values: &mut [C64], tol: f64) {
    let n = values.len();
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] {
            continue;
        }
        if values[i].im.abs() <= tol {
            values[i].im = 0.0;
            used[i] = true;
            continue;
        }
        let target = values[i].conj();
        let partner = (0..n)
            .filter(|&j| j != i && !used[j])
            .min_by(|&x, &y| (values[x] - target).norm().total_cmp(&(values[y] - target).norm()));
        used[i] = true;
        if let Some(j) = partner {
            used[j] = true;
            let re = 0.5 * (values[i].re + values[j].re);
            let im = 0.5 * (values[i].im.abs() + values[j].im.abs());
            let s = if values[i].im > 0.0 { 1.0 } else { -1.0 };
            values[i] = C64::new(re, s * im);
            values[j] = C64::new(re, -s * im);
        }
    }
}

/// `J₁₁ − J₁₂J₂₂⁻¹J₂₁` for the `(n1, n2)` partition of `J`.
pub fn schur_complement_first(j: &Mat, n1: usize, n2: usize) -> Result<Mat> {
    let n = check_square(j)?;
    if n != n1 + n2 {
        return Err(Error::Dimension(format!("J has order {n}, expected {n1}+{n2}")));
    }
    let j11 = j.view((0, 0), (n1, n1)).into_owned();
    if n2 == 0 {
        return Ok(j11);
    }
    let j12 = j.view((0, n1), (n1, n2)).into_owned();
    let j21 = j.view((n1, 0), (n2, n1)).into_owned();
    let j22 = j.view((n1, n1), (n2, n2)).into_owned();
    if min_singular_value(&j22) <= 1e-12 * scale(&j22) {
        return Err(Error::Degenerate("lower-right block of J is singular".into()));
    }
    let x = j22
        .lu()
        .solve(&j21)
        .ok_or_else(|| Error::Degenerate("lower-right block of J is singular".into()))?;
    Ok(j11 - j12 * x)
}

/// Counts of eigenvalues by sign of real part.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inertia {
    pub n_pos: usize,
    pub n_neg: usize,
    pub n_zero: usize,
}

impl Inertia {
    pub fn new(n_pos: usize, n_neg: usize, n_zero: usize) -> Self {
        Inertia { n_pos, n_neg, n_zero }
    }

    fn from_reals(re: impl Iterator<Item = f64>, band: f64) -> Self {
        let mut out = Inertia::new(0, 0, 0);
        for r in re {
            if r.abs() <= band {
                out.n_zero += 1;
            } else if r > 0.0 {
                out.n_pos += 1;
            } else {
                out.n_neg += 1;
            }
        }
        out
    }
}

/// Inertia with `|Re λ| ≤ tol·(1+‖A‖)` counted as zero.
pub fn inertia(a: &Mat, tol: f64) -> Result<Inertia> {
    let s = eig(a)?;
    Ok(Inertia::from_reals(s.values.iter().map(|z| z.re), tol * scale(a)))
}

/// Inertia of a symmetric matrix from its (real) eigenvalues.
pub fn inertia_symmetric(a: &Mat, tol: f64) -> Inertia {
    Inertia::from_reals(sym_eigenvalues(a).into_iter(), tol * scale(a))
}

/// Solves `AX + XAᵀ = C` through the Kronecker form (dense, small orders).
pub fn lyapunov_solve(a: &Mat, c: &Mat) -> Result<Mat> {
    let n = check_square(a)?;
    let op = kron_sum(a, a)?;
    let rhs = vec_rows(c);
    let x = op
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Degenerate("Lyapunov operator is singular".into()))?;
    // x is row-major vec(X)
    let m = Mat::from_row_slice(n, n, x.as_slice());
    Ok(sym(&m))
}

/// Symmetric `P` and `Q ≻ 0` with `AP + PAᵀ = Q` and `inertia(P) = inertia(A)`.
///
/// Tries `Q = I` first; when some `λ_i + λ_j` sits near zero that operator is
/// (nearly) singular, so the spectrum is split into its stable and anti-stable
/// invariant subspaces with the matrix sign function and each part is solved
/// separately, then reassembled by congruence.
pub fn inertia_lyapunov(a: &Mat, tol: f64) -> Result<(Mat, Mat)> {
    let n = check_square(a)?;
    check_finite(a, "inertia_lyapunov input")?;
    let sc = scale(a);
    let spec = eig(a)?;
    let target = Inertia::from_reals(spec.values.iter().map(|z| z.re), tol * sc);
    if target.n_zero > 0 {
        return Err(Error::Precondition(format!(
            "{} eigenvalue(s) on the imaginary axis; A is not hyperbolic",
            target.n_zero
        )));
    }
    let residual_ok = |p: &Mat, q: &Mat| (a * p + p * a.transpose() - q).norm() <= 1e-8 * sc;

    if spec.min_pair_sum() > 1e-6 * sc {
        let id = Mat::identity(n, n);
        if let Ok(p) = lyapunov_solve(a, &id) {
            if residual_ok(&p, &id) && inertia_symmetric(&p, 1e-12) == target {
                return Ok((p, id));
            }
        }
    }

    let s = matrix_sign(a)?;
    let id = Mat::identity(n, n);
    let v_pos = range_basis(&((&id + &s) * 0.5), target.n_pos);
    let v_neg = range_basis(&((&id - &s) * 0.5), target.n_neg);
    let mut t = Mat::zeros(n, n);
    t.view_mut((0, 0), (n, target.n_pos)).copy_from(&v_pos);
    t.view_mut((0, target.n_pos), (n, target.n_neg)).copy_from(&v_neg);
    let t_inv = inv(&t, "invariant-subspace basis")?;
    let d = &t_inv * a * &t;
    let (np, nn) = (target.n_pos, target.n_neg);
    let d_pos = d.view((0, 0), (np, np)).into_owned();
    let d_neg = d.view((np, np), (nn, nn)).into_owned();
    let x_pos = lyapunov_solve(&d_pos, &Mat::identity(np, np))?;
    let x_neg = lyapunov_solve(&d_neg, &(-Mat::identity(nn, nn)))?;
    let p_tilde = blockdiag(&x_pos, &(-x_neg));
    let p = sym(&(&t * p_tilde * t.transpose()));
    let q = sym(&(a * &p + &p * a.transpose()));
    if sym_eigenvalues(&q)[0] <= 0.0 {
        return Err(Error::InertiaMismatch("assembled Q is not positive definite".into()));
    }
    let got = inertia_symmetric(&p, 1e-12);
    if got != target {
        return Err(Error::InertiaMismatch(format!("inertia(P) = {got:?}, inertia(A) = {target:?}")));
    }
    Ok((p, q))
}

/// Matrix sign function by scaled Newton iteration.
fn matrix_sign(a: &Mat) -> Result<Mat> {
    let n = a.nrows();
    let mut s = a.clone();
    let mut scaling = true;
    for _ in 0..200 {
        let s_inv = inv(&s, "sign iterate")?;
        let mu = if scaling {
            let det = s.determinant().abs();
            if det > 0.0 && det.is_finite() {
                det.powf(-1.0 / n as f64)
            } else {
                1.0
            }
        } else {
            1.0
        };
        let next = (&s * mu + s_inv / mu) * 0.5;
        let change = (&next - &s).norm();
        s = next;
        if change < 1e-2 * s.norm() {
            scaling = false;
        }
        if change <= 1e-13 * s.norm() {
            return Ok(s);
        }
    }
    Err(Error::NonConvergence("matrix sign iteration".into()))
}

/// Orthonormal basis for the leading `r`-dimensional range of `m`.
fn range_basis(m: &Mat, r: usize) -> Mat {
    let n = m.nrows();
    if r == 0 {
        return Mat::zeros(n, 0);
    }
    let svd = SVD::new(m.clone(), true, false);
    let u = svd.u.expect("requested U");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let mut out = Mat::zeros(n, r);
    for (k, &i) in idx.iter().take(r).enumerate() {
        out.set_column(k, &u.column(i));
    }
    out
}

/// Largest eigenvalue that is real within `tol·scale` and positive beyond it;
/// zero when there is none.
pub fn largest_positive_real_eig(a: &Mat, tol: f64) -> Result<f64> {
    let s = eig(a)?;
    Ok(largest_positive_real(&s, tol * scale(a)))
}

pub(crate) fn largest_positive_real(s: &Spectrum, band: f64) -> f64 {
    s.values
        .iter()
        .filter(|z| z.im.abs() <= band && z.re > band)
        .map(|z| z.re)
        .fold(0.0, f64::max)
}

/// Largest sign-change root of `f` on a uniform grid over `[lo, hi]`,
/// refined by bisection to width `tol`.
pub fn bracketed_root_largest<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    grid: usize,
    tol: f64,
) -> Option<f64> {
    assert!(lo < hi && grid >= 2, "need lo < hi and grid >= 2");
    let nodes: Vec<f64> = (0..grid)
        .map(|k| lo + (hi - lo) * k as f64 / (grid - 1) as f64)
        .collect();
    bracketed_root_largest_on(f, &nodes, tol)
}

/// Same as [`bracketed_root_largest`] over caller-supplied increasing nodes.
pub fn bracketed_root_largest_on<F: Fn(f64) -> f64>(f: F, nodes: &[f64], tol: f64) -> Option<f64> {
    let vals: Vec<f64> = nodes.iter().map(|&t| f(t)).collect();
    for k in (0..nodes.len().saturating_sub(1)).rev() {
        let (fa, fb) = (vals[k], vals[k + 1]);
        if fb == 0.0 {
            return Some(nodes[k + 1]);
        }
        if fa == 0.0 {
            return Some(nodes[k]);
        }
        if fa.signum() != fb.signum() {
            let (mut a, mut b, mut fa) = (nodes[k], nodes[k + 1], fa);
            while b - a > tol {
                let m = 0.5 * (a + b);
                let fm = f(m);
                if fm == 0.0 {
                    return Some(m);
                }
                if fm.signum() == fa.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
                if m == a && m == b {
                    break;
                }
            }
            return Some(0.5 * (a + b));
        }
    }
    None
}

/// Log-spaced grid of `n ≥ 2` points on `[lo, hi]`, `0 < lo < hi`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
}

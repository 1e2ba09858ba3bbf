//! Critical-point classification, quadratic numerical range sampling and the
//! discriminator dimension check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::game::JacobianBlocks;
use crate::matlib::{self, Mat, C64};

/// Default definiteness tolerance, relative to `1 + ‖block‖`.
pub const DEFINITE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointKind {
    #[serde(rename = "DNE")]
    Dne,
    #[serde(rename = "DSE_only")]
    DseOnly,
    Spurious,
    Degenerate,
}

impl PointKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PointKind::Dne => "DNE",
            PointKind::DseOnly => "DSE_only",
            PointKind::Spurious => "Spurious",
            PointKind::Degenerate => "Degenerate",
        }
    }

    /// DNE points are also Stackelberg.
    pub fn is_dse(self) -> bool {
        matches!(self, PointKind::Dne | PointKind::DseOnly)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub d11_min: f64,
    pub d11_max: f64,
    /// Eigen-extremes of `−d22`.
    pub neg_d22_min: f64,
    pub neg_d22_max: f64,
    /// Eigen-extremes of `S₁(J) = d11 − d12 d22⁻¹ d12ᵀ`; absent when `d22` is singular.
    pub schur_min: Option<f64>,
    pub schur_max: Option<f64>,
    pub d22_min_singular: f64,
    pub schur_min_singular: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub kind: PointKind,
    pub evidence: Evidence,
}

fn positive_definite(eigs_min: f64, m: &Mat, tol: f64) -> bool {
    eigs_min > tol * (1.0 + m.norm())
}

fn extremes(m: &Mat) -> (f64, f64) {
    let e = matlib::sym_eigenvalues(m);
    match (e.first(), e.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => (f64::INFINITY, f64::NEG_INFINITY),
    }
}

/// `S₁(J) = d11 − d12 d22⁻¹ d12ᵀ`, the first Schur complement of `J` at `τ = 1`.
pub fn schur_of_blocks(blocks: &JacobianBlocks) -> crate::Result<Mat> {
    let inv = matlib::inv(&blocks.d22, "d22")?;
    Ok(matlib::sym(&(&blocks.d11 - &blocks.d12 * inv * blocks.d12.transpose())))
}

pub fn classify_point(blocks: &JacobianBlocks, tol: f64) -> Classification {
    let neg_d22 = -&blocks.d22;
    let (d11_min, d11_max) = extremes(&blocks.d11);
    let (neg_d22_min, neg_d22_max) = extremes(&neg_d22);
    let d22_sv = matlib::min_singular_value(&blocks.d22);
    let schur = schur_of_blocks(blocks).ok();
    let (schur_min, schur_max) = match &schur {
        Some(s) => {
            let (a, b) = extremes(s);
            (Some(a), Some(b))
        }
        None => (None, None),
    };
    let schur_sv = schur.as_ref().map(matlib::min_singular_value);

    let d11_pd = positive_definite(d11_min, &blocks.d11, tol);
    let d22_pd = positive_definite(neg_d22_min, &neg_d22, tol);
    let schur_pd = match (&schur, schur_min) {
        (Some(s), Some(m)) => positive_definite(m, s, tol),
        _ => false,
    };
    let d22_singular = d22_sv <= tol * (1.0 + blocks.d22.norm());
    let schur_singular = match (&schur, schur_sv) {
        (Some(s), Some(sv)) => sv <= tol * (1.0 + s.norm()),
        _ => true,
    };

    let kind = if d11_pd && d22_pd {
        PointKind::Dne
    } else if d22_pd && schur_pd {
        PointKind::DseOnly
    } else if d22_singular || schur_singular {
        PointKind::Degenerate
    } else {
        PointKind::Spurious
    };
    Classification {
        kind,
        evidence: Evidence {
            d11_min,
            d11_max,
            neg_d22_min,
            neg_d22_max,
            schur_min,
            schur_max,
            d22_min_singular: d22_sv,
            schur_min_singular: schur_sv,
        },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QnrCloud {
    #[serde(with = "crate::io::complex_vec")]
    pub points: Vec<C64>,
    pub sample_count: usize,
}

fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

fn bilinear(m: &Mat, left: &[f64], right: &[f64]) -> f64 {
    let mut s = 0.0;
    for (i, l) in left.iter().enumerate() {
        for (j, r) in right.iter().enumerate() {
            s += l * m[(i, j)] * r;
        }
    }
    s
}

/// Samples the quadratic numerical range of `J_τ` with real unit vectors.
pub fn qnr_sample(blocks: &JacobianBlocks, tau: f64, samples: usize, seed: u64) -> QnrCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n1, n2) = (blocks.n1(), blocks.n2());
    let mut points = Vec::with_capacity(2 * samples);
    for _ in 0..samples {
        let v = unit_vector(&mut rng, n1);
        let w = unit_vector(&mut rng, n2);
        let a = bilinear(&blocks.d11, &v, &v);
        let b = bilinear(&blocks.d12, &v, &w);
        let c = -tau * b;
        let d = -tau * bilinear(&blocks.d22, &w, &w);
        // eigenvalues of [[a, b], [c, d]]
        let half_tr = (a + d) / 2.0;
        let disc = (a - d) * (a - d) / 4.0 + b * c;
        if disc >= 0.0 {
            let r = disc.sqrt();
            points.push(C64::new(half_tr + r, 0.0));
            points.push(C64::new(half_tr - r, 0.0));
        } else {
            let r = (-disc).sqrt();
            points.push(C64::new(half_tr, r));
            points.push(C64::new(half_tr, -r));
        }
    }
    QnrCloud { points, sample_count: samples }
}

/// True iff the discriminator is at least half the generator's dimension.
pub fn gan_dimension_check(n1: usize, n2: usize) -> bool {
    2 * n2 >= n1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{self, BuiltinParams};

    fn blocks_of(name: &str, x: &[f64]) -> JacobianBlocks {
        let g = game::builtin(name, &BuiltinParams::default()).unwrap();
        game::jacobian_blocks(&g, x).unwrap()
    }

    #[test]
    fn quad_stack_is_stackelberg_only() {
        // S₁ = diag(v, 3v/4) with v = 4
        let c = classify_point(&blocks_of("quad_stack", &[0.0; 4]), DEFINITE_TOL);
        assert_eq!(c.kind, PointKind::DseOnly);
        assert!((c.evidence.schur_min.unwrap() - 3.0).abs() < 1e-12);
        assert!((c.evidence.schur_max.unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn quad_spurious_origin() {
        let c = classify_point(&blocks_of("quad_spurious", &[0.0; 4]), DEFINITE_TOL);
        assert_eq!(c.kind, PointKind::Spurious);
    }

    #[test]
    fn degenerate_when_d22_singular() {
        let b = JacobianBlocks::new(matlib::diag(&[-1.0]), matlib::diag(&[1.0]), matlib::diag(&[0.0])).unwrap();
        assert_eq!(classify_point(&b, DEFINITE_TOL).kind, PointKind::Degenerate);
    }

    #[test]
    fn scalar_qnr_is_spectrum() {
        let b = JacobianBlocks::new(matlib::diag(&[0.3]), matlib::diag(&[1.2]), matlib::diag(&[-0.7])).unwrap();
        let cloud = qnr_sample(&b, 2.0, 5, 9);
        let j = matlib::from_rows(2, 2, &[0.3, 1.2, -2.4, 1.4]);
        let spec = matlib::eig(&j).unwrap();
        for p in &cloud.points {
            assert!(spec.values.iter().any(|z| (z - p).norm() < 1e-10));
        }
    }

    #[test]
    fn dimension_check() {
        assert!(gan_dimension_check(4, 2));
        assert!(!gan_dimension_check(4, 1));
        assert!(gan_dimension_check(3, 2));
        assert!(!gan_dimension_check(5, 2));
    }
}

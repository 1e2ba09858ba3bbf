//! Regularized Dirac-GAN and covariance-GAN Jacobians: closed-form spectra,
//! realizable structure and the discriminator dimension requirement.

use taugda::game::{self, BuiltinParams};
use taugda::matlib::{self, Mat};
use taugda::{classify, ganlab};

fn main() -> taugda::Result<()> {
    let b = game::jacobian_blocks(&game::builtin("dirac_gan", &BuiltinParams { mu: 0.0, ..Default::default() })?, &[0.0, 0.0])?;
    let reg = Mat::identity(1, 1);
    for mu in [0.25, 1.0, 4.0] {
        for tau in [0.5, 1.0, 8.0] {
            let num = matlib::eig(&ganlab::regularized_jacobian(&b, &reg, tau, mu)?)?;
            let cf = ganlab::dirac_spectrum(mu, tau);
            let show = |v: Vec<taugda::C64>| v.iter().map(|z| format!("{:.4}{:+.4}i", z.re, z.im)).collect::<Vec<_>>().join(", ");
            println!("mu = {mu}, tau = {tau}: closed form [{}], numeric [{}]", show(cf.sorted()), show(num.sorted()));
        }
    }
    println!("realizable: {:?}", ganlab::realizable_check(&b, &reg, 1.0, 1e-10));

    let cov = ganlab::CovGanSpec::new(2, matlib::diag(&[1.0, 2.0]), 1.0)?;
    let g = ganlab::cov_gan_game(&cov)?;
    println!("covariance GAN with d = 2 has {} parameters", g.dim());

    // 2·n2 >= n1 is only necessary: with d11 = 0 any n1 > n2 still leaves a
    // zero eigenvalue from the kernel of d12ᵀ
    for (n1, n2) in [(2, 2), (3, 3), (4, 2), (5, 2)] {
        let (blocks, reg) = ganlab::random_realizable(n1, n2, 7);
        let j = ganlab::regularized_jacobian(&blocks, &reg, 2.0, 1.0)?;
        let min_abs_re = matlib::eig(&j)?.values.iter().map(|z| z.re.abs()).fold(f64::INFINITY, f64::min);
        println!(
            "n1 = {n1}, n2 = {n2}: 2·n2 >= n1 is {}, min |Re| = {min_abs_re:.2e}",
            classify::gan_dimension_check(n1, n2)
        );
    }
    Ok(())
}

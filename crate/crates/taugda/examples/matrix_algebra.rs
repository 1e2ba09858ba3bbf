//! The matrix toolkit behind the certificates: Kronecker sums, the
//! compressed ⊞ operator, Lyapunov inertia and the guard map.

use taugda::matlib::{self, from_rows};
use taugda::{game, timescale};

fn main() -> taugda::Result<()> {
    let a = from_rows(3, 3, &[1.0, 2.0, 0.0, -1.0, 0.5, 1.0, 0.0, 0.3, -2.0]);
    println!("spec(A) = {:.4?}", matlib::eig(&a)?.sorted());
    let bp = matlib::boxplus(&a)?;
    println!("A ⊞ A is {}x{}, spectrum {:.4?}", bp.nrows(), bp.ncols(), matlib::eig(&bp)?.sorted());
    let (p, q) = matlib::inertia_lyapunov(&a, 1e-9)?;
    println!("inertia(A) = {:?}, inertia(P) = {:?}", matlib::inertia(&a, 1e-9)?, matlib::inertia_symmetric(&p, 1e-12));
    println!("residual |AP + PAᵀ - Q| = {:.2e}", (&a * &p + &p * a.transpose() - q).norm());

    let b = game::jacobian_blocks(&game::quad_stack(4.0), &[0.0; 4])?;
    for tau in [1.0, 1.9, 2.0, 2.1, 4.0] {
        let nu = timescale::guard_map_nu(&b, tau)?;
        println!("guard map at tau = {tau}: sign {:+}, log|nu| = {:.3}", nu.sign, nu.log_abs);
    }
    Ok(())
}

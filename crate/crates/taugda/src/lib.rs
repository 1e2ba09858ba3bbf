//! Stability analysis and simulation for two-player zero-sum games under
//! gradient descent-ascent with a learning-rate ratio `τ` between the players.
//!
//! The update studied throughout is `x⁺ = x − γ₁Λ_τ g(x)` with
//! `Λ_τ = blockdiag(I, τI)` and `g = (D₁f, −D₂f)`. Its linearization at a
//! critical point is `J_τ = [[D₁²f, D₁₂f], [−τD₁₂ᵀf, −τD₂²f]]`.
//!
//! Modules, bottom up:
//! - [`matlib`]: Kronecker algebra, duplication matrices, `⊞`, eigenvalues, inertia.
//! - [`game`]: zero-sum games, derivatives, built-in benchmarks, critical points.
//! - [`classify`]: Nash / Stackelberg / spurious classification, numerical-range sampling.
//! - [`timescale`]: `J_τ`, the guard map, `τ*` and `τ₀` certificates, sweeps.
//! - [`converge`]: learning-rate bound, rate constants, iteration bounds.
//! - [`simulate`]: deterministic and stochastic `τ`-GDA, regions of attraction.
//! - [`ganlab`]: Dirac-GAN and covariance-GAN instances, regularized Jacobians.
//! - [`cli`]: argument parsing and dispatch behind the `taugda` binary.

// `!(x > 0.0)` is the NaN-rejecting form used for parameter checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod cli;
pub mod converge;
pub mod error;
pub mod game;
pub mod ganlab;
pub mod io;
pub mod matlib;
pub mod simulate;
pub mod timescale;

pub use error::{Error, Result};
pub use matlib::{Inertia, Mat, Spectrum, C64};

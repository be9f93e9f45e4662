//! Spectral solver for elliptic PDEs with quasiperiodic coefficients.
//!
//! A quasiperiodic problem -div(alpha grad u) = f on R^d is lifted through a
//! projection matrix P to a periodic parent problem on the n-torus, collocated
//! pseudo-spectrally, and solved as the linear system Q U = F with
//! Q = A o W: A the n-level block-circulant matrix generated by the
//! coefficient's Fourier tensor, W the frequency inner products
//! (P k_V)^T (P k_U). Q is never materialized; the [`assembly`] module keeps
//! the nonzero triples (O(gD) of them for a g-sparse coefficient) and the
//! [`solver`] module runs a diagonally preconditioned conjugate-gradient
//! iteration on them.
//!
//! Alongside the solver proper:
//! - [`pam`]: the periodic-approximation baseline, which replaces irrational
//!   frequencies by rational approximants [L lambda]/L on a cell of length L
//!   and pays the Diophantine approximation error for it;
//! - [`homogenize`]: corrector solves and homogenized-tensor evaluation for
//!   diagonal 2x2 quasiperiodic coefficients;
//! - [`driver`] and [`config`]: the experiment harness behind the CLI.

pub mod assembly;
pub mod config;
pub mod driver;
pub mod error;
mod fft;
pub mod expr;
pub mod homogenize;
pub mod lattice;
pub mod pam;
pub mod presets;
pub mod qpcs;
pub mod qpfield;
pub mod report;
pub mod solver;

pub use error::{QpError, Result};

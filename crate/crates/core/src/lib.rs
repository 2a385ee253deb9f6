//! Numerical core for the time-fractional higher-order heat-type equation
//!
//! ```text
//! d^alpha u / dt^alpha = k_n d^n u / dx^n,   u(x, 0) = delta(x),   0 < alpha <= 1.
//! ```
//!
//! The fundamental solution is available through two independent routes
//! (subordination of the order-`n` pseudoprocess kernel to the random time
//! `T_alpha(t)`, and Fourier inversion of a Mittag-Leffler characteristic
//! function). The density of `T_alpha(t)` itself has four representations
//! (Wright function, fractional integral of a one-sided stable law, positive
//! branch of a spectrally negative stable law, product of generalised gamma
//! factors). Samplers for the subordinators with `alpha = 1/m` live in
//! [`montecarlo`].
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
// `num_traits::Float` supplies the float methods unless another crate in the
// build links `std`, in which case the import becomes redundant.
#![allow(unused_imports)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

extern crate alloc;

pub mod dd;
mod error;
pub mod kernel;
pub mod montecarlo;
pub mod quadrature;
pub mod solver;
pub mod specfun;
pub mod timechange;

pub use error::{Error, Result};
pub use kernel::{EquationSpec, RootSystem, SignedDensitySample};
pub use quadrature::{QuadResult, Tolerance};

/// Default tolerance of every integral unless the caller overrides it.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Evaluation budget of a single adaptive integral.
pub const MAX_EVALUATIONS: usize = 1 << 20;

//! Integration engines used by the analytic routes.
//!
//! * [`integrate_adaptive`]: globally adaptive Gauss-Kronrod (10/21 point) on a
//!   finite interval.
//! * [`integrate_semi_infinite`]: `[a, inf)` through a logarithmic map
//!   (exponential decay) or a rational map plus an analytic tail term
//!   (algebraic decay).
//! * [`integrate_jacobi_singular`]: `(b - w)^e` or `(w - a)^e` endpoint weights
//!   by Gauss-Jacobi panels.
//! * [`integrate_oscillatory_ray`]: the Fourier integral of `exp(k t (iz)^n)`
//!   by contour rotation.
//!
//! Integrand closures must be side-effect free: evaluation order is an
//! implementation detail.

mod adaptive;
mod jacobi;
mod oscillatory;
mod semi_infinite;

pub use adaptive::{
    integrate_adaptive, integrate_adaptive_complex, integrate_adaptive_with, integrate_breakpoints,
    integrate_breakpoints_complex, AdaptiveOptions, QuadValue,
};
pub(crate) use adaptive::{adaptive_complex_raw, WG, WGK, XGK};
pub use jacobi::{gauss_jacobi, integrate_jacobi_singular, JacobiWeight, SingularEnd};
pub use oscillatory::{
    integrate_oscillatory_ray, integrate_oscillatory_ray_split, stationary_point, RayCoefficients,
};
pub use semi_infinite::{integrate_semi_infinite, Decay, SemiInfinite};

/// Value of an integral with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Heuristic bound on `|value - integral|`; always reported.
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl QuadResult {
    pub fn new(value: f64, error_estimate: f64, evaluations: usize) -> Self {
        QuadResult {
            value,
            error_estimate,
            evaluations,
        }
    }

    /// Sum of two partial integrals.
    pub fn combine(self, other: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            evaluations: self.evaluations + other.evaluations,
        }
    }

    pub fn scale(self, s: f64) -> QuadResult {
        QuadResult {
            value: self.value * s,
            error_estimate: self.error_estimate * s.abs(),
            evaluations: self.evaluations,
        }
    }
}

/// Convergence target: an integral is accepted once its error estimate is
/// at most `max(abs, rel * |value|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }

    pub const fn absolute(abs: f64) -> Self {
        Tolerance { abs, rel: 0.0 }
    }

    pub const fn relative(rel: f64) -> Self {
        Tolerance { abs: 0.0, rel }
    }

    pub fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }

    pub fn met(&self, err: f64, value: f64) -> bool {
        err <= self.target(value)
    }

    /// Same tolerance with the absolute part scaled, for sub-integrals.
    pub fn split(&self, parts: f64) -> Self {
        Tolerance {
            abs: self.abs / parts,
            rel: self.rel,
        }
    }
}

impl From<f64> for Tolerance {
    fn from(tol: f64) -> Self {
        Tolerance { abs: tol, rel: tol }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::from(crate::DEFAULT_TOL)
    }
}

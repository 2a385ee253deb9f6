use core::fmt;

use crate::quadrature::QuadResult;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    Domain { what: &'static str, value: f64 },
    /// A series evaluation was requested beyond its cancellation guard.
    OutOfRange {
        what: &'static str,
        value: f64,
        limit: f64,
    },
    /// A quadrature exhausted its evaluation budget before meeting the tolerance.
    NonConvergence {
        what: &'static str,
        estimate: QuadResult,
    },
    /// A contour rotation would leave the sector in which the integrand decays.
    RotationInvalid { radius: f64, stationary_point: f64 },
    /// The requested combination of parameters has no implementation.
    Unsupported { what: &'static str, value: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "{what}: argument {value} outside domain"),
            Error::OutOfRange { what, value, limit } => {
                write!(f, "{what}: argument {value} beyond series guard {limit}")
            }
            Error::NonConvergence { what, estimate } => write!(
                f,
                "{what}: no convergence after {} evaluations (value {}, error estimate {:e})",
                estimate.evaluations, estimate.value, estimate.error_estimate
            ),
            Error::RotationInvalid {
                radius,
                stationary_point,
            } => write!(
                f,
                "ray rotation at radius {radius} precedes the stationary point {stationary_point}"
            ),
            Error::Unsupported { what, value } => write!(f, "{what}: unsupported value {value}"),
        }
    }
}

impl core::error::Error for Error {}

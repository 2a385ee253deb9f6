use num_traits::Float;

use super::adaptive::{integrate_adaptive_with, integrate_breakpoints, AdaptiveOptions};
use super::{QuadResult, Tolerance};
use crate::{Error, Result};

/// Decay class of an integrand on `[a, inf)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Decay {
    /// `|f(x)| <~ exp(-x / scale)`; the payload is the length scale.
    Exponential(f64),
    /// `f(x) ~ C x^(-p)` with `p > 1`.
    Algebraic(f64),
}

impl Decay {
    pub const EXPONENTIAL: Decay = Decay::Exponential(1.0);
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SemiInfinite {
    /// Total integral, tail term included; `error_estimate` includes the
    /// uncertainty of the tail term.
    pub result: QuadResult,
    /// Analytic tail term (zero for exponential decay).
    pub tail: f64,
    /// The uncertainty of the analytic tail exceeds the tolerance.
    pub tail_dominated: bool,
}

/// Cut-off of the algebraic map, relative to `max(|a|, 1)`.
const ALGEBRAIC_CUTOFF: f64 = 1e6;

/// `int_a^inf f(x) dx`.
///
/// Exponential decay: `x = a - scale ln(1 - s)` on `s in [0, 1)`.
/// Algebraic decay: `x = a + c s / (1 - s)` up to a cut-off `X`, plus the tail
/// `f(X) X / (p - 1)`; the tail uncertainty is measured by comparing against a
/// cut-off at `X / 2`.
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    decay: Decay,
    tol: impl Into<Tolerance>,
) -> Result<SemiInfinite> {
    let tol = tol.into();
    if !a.is_finite() {
        return Err(Error::Domain {
            what: "integrate_semi_infinite lower limit",
            value: a,
        });
    }
    match decay {
        Decay::Exponential(scale) => {
            if !(scale > 0.0) {
                return Err(Error::Domain {
                    what: "exponential decay scale",
                    value: scale,
                });
            }
            let g = |s: f64| {
                let one_minus = 1.0 - s;
                let x = a - scale * one_minus.ln();
                let v = f(x);
                if v == 0.0 {
                    0.0
                } else {
                    v * scale / one_minus
                }
            };
            let pts = [0.0, 0.5, 0.9, 0.99, 1.0];
            let r = integrate_breakpoints(g, &pts, AdaptiveOptions::new(tol))?;
            Ok(SemiInfinite {
                result: r,
                tail: 0.0,
                tail_dominated: false,
            })
        }
        Decay::Algebraic(p) => {
            if !(p > 1.0) {
                return Err(Error::Domain {
                    what: "algebraic decay power",
                    value: p,
                });
            }
            let c = a.abs().max(1.0);
            let x_cut = a + c * ALGEBRAIC_CUTOFF;
            let s_of = |x: f64| (x - a) / (x - a + c);
            let s_cut = s_of(x_cut);
            let mut g = |s: f64| {
                let one_minus = 1.0 - s;
                let x = a + c * s / one_minus;
                let v = f(x);
                if v == 0.0 {
                    0.0
                } else {
                    v * c / (one_minus * one_minus)
                }
            };
            let half = s_of(a + 0.5 * c * ALGEBRAIC_CUTOFF);
            let pts = [0.0, 0.5, 0.9, 0.99, 0.999, half, s_cut];
            let body = integrate_breakpoints(&mut g, &pts, AdaptiveOptions::new(tol.split(2.0)))?;
            let tail = f(x_cut) * x_cut / (p - 1.0);
            // Tail uncertainty: the tail from X/2 should equal the integral
            // over [X/2, X] plus the tail from X.
            let xh = a + 0.5 * c * ALGEBRAIC_CUTOFF;
            let mid = integrate_adaptive_with(
                &mut f,
                xh,
                x_cut,
                AdaptiveOptions::new(Tolerance::absolute(tol.target(body.value) * 1e-3)),
            )
            .map(|q| q.value)
            .unwrap_or(f64::NAN);
            let tail_half = f(xh) * xh / (p - 1.0);
            let tail_err = (tail_half - mid - tail).abs();
            let tail_err = if tail_err.is_finite() { tail_err } else { tail.abs() };
            let result = QuadResult::new(
                body.value + tail,
                body.error_estimate + tail_err,
                body.evaluations + 2,
            );
            if !result.value.is_finite() {
                return Err(Error::NonConvergence {
                    what: "semi-infinite integral",
                    estimate: result,
                });
            }
            Ok(SemiInfinite {
                result,
                tail,
                tail_dominated: tail_err > tol.target(result.value),
            })
        }
    }
}

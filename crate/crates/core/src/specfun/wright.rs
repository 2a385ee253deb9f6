use core::f64::consts::PI;

use alloc::vec::Vec;
use num_traits::Float;

use super::gamma::{ln_abs_reciprocal_gamma, ln_gamma};
use super::series::{sum_dd, sum_f64, COND_DD, COND_F64};
use crate::dd::DD;
use crate::quadrature::{integrate_breakpoints, AdaptiveOptions, Tolerance};
use crate::{Error, Result};

/// Parameters `(eta, beta)` of `W(x; eta, beta) = sum_k x^k / (k! Gamma(eta k + beta))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WrightParams {
    pub eta: f64,
    pub beta: f64,
}

impl WrightParams {
    pub fn new(eta: f64, beta: f64) -> Result<Self> {
        if !(eta > -1.0 && eta < 0.0) || !beta.is_finite() {
            return Err(Error::Domain {
                what: "Wright parameter eta",
                value: eta,
            });
        }
        Ok(WrightParams { eta, beta })
    }

    /// The M-Wright parameters `(-nu, 1 - nu)`.
    pub fn mainardi(nu: f64) -> Result<Self> {
        Self::new(-nu, 1.0 - nu)
    }
}

/// Wright function by its power series.
///
/// The series is summed in compensated `f64`; if its condition number exceeds
/// `1e3` it is re-summed in double-double. Beyond a condition number of
/// `1e18` the digits are gone and [`Error::OutOfRange`] is returned.
pub fn wright_w(x: f64, p: WrightParams) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain {
            what: "wright_w argument",
            value: x,
        });
    }
    let WrightParams { eta, beta } = p;
    if x == 0.0 {
        return Ok(super::reciprocal_gamma(beta));
    }
    let lx = x.abs().ln();
    let neg = x < 0.0;
    let f = sum_f64(|k| {
        let kf = k as f64;
        let (lg, sg) = ln_abs_reciprocal_gamma(eta * kf + beta);
        if sg == 0.0 {
            return 0.0;
        }
        let sign = if neg && k % 2 == 1 { -sg } else { sg };
        sign * (kf * lx - ln_gamma(kf + 1.0) + lg).exp()
    });
    if f.cond <= COND_F64 {
        return Ok(f.value);
    }
    let xd = DD::from_f64(x);
    let mut c = DD::ONE;
    let d = sum_dd(|k| {
        if k > 0 {
            c = c * xd / DD::from_f64(k as f64);
        }
        let arg = DD::prod(eta, k as f64) + DD::from_f64(beta);
        c * arg.recip_gamma()
    });
    if d.cond <= COND_DD {
        Ok(d.value)
    } else {
        Err(Error::OutOfRange {
            what: "wright_w series condition number",
            value: d.cond,
            limit: COND_DD,
        })
    }
}

/// `ln(sin x / x)` for `0 <= x < pi`.
fn ln_sinc(x: f64) -> f64 {
    if x < 0.25 {
        let y = x * x;
        const C: [f64; 7] = [
            -1.0 / 6.0,
            -1.0 / 180.0,
            -1.0 / 2835.0,
            -1.0 / 37800.0,
            -1.0 / 467775.0,
            -691.0 / 3831077250.0,
            -2.0 / 127702575.0,
        ];
        let mut acc = 0.0;
        for c in C.iter().rev() {
            acc = acc * y + c;
        }
        acc * y
    } else {
        (x.sin() / x).ln()
    }
}

/// `ln(K(phi) / K(0))` of the Zolotarev kernel
/// `K = sin(nu phi)^(nu/(1-nu)) sin((1-nu) phi) / sin(phi)^(1/(1-nu))`.
fn ln_zolotarev_ratio(nu: f64, phi: f64) -> f64 {
    let r = 1.0 / (1.0 - nu);
    nu * r * ln_sinc(nu * phi) + ln_sinc((1.0 - nu) * phi) - r * ln_sinc(phi)
}

/// Argument `lambda = z^(1/(1-nu))` up to which [`m_wright`] uses the series.
const SERIES_LAMBDA: f64 = 2.0;

/// Mainardi function `M_nu(z) = W(-z; -nu, 1 - nu)` for `z >= 0`, `0 < nu < 1`.
///
/// Uses the power series near the origin and the real integral
///
/// ```text
/// M_nu(z) = z^(nu/(1-nu)) / (pi (1-nu)) int_0^pi K(phi) exp(-z^(1/(1-nu)) K(phi)) dphi
/// ```
///
/// elsewhere, which keeps full relative accuracy in the far tail.
pub fn m_wright(z: f64, nu: f64) -> Result<f64> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::Domain {
            what: "m_wright order",
            value: nu,
        });
    }
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::Domain {
            what: "m_wright argument",
            value: z,
        });
    }
    let r = 1.0 / (1.0 - nu);
    let lambda = z.powf(r);
    if lambda <= SERIES_LAMBDA {
        return wright_w(-z, WrightParams::mainardi(nu)?);
    }
    let k0 = nu.powf(nu * r) * (1.0 - nu);
    let integrand = |phi: f64| {
        if phi >= PI {
            return 0.0;
        }
        let d = ln_zolotarev_ratio(nu, phi);
        let excess = k0 * d.exp_m1();
        if !excess.is_finite() {
            return 0.0;
        }
        (k0 + excess) * (-lambda * excess).exp()
    };
    let h = (2.0 / (lambda * k0 * nu)).sqrt();
    let mut pts: Vec<f64> = alloc::vec![0.0];
    let mut b = 0.5 * h;
    while b < 0.5 * PI {
        pts.push(b);
        b *= 2.0;
    }
    pts.extend_from_slice(&[0.5 * PI, PI]);
    let opts = AdaptiveOptions::new(Tolerance::new(1e-300, 1e-13));
    let q = match integrate_breakpoints(integrand, &pts, opts) {
        Ok(q) => q,
        Err(Error::NonConvergence { estimate, .. })
            if estimate.error_estimate <= 1e-9 * estimate.value.abs() =>
        {
            estimate
        }
        Err(e) => return Err(e),
    };
    if q.value <= 0.0 {
        return Ok(0.0);
    }
    let ln = nu * r * z.ln() - lambda * k0 + q.value.ln() - (PI * (1.0 - nu)).ln();
    Ok(ln.exp())
}

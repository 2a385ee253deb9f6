use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use super::adaptive::{adaptive_complex_raw, integrate_breakpoints, AdaptiveOptions};
use super::{QuadResult, Tolerance};
use crate::{Error, Result};

/// Coefficients of the kernel integral `(1/2pi) int exp(i x z + sign t (i z)^n) dz`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayCoefficients {
    pub x: f64,
    pub t: f64,
    /// The coefficient `k_n = +-1`.
    pub sign: f64,
}

/// Saddle threshold: below it the odd-order oscillatory side is split into a
/// real segment and a rotated ray, above it steepest descent is used.
const SADDLE_LAMBDA: f64 = 30.0;
const MAX_PANELS: usize = 4000;

fn check(n: u32, c: &RayCoefficients) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain {
            what: "kernel order",
            value: n as f64,
        });
    }
    if !(c.t > 0.0) || !c.t.is_finite() {
        return Err(Error::Domain {
            what: "kernel time",
            value: c.t,
        });
    }
    if !c.x.is_finite() {
        return Err(Error::Domain {
            what: "kernel position",
            value: c.x,
        });
    }
    if c.sign != 1.0 && c.sign != -1.0 {
        return Err(Error::Domain {
            what: "kernel sign",
            value: c.sign,
        });
    }
    if n.is_multiple_of(2) {
        let q = n / 2;
        let k = if q % 2 == 1 { 1.0 } else { -1.0 };
        if c.sign != k {
            return Err(Error::Domain {
                what: "even-order sign coefficient",
                value: c.sign,
            });
        }
    }
    Ok(())
}

/// Sign of `z^n` in the phase `phi(z) = x z + sigma t z^n` (odd `n`).
fn phase_sign(n: u32, sign: f64) -> f64 {
    if ((n - 1) / 2).is_multiple_of(2) {
        sign
    } else {
        -sign
    }
}

/// Positive stationary point of the phase for odd `n` when `x` lies on the
/// oscillatory side; `None` otherwise.
pub fn stationary_point(n: u32, c: RayCoefficients) -> Option<f64> {
    if n.is_multiple_of(2) || c.x == 0.0 {
        return None;
    }
    let sigma = phase_sign(n, c.sign);
    if c.x * sigma >= 0.0 {
        return None;
    }
    Some((c.x.abs() / (n as f64 * c.t)).powf(1.0 / (n as f64 - 1.0)))
}

/// Real kernel value `p_n(x, t)`.
///
/// Even `n`: `(1/pi) int_0^inf exp(-t z^n) cos(x z) dz` with one panel per
/// oscillation. Odd `n`: the phase `x z + sigma t z^n` is rotated onto the ray
/// `arg z = sigma pi / (2n)` when `x` is on the decaying side; on the
/// oscillatory side the integral is split past the stationary point (moderate
/// phase) or taken along the steepest-descent path through it (large phase).
pub fn integrate_oscillatory_ray(
    n: u32,
    c: RayCoefficients,
    tol: impl Into<Tolerance>,
) -> Result<QuadResult> {
    let tol = tol.into();
    check(n, &c)?;
    if n.is_multiple_of(2) {
        return even_kernel(n, c, tol);
    }
    match stationary_point(n, c) {
        None if c.x.abs() * c.t.powf(-1.0 / n as f64) > 1.0 => {
            shifted_line(n, c, saddle_line(n, &c), tol)
        }
        None => decaying_ray(n, c, tol),
        Some(zs) => {
            let lambda = c.x.abs() * zs * (n as f64 - 1.0) / n as f64;
            if lambda < SADDLE_LAMBDA {
                let r = (1.0 / c.t).powf(1.0 / n as f64).max(1.25 * zs);
                split_ray(n, c, r, tol)
            } else {
                steepest_descent(n, c, zs)
            }
        }
    }
}

/// Odd-order kernel with an explicit split radius: real segment `[0, R]` then
/// the ray `R + r e^{i theta}`.
pub fn integrate_oscillatory_ray_split(
    n: u32,
    c: RayCoefficients,
    radius: f64,
    tol: impl Into<Tolerance>,
) -> Result<QuadResult> {
    check(n, &c)?;
    if n.is_multiple_of(2) {
        return Err(Error::Unsupported {
            what: "split ray for even order",
            value: n as f64,
        });
    }
    if !(radius > 0.0) {
        return Err(Error::Domain {
            what: "split radius",
            value: radius,
        });
    }
    if let Some(zs) = stationary_point(n, c) {
        if radius < zs {
            return Err(Error::RotationInvalid {
                radius,
                stationary_point: zs,
            });
        }
    }
    split_ray(n, c, radius, tol.into())
}

fn panel_points(a: f64, b: f64, count: usize) -> Vec<f64> {
    let count = count.clamp(1, MAX_PANELS);
    (0..=count)
        .map(|i| a + (b - a) * i as f64 / count as f64)
        .collect()
}

fn even_kernel(n: u32, c: RayCoefficients, tol: Tolerance) -> Result<QuadResult> {
    shifted_line(n, c, saddle_line(n, &c), tol)
}

/// Height `b` of the horizontal line `Im z = b` through a saddle of the
/// exponent on which the integrand decays at both ends and its largest modulus
/// is smallest.
fn saddle_line(n: u32, c: &RayCoefficients) -> f64 {
    let nf = n as f64;
    // Saddles: (i z)^(n-1) = -x / (k_n n t), z = -i w.
    let rhs = Complex64::new(-c.x / (c.sign * nf * c.t), 0.0);
    let (rho, phi) = rhs.to_polar();
    let m = n - 1;
    let radius = rho.powf(1.0 / m as f64);
    let reach = 4.0 * (radius + c.t.powf(-1.0 / nf));
    let line_peak = |b: f64| -> Option<f64> {
        let re = |u: f64| kernel_exponent(n, c, Complex64::new(u, b)).re;
        let mut peak = f64::NEG_INFINITY;
        for i in 0..=256 {
            peak = peak.max(re(reach * i as f64 / 256.0));
        }
        (re(reach) < peak - 40.0 && re(-reach) < peak - 40.0).then_some(peak)
    };
    let mut best = (f64::INFINITY, 0.0);
    let mut candidates: Vec<f64> = (0..m)
        .map(|j| {
            let w = Complex64::from_polar(radius, (phi + 2.0 * PI * j as f64) / m as f64);
            -w.re
        })
        .collect();
    candidates.push(0.0);
    for b in candidates {
        if let Some(peak) = line_peak(b) {
            if peak < best.0 {
                best = (peak, b);
            }
        }
    }
    best.1
}

/// Exponent `i x z + k_n t (i z)^n` of the kernel integrand.
fn kernel_exponent(n: u32, c: &RayCoefficients, z: Complex64) -> Complex64 {
    let iz = Complex64::new(-z.im, z.re);
    Complex64::new(0.0, c.x) * z + iz.powi(n as i32) * (c.sign * c.t)
}

/// `(1/pi) Re int_0^inf exp(psi(u + i b)) du`: the full-line integral moved to
/// `Im z = b`, which passes through a saddle so the integrand is no larger
/// than the result.
fn shifted_line(n: u32, c: RayCoefficients, b: f64, tol: Tolerance) -> Result<QuadResult> {
    let psi = |u: f64| kernel_exponent(n, &c, Complex64::new(u, b));
    let top = psi(0.0).re.max(psi(b.abs()).re);
    if top < -740.0 {
        return Ok(QuadResult::new(0.0, 0.0, 2));
    }
    let mut umax = c.t.powf(-1.0 / n as f64).max(b.abs());
    while psi(umax).re > top - 42.0 && umax < 1e8 {
        umax *= 1.5;
    }
    let mut variation = 0.0;
    let mut prev = psi(0.0).im;
    for i in 1..=64 {
        let cur = psi(umax * i as f64 / 64.0).im;
        variation += (cur - prev).abs();
        prev = cur;
    }
    let pts = panel_points(0.0, umax, (variation / PI).ceil() as usize + 4);
    let (v, e, evals) = complex_integral(
        |u: f64| psi(u).exp(),
        &pts,
        Tolerance::new(tol.abs * PI, tol.rel),
    )?;
    Ok(QuadResult::new(v.re / PI, e / PI, evals))
}

fn complex_integral<F: FnMut(f64) -> Complex64>(
    f: F,
    pts: &[f64],
    tol: Tolerance,
) -> Result<(Complex64, f64, usize)> {
    let (v, e, n, ok) = adaptive_complex_raw(f, pts, AdaptiveOptions::new(tol));
    if ok {
        Ok((v, e, n))
    } else {
        Err(Error::NonConvergence {
            what: "rotated ray integral",
            estimate: QuadResult::new(v.re, e, n),
        })
    }
}

fn decaying_ray(n: u32, c: RayCoefficients, tol: Tolerance) -> Result<QuadResult> {
    let nf = n as f64;
    let sigma = phase_sign(n, c.sign);
    let theta = sigma * PI / (2.0 * nf);
    let rot = Complex64::from_polar(1.0, theta);
    let damp = c.x * theta.sin();
    let mut rmax = (45.0 / c.t).powf(1.0 / nf);
    if damp > 0.0 {
        rmax = rmax.min(45.0 / damp);
    }
    let freq = (c.x * theta.cos()).abs();
    let periods = (freq * rmax / (2.0 * PI)).ceil() as usize;
    let pts = panel_points(0.0, rmax, periods.max(4));
    let ix = Complex64::new(0.0, c.x) * rot;
    let t = c.t;
    let f = |r: f64| (ix * r - t * r.powi(n as i32)).exp();
    let (v, e, evals) = complex_integral(f, &pts, Tolerance::new(tol.abs * PI, tol.rel))?;
    Ok(QuadResult::new((rot * v).re / PI, e / PI, evals))
}

fn split_ray(n: u32, c: RayCoefficients, radius: f64, tol: Tolerance) -> Result<QuadResult> {
    let nf = n as f64;
    let sigma = phase_sign(n, c.sign);
    let (x, t) = (c.x, c.t);
    let phi = move |z: Complex64| z * x + z.powi(n as i32) * (sigma * t);
    // Real segment.
    let variation = x.abs() * radius + t * radius.powf(nf);
    let pts = panel_points(0.0, radius, (variation / PI).ceil() as usize + 4);
    let half = Tolerance::new(tol.abs * PI / 2.0, tol.rel);
    let seg = integrate_breakpoints(
        |z: f64| (x * z + sigma * t * z.powi(n as i32)).cos(),
        &pts,
        AdaptiveOptions::new(half),
    )?;
    // Ray.
    let theta = sigma * PI / (2.0 * nf);
    let rot = Complex64::from_polar(1.0, theta);
    let base = Complex64::new(radius, 0.0);
    let im_phi = |r: f64| phi(base + rot * r).im;
    let mut rmax = t.powf(-1.0 / nf) * 0.25;
    while im_phi(rmax) < 50.0 && rmax < 1e6 {
        rmax *= 1.5;
    }
    let i = Complex64::new(0.0, 1.0);
    let fray = |r: f64| (i * phi(base + rot * r)).exp() * rot;
    let dphi = (x + nf * sigma * t * radius.powf(nf - 1.0)).abs();
    let periods = (dphi * theta.cos() * rmax / (2.0 * PI)).ceil() as usize;
    let pts = panel_points(0.0, rmax, periods.max(4));
    let (v, e, evals) = complex_integral(fray, &pts, half)?;
    Ok(QuadResult::new(
        (seg.value + v.re) / PI,
        (seg.error_estimate + e) / PI,
        seg.evaluations + evals,
    ))
}

/// Steepest descent through the stationary point `zs`: the path
/// `phi(h(p)) = phi(zs) + i p^2` is traced by Newton continuation and the
/// Gaussian-weighted integral is summed by the trapezoidal rule.
fn steepest_descent(n: u32, c: RayCoefficients, zs: f64) -> Result<QuadResult> {
    const STEP: f64 = 0.2;
    const STEPS: usize = 33;
    let nf = n as f64;
    let sigma = phase_sign(n, c.sign);
    let (x, t) = (c.x, c.t);
    let ni = n as i32;
    let phi = |z: Complex64| z * x + z.powi(ni) * (sigma * t);
    let dphi = |z: Complex64| z.powi(ni - 1) * (nf * sigma * t) + x;
    let zs_c = Complex64::new(zs, 0.0);
    let phi0 = phi(zs_c);
    let curv = nf * (nf - 1.0) * t * zs.powf(nf - 2.0);
    let h1 = Complex64::from_polar((2.0 / curv).sqrt(), sigma * PI / 4.0);
    let i = Complex64::new(0.0, 1.0);
    let mut fine = Complex64::new(0.0, 0.0);
    let mut coarse = Complex64::new(0.0, 0.0);
    fine += h1;
    coarse += h1;
    for dir in [1.0, -1.0] {
        let mut h = zs_c;
        let mut dh = h1;
        for k in 1..=STEPS {
            let p = dir * STEP * k as f64;
            let target = phi0 + i * (p * p);
            let mut z = h + dh * (dir * STEP);
            let mut converged = false;
            for _ in 0..40 {
                let res = phi(z) - target;
                let zn = z.norm();
                let scale = x.abs() * zn + t * zn.powi(ni) + p * p;
                if res.norm() <= 16.0 * f64::EPSILON * scale {
                    converged = true;
                    break;
                }
                z -= res / dphi(z);
            }
            if !converged {
                return Err(Error::NonConvergence {
                    what: "steepest-descent path continuation",
                    estimate: QuadResult::new(f64::NAN, f64::INFINITY, k),
                });
            }
            h = z;
            dh = i * (2.0 * p) / dphi(h);
            let term = dh * (-p * p).exp();
            fine += term;
            if k % 2 == 0 {
                coarse += term;
            }
        }
    }
    let w = Complex64::from_polar(1.0, phi0.re);
    let value = (w * fine * STEP).re / PI;
    let value_coarse = (w * coarse * (2.0 * STEP)).re / PI;
    let err = (value - value_coarse).abs() + 1e-15 * value.abs().max(1e-16);
    Ok(QuadResult::new(value, err, 2 * STEPS + 1))
}

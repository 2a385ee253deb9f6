//! The pseudoprocess kernel `p_n(x, t)` of `du/dt = k_n d^n u / dx^n`: sign
//! coefficient, root system, kernel values, moments and spatial Laplace
//! transform.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::quadrature::{
    integrate_oscillatory_ray, QuadResult, RayCoefficients, Tolerance, WG, WGK, XGK,
};
use crate::specfun::{cospi, gamma, reciprocal_gamma, sinpi};
use crate::{Error, Result};

/// Order `n`, the sign chosen for odd `n`, and the derived `k_n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquationSpec {
    pub n: u32,
    pub odd_sign: f64,
    pub k_n: f64,
}

impl EquationSpec {
    /// `k_n = (-1)^(q+1)` for `n = 2q`, `k_n = odd_sign` for odd `n`. The odd
    /// sign is recorded even when `n` is even.
    pub fn new(n: u32, odd_sign: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain {
                what: "equation order",
                value: n as f64,
            });
        }
        if odd_sign != 1.0 && odd_sign != -1.0 {
            return Err(Error::Domain {
                what: "odd-order sign",
                value: odd_sign,
            });
        }
        let k_n = if n.is_multiple_of(2) {
            if (n / 2) % 2 == 1 {
                1.0
            } else {
                -1.0
            }
        } else {
            odd_sign
        };
        Ok(EquationSpec { n, odd_sign, k_n })
    }

    pub fn is_even(&self) -> bool {
        self.n.is_multiple_of(2)
    }

    pub(crate) fn ray(&self, x: f64, t: f64) -> RayCoefficients {
        RayCoefficients {
            x,
            t,
            sign: self.k_n,
        }
    }
}

pub fn make_equation_spec(n: u32, odd_sign: f64) -> Result<EquationSpec> {
    EquationSpec::new(n, odd_sign)
}

/// The `n`-th roots of `k_n` in the fixed order `k = 0..n-1`, split by the
/// sign of their real part, and the constants `z_k = -theta_k / n`.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSystem {
    pub roots: Vec<Complex64>,
    /// Indices with `Re theta_k < 0`.
    pub i_set: Vec<usize>,
    /// Indices with `Re theta_k > 0`.
    pub j_set: Vec<usize>,
    pub z: Vec<Complex64>,
}

pub fn root_system(spec: &EquationSpec) -> RootSystem {
    let n = spec.n as usize;
    let shift = if spec.k_n > 0.0 { 0.0 } else { 1.0 };
    let mut roots = Vec::with_capacity(n);
    let mut i_set = Vec::new();
    let mut j_set = Vec::new();
    for k in 0..n {
        // angle / pi = (2k + shift) / n
        let a = (2.0 * k as f64 + shift) / n as f64;
        let th = Complex64::new(cospi(a), sinpi(a));
        if th.re < 0.0 {
            i_set.push(k);
        } else if th.re > 0.0 {
            j_set.push(k);
        }
        roots.push(th);
    }
    let z = roots.iter().map(|th| -th / n as f64).collect();
    RootSystem {
        roots,
        i_set,
        j_set,
        z,
    }
}

/// Value of a (possibly signed) density with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedDensitySample {
    pub x: f64,
    pub value: f64,
    pub error_estimate: f64,
}

/// Kernel `p_n(x, t) = (1/2pi) int exp(i x z + k_n t (i z)^n) dz`.
pub fn kernel_density(spec: &EquationSpec, x: f64, t: f64) -> Result<SignedDensitySample> {
    kernel_density_tol(spec, x, t, Tolerance::default())
}

pub fn kernel_density_tol(
    spec: &EquationSpec,
    x: f64,
    t: f64,
    tol: Tolerance,
) -> Result<SignedDensitySample> {
    let r = integrate_oscillatory_ray(spec.n, spec.ray(x, t), tol)?;
    Ok(SignedDensitySample {
        x,
        value: r.value,
        error_estimate: r.error_estimate,
    })
}

/// `int x^r p_n(x, t) dx = (-1)^r (k_n t)^(r/n) r! / (r/n)!` if `n | r`, else 0.
pub fn kernel_moment(spec: &EquationSpec, r: u32, t: f64) -> f64 {
    if !r.is_multiple_of(spec.n) {
        return 0.0;
    }
    let j = r / spec.n;
    let sign = if r.is_multiple_of(2) { 1.0 } else { -1.0 };
    let kj = if spec.k_n < 0.0 && j % 2 == 1 { -1.0 } else { 1.0 };
    sign * kj * t.powi(j as i32) * gamma(r as f64 + 1.0) * reciprocal_gamma(j as f64 + 1.0)
}

/// Spatial Laplace transform `Phi_n(x, s) = int_0^inf e^{-s t} p_n(x, t) dt`:
///
/// ```text
/// x > 0:  -(1/n) s^(1/n - 1) sum_{k in I} theta_k exp(theta_k s^(1/n) x)
/// x <= 0: +(1/n) s^(1/n - 1) sum_{k in J} theta_k exp(theta_k s^(1/n) x)
/// ```
pub fn kernel_laplace(spec: &EquationSpec, x: f64, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Domain {
            what: "Laplace variable",
            value: s,
        });
    }
    let rs = root_system(spec);
    Ok(kernel_laplace_with(&rs, spec.n, x, s))
}

pub(crate) fn kernel_laplace_with(rs: &RootSystem, n: u32, x: f64, s: f64) -> f64 {
    let nf = n as f64;
    let sn = s.powf(1.0 / nf);
    let (set, sign) = if x > 0.0 {
        (&rs.i_set, -1.0)
    } else {
        (&rs.j_set, 1.0)
    };
    let sum: Complex64 = set
        .iter()
        .map(|&k| rs.roots[k] * (rs.roots[k] * (sn * x)).exp())
        .sum();
    sign * sum.re * sn / (nf * s)
}

/// Half-width `C` (in units of `t^(1/n)`) beyond which an even-order kernel is
/// below `exp(-60)` relative to its peak.
pub fn even_truncation(n: u32) -> f64 {
    let nf = n as f64;
    let cn = (nf - 1.0) / nf * nf.powf(-1.0 / (nf - 1.0)) * (core::f64::consts::PI / (2.0 * (nf - 1.0))).sin();
    (60.0 / cn).powf((nf - 1.0) / nf)
}

/// Quadrature moment `int x^r p_n(x, 1) dx`, scaled to time `t` by
/// `t^(r/n)`.
///
/// Even `n`: truncated domain `|x| <= C`. Odd `n`: the kernel decays only
/// algebraically on its oscillatory side, so the moment is taken as the Abel
/// limit of `int x^r exp(-eps x^2) p_n dx`, extrapolated in `eps`.
pub fn kernel_moment_numeric(spec: &EquationSpec, r: u32, t: f64) -> Result<QuadResult> {
    Ok(kernel_moments_numeric(spec, &[r], t)?[0])
}

/// [`kernel_moment_numeric`] for several orders, sharing kernel evaluations.
pub fn kernel_moments_numeric(spec: &EquationSpec, orders: &[u32], t: f64) -> Result<Vec<QuadResult>> {
    if !(t > 0.0) {
        return Err(Error::Domain {
            what: "moment time",
            value: t,
        });
    }
    let ktol = Tolerance::new(1e-300, 1e-12);
    let nf = spec.n as f64;
    let half = if spec.is_even() {
        even_truncation(spec.n) + 2.0
    } else {
        (45.0 * 2f64.powi(ABEL_LEVELS as i32 - 1) / ABEL_EPS_FINE).sqrt()
    };
    // Local period of the kernel oscillation at the window edge.
    let period = 2.0 * core::f64::consts::PI / (half / nf).powf(1.0 / (nf - 1.0));
    let width = (0.25 * period).min(0.25);
    let panels = (2.0 * half / width).ceil() as usize;
    let grid = SampledKernel::new(panels, half, |x| {
        kernel_density_tol(spec, x, 1.0, ktol).map(|s| s.value)
    })?;
    Ok(orders
        .iter()
        .map(|&r| {
            let scale = t.powf(r as f64 / nf);
            let q = if spec.is_even() {
                grid.integrate(|x| x.powi(r as i32))
            } else {
                grid.abel(r, spec.n)
            };
            q.scale(scale)
        })
        .collect())
}

const ABEL_EPS_COARSE: f64 = 1e-2;
const ABEL_EPS_FINE: f64 = 4e-3;
const ABEL_LEVELS: usize = 4;

/// Kernel values at the Gauss-Kronrod nodes of equal panels on `[-h, h]`.
struct SampledKernel {
    panels: Vec<(f64, f64)>,
    values: Vec<[f64; 21]>,
}

impl SampledKernel {
    fn new<F: Fn(f64) -> Result<f64>>(count: usize, h: f64, p: F) -> Result<Self> {
        let mut panels = Vec::with_capacity(count);
        let mut values = Vec::with_capacity(count);
        for i in 0..count {
            let a = -h + 2.0 * h * i as f64 / count as f64;
            let b = -h + 2.0 * h * (i + 1) as f64 / count as f64;
            let (c, hw) = (0.5 * (a + b), 0.5 * (b - a));
            let mut v = [0.0; 21];
            for (j, slot) in v.iter_mut().enumerate() {
                *slot = p(c + hw * node(j))?;
            }
            panels.push((c, hw));
            values.push(v);
        }
        Ok(SampledKernel { panels, values })
    }

    /// `int w(x) p(x) dx` with the summed Kronrod-Gauss differences as the
    /// error estimate.
    fn integrate<W: Fn(f64) -> f64>(&self, w: W) -> QuadResult {
        let mut total = 0.0;
        let mut err = 0.0;
        for ((c, hw), v) in self.panels.iter().zip(&self.values) {
            let mut k = 0.0;
            let mut g = 0.0;
            for (j, &pv) in v.iter().enumerate() {
                let f = w(c + hw * node(j)) * pv;
                k += kronrod_weight(j) * f;
                g += gauss_weight(j) * f;
            }
            total += k * hw;
            err += ((k - g) * hw).abs();
        }
        QuadResult::new(total, err, 21 * self.panels.len())
    }

    /// Abel-regularised moment with Richardson extrapolation in `eps`.
    fn abel(&self, r: u32, n: u32) -> QuadResult {
        // eps_k = eps0 / 2^k; A(eps) = M + a1 eps + a2 eps^2 + ...
        let eps0 = if r > n { ABEL_EPS_FINE } else { ABEL_EPS_COARSE };
        let mut a = [0.0; ABEL_LEVELS];
        let mut quad_err: f64 = 0.0;
        for (k, ak) in a.iter_mut().enumerate() {
            let eps = eps0 / 2f64.powi(k as i32);
            let q = self.integrate(|x| x.powi(r as i32) * (-eps * x * x).exp());
            quad_err = quad_err.max(q.error_estimate);
            *ak = q.value;
        }
        let mut t = a;
        let mut prev_best = t[ABEL_LEVELS - 2];
        for m in 1..ABEL_LEVELS {
            let f = 2f64.powi(m as i32);
            for k in (m..ABEL_LEVELS).rev() {
                t[k] = (f * t[k] - t[k - 1]) / (f - 1.0);
            }
            if m == ABEL_LEVELS - 2 {
                prev_best = t[ABEL_LEVELS - 1];
            }
        }
        let best = t[ABEL_LEVELS - 1];
        QuadResult::new(best, (best - prev_best).abs() + quad_err, 21 * self.panels.len())
    }
}

/// Node `j` of the 21-point Kronrod rule on `[-1, 1]`: `j < 10` negative,
/// `j = 10` the centre, `j > 10` positive.
fn node(j: usize) -> f64 {
    match j {
        0..=9 => -XGK[j],
        10 => 0.0,
        _ => XGK[20 - j],
    }
}

fn kronrod_weight(j: usize) -> f64 {
    WGK[if j <= 10 { j } else { 20 - j }]
}

fn gauss_weight(j: usize) -> f64 {
    let i = if j <= 10 { j } else { 20 - j };
    if i % 2 == 1 {
        WG[i / 2]
    } else {
        0.0
    }
}

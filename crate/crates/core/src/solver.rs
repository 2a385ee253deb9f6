//! Fundamental solution `u_alpha(x, t)` of `D_t^alpha u = k_n d^n u / dx^n`,
//! `u(x, 0) = delta(x)`, by subordination of the kernel to the random time
//! and by Fourier inversion of the Mittag-Leffler characteristic function.
//!
//! Both routes work at `t = 1` and use the self-similarity
//! `u(x, t) = t^(-alpha/n) U(x t^(-alpha/n))`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use crate::kernel::{
    even_truncation, kernel_density_tol, kernel_laplace, EquationSpec, SignedDensitySample,
};
use crate::quadrature::{
    integrate_adaptive_with, integrate_breakpoints, integrate_breakpoints_complex,
    stationary_point, AdaptiveOptions, QuadResult, Tolerance, WG, WGK, XGK,
};
use crate::specfun::{gamma, m_wright, mittag_leffler, reciprocal_gamma, MLParams, StableSpectrallyNegative};
use crate::timechange::{
    support_end, time_density_stable, time_density_wright, ProductDensity, TimeRoute,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Subordination,
    FourierMl,
    Auto,
}

/// Representation actually used for one grid point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RouteUsed {
    /// `alpha = 1`: the kernel itself.
    Degenerate,
    Subordination,
    FourierMl,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolutionRequest {
    pub spec: EquationSpec,
    pub alpha: f64,
    pub t: f64,
    pub x_grid: Vec<f64>,
    pub route: Route,
}

impl SolutionRequest {
    pub fn new(
        spec: EquationSpec,
        alpha: f64,
        t: f64,
        x_grid: Vec<f64>,
        route: Route,
    ) -> Result<Self> {
        check_alpha_t(alpha, t)?;
        if x_grid.is_empty() {
            return Err(Error::Domain {
                what: "empty x grid",
                value: 0.0,
            });
        }
        for w in x_grid.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Domain {
                    what: "x grid must be strictly increasing",
                    value: w[1],
                });
            }
        }
        if let Some(x) = x_grid.iter().find(|x| !x.is_finite()) {
            return Err(Error::Domain {
                what: "x grid value",
                value: *x,
            });
        }
        Ok(SolutionRequest {
            spec,
            alpha,
            t,
            x_grid,
            route,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolutionField {
    pub request: SolutionRequest,
    pub values: Vec<SignedDensitySample>,
    pub routes: Vec<RouteUsed>,
}

fn check_alpha_t(alpha: f64, t: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain {
            what: "fractional order",
            value: alpha,
        });
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain {
            what: "time",
            value: t,
        });
    }
    Ok(())
}

/// Largest `|x| t^(-alpha/n)` served by the Fourier route before falling back
/// to subordination.
pub const FOURIER_XI_CAP: f64 = 64.0;
/// Fourier window used by the quadrature moments.
const MOMENT_XI_WINDOW: f64 = 128.0;
const MOMENT_PANEL: f64 = 0.5;
const MOMENT_PANEL_TOL: f64 = 1e-12;
/// `|k_n (-i beta)^n| t^alpha` where the Mittag-Leffler asymptotic tail takes
/// over.
const TAIL_MODULUS: f64 = 1e3;
const TAIL_TERMS: usize = 6;
/// Half-periods integrated before averaging the oscillatory subordination tail.
const TAIL_PANELS: usize = 48;
const AVERAGING_LEVELS: usize = 14;

fn kernel_tol() -> Tolerance {
    Tolerance::new(1e-15, 1e-12)
}

/// Density of the random time at `t = 1`.
#[derive(Clone, Debug)]
enum TimeEval {
    Wright(f64),
    Stable { alpha: f64, guard: f64 },
    Product(ProductDensity),
}

impl TimeEval {
    fn new(alpha: f64, route: Option<TimeRoute>) -> Result<Self> {
        let route = route.unwrap_or(if alpha >= 0.5 {
            TimeRoute::Stable
        } else {
            TimeRoute::Wright
        });
        Ok(match route {
            TimeRoute::Wright | TimeRoute::FracIntegral => TimeEval::Wright(alpha),
            TimeRoute::Stable => {
                let s = StableSpectrallyNegative::new(alpha, 1.0)?;
                TimeEval::Stable {
                    alpha,
                    guard: s.series_guard(),
                }
            }
            TimeRoute::Product(m) => TimeEval::Product(ProductDensity::new(m, 1.0)?),
            TimeRoute::Degenerate => {
                return Err(Error::Unsupported {
                    what: "degenerate time route in subordination",
                    value: alpha,
                })
            }
        })
    }

    fn density(&self, u: f64) -> Result<f64> {
        match self {
            TimeEval::Wright(a) => time_density_wright(*a, u, 1.0),
            TimeEval::Stable { alpha, guard } => {
                if u < *guard {
                    time_density_stable(*alpha, u, 1.0)
                } else {
                    time_density_wright(*alpha, u, 1.0)
                }
            }
            TimeEval::Product(p) => p.density(u),
        }
    }
}

fn nan_on_err(r: Result<f64>) -> f64 {
    r.unwrap_or(f64::NAN)
}

fn finite_or_fail(q: QuadResult, what: &'static str) -> Result<QuadResult> {
    if q.value.is_finite() && q.error_estimate.is_finite() {
        Ok(q)
    } else {
        Err(Error::NonConvergence { what, estimate: q })
    }
}

/// `U(xi) = int_0^inf p_n(xi, u) v(u, 1) du` with `u = (xi / y)^n`:
/// `U = int (n u / xi) v(u) p_n(y, 1) dy`.
fn subordinate(spec: &EquationSpec, alpha: f64, xi: f64, time: &TimeEval) -> Result<QuadResult> {
    let n = spec.n;
    let nf = n as f64;
    let ktol = kernel_tol();
    if xi.abs() < 1e-12 {
        // E T^(-1/n) p_n(0, 1)
        let p0 = kernel_density_tol(spec, 0.0, 1.0, ktol)?;
        let m = gamma(1.0 - 1.0 / nf) * reciprocal_gamma(1.0 - alpha / nf);
        return Ok(QuadResult::new(p0.value * m, p0.error_estimate * m, 1));
    }
    let (spec2, x) = if xi > 0.0 {
        (*spec, xi)
    } else if spec.is_even() {
        (*spec, -xi)
    } else {
        (EquationSpec::new(n, -spec.odd_sign)?, -xi)
    };
    let support = support_end(alpha, 1.0);
    let y_min = x * support.powf(-1.0 / nf);
    let h = |y: f64| -> f64 {
        let u = (x / y).powf(nf);
        let v = nan_on_err(time.density(u));
        if v == 0.0 {
            return 0.0;
        }
        let g = kernel_density_tol(&spec2, y, 1.0, ktol)
            .map(|s| s.value)
            .unwrap_or(f64::NAN);
        nf * u / x * v * g
    };
    let opts = AdaptiveOptions::new(Tolerance::new(1e-14, 1e-11));
    let geometric = |from: f64, to: f64| {
        let mut pts = vec![from];
        let mut y = from * 2.0;
        while y < to {
            pts.push(y);
            y *= 2.0;
        }
        pts.push(to);
        pts
    };
    let oscillatory = !spec2.is_even() && stationary_point(n, spec2_ray(&spec2, x)).is_some();
    if !oscillatory {
        let c = even_truncation(n) + 2.0;
        if y_min >= c {
            return Ok(QuadResult::new(0.0, 0.0, 0));
        }
        let q = integrate_breakpoints(h, &geometric(y_min, c), opts)?;
        return finite_or_fail(q, "subordination integral");
    }
    // Oscillatory side of an odd-order kernel: p_n(y, 1) ~ A y^-mu cos(Phi(y) + c)
    // with Phi(y) = c_o y^(n/(n-1)).
    let c_o = (nf - 1.0) / nf * nf.powf(-1.0 / (nf - 1.0));
    let y_of = |phi: f64| (phi / c_o).powf((nf - 1.0) / nf);
    let y1 = y_of(6.0 * PI).max(4.0 * x).max(2.0 * y_min);
    let body = integrate_breakpoints(h, &geometric(y_min, y1), opts)?;
    let phi1 = c_o * y1.powf(nf / (nf - 1.0));
    let mut partial = Vec::with_capacity(TAIL_PANELS + 1);
    let mut s = 0.0;
    let mut evals = body.evaluations;
    let mut lo = y1;
    partial.push(0.0);
    for k in 1..=TAIL_PANELS {
        let hi = y_of(phi1 + k as f64 * PI);
        let q = integrate_adaptive_with(h, lo, hi, AdaptiveOptions::new(Tolerance::new(1e-16, 1e-12)))?;
        evals += q.evaluations;
        s += q.value;
        partial.push(s);
        lo = hi;
    }
    let (tail, tail_err) = repeated_average(&partial[partial.len() - AVERAGING_LEVELS - 1..]);
    let q = QuadResult::new(body.value + tail, body.error_estimate + tail_err, evals);
    finite_or_fail(q, "oscillatory subordination tail")
}

fn spec2_ray(spec: &EquationSpec, x: f64) -> crate::quadrature::RayCoefficients {
    crate::quadrature::RayCoefficients {
        x,
        t: 1.0,
        sign: spec.k_n,
    }
}

/// Limit of alternating partial sums by repeated pairwise averaging; the
/// error estimate is the change over the last level.
fn repeated_average(s: &[f64]) -> (f64, f64) {
    let mut cur: Vec<f64> = s.to_vec();
    let mut prev = cur[cur.len() - 1];
    while cur.len() > 1 {
        prev = cur[cur.len() - 1];
        cur = cur.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    (cur[0], (cur[0] - prev).abs())
}

/// `U(xi) = (1/pi) Re int_0^inf e^{-i xi beta} E_alpha(k_n (-i beta)^n) d beta`
/// tabulated on Gauss-Kronrod panels of `[0, B]`, plus the asymptotic tail
/// `E_alpha(w) ~ -sum_k w^-k / Gamma(1 - alpha k)` on `[B, inf)`.
#[derive(Clone, Debug)]
struct FourierTable {
    nodes: Vec<f64>,
    psi: Vec<Complex64>,
    wk: Vec<f64>,
    wg: Vec<f64>,
    b: f64,
    coeffs: [Complex64; TAIL_TERMS],
    n: u32,
    degraded: bool,
    psi_err: f64,
}

impl FourierTable {
    fn new(spec: &EquationSpec, alpha: f64, xi_max: f64) -> Result<Self> {
        let n = spec.n;
        let nf = n as f64;
        let p = MLParams::one(alpha)?;
        let mut modulus = TAIL_MODULUS;
        if !spec.is_even() && alpha > 0.5 {
            // The exponential part exp(w^(1/alpha)) must be negligible on the tail.
            let c = (PI / (2.0 * alpha)).cos().abs();
            modulus = modulus.max((45.0 / c).powf(alpha));
        }
        let b = modulus.powf(1.0 / nf);
        let mi = Complex64::new(0.0, -1.0);
        let base = mi.powu(n) * spec.k_n;
        let mut coeffs = [Complex64::new(0.0, 0.0); TAIL_TERMS];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let kk = k as i32 + 1;
            *c = -base.powi(-kk) * reciprocal_gamma(1.0 - alpha * kk as f64);
        }
        let mut degraded = false;
        let mut psi_err = 0.0;
        let mut psi_at = |beta: f64| -> Result<Complex64> {
            let w = base * beta.powi(n as i32);
            let v = mittag_leffler(w, p)?;
            degraded |= v.degraded;
            psi_err += v.error_estimate;
            Ok(v.value)
        };
        let xm = xi_max.max(1.0);
        let width = (2.5 / xm).min(0.5);
        let count = (b / width).ceil() as usize;
        let mut stack: Vec<(f64, f64)> = (0..count)
            .rev()
            .map(|i| (b * i as f64 / count as f64, b * (i + 1) as f64 / count as f64))
            .collect();
        let probes = [0.0, 0.5 * xm, xm];
        let mut table = FourierTable {
            nodes: Vec::new(),
            psi: Vec::new(),
            wk: Vec::new(),
            wg: Vec::new(),
            b,
            coeffs,
            n,
            degraded: false,
            psi_err: 0.0,
        };
        while let Some((lo, hi)) = stack.pop() {
            let c = 0.5 * (lo + hi);
            let hw = 0.5 * (hi - lo);
            let mut nodes = [0.0; 21];
            let mut wk = [0.0; 21];
            let mut wg = [0.0; 21];
            for i in 0..10 {
                nodes[2 * i] = c - hw * XGK[i];
                nodes[2 * i + 1] = c + hw * XGK[i];
                wk[2 * i] = WGK[i] * hw;
                wk[2 * i + 1] = WGK[i] * hw;
                if i % 2 == 1 {
                    wg[2 * i] = WG[i / 2] * hw;
                    wg[2 * i + 1] = WG[i / 2] * hw;
                }
            }
            nodes[20] = c;
            wk[20] = WGK[10] * hw;
            let mut psi = [Complex64::new(0.0, 0.0); 21];
            for (v, &z) in psi.iter_mut().zip(&nodes) {
                *v = psi_at(z)?;
            }
            let worst = probes
                .iter()
                .map(|&x| {
                    let (mut k, mut g) = (0.0, 0.0);
                    for i in 0..21 {
                        let f = (Complex64::new(0.0, -x * nodes[i]).exp() * psi[i]).re;
                        k += wk[i] * f;
                        g += wg[i] * f;
                    }
                    (k - g).abs()
                })
                .fold(0.0, f64::max);
            if worst > 1e-14 && hw > 1e-7 {
                stack.push((c, hi));
                stack.push((lo, c));
                continue;
            }
            table.nodes.extend_from_slice(&nodes);
            table.psi.extend_from_slice(&psi);
            table.wk.extend_from_slice(&wk);
            table.wg.extend_from_slice(&wg);
        }
        table.degraded = degraded;
        table.psi_err = psi_err;
        Ok(table)
    }

    fn tail(&self, xi: f64) -> Result<(f64, f64)> {
        let nf = self.n as f64;
        let b = self.b;
        if xi == 0.0 {
            let mut s = Complex64::new(0.0, 0.0);
            for (k, c) in self.coeffs.iter().enumerate() {
                let p = nf * (k + 1) as f64;
                s += c * b.powf(1.0 - p) / (p - 1.0);
            }
            return Ok((s.re, 1e-16 * s.norm()));
        }
        // beta = B - i sgn(xi) s: e^{-i xi beta} = e^{-i xi B} e^{-|xi| s}.
        let sg = xi.signum();
        let ax = xi.abs();
        let scale = (1.0 / ax).min(b);
        let phase = Complex64::new(0.0, -xi * b).exp() * Complex64::new(0.0, -sg);
        let f = |tau: f64| -> Complex64 {
            let om = 1.0 - tau;
            let s = scale * tau / om;
            let jac = scale / (om * om);
            let decay = (-ax * s).exp();
            if decay == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let beta = Complex64::new(b, -sg * s);
            let inv = beta.powf(-nf);
            let mut acc = Complex64::new(0.0, 0.0);
            let mut pw = inv;
            for c in &self.coeffs {
                acc += c * pw;
                pw *= inv;
            }
            phase * acc * decay * jac
        };
        let (v, err, _) = integrate_breakpoints_complex(
            f,
            &[0.0, 0.5, 0.9, 0.99, 0.999, 1.0],
            AdaptiveOptions::new(Tolerance::new(1e-16, 1e-12)),
        )?;
        Ok((v.re, err))
    }

    fn eval(&self, xi: f64) -> Result<QuadResult> {
        let (mut k, mut g) = (0.0, 0.0);
        for i in 0..self.nodes.len() {
            let f = (Complex64::new(0.0, -xi * self.nodes[i]).exp() * self.psi[i]).re;
            k += self.wk[i] * f;
            g += self.wg[i] * f;
        }
        // Per-panel Gauss-Kronrod differences are tiny by construction; the
        // global difference bounds them from above up to cancellation.
        let body_err = (k - g).abs().min(1e-12 + 1e-3 * (k - g).abs());
        let (tail, tail_err) = self.tail(xi)?;
        let mut err = (body_err + tail_err + self.psi_err * self.b / self.nodes.len().max(1) as f64) / PI;
        if self.degraded {
            err = err.max(1e-8);
        }
        let q = QuadResult::new((k + tail) / PI, err, self.nodes.len());
        finite_or_fail(q, "Fourier inversion")
    }
}

/// Evaluator of `u_alpha(x, t)` for one `(spec, alpha)` pair; expensive
/// per-pair set-up (Fourier table, time-density staging) is done once.
#[derive(Clone, Debug)]
pub struct SolutionEvaluator {
    spec: EquationSpec,
    alpha: f64,
    route: Route,
    xi_max: f64,
    fourier: Option<FourierTable>,
    time: Option<TimeEval>,
}

impl SolutionEvaluator {
    /// `xi_max` bounds `|x| t^(-alpha/n)` for the Fourier table; points beyond
    /// it (or beyond [`FOURIER_XI_CAP`]) are served by subordination.
    pub fn new(spec: &EquationSpec, alpha: f64, route: Route, xi_max: f64) -> Result<Self> {
        Self::with_time_route(spec, alpha, route, xi_max, None)
    }

    /// As [`SolutionEvaluator::new`] with an explicit time-density route for
    /// subordination (`Product(m)` requires `alpha = 1/m`).
    pub fn with_time_route(
        spec: &EquationSpec,
        alpha: f64,
        route: Route,
        xi_max: f64,
        time_route: Option<TimeRoute>,
    ) -> Result<Self> {
        Self::build(spec, alpha, route, xi_max.abs().min(FOURIER_XI_CAP), time_route)
    }

    fn build(
        spec: &EquationSpec,
        alpha: f64,
        route: Route,
        xi_max: f64,
        time_route: Option<TimeRoute>,
    ) -> Result<Self> {
        check_alpha_t(alpha, 1.0)?;
        let mut ev = SolutionEvaluator {
            spec: *spec,
            alpha,
            route,
            xi_max,
            fourier: None,
            time: None,
        };
        if alpha == 1.0 {
            return Ok(ev);
        }
        if let Some(TimeRoute::Product(m)) = time_route {
            crate::timechange::TimeChangeLaw::new(alpha, 1.0, TimeRoute::Product(m))?;
        }
        ev.time = Some(TimeEval::new(alpha, time_route)?);
        if ev.preferred() == RouteUsed::FourierMl {
            ev.fourier = Some(FourierTable::new(spec, alpha, xi_max)?);
        }
        Ok(ev)
    }

    fn preferred(&self) -> RouteUsed {
        if self.alpha == 1.0 {
            return RouteUsed::Degenerate;
        }
        match self.route {
            Route::Subordination => RouteUsed::Subordination,
            Route::FourierMl => RouteUsed::FourierMl,
            Route::Auto => {
                if self.spec.is_even() || self.alpha >= 0.5 {
                    RouteUsed::FourierMl
                } else {
                    RouteUsed::Subordination
                }
            }
        }
    }

    /// `U(xi) = u(xi, 1)`.
    pub fn eval_scaled(&self, xi: f64) -> Result<(QuadResult, RouteUsed)> {
        if !xi.is_finite() {
            return Err(Error::Domain {
                what: "solution position",
                value: xi,
            });
        }
        match self.preferred() {
            RouteUsed::Degenerate => {
                let s = kernel_density_tol(&self.spec, xi, 1.0, kernel_tol())?;
                Ok((QuadResult::new(s.value, s.error_estimate, 1), RouteUsed::Degenerate))
            }
            RouteUsed::FourierMl if xi.abs() <= self.xi_max => {
                let table = self.fourier.as_ref().expect("table built for the Fourier route");
                Ok((table.eval(xi)?, RouteUsed::FourierMl))
            }
            _ => {
                let time = self.time.as_ref().expect("time density for subordination");
                Ok((subordinate(&self.spec, self.alpha, xi, time)?, RouteUsed::Subordination))
            }
        }
    }

    pub fn eval(&self, x: f64, t: f64) -> Result<(SignedDensitySample, RouteUsed)> {
        check_alpha_t(self.alpha, t)?;
        let s = t.powf(-self.alpha / self.spec.n as f64);
        let (q, r) = self.eval_scaled(x * s)?;
        Ok((
            SignedDensitySample {
                x,
                value: q.value * s,
                error_estimate: q.error_estimate * s,
            },
            r,
        ))
    }
}

fn run(req: &SolutionRequest, route: Route) -> Result<SolutionField> {
    let s = req.t.powf(-req.alpha / req.spec.n as f64);
    let xi_max = req.x_grid.iter().fold(0.0f64, |m, x| m.max(x.abs())) * s;
    let ev = SolutionEvaluator::new(&req.spec, req.alpha, route, xi_max)?;
    let mut values = Vec::with_capacity(req.x_grid.len());
    let mut routes = Vec::with_capacity(req.x_grid.len());
    for &x in &req.x_grid {
        let (v, r) = ev.eval(x, req.t)?;
        values.push(v);
        routes.push(r);
    }
    Ok(SolutionField {
        request: req.clone(),
        values,
        routes,
    })
}

/// Solution by the route in the request.
pub fn solve(req: &SolutionRequest) -> Result<SolutionField> {
    run(req, req.route)
}

/// `u_alpha(x, t) = int_0^inf p_n(x, u) v(u, t) du`; at `alpha = 1` the kernel.
pub fn solve_subordination(req: &SolutionRequest) -> Result<SolutionField> {
    run(req, Route::Subordination)
}

/// `u_alpha(x, t) = (1/2pi) int e^{-i x beta} E_alpha(k_n (-i beta)^n t^alpha) d beta`;
/// at `alpha = 1` the kernel.
pub fn solve_fourier_ml(req: &SolutionRequest) -> Result<SolutionField> {
    run(req, Route::FourierMl)
}

/// Single point by the given route.
pub fn solve_point(
    spec: &EquationSpec,
    alpha: f64,
    t: f64,
    x: f64,
    route: Route,
) -> Result<(SignedDensitySample, RouteUsed)> {
    check_alpha_t(alpha, t)?;
    let xi = x.abs() * t.powf(-alpha / spec.n as f64);
    SolutionEvaluator::new(spec, alpha, route, xi)?.eval(x, t)
}

/// Characteristic function `E_alpha(k_n (-i beta)^n t^alpha)`.
pub fn solution_char_fn(spec: &EquationSpec, alpha: f64, beta: f64, t: f64) -> Result<Complex64> {
    check_alpha_t(alpha, t)?;
    let w = Complex64::new(0.0, -beta).powu(spec.n) * (spec.k_n * t.powf(alpha));
    Ok(mittag_leffler(w, MLParams::one(alpha)?)?.value)
}

/// `int x^r u_alpha(x, t) dx`: for `r = n j`,
/// `(-1)^(n j) k_n^j t^(alpha j) (n j)! / Gamma(alpha j + 1)`, otherwise 0.
pub fn solution_moment(spec: &EquationSpec, alpha: f64, r: u32, t: f64) -> f64 {
    if !r.is_multiple_of(spec.n) {
        return 0.0;
    }
    let j = r / spec.n;
    let sign = if r.is_multiple_of(2) { 1.0 } else { -1.0 };
    let kj = if spec.k_n < 0.0 && j % 2 == 1 { -1.0 } else { 1.0 };
    sign * kj * t.powf(alpha * j as f64) * gamma(r as f64 + 1.0) * reciprocal_gamma(alpha * j as f64 + 1.0)
}

/// Quadrature moments `int x^r u_alpha(x, t) dx` for each order in `orders`.
///
/// Each end of the window is pushed out until `|x|^(r_max + 1) |u|` is
/// negligible there. All orders share one composite Gauss-Kronrod grid whose
/// panels are bisected where any order is not resolved; `u` comes from the
/// Fourier route inside `|xi| <= 128` when that route applies, and from
/// subordination otherwise.
pub fn solution_moments_numeric(
    spec: &EquationSpec,
    alpha: f64,
    t: f64,
    orders: &[u32],
) -> Result<Vec<QuadResult>> {
    check_alpha_t(alpha, t)?;
    let ev = SolutionEvaluator::build(spec, alpha, Route::Auto, MOMENT_XI_WINDOW, None)?;
    let u = |xi: f64| ev.eval_scaled(xi).map(|(q, _)| q);
    let r_max = orders.iter().copied().max().unwrap_or(0) as i32;
    let reach = |sign: f64| -> Result<f64> {
        let mut l = 8.0;
        while l < 512.0 {
            let q = u(sign * l)?;
            if (q.value.abs() - q.error_estimate).max(0.0) * l.powi(r_max + 1) < 1e-12 {
                break;
            }
            l *= 2.0;
        }
        Ok(l)
    };
    let (lo, hi) = (-reach(-1.0)?, reach(1.0)?);
    let count = ((hi - lo) / MOMENT_PANEL) as usize;
    let mut stack: Vec<(f64, f64)> = (0..count)
        .rev()
        .map(|i| (lo + MOMENT_PANEL * i as f64, lo + MOMENT_PANEL * (i + 1) as f64))
        .collect();
    let k = orders.len();
    let (mut value, mut err) = (vec![0.0; k], vec![0.0; k]);
    let mut evals = 0;
    while let Some((a, b)) = stack.pop() {
        let c = 0.5 * (a + b);
        let hw = 0.5 * (b - a);
        let mut nodes = [(c, WGK[10], 0.0); 21];
        for i in 0..10 {
            let wg = if i % 2 == 1 { WG[i / 2] } else { 0.0 };
            nodes[2 * i] = (c - hw * XGK[i], WGK[i], wg);
            nodes[2 * i + 1] = (c + hw * XGK[i], WGK[i], wg);
        }
        let mut f = [QuadResult::new(0.0, 0.0, 0); 21];
        for (v, &(x, _, _)) in f.iter_mut().zip(&nodes) {
            *v = u(x)?;
        }
        evals += 21;
        let mut panel = vec![(0.0, 0.0, 0.0, 0.0); k];
        for (p, &r) in panel.iter_mut().zip(orders) {
            for (q, &(x, wk, wg)) in f.iter().zip(&nodes) {
                let xr = x.powi(r as i32);
                p.0 += wk * hw * xr * q.value;
                p.1 += wg * hw * xr * q.value;
                p.2 += wk * hw * xr.abs() * q.error_estimate;
                p.3 += wk * hw * (xr * q.value).abs();
            }
        }
        let rough = panel.iter().any(|&(kr, gr, noise, mass)| {
            (kr - gr).abs() > (MOMENT_PANEL_TOL * (1.0 + mass)).max(10.0 * noise)
        });
        if rough && hw > 1e-3 {
            stack.push((c, b));
            stack.push((a, c));
            continue;
        }
        for i in 0..k {
            value[i] += panel[i].0;
            err[i] += (panel[i].0 - panel[i].1).abs() + panel[i].2;
        }
    }
    orders
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let scale = t.powf(alpha * r as f64 / spec.n as f64);
            finite_or_fail(QuadResult::new(value[i], err[i], evals), "solution moment").map(|q| q.scale(scale))
        })
        .collect()
}

/// `|int_0^inf e^{-s t} u(x, t) dt - s^(alpha - 1) Phi_n(x, s^alpha)|` with the
/// solution from the automatic route.
pub fn laplace_relation_check(spec: &EquationSpec, alpha: f64, x: f64, s: f64) -> Result<f64> {
    check_alpha_t(alpha, 1.0)?;
    if !(s > 0.0) {
        return Err(Error::Domain {
            what: "Laplace variable",
            value: s,
        });
    }
    let nf = spec.n as f64;
    const XI_WINDOW: f64 = 40.0;
    let ev = SolutionEvaluator::new(spec, alpha, Route::Auto, XI_WINDOW)?;
    // u(x, t) is negligible once |x| t^(-alpha/n) exceeds the window.
    let t_lo = if x == 0.0 {
        1e-16 / s
    } else {
        (x.abs() / XI_WINDOW).powf(nf / alpha).max(1e-16 / s)
    };
    let t_hi = 50.0 / s;
    let (v0, v1) = (t_lo.ln(), t_hi.ln());
    let steps = (v1 - v0).ceil() as usize;
    let pts: Vec<f64> = (0..=steps).map(|i| v0 + (v1 - v0) * i as f64 / steps as f64).collect();
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let q = integrate_breakpoints(
        |v| {
            let t = v.exp();
            match ev.eval(x, t) {
                Ok((u, _)) => u.value * (-s * t).exp() * t,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            }
        },
        &pts,
        AdaptiveOptions::new(Tolerance::new(1e-11, 1e-9)),
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let exact = s.powf(alpha - 1.0) * kernel_laplace(spec, x, s.powf(alpha))?;
    Ok((q.value - exact).abs())
}

/// Uniform time grid `t_i = i T / N`, `i = 0..N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub t_max: f64,
    pub intervals: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, intervals: usize) -> Result<Self> {
        if !(t_max > 0.0) || intervals < 64 {
            return Err(Error::Domain {
                what: "Caputo time grid (T > 0, at least 64 intervals)",
                value: intervals as f64,
            });
        }
        Ok(TimeGrid { t_max, intervals })
    }

    pub fn step(&self) -> f64 {
        self.t_max / self.intervals as f64
    }
}

/// Second-order central stencil for `d^n/dx^n` (offsets `-p..=p`, unit step).
fn central_stencil(n: u32) -> Vec<f64> {
    let conv = |a: &[f64], b: &[f64]| {
        let mut out = vec![0.0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    };
    let mut s = vec![1.0];
    for _ in 0..n / 2 {
        s = conv(&s, &[1.0, -2.0, 1.0]);
    }
    if n % 2 == 1 {
        s = conv(&s, &[-0.5, 0.0, 0.5]);
    }
    s
}

/// Residual `max_m |D_t^alpha u(x, t_m) - k_n D_x^n u(x, t_m)|` over the
/// nodes `t_m > 0` of the grid for a solution given as a closure.
///
/// `D_t^alpha`: L1 scheme with `b_j = (j + 1)^(1 - alpha) - j^(1 - alpha)` and
/// `u(x, 0) = 0` for `x != 0`. `D_x^n`: second-order central differences.
pub fn caputo_residual_with<F: FnMut(f64, f64) -> Result<f64>>(
    spec: &EquationSpec,
    alpha: f64,
    x: f64,
    grid: TimeGrid,
    h_x: f64,
    u: F,
) -> Result<f64> {
    let r = caputo_residual_profile_with(spec, alpha, x, grid, h_x, u)?;
    Ok(r.into_iter().fold(0.0, f64::max))
}

/// Residuals at the nodes `t_1, ..., t_N` behind [`caputo_residual_with`].
pub fn caputo_residual_profile_with<F: FnMut(f64, f64) -> Result<f64>>(
    spec: &EquationSpec,
    alpha: f64,
    x: f64,
    grid: TimeGrid,
    h_x: f64,
    mut u: F,
) -> Result<Vec<f64>> {
    check_alpha_t(alpha, 1.0)?;
    let stencil = central_stencil(spec.n);
    let p = (stencil.len() / 2) as f64;
    if !(h_x > 0.0) || h_x.powi(spec.n as i32) < 1e-9 * 2f64.powi(spec.n as i32) {
        return Err(Error::OutOfRange {
            what: "finite-difference spacing (stencil underflow)",
            value: h_x,
            limit: 2.0 * (1e-9f64).powf(1.0 / spec.n as f64),
        });
    }
    if x.abs() <= p * h_x {
        return Err(Error::Domain {
            what: "Caputo check position must keep the stencil off x = 0",
            value: x,
        });
    }
    let nt = grid.intervals;
    let tau = grid.step();
    let mut center = vec![0.0; nt + 1];
    let mut dxn = vec![0.0; nt + 1];
    for m in 1..=nt {
        let t = tau * m as f64;
        let mut d = 0.0;
        for (i, c) in stencil.iter().enumerate() {
            let xi = x + (i as f64 - p) * h_x;
            let v = u(xi, t)?;
            if i as f64 == p {
                center[m] = v;
            }
            d += c * v;
        }
        dxn[m] = d / h_x.powi(spec.n as i32);
    }
    let b: Vec<f64> = (0..nt)
        .map(|j| match j {
            0 => 1.0,
            _ => (j as f64 + 1.0).powf(1.0 - alpha) - (j as f64).powf(1.0 - alpha),
        })
        .collect();
    let c = tau.powf(-alpha) * reciprocal_gamma(2.0 - alpha);
    Ok((1..=nt)
        .map(|m| {
            let acc: f64 = (0..m).map(|j| b[j] * (center[m - j] - center[m - j - 1])).sum();
            (c * acc - spec.k_n * dxn[m]).abs()
        })
        .collect())
}

/// [`caputo_residual_with`] on the solution computed by `route`.
pub fn caputo_residual(
    spec: &EquationSpec,
    alpha: f64,
    x: f64,
    grid: TimeGrid,
    h_x: f64,
    route: Route,
) -> Result<f64> {
    let p = (spec.n / 2 + 1) as f64;
    let tau = grid.step();
    let xi_max = (x.abs() + p * h_x) * tau.powf(-alpha / spec.n as f64);
    let ev = SolutionEvaluator::new(spec, alpha, route, xi_max)?;
    caputo_residual_with(spec, alpha, x, grid, h_x, |x, t| ev.eval(x, t).map(|(s, _)| s.value))
}

/// `n = 2` closed form `(1 / (2 t^(alpha/2))) W(-|x| / t^(alpha/2); -alpha/2, 1 - alpha/2)`.
pub fn heat_closed_form(alpha: f64, x: f64, t: f64) -> Result<f64> {
    check_alpha_t(alpha, t)?;
    let s = t.powf(alpha / 2.0);
    if alpha == 1.0 {
        return Ok((-x * x / (4.0 * t)).exp() / (4.0 * PI * t).sqrt());
    }
    Ok(m_wright(x.abs() / s, alpha / 2.0)? / (2.0 * s))
}

/// `int_0^inf w^(-1/2) exp(-x^2 / (4w) - w y^alpha / t^alpha) dw` by quadrature
/// (substitution `w = v^2`).
pub fn gaussian_subordination_integral(x: f64, y: f64, t: f64, alpha: f64) -> Result<QuadResult> {
    check_alpha_t(alpha, t)?;
    if !(y > 0.0) {
        return Err(Error::Domain {
            what: "Laplace variable y",
            value: y,
        });
    }
    let a = (y / t).powf(alpha);
    let v_peak = (x * x / (4.0 * a)).powf(0.25);
    let width = 1.0 / a.sqrt();
    let v_end = v_peak + 12.0 * width;
    let mut pts = vec![0.0];
    for c in [0.25, 0.5, 0.75] {
        if v_peak > 0.0 {
            pts.push(c * v_peak);
        }
    }
    let mut v = v_peak;
    while v < v_end {
        if v > *pts.last().unwrap() {
            pts.push(v);
        }
        v += width;
    }
    pts.push(v_end);
    integrate_breakpoints(
        |v: f64| 2.0 * (-x * x / (4.0 * v * v) - a * v * v).exp(),
        &pts,
        AdaptiveOptions::new(Tolerance::new(1e-16, 1e-13)),
    )
}

/// `sqrt(pi) t^(alpha/2) y^(-alpha/2) exp(-|x| y^(alpha/2) / t^(alpha/2))`.
pub fn gaussian_subordination_closed_form(x: f64, y: f64, t: f64, alpha: f64) -> f64 {
    let r = (y / t).powf(alpha / 2.0);
    PI.sqrt() / r * (-x.abs() * r).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::make_equation_spec;
    use proptest::prelude::*;

    fn spec(n: u32) -> EquationSpec {
        make_equation_spec(n, 1.0).unwrap()
    }

    fn point(n: u32, alpha: f64, x: f64, route: Route) -> f64 {
        solve_point(&spec(n), alpha, 1.0, x, route).unwrap().0.value
    }

    #[test]
    fn degenerate_route_is_the_kernel() {
        for n in 2..=5 {
            let s = spec(n);
            let k = kernel_density_tol(&s, 0.7, 2.0, kernel_tol()).unwrap().value;
            for r in [Route::Subordination, Route::FourierMl, Route::Auto] {
                let (v, used) = solve_point(&s, 1.0, 2.0, 0.7, r).unwrap();
                assert_eq!(used, RouteUsed::Degenerate);
                assert!((v.value - k).abs() <= 1e-14 * k.abs());
            }
        }
        let v = point(2, 1.0, 0.0, Route::FourierMl);
        assert!((v - 0.282_094_791_773_878_1).abs() < 1e-12);
    }

    #[test]
    fn heat_spot_value() {
        let exact = 0.5 * reciprocal_gamma(0.75);
        assert!((exact - 0.408_024_469_549_132).abs() < 1e-14);
        assert!((heat_closed_form(0.5, 0.0, 1.0).unwrap() - exact).abs() < 1e-14);
        let s = point(2, 0.5, 0.0, Route::Subordination);
        let f = point(2, 0.5, 0.0, Route::FourierMl);
        assert!((s - exact).abs() < 1e-10, "{s}");
        assert!((f - exact).abs() < 1e-9, "{f}");
    }

    #[test]
    fn heat_closed_form_both_routes() {
        for &alpha in &[0.3, 0.5, 0.8] {
            let xs: Vec<f64> = (0..13).map(|i| -3.0 + 0.5 * i as f64).collect();
            let req = SolutionRequest::new(spec(2), alpha, 1.5, xs.clone(), Route::Auto).unwrap();
            let a = solve_subordination(&req).unwrap();
            let b = solve_fourier_ml(&req).unwrap();
            for (i, &x) in xs.iter().enumerate() {
                let e = heat_closed_form(alpha, x, 1.5).unwrap();
                assert!((a.values[i].value - e).abs() < 1e-9, "sub a={alpha} x={x}");
                assert!((b.values[i].value - e).abs() < 1e-9, "ml a={alpha} x={x}");
                assert!(b.values[i].value >= -1e-12);
            }
        }
    }

    #[test]
    fn odd_order_cross_route() {
        let a = point(3, 0.7, 1.0, Route::Subordination);
        let b = point(3, 0.7, 1.0, Route::FourierMl);
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        let a = point(3, 0.4, -1.5, Route::Subordination);
        let b = point(3, 0.4, -1.5, Route::FourierMl);
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }

    #[test]
    fn fourth_order_cross_route() {
        let a = point(4, 0.8, 0.5, Route::Subordination);
        let b = point(4, 0.8, 0.5, Route::FourierMl);
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn product_time_route_matches() {
        let s = spec(2);
        let ev = SolutionEvaluator::with_time_route(
            &s,
            1.0 / 3.0,
            Route::Subordination,
            1.0,
            Some(TimeRoute::Product(3)),
        )
        .unwrap();
        let a = ev.eval(0.6, 1.0).unwrap().0.value;
        let e = heat_closed_form(1.0 / 3.0, 0.6, 1.0).unwrap();
        assert!((a - e).abs() < 1e-8, "{a} vs {e}");
        assert!(SolutionEvaluator::with_time_route(
            &s,
            0.3,
            Route::Subordination,
            1.0,
            Some(TimeRoute::Product(3))
        )
        .is_err());
    }

    #[test]
    fn char_fn_cases() {
        let s3 = spec(3);
        assert_eq!(solution_char_fn(&s3, 0.6, 0.0, 1.0).unwrap(), Complex64::new(1.0, 0.0));
        let v = solution_char_fn(&spec(2), 0.5, 1.3, 2.0).unwrap();
        let e = crate::specfun::mittag_leffler_real(-1.69 * 2f64.sqrt(), 0.5).unwrap();
        assert!((v.re - e).abs() < 1e-13 && v.im.abs() < 1e-13);
        let v = solution_char_fn(&s3, 1.0, 0.8, 1.5).unwrap();
        let e = (Complex64::new(0.0, -0.8).powu(3) * 1.5).exp();
        assert!((v - e).norm() < 1e-13);
    }

    #[test]
    fn moment_closed_forms() {
        let s2 = spec(2);
        assert!((solution_moment(&s2, 1.0, 2, 3.0) - 6.0).abs() < 1e-13);
        assert!((solution_moment(&s2, 0.5, 2, 1.0) - 2.0 * reciprocal_gamma(1.5)).abs() < 1e-14);
        let v = solution_moment(&spec(4), 0.5, 4, 1.0);
        assert!((v + 27.081_1).abs() < 1e-4, "{v}");
        assert_eq!(solution_moment(&spec(3), 0.5, 5, 1.0), 0.0);
    }

    #[test]
    fn laplace_identity_cases() {
        let d = laplace_relation_check(&spec(2), 1.0, 1.0, 1.0).unwrap();
        assert!(d < 1e-7, "{d}");
        let e = kernel_laplace(&spec(2), 1.0, 1.0).unwrap();
        assert!((e - (-1.0f64).exp() / 2.0).abs() < 1e-15);
        let d = laplace_relation_check(&spec(2), 0.5, 0.5, 1.0).unwrap();
        assert!(d < 1e-4, "{d}");
    }

    #[test]
    fn stencils() {
        assert_eq!(central_stencil(2), vec![1.0, -2.0, 1.0]);
        assert_eq!(central_stencil(4), vec![1.0, -4.0, 6.0, -4.0, 1.0]);
        assert_eq!(central_stencil(3), vec![-0.5, 1.0, 0.0, -1.0, 0.5]);
        // d^3/dx^3 of x^3 is 6
        let s = central_stencil(3);
        let h = 0.1;
        let d: f64 = s
            .iter()
            .enumerate()
            .map(|(i, c)| c * (0.3 + (i as f64 - 2.0) * h).powi(3))
            .sum::<f64>()
            / h.powi(3);
        assert!((d - 6.0).abs() < 1e-9);
    }

    #[test]
    fn caputo_classical_heat() {
        let s = spec(2);
        let heat = |x, t| heat_closed_form(1.0, x, t);
        let g = TimeGrid::new(1.0, 128).unwrap();
        let r = caputo_residual_with(&s, 1.0, 3.0, g, 1e-2, heat).unwrap();
        assert!(r < 1e-3, "{r}");
        // Closer to the source the initial layer dominates; backward Euler
        // still halves the residual per doubling.
        let r1 = caputo_residual_with(&s, 1.0, 1.0, g, 1e-2, heat).unwrap();
        let g2 = TimeGrid::new(1.0, 256).unwrap();
        let r2 = caputo_residual_with(&s, 1.0, 1.0, g2, 1e-2, heat).unwrap();
        assert!((r1 / r2 - 2.0).abs() < 0.1, "{r1} {r2}");
        assert!(caputo_residual_with(&s, 1.0, 3.0, g, 1e-6, heat).is_err());
        assert!(caputo_residual_with(&s, 1.0, 0.01, g, 1e-2, heat).is_err());
        assert!(TimeGrid::new(1.0, 32).is_err());
    }

    #[test]
    fn caputo_half_order_converges() {
        let s = spec(2);
        let r: Vec<f64> = [64, 128, 256]
            .iter()
            .map(|&n| {
                let g = TimeGrid::new(1.0, n).unwrap();
                caputo_residual_with(&s, 0.5, 3.0, g, 1e-2, |x, t| heat_closed_form(0.5, x, t)).unwrap()
            })
            .collect();
        assert!(r[1] <= 0.5 * r[0] && r[2] <= 0.5 * r[1], "{r:?}");
    }

    #[test]
    fn gaussian_subordination_identity() {
        for &(x, y, t, a) in &[(0.0, 1.0, 1.0, 0.5), (1.0, 2.0, 0.5, 0.3), (-2.0, 0.5, 2.0, 0.9)] {
            let q = gaussian_subordination_integral(x, y, t, a).unwrap();
            let e = gaussian_subordination_closed_form(x, y, t, a);
            assert!((q.value - e).abs() < 1e-10 * e.max(1.0), "{x} {y} {t} {a}");
        }
    }

    #[test]
    fn request_validation() {
        assert!(SolutionRequest::new(spec(2), 1.5, 1.0, vec![0.0], Route::Auto).is_err());
        assert!(SolutionRequest::new(spec(2), 0.5, 1.0, vec![], Route::Auto).is_err());
        assert!(SolutionRequest::new(spec(2), 0.5, 1.0, vec![1.0, 0.0], Route::Auto).is_err());
        assert!(SolutionRequest::new(spec(2), 0.5, 0.0, vec![0.0], Route::Auto).is_err());
    }

    #[test]
    fn repeated_average_alternating_series() {
        // Partial sums of 1 - 1/2 + 1/3 - ... converge to ln 2.
        let mut s = 0.0;
        let sums: Vec<f64> = (1..=30)
            .map(|k| {
                s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
                s
            })
            .collect();
        let (v, _) = repeated_average(&sums[15..]);
        assert!((v - 2f64.ln()).abs() < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn self_similarity(x in -3.0f64..3.0, t in 0.3f64..3.0, alpha in 0.3f64..0.95) {
            let s = spec(2);
            let lhs = solve_point(&s, alpha, t, x, Route::Auto).unwrap().0.value;
            let c = t.powf(-alpha / 2.0);
            let rhs = c * solve_point(&s, alpha, 1.0, x * c, Route::Auto).unwrap().0.value;
            prop_assert!((lhs - rhs).abs() < 1e-10);
        }

        #[test]
        fn gaussian_identity_sampled(x in -3.0f64..3.0, y in 0.2f64..4.0, t in 0.2f64..4.0, a in 0.1f64..1.0) {
            let q = gaussian_subordination_integral(x, y, t, a).unwrap();
            let e = gaussian_subordination_closed_form(x, y, t, a);
            prop_assert!((q.value - e).abs() < 1e-9 * e.max(1e-3));
        }
    }
}

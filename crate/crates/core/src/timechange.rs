//! Law of the random time `T_alpha(t)`: density `v(u, t)` by the Wright
//! function, by a fractional integral of the one-sided stable law, by the
//! positive branch of a spectrally negative stable law (`alpha >= 1/2`), and
//! as the law of a product of generalised gamma factors (`alpha = 1/m`).

use alloc::vec::Vec;

use num_traits::Float;

use crate::quadrature::{
    integrate_breakpoints, integrate_jacobi_singular, AdaptiveOptions, JacobiWeight, QuadResult,
    SingularEnd, Tolerance,
};
use crate::specfun::{
    gamma, ln_gamma, m_wright, reciprocal_gamma, stable_one_sided_density,
    stable_spec_neg_density, StableOneSided, StableSpectrallyNegative,
};
use crate::{Error, Result};

/// Regimes of the fractional order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `alpha = 1`.
    Classical,
    /// `alpha in [1/2, 1)`.
    Upper,
    /// `alpha in (0, 1/2)`.
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Domain {
                what: "fractional order",
                value: alpha,
            });
        }
        Ok(FractionalOrder(alpha))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    pub fn regime(&self) -> Regime {
        if self.0 == 1.0 {
            Regime::Classical
        } else if self.0 >= 0.5 {
            Regime::Upper
        } else {
            Regime::Lower
        }
    }

    /// `Some(m)` when `alpha = 1/m` with `m >= 2`.
    pub fn reciprocal(&self) -> Option<u32> {
        reciprocal_order(self.0)
    }
}

fn reciprocal_order(alpha: f64) -> Option<u32> {
    let m = (1.0 / alpha).round();
    if m >= 2.0 && (alpha * m - 1.0).abs() < 1e-12 {
        Some(m as u32)
    } else {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeRoute {
    Wright,
    FracIntegral,
    Stable,
    Product(u32),
    Degenerate,
}

/// Density of `T_alpha(t)` with the representation used to evaluate it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeChangeLaw {
    pub alpha: f64,
    pub t: f64,
    pub route: TimeRoute,
}

impl TimeChangeLaw {
    pub fn new(alpha: f64, t: f64, route: TimeRoute) -> Result<Self> {
        let order = FractionalOrder::new(alpha)?;
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain {
                what: "time",
                value: t,
            });
        }
        let ok = match route {
            TimeRoute::Degenerate => alpha == 1.0,
            TimeRoute::Wright | TimeRoute::FracIntegral => alpha < 1.0,
            TimeRoute::Stable => order.regime() == Regime::Upper,
            TimeRoute::Product(m) => m >= 2 && order.reciprocal() == Some(m),
        };
        if !ok {
            return Err(Error::Unsupported {
                what: "time-change route for this alpha",
                value: alpha,
            });
        }
        Ok(TimeChangeLaw { alpha, t, route })
    }

    /// Default route: degenerate at `alpha = 1`, Wright otherwise.
    pub fn default_for(alpha: f64, t: f64) -> Result<Self> {
        let route = if alpha == 1.0 {
            TimeRoute::Degenerate
        } else {
            TimeRoute::Wright
        };
        Self::new(alpha, t, route)
    }

    /// Density at `u`. The degenerate law has no density and is rejected.
    pub fn density(&self, u: f64) -> Result<f64> {
        time_density(self, u)
    }

    /// Point beyond which the density is below `exp(-60)` of its scale.
    pub fn effective_support(&self) -> f64 {
        support_end(self.alpha, self.t)
    }
}

/// `v(u, t)` by the route stored in `law`; zero for `u < 0`.
pub fn time_density(law: &TimeChangeLaw, u: f64) -> Result<f64> {
    if u.is_nan() {
        return Err(Error::Domain {
            what: "time density argument",
            value: u,
        });
    }
    if u < 0.0 {
        return Ok(0.0);
    }
    let (a, t) = (law.alpha, law.t);
    match law.route {
        TimeRoute::Wright => time_density_wright(a, u, t),
        TimeRoute::FracIntegral => time_density_frac_integral(a, u, t),
        TimeRoute::Stable => time_density_stable(a, u, t),
        TimeRoute::Product(m) => time_density_product(m, u, t),
        TimeRoute::Degenerate => Err(Error::Unsupported {
            what: "density of the degenerate time change",
            value: a,
        }),
    }
}

/// `v(u, t) = t^(-alpha) W(-u / t^alpha; -alpha, 1 - alpha)`, with the value
/// `t^(-alpha) / Gamma(1 - alpha)` at `u = 0`.
pub fn time_density_wright(alpha: f64, u: f64, t: f64) -> Result<f64> {
    if u < 0.0 {
        return Ok(0.0);
    }
    let ta = t.powf(alpha);
    if u == 0.0 {
        return Ok(reciprocal_gamma(1.0 - alpha) / ta);
    }
    Ok(m_wright(u / ta, alpha)? / ta)
}

/// `(1 / Gamma(1 - alpha)) int_0^t (t - w)^(-alpha) p_alpha(w; u) dw` with the
/// one-sided stable density `p_alpha(.; u)`.
pub fn time_density_frac_integral(alpha: f64, u: f64, t: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain {
            what: "fractional-integral route alpha",
            value: alpha,
        });
    }
    if !(u > 0.0) || !(t > 0.0) {
        return Err(Error::Domain {
            what: "fractional-integral route argument",
            value: u.min(t),
        });
    }
    let law = StableOneSided::new(alpha, u)?;
    let f = |w: f64| {
        if w <= 0.0 {
            0.0
        } else {
            stable_one_sided_density(w, law).unwrap_or(f64::NAN)
        }
    };
    let weight = JacobiWeight::new(-alpha, SingularEnd::Right)?;
    let q = integrate_jacobi_singular(f, 0.0, t, weight, Tolerance::new(1e-13, 1e-12))?;
    if q.value.is_nan() {
        return Err(Error::NonConvergence {
            what: "fractional-integral route",
            estimate: q,
        });
    }
    Ok(q.value * reciprocal_gamma(1.0 - alpha))
}

/// `(1/alpha) p(u; t)` with the spectrally negative stable density of index
/// `1/alpha`.
pub fn time_density_stable(alpha: f64, u: f64, t: f64) -> Result<f64> {
    let s = StableSpectrallyNegative::new(alpha, t)?;
    Ok(stable_spec_neg_density(u, s)? / alpha)
}

/// Factor `G_j(t)` of the product representation for `alpha = 1/m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GjLaw {
    pub m: u32,
    pub j: u32,
    pub t: f64,
}

impl GjLaw {
    pub fn new(m: u32, j: u32, t: f64) -> Result<Self> {
        if m < 2 || j < 1 || j >= m {
            return Err(Error::Domain {
                what: "G_j indices",
                value: j as f64,
            });
        }
        if !(t > 0.0) {
            return Err(Error::Domain {
                what: "G_j time",
                value: t,
            });
        }
        Ok(GjLaw { m, j, t })
    }

    /// `c = (m^m t)^(1/(m-1))`: the density is proportional to
    /// `w^(j-1) exp(-w^m / c)`.
    pub fn c(&self) -> f64 {
        let m = self.m as f64;
        (m.powf(m) * self.t).powf(1.0 / (m - 1.0))
    }

    fn ln_norm(&self) -> f64 {
        let (m, j) = (self.m as f64, self.j as f64);
        (1.0 - j / (m - 1.0)) * m.ln() - j / (m * (m - 1.0)) * self.t.ln() - ln_gamma(j / m)
    }

    /// `ln g_j(e^y) + y`: log-density of `ln G_j`.
    fn ln_log_density(&self, y: f64) -> f64 {
        let (m, j) = (self.m as f64, self.j as f64);
        self.ln_norm() + j * y - (m * y).exp() / self.c()
    }

    /// Mode of `ln G_j`.
    fn log_mode(&self) -> f64 {
        let (m, j) = (self.m as f64, self.j as f64);
        (j * self.c() / m).ln() / m
    }
}

/// Density of `G_j(t)`:
/// `m^(1 - j/(m-1)) t^(-j/(m(m-1))) / Gamma(j/m) w^(j-1) exp(-w^m / (m^m t)^(1/(m-1)))`.
pub fn gj_density(law: &GjLaw, w: f64) -> Result<f64> {
    if !(w > 0.0) {
        return Err(Error::Domain {
            what: "G_j density argument",
            value: w,
        });
    }
    let (m, j) = (law.m as f64, law.j as f64);
    let ln = law.ln_norm() + (j - 1.0) * w.ln() - w.powf(m) / law.c();
    Ok(ln.exp())
}

/// Nodes per convolution stage.
const STAGE_NODES: usize = 512;
/// Log-density drop defining each factor's grid range.
const LOG_RANGE: f64 = 41.5;

/// Density of `G(t) = prod_{j=1}^{m-1} G_j(t)` by convolution of the
/// log-densities of the factors on uniform grids (trapezoidal rule, which is
/// spectrally accurate here because the log-densities are entire and decay
/// at both ends).
#[derive(Clone, Debug)]
pub struct ProductDensity {
    m: u32,
    t: f64,
    fine: Stage,
    coarse: Stage,
}

/// Partial sum `ln G_1 + ... + ln G_{m-2}` tabulated on a uniform grid.
#[derive(Clone, Debug)]
struct Stage {
    y0: f64,
    h: f64,
    values: Vec<f64>,
}

fn factor_range(law: &GjLaw) -> (f64, f64) {
    let y0 = law.log_mode();
    let peak = law.ln_log_density(y0);
    let find = |dir: f64| {
        let mut step = 1.0;
        while peak - law.ln_log_density(y0 + dir * step) < LOG_RANGE {
            step *= 2.0;
        }
        let (mut lo, mut hi) = (0.0, step);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if peak - law.ln_log_density(y0 + dir * mid) < LOG_RANGE {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        y0 + dir * hi
    };
    (find(-1.0), find(1.0))
}

fn build_stage(m: u32, nodes: usize) -> Stage {
    let law = |j| GjLaw { m, j, t: 1.0 };
    let (a, b) = factor_range(&law(1));
    let mut y0 = a;
    let mut h = (b - a) / (nodes - 1) as f64;
    let mut values: Vec<f64> = (0..nodes)
        .map(|i| law(1).ln_log_density(a + h * i as f64).exp())
        .collect();
    for j in 2..m.saturating_sub(1) {
        let g = law(j);
        let (aj, bj) = factor_range(&g);
        let ny0 = y0 + aj;
        let nh = (y0 + h * (nodes - 1) as f64 + bj - ny0) / (nodes - 1) as f64;
        let next: Vec<f64> = (0..nodes)
            .map(|i| {
                let s = ny0 + nh * i as f64;
                h * values
                    .iter()
                    .enumerate()
                    .map(|(k, &v)| v * g.ln_log_density(s - (y0 + h * k as f64)).exp())
                    .sum::<f64>()
            })
            .collect();
        y0 = ny0;
        h = nh;
        values = next;
    }
    Stage { y0, h, values }
}

impl ProductDensity {
    pub fn new(m: u32, t: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::Domain {
                what: "product order m",
                value: m as f64,
            });
        }
        if !(t > 0.0) {
            return Err(Error::Domain {
                what: "product time",
                value: t,
            });
        }
        Ok(ProductDensity {
            m,
            t,
            fine: build_stage(m, STAGE_NODES),
            coarse: build_stage(m, STAGE_NODES / 2),
        })
    }

    fn eval_stage(&self, stage: &Stage, s: f64) -> f64 {
        let last = GjLaw {
            m: self.m,
            j: self.m - 1,
            t: 1.0,
        };
        stage.h
            * stage
                .values
                .iter()
                .enumerate()
                .map(|(k, &v)| v * last.ln_log_density(s - (stage.y0 + stage.h * k as f64)).exp())
                .sum::<f64>()
    }

    /// Density at `u` with the fine-minus-coarse grid difference as the error
    /// estimate.
    pub fn density_with_error(&self, u: f64) -> Result<(f64, f64)> {
        if u.is_nan() {
            return Err(Error::Domain {
                what: "product density argument",
                value: u,
            });
        }
        if u < 0.0 {
            return Ok((0.0, 0.0));
        }
        let ta = self.t.powf(1.0 / self.m as f64);
        if u == 0.0 {
            let d = self.density_at_zero();
            return Ok((d / ta, 4.0 * f64::EPSILON * d / ta));
        }
        let v = u / ta;
        if self.m == 2 {
            let g = gj_density(&GjLaw { m: 2, j: 1, t: 1.0 }, v)?;
            return Ok((g / ta, 4.0 * f64::EPSILON * g / ta));
        }
        let s = v.ln();
        let f = self.eval_stage(&self.fine, s) / (v * ta);
        let c = self.eval_stage(&self.coarse, s) / (v * ta);
        Ok((f, (f - c).abs()))
    }

    pub fn density(&self, u: f64) -> Result<f64> {
        self.density_with_error(u).map(|(v, _)| v)
    }

    /// Right limit at `u = 0` for `t = 1`: `g_1(0) prod_{j=2}^{m-1} E[1 / G_j]`.
    fn density_at_zero(&self) -> f64 {
        let m = self.m as f64;
        let law = |j| GjLaw { m: self.m, j, t: 1.0 };
        (2..self.m).fold(law(1).ln_norm().exp(), |d, j| {
            let jf = j as f64;
            d * law(j).c().powf(-1.0 / m) * gamma((jf - 1.0) / m) * reciprocal_gamma(jf / m)
        })
    }
}

/// Single-point convenience wrapper around [`ProductDensity`].
pub fn time_density_product(m: u32, u: f64, t: f64) -> Result<f64> {
    ProductDensity::new(m, t)?.density(u)
}

/// `E T^delta = Gamma(1 + delta) t^(alpha delta) / Gamma(1 + alpha delta)`.
pub fn time_moment(alpha: f64, delta: f64, t: f64) -> f64 {
    if alpha == 1.0 {
        return t.powf(delta);
    }
    gamma(1.0 + delta) * reciprocal_gamma(1.0 + alpha * delta) * t.powf(alpha * delta)
}

pub(crate) fn support_end(alpha: f64, t: f64) -> f64 {
    if alpha >= 1.0 {
        return t;
    }
    let k0 = alpha.powf(alpha / (1.0 - alpha)) * (1.0 - alpha);
    t.powf(alpha) * (70.0 / k0).powf(1.0 - alpha)
}

/// `int_0^inf u^delta v(u, t) du` by quadrature over the effective support of
/// the chosen route's density.
pub fn time_moment_numeric(law: &TimeChangeLaw, delta: f64) -> Result<QuadResult> {
    if law.route == TimeRoute::Degenerate {
        return Ok(QuadResult::new(law.t.powf(delta), 0.0, 1));
    }
    let end = law.effective_support();
    let guard = match law.route {
        TimeRoute::Stable => StableSpectrallyNegative::new(law.alpha, law.t)?.series_guard(),
        _ => f64::INFINITY,
    };
    let product = match law.route {
        TimeRoute::Product(m) => Some(ProductDensity::new(m, law.t)?),
        _ => None,
    };
    let dens = |u: f64| -> f64 {
        let v = match &product {
            Some(p) => p.density(u),
            None if u > guard => time_density_wright(law.alpha, u, law.t),
            None => time_density(law, u),
        };
        v.unwrap_or(f64::NAN)
    };
    let ta = law.t.powf(law.alpha);
    let mut pts: Vec<f64> = [0.0, 0.05, 0.25, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0]
        .iter()
        .map(|c| c * ta)
        .filter(|&p| p < end)
        .collect();
    if guard < end {
        pts.push(guard);
        pts.sort_by(f64::total_cmp);
    }
    pts.push(end);
    let q = integrate_breakpoints(
        |u| if u == 0.0 { 0.0 } else { u.powf(delta) } * dens(u),
        &pts,
        AdaptiveOptions::new(Tolerance::new(1e-12, 1e-10)),
    )?;
    if q.value.is_nan() {
        return Err(Error::NonConvergence {
            what: "time moment quadrature",
            estimate: q,
        });
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn levy_fold(u: f64, t: f64) -> f64 {
        (-u * u / (4.0 * t)).exp() / (PI * t).sqrt()
    }

    #[test]
    fn half_order_collapse() {
        for &(u, t) in &[(1.0, 1.0), (0.3, 0.5), (2.0, 2.0), (4.0, 1.0)] {
            let e = levy_fold(u, t);
            let w = time_density_wright(0.5, u, t).unwrap();
            let f = time_density_frac_integral(0.5, u, t).unwrap();
            let s = time_density_stable(0.5, u, t).unwrap();
            let p = time_density_product(2, u, t).unwrap();
            for (name, v) in [("wright", w), ("frac", f), ("stable", s), ("product", p)] {
                assert!((v - e).abs() < 1e-10, "{name} u={u} t={t}: {v} vs {e}");
            }
        }
        assert!((time_density_wright(0.5, 0.0, 1.0).unwrap() - 1.0 / PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn product_density_at_origin() {
        for m in 2..=5u32 {
            let a = 1.0 / m as f64;
            let p = time_density_product(m, 0.0, 1.7).unwrap();
            let w = time_density_wright(a, 0.0, 1.7).unwrap();
            assert!((p - w).abs() < 1e-14 * w, "m={m}: {p} vs {w}");
            let near = time_density_product(m, 1e-6, 1.7).unwrap();
            assert!((near - p).abs() < 1e-4 * p, "m={m}: {near} vs {p}");
        }
    }

    #[test]
    fn negative_argument_is_zero() {
        let law = TimeChangeLaw::new(0.3, 1.0, TimeRoute::Wright).unwrap();
        assert_eq!(time_density(&law, -1.0).unwrap(), 0.0);
    }

    #[test]
    fn route_invariants() {
        assert!(TimeChangeLaw::new(0.4, 1.0, TimeRoute::Stable).is_err());
        assert!(TimeChangeLaw::new(0.5, 1.0, TimeRoute::Stable).is_ok());
        assert!(TimeChangeLaw::new(0.4, 1.0, TimeRoute::Product(3)).is_err());
        assert!(TimeChangeLaw::new(1.0 / 3.0, 1.0, TimeRoute::Product(3)).is_ok());
        assert!(TimeChangeLaw::new(1.0, 1.0, TimeRoute::Wright).is_err());
        assert!(TimeChangeLaw::new(0.9, 1.0, TimeRoute::Degenerate).is_err());
        assert_eq!(FractionalOrder::new(0.25).unwrap().reciprocal(), Some(4));
        assert_eq!(FractionalOrder::new(0.3).unwrap().reciprocal(), None);
        assert_eq!(FractionalOrder::new(1.0).unwrap().regime(), Regime::Classical);
        assert!(FractionalOrder::new(1.5).is_err());
    }

    #[test]
    fn cross_route_spot_values() {
        let w = time_density_wright(0.6, 0.8, 1.0).unwrap();
        let f = time_density_frac_integral(0.6, 0.8, 1.0).unwrap();
        assert!((w - f).abs() < 1e-9, "{w} vs {f}");
        let w = time_density_wright(0.75, 0.5, 1.0).unwrap();
        let s = time_density_stable(0.75, 0.5, 1.0).unwrap();
        assert!((w - s).abs() < 1e-10);
        let w = time_density_wright(1.0 / 3.0, 0.7, 1.0).unwrap();
        let p = time_density_product(3, 0.7, 1.0).unwrap();
        assert!((w - p).abs() < 1e-9, "{w} vs {p}");
    }

    #[test]
    fn gj_golden_and_mass() {
        let g = GjLaw::new(2, 1, 1.0).unwrap();
        assert!((gj_density(&g, 1.0).unwrap() - levy_fold(1.0, 1.0)).abs() < 1e-15);
        for j in 1..=2 {
            let law = GjLaw::new(3, j, 1.0).unwrap();
            let q = integrate_breakpoints(
                |w| gj_density(&law, w).unwrap(),
                &[1e-300, 1.0, 4.0, 12.0, 40.0],
                AdaptiveOptions::new(Tolerance::new(1e-14, 1e-13)),
            )
            .unwrap();
            assert!((q.value - 1.0).abs() < 1e-10, "j={j}: {}", q.value);
        }
        assert!(gj_density(&g, 0.0).is_err());
    }

    #[test]
    fn gj_joint_density_by_multiplication_formula() {
        // m = 3, t = 1, (w1, w2) = (1, 1): product of the marginals equals
        // 9 / (c Gamma(1/3) Gamma(2/3)) exp(-2 / c) = 3 / (2 pi) exp(-2 / c)
        // with c = 27^{1/2} and Gamma(1/3) Gamma(2/3) = 2 pi / sqrt(3).
        let g1 = GjLaw::new(3, 1, 1.0).unwrap();
        let g2 = GjLaw::new(3, 2, 1.0).unwrap();
        let prod = gj_density(&g1, 1.0).unwrap() * gj_density(&g2, 1.0).unwrap();
        let c = 27f64.sqrt();
        let joint = 3.0 / (2.0 * PI) * (-2.0 / c).exp();
        assert!((prod - joint).abs() < 1e-14, "{prod} vs {joint}");
    }

    #[test]
    fn moments_closed_form() {
        assert_eq!(time_moment(0.3, 0.0, 2.0), 1.0);
        assert!((time_moment(0.5, 1.0, 1.0) - 2.0 / PI.sqrt()).abs() < 1e-15);
        assert!((time_moment(0.5, 2.0, 1.0) - 2.0).abs() < 1e-14);
        assert_eq!(time_moment(1.0, 2.5, 2.0), 2f64.powf(2.5));
    }

    #[test]
    fn normalisation_all_routes() {
        let cases = [
            (0.3, TimeRoute::Wright),
            (0.5, TimeRoute::Wright),
            (0.7, TimeRoute::Wright),
            (0.75, TimeRoute::Stable),
            (1.0 / 3.0, TimeRoute::Product(3)),
            (0.25, TimeRoute::Product(4)),
            (0.4, TimeRoute::FracIntegral),
        ];
        for &(a, r) in &cases {
            let law = TimeChangeLaw::new(a, 1.0, r).unwrap();
            let q = time_moment_numeric(&law, 0.0).unwrap();
            assert!((q.value - 1.0).abs() < 1e-8, "alpha={a} {r:?}: {}", q.value);
        }
    }

    #[test]
    fn stable_route_first_moment() {
        let law = TimeChangeLaw::new(0.9, 2.0, TimeRoute::Stable).unwrap();
        let q = time_moment_numeric(&law, 1.0).unwrap();
        let e = time_moment(0.9, 1.0, 2.0);
        assert!((q.value - e).abs() < 1e-6 * e);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn gamma_ratio_identity(delta in 0.01f64..8.0, alpha in 0.05f64..1.0) {
            let lhs = gamma(1.0 + delta) * reciprocal_gamma(1.0 + alpha * delta);
            let rhs = gamma(delta) * reciprocal_gamma(alpha * delta) / alpha;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs);
        }

        #[test]
        fn wright_time_scaling(u in 0.01f64..5.0, t in 0.2f64..3.0, alpha in 0.1f64..0.95) {
            let lhs = time_density_wright(alpha, u, t).unwrap();
            let ta = t.powf(alpha);
            let rhs = time_density_wright(alpha, u / ta, 1.0).unwrap() / ta;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
        }
    }
}

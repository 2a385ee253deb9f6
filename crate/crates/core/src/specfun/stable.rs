use core::f64::consts::PI;

use num_traits::Float;

use super::gamma::{ln_gamma, sinpi};
use super::series::{sum_dd, sum_f64, SeriesSum, COND_DD, COND_F64};
use super::wright::m_wright;
use crate::dd::DD;
use crate::{Error, Result};

/// Totally skewed stable law on `(0, inf)` with Laplace transform `exp(-s^alpha u)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StableOneSided {
    pub alpha: f64,
    pub u: f64,
}

impl StableOneSided {
    pub fn new(alpha: f64, u: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain {
                what: "one-sided stable index",
                value: alpha,
            });
        }
        if !(u > 0.0) {
            return Err(Error::Domain {
                what: "one-sided stable scale",
                value: u,
            });
        }
        Ok(StableOneSided { alpha, u })
    }

    /// Scale `sigma = (u cos(pi alpha / 2))^(1/alpha)` of the `S_alpha(sigma, 1, 0)` form.
    pub fn sigma(&self) -> f64 {
        (self.u * (PI * self.alpha / 2.0).cos()).powf(1.0 / self.alpha)
    }
}

/// Density of [`StableOneSided`] at `w > 0`.
///
/// Reduced to unit scale, `f(w; u) = u^(-1/alpha) f(w u^(-1/alpha); 1)`, and
/// `f(x; 1) = alpha x^(-1-alpha) M_alpha(x^(-alpha))`. Large `x` falls on the
/// convergent series branch of `M_alpha`, small `x` on its real integral.
pub fn stable_one_sided_density(w: f64, s: StableOneSided) -> Result<f64> {
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::Domain {
            what: "one-sided stable density argument",
            value: w,
        });
    }
    let a = s.alpha;
    let c = s.u.powf(-1.0 / a);
    let x = w * c;
    let m = m_wright(x.powf(-a), a)?;
    Ok(c * a * x.powf(-1.0 - a) * m)
}

/// Spectrally negative stable law of index `1/alpha`, `alpha` in `[1/2, 1)`,
/// restricted to its positive half-line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StableSpectrallyNegative {
    pub alpha: f64,
    pub t: f64,
}

impl StableSpectrallyNegative {
    pub fn new(alpha: f64, t: f64) -> Result<Self> {
        if !(0.5..1.0).contains(&alpha) {
            return Err(Error::Domain {
                what: "spectrally negative stable alpha",
                value: alpha,
            });
        }
        if !(t > 0.0) {
            return Err(Error::Domain {
                what: "spectrally negative stable time",
                value: t,
            });
        }
        Ok(StableSpectrallyNegative { alpha, t })
    }

    /// Parameters `(sigma, beta, mu)` of the `S_{1/alpha}` form, recorded as
    /// metadata only.
    pub fn parameters(&self) -> (f64, f64, f64) {
        let c = (PI - PI / (2.0 * self.alpha)).cos();
        ((self.t * c).powf(self.alpha), -1.0, 0.0)
    }

    /// Largest `u` at which [`stable_spec_neg_density`] still returns a value.
    pub fn series_guard(&self) -> f64 {
        let ok = |z: f64| bingham(self.alpha, z).is_ok();
        let mut lo = 0.0;
        let mut hi = 1.0;
        while ok(hi) && hi < 1e6 {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo * self.t.powf(self.alpha)
    }
}

/// `(1/(alpha pi)) sum_{n>=1} (-1)^(n-1) sin(pi n alpha) Gamma(1 + n alpha) z^(n-1) / n!`.
fn bingham(alpha: f64, z: f64) -> Result<f64> {
    let lz = z.ln();
    let f: SeriesSum = sum_f64(|k| {
        let n = k as f64 + 1.0;
        let s = sinpi(n * alpha);
        if s == 0.0 {
            return 0.0;
        }
        let sign = if k % 2 == 1 { -s.signum() } else { s.signum() };
        let lp = if k == 0 { 0.0 } else { k as f64 * lz };
        sign * (s.abs().ln() + ln_gamma(1.0 + n * alpha) - ln_gamma(n + 1.0) + lp).exp()
    });
    let scale = 1.0 / (alpha * PI);
    if f.cond <= COND_F64 {
        return Ok(scale * f.value);
    }
    let zd = DD::from_f64(z);
    let mut c = DD::ONE;
    let d = sum_dd(|k| {
        let n = k as f64 + 1.0;
        // c = (-z)^k / (k+1)!
        if k > 0 {
            c = -(c * zd) / DD::from_f64(n);
        } else {
            c = DD::ONE;
        }
        let na = DD::prod(alpha, n);
        let g = (DD::ONE + na).ln_gamma().exp();
        c * g * na.sin_pi()
    });
    if d.cond <= COND_DD {
        Ok(scale * d.value)
    } else {
        Err(Error::OutOfRange {
            what: "Bingham series condition number",
            value: d.cond,
            limit: COND_DD,
        })
    }
}

/// Positive-branch density `p(u; t)` of the spectrally negative stable law,
/// `alpha` times the Bingham series in `u / t^alpha`.
pub fn stable_spec_neg_density(u: f64, s: StableSpectrallyNegative) -> Result<f64> {
    if !(u >= 0.0) || !u.is_finite() {
        return Err(Error::Domain {
            what: "spectrally negative stable argument",
            value: u,
        });
    }
    let ta = s.t.powf(s.alpha);
    Ok(s.alpha * bingham(s.alpha, u / ta)? / ta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_adaptive, integrate_semi_infinite, Decay, Tolerance};
    use proptest::prelude::*;

    #[test]
    fn levy_collapse() {
        let s = StableOneSided::new(0.5, 1.0).unwrap();
        let v = stable_one_sided_density(1.0, s).unwrap();
        let exact = (-0.25f64).exp() / (2.0 * PI.sqrt());
        assert!((v - exact).abs() < 1e-12 * exact);
        for &w in &[0.01, 0.1, 0.7, 3.0, 50.0] {
            for &u in &[0.3, 1.0, 2.5] {
                let s = StableOneSided::new(0.5, u).unwrap();
                let v = stable_one_sided_density(w, s).unwrap();
                let e = u * (-u * u / (4.0 * w)).exp() / (2.0 * (PI * w * w * w).sqrt());
                assert!((v - e).abs() <= 1e-11 * e, "w={w} u={u}: {v} vs {e}");
            }
        }
        assert!(stable_one_sided_density(0.0, s).is_err());
    }

    /// Fixed Talbot inversion of `exp(-s^alpha)`; an oracle that does not
    /// share code with the density.
    fn talbot(w: f64, alpha: f64) -> f64 {
        use num_complex::Complex64;
        let m = 24;
        let r = 2.0 * m as f64 / (5.0 * w);
        let f = |s: Complex64| (-s.powf(alpha)).exp();
        let mut sum = 0.5 * (r * w).exp() * f(Complex64::new(r, 0.0)).re;
        for k in 1..m {
            let th = k as f64 * PI / m as f64;
            let cot = th.cos() / th.sin();
            let d = Complex64::new(r * th * cot, r * th);
            let sig = th + (th * cot - 1.0) * cot;
            sum += ((d * w).exp() * f(d) * Complex64::new(1.0, sig)).re;
        }
        sum * r / m as f64
    }

    #[test]
    fn laplace_inversion_oracle() {
        let s = StableOneSided::new(0.7, 1.0).unwrap();
        for &(w, tol) in &[(0.5, 1e-8), (2.0, 1e-8), (7.0, 1e-8)] {
            let v = stable_one_sided_density(w, s).unwrap();
            let o = talbot(w, 0.7);
            assert!((v - o).abs() < tol * o, "w={w}: {v} vs {o}");
        }
        // Multiprecision inversion at w = 2.
        let v = stable_one_sided_density(2.0, s).unwrap();
        assert!((v - 0.107_688_344_874_337_13).abs() < 1e-14);
    }

    #[test]
    fn one_sided_mass() {
        for &a in &[0.3, 0.5, 0.8] {
            let s = StableOneSided::new(a, 1.0).unwrap();
            let f = |w: f64| stable_one_sided_density(w, s).unwrap();
            let head = integrate_adaptive(f, 0.0, 1.0, 1e-12).unwrap().value;
            // Tail on [1, inf) with w = v^(-1/a).
            let g = |v: f64| {
                if v == 0.0 {
                    return 0.0;
                }
                let w = v.powf(-1.0 / a);
                f(w) * w / (a * v)
            };
            let tail = integrate_adaptive(g, 0.0, 1.0, 1e-12).unwrap().value;
            assert!((head + tail - 1.0).abs() < 1e-10, "alpha={a}: {}", head + tail);
        }
    }

    #[test]
    fn spectrally_negative_golden() {
        let s = StableSpectrallyNegative::new(0.5, 1.0).unwrap();
        let v0 = stable_spec_neg_density(0.0, s).unwrap();
        assert!((v0 - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-14);
        let v2 = stable_spec_neg_density(2.0, s).unwrap();
        assert!((v2 - (-1.0f64).exp() / (4.0 * PI).sqrt()).abs() < 1e-13);
        assert!(StableSpectrallyNegative::new(0.4, 1.0).is_err());
    }

    #[test]
    fn spectrally_negative_mass() {
        for &a in &[0.5, 0.6, 0.75, 0.9] {
            let s = StableSpectrallyNegative::new(a, 1.0).unwrap();
            let g = s.series_guard();
            for &u in &[0.0, 0.3 * g, 0.9 * g] {
                let v = stable_spec_neg_density(u, s).unwrap() / a;
                let m = m_wright(u, a).unwrap();
                assert!((v - m).abs() <= 1e-10 * m, "alpha={a} u={u}: {v} vs {m}");
            }
            let head = integrate_adaptive(
                |u| stable_spec_neg_density(u, s).unwrap() / a,
                0.0,
                g,
                Tolerance::new(1e-13, 1e-12),
            )
            .unwrap();
            let tail = integrate_semi_infinite(
                |u| m_wright(u, a).unwrap(),
                g,
                Decay::Exponential(1.0),
                1e-13,
            )
            .unwrap();
            let mass = head.value + tail.result.value;
            assert!((mass - 1.0).abs() < 1e-10, "alpha={a}: {mass}");
        }
    }

    #[test]
    fn beyond_guard_is_out_of_range() {
        let s = StableSpectrallyNegative::new(0.5, 1.0).unwrap();
        let g = s.series_guard();
        assert!(matches!(
            stable_spec_neg_density(2.0 * g, s),
            Err(Error::OutOfRange { .. })
        ));
    }

    proptest! {
        #[test]
        fn scaling_law(w in 0.05f64..20.0, u in 0.2f64..5.0, a in 0.2f64..0.9) {
            let s = StableOneSided::new(a, u).unwrap();
            let unit = StableOneSided::new(a, 1.0).unwrap();
            let c = u.powf(-1.0 / a);
            let lhs = stable_one_sided_density(w, s).unwrap();
            let rhs = c * stable_one_sided_density(w * c, unit).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1e-300));
        }
    }
}

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::adaptive::{integrate_adaptive_with, AdaptiveOptions};
use super::{QuadResult, Tolerance};
use crate::specfun::{gamma, reciprocal_gamma};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SingularEnd {
    Left,
    Right,
}

/// Endpoint weight `(b - w)^exponent` (right) or `(w - a)^exponent` (left).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JacobiWeight {
    pub exponent: f64,
    pub endpoint: SingularEnd,
}

impl JacobiWeight {
    pub fn new(exponent: f64, endpoint: SingularEnd) -> Result<Self> {
        if !(exponent > -1.0) || !exponent.is_finite() {
            return Err(Error::Domain {
                what: "Jacobi weight exponent",
                value: exponent,
            });
        }
        Ok(JacobiWeight { exponent, endpoint })
    }
}

/// Nodes and weights of the `n`-point Gauss rule for `(1 - x)^a (1 + x)^b`
/// on `[-1, 1]` (Golub-Welsch).
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1 && a > -1.0 && b > -1.0);
    let ab = a + b;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    d[0] = (b - a) / (ab + 2.0);
    for k in 1..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        d[k] = (b * b - a * a) / (s * (s + 2.0));
        let off2 = if k == 1 {
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
        };
        e[k - 1] = off2.sqrt();
    }
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    tridiagonal_ql(&mut d, &mut e, &mut z);
    let mu0 = 2f64.powf(ab + 1.0) * gamma(a + 1.0) * gamma(b + 1.0) * reciprocal_gamma(ab + 2.0);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let nodes = idx.iter().map(|&i| d[i]).collect();
    let weights = idx.iter().map(|&i| mu0 * z[i] * z[i]).collect();
    (nodes, weights)
}

/// Implicit QL on a symmetric tridiagonal matrix (diagonal `d`, off-diagonal
/// `e[i]` between rows `i` and `i + 1`), tracking only the first component of
/// each eigenvector in `z`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let fz = z[i + 1];
                z[i + 1] = s * z[i] + c * fz;
                z[i] = c * z[i] - s * fz;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

const LOW_ORDER: usize = 16;
const HIGH_ORDER: usize = 32;
const MAX_SPLITS: usize = 60;

/// `int_a^b f(w) (b - w)^e dw` (or `(w - a)^e` for a left weight).
///
/// Gauss-Jacobi rules of 16 and 32 nodes are compared on the panel touching the
/// singular end; if they disagree the panel is halved and the regular half
/// goes to adaptive Gauss-Kronrod.
pub fn integrate_jacobi_singular<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    w: JacobiWeight,
    tol: impl Into<Tolerance>,
) -> Result<QuadResult> {
    let tol = tol.into();
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain {
            what: "integrate_jacobi_singular interval",
            value: b - a,
        });
    }
    let e = w.exponent;
    if !(e > -1.0) {
        return Err(Error::Domain {
            what: "Jacobi weight exponent",
            value: e,
        });
    }
    // Work with the singularity at the right end of [a, b].
    let mut g = |v: f64| match w.endpoint {
        SingularEnd::Right => f(v),
        SingularEnd::Left => f(a + b - v),
    };
    let (x1, w1) = gauss_jacobi(LOW_ORDER, e, 0.0);
    let (x2, w2) = gauss_jacobi(HIGH_ORDER, e, 0.0);
    let rule = |g: &mut dyn FnMut(f64) -> f64, lo: f64, x: &[f64], wt: &[f64]| {
        let h = 0.5 * (b - lo);
        let s: f64 = x
            .iter()
            .zip(wt)
            .map(|(&xi, &wi)| wi * g(lo + h * (xi + 1.0)))
            .sum();
        s * h.powf(e + 1.0)
    };
    let mut total = QuadResult::new(0.0, 0.0, 0);
    let mut lo = a;
    let mut target = None;
    for split in 0..MAX_SPLITS {
        let q1 = rule(&mut g, lo, &x1, &w1);
        let q2 = rule(&mut g, lo, &x2, &w2);
        total.evaluations += LOW_ORDER + HIGH_ORDER;
        let tau = *target.get_or_insert_with(|| tol.target(q2).max(f64::MIN_POSITIVE));
        let share = tau / 2f64.powi(split.min(30) as i32 + 1);
        let diff = (q2 - q1).abs();
        if diff <= share || diff <= 4.0 * f64::EPSILON * q2.abs() {
            total.value += q2;
            total.error_estimate += diff;
            return Ok(total);
        }
        let mid = lo + 0.5 * (b - lo);
        let regular = integrate_adaptive_with(
            |v| g(v) * (b - v).powf(e),
            lo,
            mid,
            AdaptiveOptions::new(Tolerance::new(share, tol.rel)),
        )?;
        total = total.combine(regular);
        lo = mid;
    }
    Err(Error::NonConvergence {
        what: "Gauss-Jacobi endpoint panels",
        estimate: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    #[test]
    fn legendre_and_chebyshev_rules() {
        let (x, w) = gauss_jacobi(5, 0.0, 0.0);
        // Integrates x^8 exactly: 2/9.
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-14);
        let (x, w) = gauss_jacobi(8, -0.5, -0.5);
        for (i, xi) in x.iter().enumerate() {
            let exact = ((2.0 * (8 - i) as f64 - 1.0) * PI / 16.0).cos();
            assert!((xi - exact).abs() < 1e-14);
            assert!((w[i] - PI / 8.0).abs() < 1e-14);
        }
    }

    #[test]
    fn golden_values() {
        let wr = JacobiWeight::new(-0.5, SingularEnd::Right).unwrap();
        let r = integrate_jacobi_singular(|_| 1.0, 0.0, 1.0, wr, 1e-12).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
        // Beta(1/2, 1/2) with the left-end singularity carried by f.
        let r = integrate_jacobi_singular(|w: f64| w.powf(-0.5), 0.0, 1.0, wr, 1e-11).unwrap();
        assert!((r.value - PI).abs() < 1e-9, "{}", r.value);
        // Levy density against (t - w)^{-1/2} / Gamma(1/2).
        let levy = |w: f64| (-1.0 / (4.0 * w)).exp() / (2.0 * (PI * w * w * w).sqrt());
        let r = integrate_jacobi_singular(levy, 0.0, 1.0, wr, 1e-13).unwrap();
        let v = r.value / PI.sqrt();
        let exact = (-0.25f64).exp() / PI.sqrt();
        assert!((v - exact).abs() < 1e-12, "{v} vs {exact}");
    }

    /// Graded-mesh midpoint oracle for int_0^1 w^0.3 (1-w)^-0.7 dw with
    /// Richardson-free brute force.
    fn graded_oracle() -> f64 {
        // Substitute w = 1 - s^(1/0.3) to remove the endpoint singularity.
        let p = 1.0 / 0.3;
        let n = 2_000_000;
        let h = 1.0 / n as f64;
        let mut s = 0.0;
        for i in 0..n {
            let u = (i as f64 + 0.5) * h;
            let w = 1.0 - u.powf(p);
            let jac = p * u.powf(p - 1.0);
            s += w.powf(0.3) * u.powf(-0.7 * p) * jac;
        }
        s * h
    }

    #[test]
    fn fractional_power_against_brute_force() {
        let w = JacobiWeight::new(-0.7, SingularEnd::Right).unwrap();
        let r = integrate_jacobi_singular(|x: f64| x.powf(0.3), 0.0, 1.0, w, 1e-12).unwrap();
        let o = graded_oracle();
        // Beta(1.3, 0.3) as a second reference.
        let beta = gamma(1.3) * gamma(0.3) * reciprocal_gamma(1.6);
        assert!((o - beta).abs() < 1e-7);
        assert!((r.value - beta).abs() < 1e-10, "{} vs {beta}", r.value);
    }

    #[test]
    fn left_end_weight() {
        let w = JacobiWeight::new(-0.25, SingularEnd::Left).unwrap();
        let r = integrate_jacobi_singular(|x: f64| x, 2.0, 3.0, w, 1e-13).unwrap();
        // int_2^3 w (w-2)^{-1/4} dw = int_0^1 (s+2) s^{-1/4} ds = 4/7 + 8/3
        assert!((r.value - (4.0 / 7.0 + 8.0 / 3.0)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn constant_function_matches_closed_form(k in 1u32..10, len in 0.1f64..5.0) {
            let e = -0.1 * k as f64;
            let w = JacobiWeight::new(e, SingularEnd::Right).unwrap();
            let r = integrate_jacobi_singular(|_| 1.0, 0.0, len, w, 1e-14).unwrap();
            let exact = len.powf(e + 1.0) / (e + 1.0);
            prop_assert!((r.value - exact).abs() <= 1e-12 * exact);
        }
    }
}

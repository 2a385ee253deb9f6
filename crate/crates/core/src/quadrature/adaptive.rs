use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use num_traits::Float;

use super::{QuadResult, Tolerance};
use crate::{Error, Result};

// Gauss-Kronrod 10/21 nodes and weights (QUADPACK qk21).
pub(crate) const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
pub(crate) const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_956_584_164,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
pub(crate) const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const EVALS_PER_PANEL: usize = 21;

/// Scalar types an integrand may return.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    const ZERO: Self;
    fn norm(&self) -> f64;
}

impl QuadValue for f64 {
    const ZERO: Self = 0.0;
    #[inline]
    fn norm(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    const ZERO: Self = Complex64 { re: 0.0, im: 0.0 };
    #[inline]
    fn norm(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct AdaptiveOptions {
    pub tol: Tolerance,
    pub max_evaluations: usize,
}

impl AdaptiveOptions {
    pub fn new(tol: impl Into<Tolerance>) -> Self {
        AdaptiveOptions {
            tol: tol.into(),
            max_evaluations: crate::MAX_EVALUATIONS,
        }
    }

    pub fn with_budget(mut self, max_evaluations: usize) -> Self {
        self.max_evaluations = max_evaluations;
        self
    }
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
    floor: f64,
    splittable: bool,
}

struct HeapKey {
    err: f64,
    idx: usize,
}

impl PartialEq for HeapKey {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for HeapKey {}
impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Returns the Kronrod value, its error estimate and the roundoff floor of
/// that estimate.
fn gk21<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> (T, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = T::ZERO;
    let mut res_abs = fc.norm() * WGK[10];
    let mut fv1 = [T::ZERO; 10];
    let mut fv2 = [T::ZERO; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let s = f1 + f2;
        res_k = res_k + s * WGK[j];
        res_abs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            res_g = res_g + s * WG[j / 2];
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[10] * (fc - mean).norm();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }
    let habs = half.abs();
    let value = res_k * half;
    res_abs *= habs;
    res_asc *= habs;
    let mut err = ((res_k - res_g) * half).norm();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    (value, err, floor)
}

fn adaptive_core<T: QuadValue, F: FnMut(f64) -> T>(
    mut f: F,
    points: &[f64],
    opts: AdaptiveOptions,
) -> (T, f64, usize, bool) {
    let mut panels: Vec<Panel<T>> = Vec::with_capacity(64);
    let mut heap = BinaryHeap::with_capacity(64);
    let mut evals = 0;
    let mut total = T::ZERO;
    let mut total_err = 0.0;
    let mut total_floor = 0.0;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a == b {
            continue;
        }
        let (v, e, fl) = gk21(&mut f, a, b);
        evals += EVALS_PER_PANEL;
        total = total + v;
        total_err += e;
        total_floor += fl;
        heap.push(HeapKey {
            err: e,
            idx: panels.len(),
        });
        panels.push(Panel {
            a,
            b,
            value: v,
            err: e,
            floor: fl,
            splittable: true,
        });
    }
    let mut recount = 0usize;
    loop {
        // Once the estimate is mostly roundoff, refinement cannot improve it.
        if opts.tol.met(total_err, total.norm()) || total_err <= 2.0 * total_floor {
            return (total, total_err, evals, true);
        }
        if evals + 2 * EVALS_PER_PANEL > opts.max_evaluations {
            return (total, total_err, evals, false);
        }
        let Some(key) = heap.pop() else {
            return (total, total_err, evals, false);
        };
        let p = &panels[key.idx];
        if !p.splittable {
            // Worst panel cannot be refined further: roundoff limited.
            heap.push(key);
            return (total, total_err, evals, false);
        }
        let (a, b) = (p.a, p.b);
        let mid = 0.5 * (a + b);
        let (v1, e1, f1) = gk21(&mut f, a, mid);
        let (v2, e2, f2) = gk21(&mut f, mid, b);
        evals += 2 * EVALS_PER_PANEL;
        total = total - p.value + v1 + v2;
        total_err += e1 + e2 - p.err;
        total_floor += f1 + f2 - p.floor;
        let tiny = (b - a).abs() <= 1e3 * f64::EPSILON * a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        let idx = key.idx;
        panels[idx] = Panel {
            a,
            b: mid,
            value: v1,
            err: e1,
            floor: f1,
            splittable: !tiny,
        };
        heap.push(HeapKey { err: e1, idx });
        heap.push(HeapKey {
            err: e2,
            idx: panels.len(),
        });
        panels.push(Panel {
            a: mid,
            b,
            value: v2,
            err: e2,
            floor: f2,
            splittable: !tiny,
        });
        recount += 1;
        if recount.is_multiple_of(64) {
            // Resum to stop drift of the running totals.
            total = panels.iter().fold(T::ZERO, |s, p| s + p.value);
            total_err = panels.iter().map(|p| p.err).sum();
            total_floor = panels.iter().map(|p| p.floor).sum();
        }
    }
}

/// Adaptive integral over the intervals delimited by `points` (sorted).
pub fn integrate_breakpoints<F: FnMut(f64) -> f64>(
    f: F,
    points: &[f64],
    opts: AdaptiveOptions,
) -> Result<QuadResult> {
    let (v, e, n, ok) = adaptive_core(f, points, opts);
    let r = QuadResult::new(v, e, n);
    if ok {
        Ok(r)
    } else {
        Err(Error::NonConvergence {
            what: "adaptive quadrature",
            estimate: r,
        })
    }
}

pub fn integrate_adaptive_with<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: AdaptiveOptions,
) -> Result<QuadResult> {
    integrate_breakpoints(f, &[a, b], opts)
}

/// `int_a^b f` for piecewise smooth `f` on a finite interval.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: impl Into<Tolerance>,
) -> Result<QuadResult> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain {
            what: "integrate_adaptive interval",
            value: b - a,
        });
    }
    integrate_adaptive_with(f, a, b, AdaptiveOptions::new(tol))
}

/// Complex-valued counterpart of [`integrate_breakpoints`]; returns the value
/// and the error estimate.
pub fn integrate_breakpoints_complex<F: FnMut(f64) -> Complex64>(
    f: F,
    points: &[f64],
    opts: AdaptiveOptions,
) -> Result<(Complex64, f64, usize)> {
    let (v, e, n, ok) = adaptive_core(f, points, opts);
    if ok {
        Ok((v, e, n))
    } else {
        Err(Error::NonConvergence {
            what: "complex adaptive quadrature",
            estimate: QuadResult::new(v.norm(), e, n),
        })
    }
}

/// Complex adaptive integral that always returns its best estimate together
/// with a convergence flag.
pub(crate) fn adaptive_complex_raw<F: FnMut(f64) -> Complex64>(
    f: F,
    points: &[f64],
    opts: AdaptiveOptions,
) -> (Complex64, f64, usize, bool) {
    adaptive_core(f, points, opts)
}

pub fn integrate_adaptive_complex<F: FnMut(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    opts: AdaptiveOptions,
) -> Result<(Complex64, f64, usize)> {
    integrate_breakpoints_complex(f, &[a, b], opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_and_gaussian() {
        let r = integrate_adaptive(|x| x, 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 0.5).abs() < 1e-15);
        assert!(r.evaluations > 0);
        let pi = core::f64::consts::PI;
        let g = |x: f64| (-x * x / 4.0).exp() / (4.0 * pi).sqrt();
        let r = integrate_adaptive(g, -40.0, 40.0, Tolerance::absolute(1e-13)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12, "{}", r.value);
    }

    #[test]
    fn endpoint_singularity_converges() {
        let r = integrate_adaptive(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let opts = AdaptiveOptions::new(1e-15).with_budget(100);
        let r = integrate_adaptive_with(|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, opts);
        match r {
            Err(Error::NonConvergence { estimate, .. }) => assert!(estimate.evaluations <= 100),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn complex_integrand() {
        let opts = AdaptiveOptions::new(1e-13);
        let (v, _, _) =
            integrate_adaptive_complex(|x| Complex64::new(0.0, x).exp(), 0.0, core::f64::consts::PI, opts)
                .unwrap();
        // int_0^pi e^{ix} dx = 2i
        assert!((v - Complex64::new(0.0, 2.0)).norm() < 1e-13);
    }
}

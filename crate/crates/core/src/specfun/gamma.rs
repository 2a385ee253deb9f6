use core::f64::consts::PI;

use num_traits::Float;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `sin(pi x)` with exact zeros at the integers.
pub fn sinpi(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    if x.fract() == 0.0 {
        return 0.0;
    }
    // Reduce to r in [-1, 1].
    let mut r = x - 2.0 * (0.5 * x).round();
    let mut sign = 1.0;
    if r < 0.0 {
        r = -r;
        sign = -1.0;
    }
    if r > 0.5 {
        r = 1.0 - r;
    }
    let v = if r <= 0.25 {
        (PI * r).sin()
    } else {
        (PI * (0.5 - r)).cos()
    };
    sign * v
}

/// `cos(pi x)` with exact zeros at half-integers.
pub fn cospi(x: f64) -> f64 {
    sinpi(x + 0.5)
}

fn lanczos_sum(z: f64) -> f64 {
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    a
}

/// Gamma function; `inf` at the poles.
pub fn gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 && x.fract() == 0.0 {
        return f64::INFINITY;
    }
    if x < 0.5 {
        return PI / (sinpi(x) * gamma(1.0 - x));
    }
    if x > 171.7 {
        return f64::INFINITY;
    }
    if x.fract() == 0.0 && x <= 23.0 {
        return (2..x as u32).fold(1.0, |a, k| a * k as f64);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    let p = t.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * p * ((-t).exp() * p) * lanczos_sum(z)
}

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x <= 0.0 || x.is_nan() {
        return f64::NAN;
    }
    if x < 0.5 {
        return (PI / sinpi(x)).ln() - ln_gamma(1.0 - x);
    }
    if x < 20.0 {
        return gamma(x).ln();
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_2PI + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

/// `1 / Gamma(x)` for every real `x`; exactly zero at `0, -1, -2, ...`.
pub fn reciprocal_gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 && x.fract() == 0.0 {
        return 0.0;
    }
    if x < 0.5 {
        return sinpi(x) * gamma(1.0 - x) / PI;
    }
    if x > 171.7 {
        return 0.0;
    }
    1.0 / gamma(x)
}

/// `(ln |1/Gamma(x)|, sign of 1/Gamma(x))`; `(-inf, 0)` at the poles.
pub fn ln_abs_reciprocal_gamma(x: f64) -> (f64, f64) {
    if x <= 0.0 && x.fract() == 0.0 {
        return (f64::NEG_INFINITY, 0.0);
    }
    if x > 0.0 {
        return (-ln_gamma(x), 1.0);
    }
    let s = sinpi(x);
    ((s.abs() / PI).ln() + ln_gamma(1.0 - x), s.signum())
}

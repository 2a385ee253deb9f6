//! Double-double arithmetic (an unevaluated sum `hi + lo` of two `f64`s, about
//! 31 significant digits).
//!
//! Only the operations needed by the extended-precision series paths are
//! provided: field arithmetic, `exp`, `ln`, `sin(pi x)` and the (reciprocal)
//! Gamma function.

use core::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::Float;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DD {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, libm::fma(a, b, -p))
}

pub const PI: DD = DD {
    hi: core::f64::consts::PI,
    lo: 1.224_646_799_147_353_2e-16,
};

pub const LN2: DD = DD {
    hi: core::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

impl DD {
    pub const ZERO: DD = DD { hi: 0.0, lo: 0.0 };
    pub const ONE: DD = DD { hi: 1.0, lo: 0.0 };

    #[inline]
    pub const fn from_f64(x: f64) -> Self {
        DD { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// Exact product of an `f64` and an integer-valued `f64`, kept as a pair.
    #[inline]
    pub fn prod(a: f64, b: f64) -> Self {
        let (p, e) = two_prod(a, b);
        DD { hi: p, lo: e }
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn mul_pow2(self, s: f64) -> Self {
        DD {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn recip(self) -> Self {
        DD::ONE / self
    }

    pub fn is_integer(self) -> bool {
        self.hi.fract() == 0.0 && self.lo.fract() == 0.0
    }

    /// Round to the nearest integer (ties away from zero).
    pub fn round(self) -> Self {
        let hi = self.hi.round();
        if hi == self.hi {
            let lo = self.lo.round();
            let (h, l) = quick_two_sum(hi, lo);
            DD { hi: h, lo: l }
        } else if (hi - self.hi).abs() == 0.5 && self.lo != 0.0 {
            // Exactly halfway on `hi`; the sign of `lo` decides.
            let hi = if self.lo > 0.0 {
                self.hi.ceil()
            } else {
                self.hi.floor()
            };
            DD::from_f64(hi)
        } else {
            DD::from_f64(hi)
        }
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.7 {
            return DD::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return DD::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        let r = self - LN2 * DD::from_f64(k);
        // exp(r) = (exp(r / 2^10))^(2^10), carried as expm1 to keep digits.
        let r = r.mul_pow2(1.0 / 1024.0);
        let mut term = r;
        let mut p = r;
        for i in 2..=14 {
            term = term * r / DD::from_f64(i as f64);
            p = p + term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        for _ in 0..10 {
            p = p.mul_pow2(2.0) + p.sqr();
        }
        let e = p + DD::ONE;
        e.mul_pow2(libm::exp2(k))
    }

    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return DD::from_f64(f64::NAN);
        }
        let mut y = DD::from_f64(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - DD::ONE;
        }
        y
    }

    /// `sin(pi * self)`, exact zeros at integers.
    pub fn sin_pi(self) -> Self {
        if self.is_integer() {
            return DD::ZERO;
        }
        // Reduce to (-1, 1].
        let two = DD::from_f64(2.0);
        let mut r = self - (self / two).round() * two;
        let mut sign = 1.0;
        if r.hi < 0.0 {
            r = -r;
            sign = -1.0;
        }
        if r.hi > 0.5 {
            r = DD::ONE - r;
        }
        let v = if r.hi <= 0.25 {
            sin_taylor(PI * r)
        } else {
            cos_taylor(PI * (DD::from_f64(0.5) - r))
        };
        v.mul_pow2(sign)
    }

    /// ln Gamma(x) for x > 0.
    pub fn ln_gamma(self) -> Self {
        debug_assert!(self.hi > 0.0);
        const SHIFT_TO: f64 = 25.0;
        let mut x = self;
        let mut prod = DD::ONE;
        while x.hi < SHIFT_TO {
            prod = prod * x;
            x = x + DD::ONE;
        }
        // Stirling series with Bernoulli numbers B_2 .. B_26.
        const BERN: [(f64, f64); 13] = [
            (1.0, 6.0),
            (-1.0, 30.0),
            (1.0, 42.0),
            (-1.0, 30.0),
            (5.0, 66.0),
            (-691.0, 2730.0),
            (7.0, 6.0),
            (-3617.0, 510.0),
            (43867.0, 798.0),
            (-174611.0, 330.0),
            (854513.0, 138.0),
            (-236364091.0, 2730.0),
            (8553103.0, 6.0),
        ];
        let half_ln_2pi = (PI.mul_pow2(2.0)).ln().mul_pow2(0.5);
        let mut s = (x - DD::from_f64(0.5)) * x.ln() - x + half_ln_2pi;
        let inv = x.recip();
        let inv2 = inv * inv;
        let mut pw = inv;
        for (k, &(num, den)) in BERN.iter().enumerate() {
            let k2 = 2.0 * (k as f64 + 1.0);
            let c = DD::from_f64(num) / (DD::from_f64(den) * DD::from_f64(k2 * (k2 - 1.0)));
            s = s + c * pw;
            pw = pw * inv2;
        }
        if prod.hi != 1.0 || prod.lo != 0.0 {
            s = s - prod.abs().ln();
        }
        s
    }

    /// 1 / Gamma(x) for any x; exactly zero at the poles.
    pub fn recip_gamma(self) -> Self {
        if self.hi <= 0.0 && self.is_integer() {
            return DD::ZERO;
        }
        if self.hi >= 0.5 {
            (-self.ln_gamma()).exp()
        } else {
            // 1/Gamma(x) = sin(pi x) Gamma(1 - x) / pi
            let g = (DD::ONE - self).ln_gamma().exp();
            self.sin_pi() * g / PI
        }
    }
}

fn sin_taylor(x: DD) -> DD {
    let x2 = x * x;
    let mut term = x;
    let mut s = x;
    let mut i = 1.0;
    loop {
        term = -(term * x2) / DD::from_f64((i + 1.0) * (i + 2.0));
        s = s + term;
        i += 2.0;
        if term.hi.abs() < 1e-34 * s.hi.abs() || i > 60.0 {
            break;
        }
    }
    s
}

fn cos_taylor(x: DD) -> DD {
    let x2 = x * x;
    let mut term = DD::ONE;
    let mut s = DD::ONE;
    let mut i = 0.0;
    loop {
        term = -(term * x2) / DD::from_f64((i + 1.0) * (i + 2.0));
        s = s + term;
        i += 2.0;
        if term.hi.abs() < 1e-34 || i > 60.0 {
            break;
        }
    }
    s
}

impl Neg for DD {
    type Output = DD;
    #[inline]
    fn neg(self) -> DD {
        DD {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for DD {
    type Output = DD;
    #[inline]
    fn add(self, b: DD) -> DD {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        DD { hi, lo }
    }
}

impl Sub for DD {
    type Output = DD;
    #[inline]
    fn sub(self, b: DD) -> DD {
        self + (-b)
    }
}

impl Mul for DD {
    type Output = DD;
    #[inline]
    fn mul(self, b: DD) -> DD {
        let (p1, p2) = two_prod(self.hi, b.hi);
        let p2 = p2 + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p1, p2);
        DD { hi, lo }
    }
}

impl Div for DD {
    type Output = DD;
    fn div(self, b: DD) -> DD {
        let q1 = self.hi / b.hi;
        let r = self - b * DD::from_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * DD::from_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DD { hi, lo } + DD::from_f64(q3)
    }
}

//! Summation of alternating power series whose terms carry reciprocal Gamma
//! factors (Wright, Bingham). A compensated `f64` pass decides whether the
//! double-double pass is needed.


use crate::dd::DD;

const MAX_TERMS: usize = 4000;
/// Largest condition number (`sum |t_k| / |sum t_k|`) trusted in `f64`.
pub(crate) const COND_F64: f64 = 1e3;
/// Largest condition number trusted in double-double.
pub(crate) const COND_DD: f64 = 1e18;

pub(crate) struct SeriesSum {
    pub value: f64,
    pub cond: f64,
}

/// Neumaier-compensated sum of `term(k)`, `k = 0, 1, ...`, stopping after
/// three consecutive terms below `1e-18` of the partial sum once terms
/// started to decrease.
pub(crate) fn sum_f64<F: FnMut(usize) -> f64>(mut term: F) -> SeriesSum {
    let mut s = 0.0;
    let mut c = 0.0;
    let mut abs_sum = 0.0;
    let mut small = 0;
    let mut prev = f64::INFINITY;
    for k in 0..MAX_TERMS {
        let t = term(k);
        let ns = s + t;
        if s.abs() >= t.abs() {
            c += (s - ns) + t;
        } else {
            c += (t - ns) + s;
        }
        s = ns;
        abs_sum += t.abs();
        let a = t.abs();
        if a <= 1e-18 * (s + c).abs() && a <= prev {
            small += 1;
            if small >= 3 {
                break;
            }
        } else if a != 0.0 {
            small = 0;
        }
        if a != 0.0 {
            prev = a;
        }
    }
    let value = s + c;
    SeriesSum {
        value,
        cond: abs_sum / value.abs(),
    }
}

/// Double-double counterpart of [`sum_f64`].
pub(crate) fn sum_dd<F: FnMut(usize) -> DD>(mut term: F) -> SeriesSum {
    let mut s = DD::ZERO;
    let mut abs_sum = 0.0;
    let mut small = 0;
    let mut prev = f64::INFINITY;
    for k in 0..MAX_TERMS {
        let t = term(k);
        s = s + t;
        let a = t.hi.abs();
        abs_sum += a;
        if a <= 1e-34 * s.hi.abs() && a <= prev {
            small += 1;
            if small >= 3 {
                break;
            }
        } else if a != 0.0 {
            small = 0;
        }
        if a != 0.0 {
            prev = a;
        }
    }
    let value = s.to_f64();
    SeriesSum {
        value,
        cond: abs_sum / value.abs(),
    }
}

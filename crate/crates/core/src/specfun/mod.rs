//! Scalar special functions: Gamma family, Wright and Mainardi functions,
//! Mittag-Leffler function, and the two stable densities.
//!
//! All functions are pure and thread-safe.

mod gamma;
mod mittag_leffler;
mod series;
mod stable;
mod wright;

pub use gamma::{cospi, gamma, ln_abs_reciprocal_gamma, ln_gamma, reciprocal_gamma, sinpi};
pub use mittag_leffler::{mittag_leffler, mittag_leffler_real, MLParams, MLValue};
pub use stable::{
    stable_one_sided_density, stable_spec_neg_density, StableOneSided, StableSpectrallyNegative,
};
pub use wright::{m_wright, wright_w, WrightParams};

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reciprocal_gamma_against_statrs() {
        for i in 1..=50 {
            let x = 0.1 * i as f64;
            let g = statrs::function::gamma::gamma(x);
            assert!((reciprocal_gamma(x) * g - 1.0).abs() < 1e-12, "x={x}");
        }
    }

    proptest! {
        #[test]
        fn duplication_identity(delta in 0.01f64..10.0, alpha in 0.05f64..1.0) {
            // Gamma(1+d)/Gamma(1+a d) = Gamma(d) / (a Gamma(a d))
            let lhs = gamma(1.0 + delta) * reciprocal_gamma(1.0 + alpha * delta);
            let rhs = gamma(delta) * reciprocal_gamma(alpha * delta) / alpha;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs());
        }

        #[test]
        fn reflection(x in -10.0f64..10.0) {
            prop_assume!((x - x.round()).abs() > 1e-3);
            let lhs = gamma(x) * gamma(1.0 - x);
            let rhs = core::f64::consts::PI / sinpi(x);
            prop_assert!((lhs - rhs).abs() <= 1e-11 * rhs.abs());
        }
    }
}

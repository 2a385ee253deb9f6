use fracheat_core::kernel::{kernel_density, kernel_moment, make_equation_spec};
use fracheat_core::montecarlo::{empirical_moment, ks_statistic, sample_time_product, RngStream};
use fracheat_core::solver::{
    gaussian_subordination_closed_form, gaussian_subordination_integral, solution_moment,
    solution_moments_numeric, solve_fourier_ml, solve_point, solve_subordination, Route,
    SolutionRequest,
};
use fracheat_core::timechange::{time_density_product, time_density_wright, time_moment};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

fn half_normal(t: f64) -> Normal {
    Normal::new(0.0, (2.0 * t).sqrt()).unwrap()
}

#[test]
fn second_order_kernel_is_gaussian() {
    let spec = make_equation_spec(2, 1.0).unwrap();
    for t in [0.3f64, 1.0, 2.5] {
        let g = Normal::new(0.0, (2.0 * t).sqrt()).unwrap();
        for x in [-4.0, -1.0, 0.0, 0.7, 3.0] {
            let p = kernel_density(&spec, x, t).unwrap().value;
            assert!((p - g.pdf(x)).abs() < 1e-12, "t={t} x={x}: {p} vs {}", g.pdf(x));
        }
        assert!((kernel_moment(&spec, 2, t) - 2.0 * t).abs() < 1e-14);
    }
}

#[test]
fn half_order_time_is_half_normal() {
    for t in [0.5f64, 1.0, 3.0] {
        let h = half_normal(t);
        for u in [0.0, 0.2, 1.0, 2.5, 6.0] {
            let w = time_density_wright(0.5, u, t).unwrap();
            let p = time_density_product(2, u, t).unwrap();
            assert!((w - 2.0 * h.pdf(u)).abs() < 1e-12);
            assert!((p - w).abs() < 1e-9);
        }
        let mean = 2.0 * (2.0 * t).sqrt() / (2.0 * std::f64::consts::PI).sqrt();
        assert!((time_moment(0.5, 1.0, t) - mean).abs() < 1e-12);
    }
}

#[test]
fn half_order_samples_follow_the_half_normal_law() {
    let t = 1.3;
    let n = 20_000;
    let mut v = sample_time_product(2, t, &RngStream::new(7, 0), n).unwrap().values;
    let (mean, se) = empirical_moment(&v, 1.0);
    assert!((mean - time_moment(0.5, 1.0, t)).abs() < 4.0 * se);
    v.sort_by(f64::total_cmp);
    let h = half_normal(t);
    let d = ks_statistic(&v, |u| 2.0 * h.cdf(u) - 1.0);
    assert!((n as f64).sqrt() * d < 1.63, "KS {d}");
}

#[test]
fn routes_agree_for_third_order() {
    let spec = make_equation_spec(3, 1.0).unwrap();
    let xs: Vec<f64> = (-8..=8).map(|i| 0.5 * i as f64).collect();
    let req = SolutionRequest::new(spec, 0.6, 0.8, xs, Route::Auto).unwrap();
    let a = solve_subordination(&req).unwrap();
    let b = solve_fourier_ml(&req).unwrap();
    for (p, q) in a.values.iter().zip(&b.values) {
        assert!((p.value - q.value).abs() < 1e-7, "x={}: {} vs {}", p.x, p.value, q.value);
    }
}

#[test]
fn unit_order_solution_is_the_kernel() {
    let spec = make_equation_spec(4, 1.0).unwrap();
    for x in [-2.0, 0.0, 1.5] {
        let (u, _) = solve_point(&spec, 1.0, 0.7, x, Route::Auto).unwrap();
        let p = kernel_density(&spec, x, 0.7).unwrap();
        assert!((u.value - p.value).abs() < 1e-13);
    }
}

#[test]
fn quadrature_moments_match_closed_form() {
    let spec = make_equation_spec(4, 1.0).unwrap();
    let (alpha, t) = (0.5, 1.4);
    let orders = [0, 2, 4, 8];
    let m = solution_moments_numeric(&spec, alpha, t, &orders).unwrap();
    for (q, &r) in m.iter().zip(&orders) {
        let exact = solution_moment(&spec, alpha, r, t);
        let scale = exact.abs().max(1.0);
        assert!((q.value - exact).abs() < 1e-5 * scale, "r={r}: {} vs {exact}", q.value);
    }
}

#[test]
fn gaussian_subordination() {
    for (x, y, t, alpha) in [(0.3, 0.2, 1.0, 0.5), (1.0, 0.5, 2.0, 0.8), (-0.4, 0.9, 0.5, 0.3)] {
        let q = gaussian_subordination_integral(x, y, t, alpha).unwrap();
        let c = gaussian_subordination_closed_form(x, y, t, alpha);
        assert!((q.value - c).abs() < 1e-9 * c.abs().max(1.0));
    }
}

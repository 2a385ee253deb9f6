//! Samplers for the random time at `alpha = 1/m` (products of generalised
//! gamma factors), the reflecting Brownian time at `alpha = 1/2`, and the
//! composed process `B(T_alpha)`; Kolmogorov-Smirnov and moment checks.
//!
//! Every batch is split into blocks of [`BLOCK_SIZE`] draws. Block `b` of a
//! stream uses ChaCha8 with stream number `stream_id` started at word
//! position `b * 2^36`, so a batch is a pure function of `(seed, stream_id,
//! count)` whichever way its blocks are distributed over workers.

use alloc::boxed::Box;
use alloc::vec::Vec;

use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::quadrature::{integrate_adaptive_with, AdaptiveOptions, Tolerance};
use crate::timechange::{gj_density, support_end, GjLaw, ProductDensity};
use crate::{Error, Result};

pub const BLOCK_SIZE: usize = 1 << 16;
const BLOCK_WORD_SHIFT: u32 = 36;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    /// Generator positioned at the start of block `block`.
    pub fn block_rng(&self, block: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng.set_word_pos((block as u128) << BLOCK_WORD_SHIFT);
        rng
    }
}

/// Law a batch was drawn from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SampledLaw {
    Gj(GjLaw),
    TimeProduct { m: u32, t: f64 },
    ReflectingBm { t: f64 },
    ComposedBm { alpha: f64, t: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleMeta {
    pub law: SampledLaw,
    pub count: usize,
    pub seed: u64,
    pub stream_id: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleBatch {
    pub values: Vec<f64>,
    pub meta: SampleMeta,
}

/// Validated sampler for one law.
#[derive(Clone, Debug)]
pub struct Sampler {
    law: SampledLaw,
    kind: Kind,
}

#[derive(Clone, Debug)]
enum Kind {
    Gj { scale: f64, inv_m: f64, gamma: Gamma<f64> },
    Product { factors: Vec<(f64, f64, Gamma<f64>)> },
    Reflecting { sd: f64 },
    Composed { time: Box<Kind> },
    Fixed(f64),
}

fn gj_kind(law: &GjLaw) -> Result<Kind> {
    let (m, j) = (law.m as f64, law.j as f64);
    let gamma = Gamma::new(j / m, 1.0).map_err(|_| Error::Domain {
        what: "gamma shape",
        value: j / m,
    })?;
    Ok(Kind::Gj {
        scale: (m.powf(m) * law.t).powf(1.0 / (m * (m - 1.0))),
        inv_m: 1.0 / m,
        gamma,
    })
}

fn product_kind(m: u32, t: f64) -> Result<Kind> {
    let mut factors = Vec::with_capacity(m as usize - 1);
    for j in 1..m {
        match gj_kind(&GjLaw::new(m, j, t)?)? {
            Kind::Gj {
                scale,
                inv_m,
                gamma,
            } => factors.push((scale, inv_m, gamma)),
            _ => unreachable!(),
        }
    }
    Ok(Kind::Product { factors })
}

fn check_count(count: usize) -> Result<()> {
    if count == 0 {
        return Err(Error::Domain {
            what: "sample count must be at least 1",
            value: 0.0,
        });
    }
    Ok(())
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain {
            what: "time",
            value: t,
        });
    }
    Ok(())
}

impl Kind {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Kind::Gj {
                scale,
                inv_m,
                gamma,
            } => scale * gamma.sample(rng).powf(*inv_m),
            Kind::Product { factors } => factors
                .iter()
                .map(|(s, p, g)| s * g.sample(rng).powf(*p))
                .product(),
            Kind::Reflecting { sd } => {
                let z: f64 = StandardNormal.sample(rng);
                sd * z.abs()
            }
            Kind::Composed { time } => {
                let u = time.draw(rng);
                let z: f64 = StandardNormal.sample(rng);
                (2.0 * u).sqrt() * z
            }
            Kind::Fixed(v) => *v,
        }
    }
}

impl Sampler {
    pub fn gj(law: GjLaw) -> Result<Self> {
        let law = GjLaw::new(law.m, law.j, law.t)?;
        Ok(Sampler {
            law: SampledLaw::Gj(law),
            kind: gj_kind(&law)?,
        })
    }

    pub fn time_product(m: u32, t: f64) -> Result<Self> {
        check_t(t)?;
        if m < 2 {
            return Err(Error::Domain {
                what: "product order m",
                value: m as f64,
            });
        }
        Ok(Sampler {
            law: SampledLaw::TimeProduct { m, t },
            kind: product_kind(m, t)?,
        })
    }

    /// `|N(0, 2t)|`.
    pub fn reflecting_bm(t: f64) -> Result<Self> {
        check_t(t)?;
        Ok(Sampler {
            law: SampledLaw::ReflectingBm { t },
            kind: Kind::Reflecting {
                sd: (2.0 * t).sqrt(),
            },
        })
    }

    /// `B(T_alpha(t))` with `Var B(u) = 2u`, for `alpha = 1`, `1/2` or `1/m`.
    pub fn composed_bm(alpha: f64, t: f64) -> Result<Self> {
        check_t(t)?;
        let time = if alpha == 1.0 {
            Kind::Fixed(t)
        } else if alpha == 0.5 {
            Kind::Reflecting {
                sd: (2.0 * t).sqrt(),
            }
        } else {
            let m = (1.0 / alpha).round();
            if !(m >= 2.0) || (alpha * m - 1.0).abs() > 1e-12 {
                return Err(Error::Unsupported {
                    what: "composed sampling needs alpha = 1 or 1/m",
                    value: alpha,
                });
            }
            product_kind(m as u32, t)?
        };
        Ok(Sampler {
            law: SampledLaw::ComposedBm { alpha, t },
            kind: Kind::Composed {
                time: Box::new(time),
            },
        })
    }

    pub fn law(&self) -> SampledLaw {
        self.law
    }

    /// Draws `len <= BLOCK_SIZE` values from block `block` of the stream.
    pub fn sample_block(&self, rng: &RngStream, block: u64, len: usize) -> Vec<f64> {
        debug_assert!(len <= BLOCK_SIZE);
        let mut r = rng.block_rng(block);
        (0..len).map(|_| self.kind.draw(&mut r)).collect()
    }

    /// Number of blocks and the length of block `b` for a batch of `count`.
    pub fn block_layout(count: usize) -> (u64, impl Fn(u64) -> usize) {
        let blocks = count.div_ceil(BLOCK_SIZE) as u64;
        (blocks, move |b: u64| {
            (count - (b as usize) * BLOCK_SIZE).min(BLOCK_SIZE)
        })
    }

    /// Batch assembled from its blocks in order.
    pub fn sample(&self, rng: &RngStream, count: usize) -> Result<SampleBatch> {
        check_count(count)?;
        let (blocks, len) = Self::block_layout(count);
        let mut values = Vec::with_capacity(count);
        for b in 0..blocks {
            values.extend(self.sample_block(rng, b, len(b)));
        }
        Ok(self.batch(values, rng))
    }

    /// Wraps externally assembled block output.
    pub fn batch(&self, values: Vec<f64>, rng: &RngStream) -> SampleBatch {
        SampleBatch {
            meta: SampleMeta {
                law: self.law,
                count: values.len(),
                seed: rng.seed,
                stream_id: rng.stream_id,
            },
            values,
        }
    }
}

/// `W = (m^m t)^(1/(m(m-1))) X^(1/m)` with `X ~ Gamma(j/m, 1)`.
pub fn sample_gj(law: GjLaw, rng: &RngStream, count: usize) -> Result<SampleBatch> {
    Sampler::gj(law)?.sample(rng, count)
}

/// `prod_{j=1}^{m-1} G_j(t)`.
pub fn sample_time_product(m: u32, t: f64, rng: &RngStream, count: usize) -> Result<SampleBatch> {
    Sampler::time_product(m, t)?.sample(rng, count)
}

pub fn sample_reflecting_bm(t: f64, rng: &RngStream, count: usize) -> Result<SampleBatch> {
    Sampler::reflecting_bm(t)?.sample(rng, count)
}

pub fn sample_composed_bm(alpha: f64, t: f64, rng: &RngStream, count: usize) -> Result<SampleBatch> {
    Sampler::composed_bm(alpha, t)?.sample(rng, count)
}

/// Sample mean of `|x|^delta` (or `x^r` for integer `delta` with sign) and its
/// standard error.
pub fn empirical_moment(values: &[f64], delta: f64) -> (f64, f64) {
    let n = values.len() as f64;
    let pow = |x: f64| {
        if delta.fract() == 0.0 {
            x.powi(delta as i32)
        } else {
            x.abs().powf(delta)
        }
    };
    let mean = values.iter().map(|&x| pow(x)).sum::<f64>() / n;
    let var = values.iter().map(|&x| (pow(x) - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// `sup |F_n - F|` for an ascending sample.
pub fn ks_statistic<F: FnMut(f64) -> f64>(sorted: &[f64], mut cdf: F) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i as f64 + 1.0) / n - f)
        })
        .fold(0.0, f64::max)
}

/// `sup |F_a - F_b|` for two ascending samples.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic Kolmogorov tail `P(sqrt(n) D > lambda)`.
pub fn kolmogorov_pvalue(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// 5% critical value of `sqrt(n) D` (asymptotic).
pub const KS_CRITICAL_5: f64 = 1.358_098_8;

/// Distribution function tabulated by integrating a density on panels, with
/// cubic Hermite interpolation between panel ends (slopes from the density).
#[derive(Clone, Debug)]
pub struct CdfTable {
    knots: Vec<f64>,
    cdf: Vec<f64>,
    pdf: Vec<f64>,
}

impl CdfTable {
    pub fn new<F: FnMut(f64) -> f64>(mut density: F, lo: f64, hi: f64, panels: usize) -> Result<Self> {
        if !(lo < hi) || panels == 0 {
            return Err(Error::Domain {
                what: "CDF table range",
                value: hi - lo,
            });
        }
        let h = (hi - lo) / panels as f64;
        let knots: Vec<f64> = (0..=panels).map(|i| lo + h * i as f64).collect();
        let mut cdf = Vec::with_capacity(panels + 1);
        let mut acc = 0.0;
        cdf.push(0.0);
        for w in knots.windows(2) {
            let q = integrate_adaptive_with(&mut density, w[0], w[1], AdaptiveOptions::new(Tolerance::new(1e-15, 1e-12)))?;
            acc += q.value;
            cdf.push(acc);
        }
        let pdf = knots.iter().map(|&x| density(x)).collect();
        Ok(CdfTable { knots, cdf, pdf })
    }

    /// Total mass captured by the table.
    pub fn mass(&self) -> f64 {
        *self.cdf.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.knots.len() - 1;
        if x <= self.knots[0] {
            return 0.0;
        }
        if x >= self.knots[n] {
            return self.cdf[n];
        }
        let h = self.knots[1] - self.knots[0];
        let i = (((x - self.knots[0]) / h) as usize).min(n - 1);
        let s = (x - self.knots[i]) / h;
        let (y0, y1) = (self.cdf[i], self.cdf[i + 1]);
        let (d0, d1) = (self.pdf[i] * h, self.pdf[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * d0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * d1
    }
}

/// Distribution function of `G_j(t)`.
pub fn gj_cdf_table(law: &GjLaw) -> Result<CdfTable> {
    let c = law.c();
    // w^m / c beyond 60 leaves a tail below e^-60.
    let hi = (70.0 * c).powf(1.0 / law.m as f64);
    CdfTable::new(
        |w| gj_density(law, w.max(f64::MIN_POSITIVE)).unwrap_or(f64::NAN),
        0.0,
        hi,
        2048,
    )
}

/// Distribution function of `prod_j G_j(t)` for `m >= 2`.
pub fn time_product_cdf_table(m: u32, t: f64) -> Result<CdfTable> {
    let p = ProductDensity::new(m, t)?;
    let hi = support_end(1.0 / m as f64, t);
    CdfTable::new(|u| p.density(u).unwrap_or(f64::NAN), 0.0, hi, 2048)
}

/// `P(|N(0, 2t)| <= u) = erf(u / (2 sqrt t))`.
pub fn reflecting_bm_cdf(u: f64, t: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        libm::erf(u / (2.0 * t.sqrt()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{gamma, reciprocal_gamma};
    use crate::timechange::time_moment;

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn reproducible_and_partition_independent() {
        let rng = RngStream::new(7, 3);
        let s = Sampler::time_product(3, 1.0).unwrap();
        let a = s.sample(&rng, 150_000).unwrap();
        let b = s.sample(&rng, 150_000).unwrap();
        assert_eq!(a, b);
        // Blocks assembled out of order give the same batch.
        let (blocks, len) = Sampler::block_layout(150_000);
        let mut parts: Vec<(u64, Vec<f64>)> = (0..blocks).rev().map(|k| (k, s.sample_block(&rng, k, len(k)))).collect();
        parts.sort_by_key(|p| p.0);
        let joined: Vec<f64> = parts.into_iter().flat_map(|p| p.1).collect();
        assert_eq!(joined, a.values);
        let c = s.sample(&RngStream::new(7, 4), 1000).unwrap();
        assert_ne!(c.values[..], a.values[..1000]);
    }

    #[test]
    fn count_rules() {
        let rng = RngStream::new(1, 0);
        let law = GjLaw::new(3, 1, 1.0).unwrap();
        assert!(sample_gj(law, &rng, 0).is_err());
        let b = sample_gj(law, &rng, 1).unwrap();
        assert_eq!(b.values.len(), 1);
        assert!(b.values[0] > 0.0);
        assert_eq!(b.meta.count, 1);
    }

    #[test]
    fn reflecting_bm_second_moment_and_ks() {
        let rng = RngStream::new(20, 0);
        let b = sample_reflecting_bm(1.0, &rng, 200_000).unwrap();
        assert!(b.values.iter().all(|&v| v >= 0.0));
        let (m, se) = empirical_moment(&b.values, 2.0);
        assert!((m - 2.0).abs() < 3.0 * se, "{m} ± {se}");
        let v = sorted(b.values);
        let d = ks_statistic(&v, |u| reflecting_bm_cdf(u, 1.0));
        assert!(d * (v.len() as f64).sqrt() < KS_CRITICAL_5);
    }

    #[test]
    fn gj_mean_and_ks() {
        let rng = RngStream::new(21, 0);
        let b = sample_gj(GjLaw::new(2, 1, 1.0).unwrap(), &rng, 200_000).unwrap();
        let (m, se) = empirical_moment(&b.values, 1.0);
        assert!((m - 2.0 / core::f64::consts::PI.sqrt()).abs() < 3.0 * se);
        let law = GjLaw::new(3, 1, 1.0).unwrap();
        let table = gj_cdf_table(&law).unwrap();
        assert!((table.mass() - 1.0).abs() < 1e-10);
        let v = sorted(sample_gj(law, &RngStream::new(21, 1), 100_000).unwrap().values);
        let d = ks_statistic(&v, |w| table.eval(w));
        assert!(d * (v.len() as f64).sqrt() < KS_CRITICAL_5, "{d}");
    }

    #[test]
    fn product_moments() {
        let rng = RngStream::new(22, 0);
        let b = sample_time_product(4, 2.0, &rng, 200_000).unwrap();
        let (m, se) = empirical_moment(&b.values, 1.0);
        let e = 2f64.powf(0.25) * gamma(2.0) * reciprocal_gamma(1.25);
        assert!((m - e).abs() < 3.0 * se, "{m} vs {e}");
        assert!((time_moment(0.25, 1.0, 2.0) - e).abs() < 1e-14);
    }

    #[test]
    fn composed_symmetry_and_variance() {
        let rng = RngStream::new(23, 0);
        let b = sample_composed_bm(0.5, 1.0, &rng, 200_000).unwrap();
        let (m1, se1) = empirical_moment(&b.values, 1.0);
        assert!(m1.abs() < 3.0 * se1);
        let (m2, se2) = empirical_moment(&b.values, 2.0);
        let e = 4.0 / core::f64::consts::PI.sqrt();
        assert!((m2 - e).abs() < 3.0 * se2, "{m2} vs {e}");
        assert!(sample_composed_bm(0.3, 1.0, &rng, 10).is_err());
    }

    #[test]
    fn two_sample_equidistribution() {
        let a = sorted(sample_time_product(2, 1.0, &RngStream::new(24, 0), 100_000).unwrap().values);
        let b = sorted(sample_reflecting_bm(1.0, &RngStream::new(24, 1), 100_000).unwrap().values);
        let d = ks_two_sample(&a, &b);
        let lambda = d * (50_000f64).sqrt();
        assert!(kolmogorov_pvalue(lambda) > 0.05, "{d}");
    }

    #[test]
    fn kolmogorov_distribution_values() {
        assert!((kolmogorov_pvalue(KS_CRITICAL_5) - 0.05).abs() < 1e-6);
        assert_eq!(kolmogorov_pvalue(0.0), 1.0);
    }

    #[test]
    fn product_cdf_table_near_origin() {
        for m in [3u32, 4] {
            let a = 1.0 / m as f64;
            let table = time_product_cdf_table(m, 1.0).unwrap();
            for u in [1e-3, 5e-3, 2e-2, 0.5] {
                let q = crate::quadrature::integrate_breakpoints(
                    |v| crate::timechange::time_density_wright(a, v, 1.0).unwrap(),
                    &[0.0, u],
                    AdaptiveOptions::new(Tolerance::new(1e-15, 1e-13)),
                )
                .unwrap();
                assert!((table.eval(u) - q.value).abs() < 1e-9, "m={m} u={u}: {} vs {}", table.eval(u), q.value);
            }
        }
    }

    #[test]
    fn hermite_cdf_against_erf() {
        let pdf = |u: f64| (-u * u / 4.0).exp() / core::f64::consts::PI.sqrt();
        let worst = |panels: usize| {
            let t = CdfTable::new(pdf, 0.0, 20.0, panels).unwrap();
            (1..400)
                .map(|i| {
                    let u = 0.0123 + 0.01 * i as f64;
                    (t.eval(u) - reflecting_bm_cdf(u, 1.0)).abs()
                })
                .fold(0.0, f64::max)
        };
        let (coarse, fine) = (worst(256), worst(512));
        // Cubic Hermite bound h^4 max|f'''| / 384, with max|f'''| < 0.5 here.
        let h = 20.0 / 256.0;
        assert!(coarse < h.powi(4) * 0.5 / 384.0, "{coarse}");
        assert!(coarse / fine > 12.0, "{coarse} {fine}");
    }
}

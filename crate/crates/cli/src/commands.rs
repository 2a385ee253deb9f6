//! Execution of a parsed [`RunConfig`].

use std::fs::File;
use std::io::{self, BufWriter, Write};

use fracheat_core::kernel::kernel_density_tol;
use fracheat_core::montecarlo::{RngStream, Sampler};
use fracheat_core::solver::{solution_moment, SolutionEvaluator};
use fracheat_core::timechange::{time_density, time_moment, GjLaw, TimeChangeLaw, TimeRoute};
use rayon::prelude::*;

use crate::config::{Command, MomentTarget, RunConfig, SampleLaw};
use crate::output::{fmt_num, CsvOut};
use crate::validate::{run_suite, Scale};
use crate::CliError;

/// Runs `config`, writing CSV to its output. A failed validation suite is
/// reported as [`CliError::ValidationFailed`] after the report is written.
pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let sink: Box<dyn Write> = match &config.output {
        Some(path) => Box::new(File::create(path).map_err(|e| {
            CliError::Usage(format!("`output`: cannot create {}: {e}", path.display()))
        })?),
        None => Box::new(io::stdout().lock()),
    };
    run_to(&config.command, BufWriter::new(sink))
}

pub fn run_to<W: Write>(command: &Command, w: W) -> Result<(), CliError> {
    match command {
        Command::Kernel { spec, t, grid, tol } => {
            let rows = grid
                .values()
                .into_par_iter()
                .map(|x| kernel_density_tol(spec, x, *t, *tol))
                .collect::<Result<Vec<_>, _>>()?;
            let mut out = CsvOut::new(w, &["x", "value", "error_estimate"])?;
            for s in rows {
                out.row([fmt_num(s.x), fmt_num(s.value), fmt_num(s.error_estimate)])?;
            }
            out.finish()
        }
        Command::TimeDensity {
            alpha,
            t,
            grid,
            route,
        } => {
            let law = TimeChangeLaw::new(*alpha, *t, route.resolve(*alpha)?)?;
            let rows = grid
                .values()
                .into_par_iter()
                .map(|u| time_density(&law, u).map(|v| (u, v)))
                .collect::<Result<Vec<_>, _>>()?;
            let name = time_route_name(law.route);
            let mut out = CsvOut::new(w, &["u", "value", "route"])?;
            for (u, v) in rows {
                out.row([fmt_num(u).as_str(), &fmt_num(v), name])?;
            }
            out.finish()
        }
        Command::Solve {
            spec,
            alpha,
            t,
            grid,
            route,
        } => {
            let xs = grid.values();
            let scale = t.powf(-alpha / spec.n as f64);
            let xi_max = grid.min.abs().max(grid.max.abs()) * scale;
            let ev = SolutionEvaluator::new(spec, *alpha, *route, xi_max)?;
            let rows = xs
                .into_par_iter()
                .map(|x| ev.eval(x, *t))
                .collect::<Result<Vec<_>, _>>()?;
            let mut out = CsvOut::new(w, &["x", "value", "error_estimate"])?;
            for (s, _) in rows {
                out.row([fmt_num(s.x), fmt_num(s.value), fmt_num(s.error_estimate)])?;
            }
            out.finish()
        }
        Command::Moments(target) => {
            let mut out = CsvOut::new(w, &["order", "value"])?;
            match target {
                MomentTarget::Solution {
                    spec,
                    alpha,
                    t,
                    orders,
                } => {
                    for &r in orders {
                        out.row([r.to_string(), fmt_num(solution_moment(spec, *alpha, r, *t))])?;
                    }
                }
                MomentTarget::Time { alpha, t, deltas } => {
                    for &d in deltas {
                        out.row([fmt_num(d), fmt_num(time_moment(*alpha, d, *t))])?;
                    }
                }
            }
            out.finish()
        }
        Command::Sample {
            law,
            seed,
            stream,
            count,
        } => {
            let sampler = match *law {
                SampleLaw::Product { m, t } => Sampler::time_product(m, t)?,
                SampleLaw::Gj { m, j, t } => Sampler::gj(GjLaw::new(m, j, t)?)?,
                SampleLaw::ReflectingBm { t } => Sampler::reflecting_bm(t)?,
                SampleLaw::ComposedBm { alpha, t } => Sampler::composed_bm(alpha, t)?,
            };
            let values = sample_parallel(&sampler, &RngStream::new(*seed, *stream), *count);
            let mut out = CsvOut::new(w, &["index", "value"])?;
            for (i, v) in values.into_iter().enumerate() {
                out.row([i.to_string(), fmt_num(v)])?;
            }
            out.finish()
        }
        Command::Validate { quick } => {
            let scale = if *quick { Scale::Quick } else { Scale::Full };
            let report = run_suite(scale, |row| eprintln!("{}", row.human()));
            report.write_csv(w)?;
            eprintln!("{}", report.summary());
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::ValidationFailed {
                    failed: report.failed(),
                    total: report.rows.len(),
                })
            }
        }
    }
}

/// Same values as [`Sampler::sample`]: blocks are drawn in parallel and
/// concatenated in block order.
pub fn sample_parallel(sampler: &Sampler, rng: &RngStream, count: usize) -> Vec<f64> {
    let (blocks, len) = Sampler::block_layout(count);
    let parts: Vec<Vec<f64>> = (0..blocks)
        .into_par_iter()
        .map(|b| sampler.sample_block(rng, b, len(b)))
        .collect();
    parts.concat()
}

pub fn time_route_name(route: TimeRoute) -> &'static str {
    match route {
        TimeRoute::Wright => "wright",
        TimeRoute::FracIntegral => "frac-integral",
        TimeRoute::Stable => "stable",
        TimeRoute::Product(_) => "product",
        TimeRoute::Degenerate => "degenerate",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Grid;
    use fracheat_core::kernel::make_equation_spec;
    use fracheat_core::montecarlo::sample_time_product;

    fn csv(command: &Command) -> String {
        let mut buf = Vec::new();
        run_to(command, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn parallel_sampling_matches_serial() {
        let s = Sampler::time_product(3, 1.5).unwrap();
        let rng = RngStream::new(9, 2);
        let count = 3 * fracheat_core::montecarlo::BLOCK_SIZE / 2;
        let serial = sample_time_product(3, 1.5, &rng, count).unwrap().values;
        assert_eq!(sample_parallel(&s, &rng, count), serial);
    }

    #[test]
    fn half_order_time_density_rows() {
        let text = csv(&Command::TimeDensity {
            alpha: 0.5,
            t: 1.0,
            grid: "0:4:5".parse::<Grid>().unwrap(),
            route: crate::config::TimeRouteChoice::Auto,
        });
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows[0], "# fracheat v1");
        assert_eq!(rows[1], "u,value,route");
        assert_eq!(rows[3], "1,0.439391289,wright");
    }

    #[test]
    fn fourth_order_moment() {
        let spec = make_equation_spec(4, 1.0).unwrap();
        let text = csv(&Command::Moments(MomentTarget::Solution {
            spec,
            alpha: 0.5,
            t: 1.0,
            orders: vec![4],
        }));
        assert_eq!(text.lines().nth(2), Some("4,-27.0811"));
    }
}

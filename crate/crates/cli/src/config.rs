//! Run configuration from command-line flags and an optional `key = value`
//! file.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Arg, ArgAction, ArgMatches};
use fracheat_core::kernel::make_equation_spec;
use fracheat_core::solver::Route;
use fracheat_core::timechange::{FractionalOrder, TimeRoute};
use fracheat_core::{EquationSpec, Tolerance};

use crate::CliError;

/// Evenly spaced points `min + (max - min) i / (points - 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| match i {
                0 => self.min,
                i if i + 1 == self.points => self.max,
                i => self.min + (self.max - self.min) * i as f64 / last,
            })
            .collect()
    }
}

impl std::str::FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected min:max:points, got `{s}`"));
        }
        let min: f64 = parse_finite(parts[0])?;
        let max: f64 = parse_finite(parts[1])?;
        let points: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| format!("`{}` is not a point count", parts[2]))?;
        if points < 2 {
            return Err(format!("a grid needs at least 2 points, got {points}"));
        }
        if !(max > min) {
            return Err(format!("grid maximum {max} must exceed minimum {min}"));
        }
        Ok(Grid { min, max, points })
    }
}

/// Time-density representation requested on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeRouteChoice {
    /// Wright series, or the point mass at `alpha = 1`.
    Auto,
    Wright,
    FracIntegral,
    Stable,
    Product,
}

impl TimeRouteChoice {
    pub fn resolve(self, alpha: f64) -> Result<TimeRoute, CliError> {
        Ok(match self {
            TimeRouteChoice::Auto if alpha == 1.0 => TimeRoute::Degenerate,
            TimeRouteChoice::Auto | TimeRouteChoice::Wright => TimeRoute::Wright,
            TimeRouteChoice::FracIntegral => TimeRoute::FracIntegral,
            TimeRouteChoice::Stable => TimeRoute::Stable,
            TimeRouteChoice::Product => match FractionalOrder::new(alpha)?.reciprocal() {
                Some(m) => TimeRoute::Product(m),
                None => {
                    return Err(CliError::Usage(format!(
                        "`route`: product needs alpha = 1/m, got {alpha}"
                    )))
                }
            },
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MomentTarget {
    /// `int x^r u_alpha(x, t) dx` for each order.
    Solution {
        spec: EquationSpec,
        alpha: f64,
        t: f64,
        orders: Vec<u32>,
    },
    /// `E T_alpha(t)^delta` for each exponent.
    Time {
        alpha: f64,
        t: f64,
        deltas: Vec<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SampleLaw {
    Product { m: u32, t: f64 },
    Gj { m: u32, j: u32, t: f64 },
    ReflectingBm { t: f64 },
    ComposedBm { alpha: f64, t: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Kernel {
        spec: EquationSpec,
        t: f64,
        grid: Grid,
        tol: Tolerance,
    },
    TimeDensity {
        alpha: f64,
        t: f64,
        grid: Grid,
        route: TimeRouteChoice,
    },
    Solve {
        spec: EquationSpec,
        alpha: f64,
        t: f64,
        grid: Grid,
        route: Route,
    },
    Moments(MomentTarget),
    Sample {
        law: SampleLaw,
        seed: u64,
        stream: u64,
        count: usize,
    },
    Validate {
        quick: bool,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// CSV destination; standard output when absent.
    pub output: Option<PathBuf>,
}

const COMMANDS: [(&str, &str, &[&str]); 6] = [
    (
        "kernel",
        "Kernel p_n(x, t) of the integer-order equation on an x grid",
        &["n", "odd-sign", "t", "grid", "abs-tol", "rel-tol"],
    ),
    (
        "time-density",
        "Density of the random time T_alpha(t) on a u grid",
        &["alpha", "t", "grid", "route"],
    ),
    (
        "solve",
        "Fundamental solution u_alpha(x, t) on an x grid",
        &["n", "odd-sign", "alpha", "t", "grid", "route"],
    ),
    (
        "moments",
        "Closed-form moments of u_alpha (--r) or of T_alpha (--delta)",
        &["n", "odd-sign", "alpha", "t", "r", "delta"],
    ),
    (
        "sample",
        "Draw from a random-time law or a composed Brownian motion",
        &["law", "m", "j", "alpha", "t", "seed", "stream", "count"],
    ),
    (
        "validate",
        "Run the identity suite and report every check",
        &["quick"],
    ),
];

fn help(key: &str) -> &'static str {
    match key {
        "n" => "Equation order (n >= 2)",
        "odd-sign" => "Sign of k_n for odd n: +1 or -1",
        "t" => "Time (t > 0)",
        "alpha" => "Fractional order in (0, 1]",
        "grid" => "Evaluation grid min:max:points",
        "abs-tol" => "Absolute quadrature tolerance",
        "rel-tol" => "Relative quadrature tolerance",
        "route" => "solve: auto | subordination | fourier; time-density: auto | wright | frac-integral | stable | product",
        "r" => "Comma-separated solution moment orders",
        "delta" => "Comma-separated moment exponents of T_alpha(t)",
        "law" => "product | gj | reflecting-bm | composed-bm",
        "m" => "Number of factors (alpha = 1/m)",
        "j" => "Factor index 1..m for the gj law",
        "seed" => "Random seed",
        "stream" => "Random stream id (default 0)",
        "count" => "Number of samples",
        "quick" => "Reduced grids and sample sizes",
        _ => "",
    }
}

fn cli() -> clap::Command {
    let common = [
        Arg::new("config")
            .long("config")
            .value_name("FILE")
            .help("Flat key = value file; flags override its entries"),
        Arg::new("output")
            .long("output")
            .short('o')
            .value_name("FILE")
            .help("Write CSV here instead of standard output"),
    ];
    let mut cmd = clap::Command::new("fracheat")
        .about("Fundamental solutions of time-fractional higher-order heat-type equations")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true);
    for (name, about, keys) in COMMANDS {
        let mut sub = clap::Command::new(name).about(about).args(common.clone());
        for &key in keys {
            let arg = Arg::new(key).long(key).help(help(key));
            sub = sub.arg(if key == "quick" {
                arg.action(ArgAction::SetTrue)
            } else {
                arg.value_name("VALUE").allow_hyphen_values(true)
            });
        }
        cmd = cmd.subcommand(sub);
    }
    cmd
}

/// Outcome of argument parsing: a configuration, or text already rendered
/// for `--help` / `--version`.
#[derive(Debug)]
pub enum Parsed {
    Run(RunConfig),
    Info(String),
}

/// Parses `argv` (program name first) and the optional `--config` file.
pub fn parse_config<I, T>(argv: I) -> Result<Parsed, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match cli().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Ok(Parsed::Info(e.render().to_string()))
                }
                _ => Err(CliError::Usage(e.render().to_string())),
            }
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let keys = COMMANDS
        .iter()
        .find(|c| c.0 == name)
        .map(|c| c.2)
        .expect("registered subcommand");
    let mut values = match sub.get_one::<String>("config") {
        Some(path) => read_config_file(path, name, keys)?,
        None => BTreeMap::new(),
    };
    merge_flags(sub, keys, &mut values);
    let output = sub
        .get_one::<String>("output")
        .cloned()
        .or_else(|| values.remove("output"))
        .map(PathBuf::from);
    let command = build_command(name, &Values(values))?;
    Ok(Parsed::Run(RunConfig { command, output }))
}

fn merge_flags(sub: &ArgMatches, keys: &[&str], values: &mut BTreeMap<String, String>) {
    for &key in keys {
        if key == "quick" {
            if sub.get_flag(key) {
                values.insert(key.into(), "true".into());
            }
        } else if let Some(v) = sub.get_one::<String>(key) {
            values.insert(key.into(), v.clone());
        }
    }
}

fn read_config_file(
    path: &str,
    command: &str,
    keys: &[&str],
) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("`config`: cannot read {path}: {e}")))?;
    parse_config_text(&text, command, keys)
}

/// Parses `key = value` lines; blank lines and `#` comments are skipped and
/// `_` in keys is read as `-`.
pub fn parse_config_text(
    text: &str,
    command: &str,
    keys: &[&str],
) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config line {}: expected key = value, got `{line}`",
                i + 1
            )));
        };
        let key = k.trim().replace('_', "-");
        if key != "output" && !keys.contains(&key.as_str()) {
            return Err(CliError::Usage(format!(
                "config line {}: unknown key `{key}` for `{command}`",
                i + 1
            )));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

struct Values(BTreeMap<String, String>);

impl Values {
    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn required<T: std::str::FromStr>(&self, key: &str) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            Some(v) => parse_value(key, v),
            None => Err(CliError::Usage(format!("missing required key `{key}`"))),
        }
    }

    fn optional<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key).map(|v| parse_value(key, v)).transpose()
    }

    fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .map(|v| v.split(',').map(|s| parse_value(key, s)).collect())
            .transpose()
    }

    fn alpha(&self) -> Result<f64, CliError> {
        let a: f64 = self.required("alpha")?;
        if !(a > 0.0 && a <= 1.0) {
            return Err(CliError::Usage(format!("`alpha`: {a} must lie in (0, 1]")));
        }
        Ok(a)
    }

    fn t(&self) -> Result<f64, CliError> {
        let t: f64 = self.required("t")?;
        if !(t > 0.0) || !t.is_finite() {
            return Err(CliError::Usage(format!(
                "`t`: {t} must be positive and finite"
            )));
        }
        Ok(t)
    }

    fn spec(&self) -> Result<EquationSpec, CliError> {
        let n: u32 = self.required("n")?;
        if n < 2 {
            return Err(CliError::Usage(format!("`n`: {n} must be at least 2")));
        }
        let sign = match self.raw("odd-sign") {
            Some(s) => match s.trim() {
                "+1" | "1" | "+" => 1.0,
                "-1" | "-" => -1.0,
                other => {
                    return Err(CliError::Usage(format!(
                        "`odd-sign`: expected +1 or -1, got `{other}`"
                    )))
                }
            },
            None if n % 2 == 1 => {
                return Err(CliError::Usage(
                    "missing required key `odd-sign` (odd n)".into(),
                ))
            }
            None => 1.0,
        };
        Ok(make_equation_spec(n, sign)?)
    }
}

fn parse_finite(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a number"))?;
    if !v.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(v)
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    v.trim()
        .parse()
        .map_err(|e| CliError::Usage(format!("`{key}`: cannot parse `{v}`: {e}")))
}

fn build_command(name: &str, v: &Values) -> Result<Command, CliError> {
    Ok(match name {
        "kernel" => {
            let default = Tolerance::default();
            let abs: f64 = v.optional("abs-tol")?.unwrap_or(default.abs);
            let rel: f64 = v.optional("rel-tol")?.unwrap_or(default.rel);
            if !(abs >= 0.0 && rel >= 0.0) || abs + rel == 0.0 {
                return Err(CliError::Usage(
                    "`abs-tol`, `rel-tol`: need non-negative values, not both zero".into(),
                ));
            }
            Command::Kernel {
                spec: v.spec()?,
                t: v.t()?,
                grid: v.required("grid")?,
                tol: Tolerance::new(abs, rel),
            }
        }
        "time-density" => {
            let route = match v.raw("route").unwrap_or("auto") {
                "auto" => TimeRouteChoice::Auto,
                "wright" => TimeRouteChoice::Wright,
                "frac-integral" => TimeRouteChoice::FracIntegral,
                "stable" => TimeRouteChoice::Stable,
                "product" => TimeRouteChoice::Product,
                other => {
                    return Err(CliError::Usage(format!(
                        "`route`: unknown time-density route `{other}`"
                    )))
                }
            };
            let alpha = v.alpha()?;
            if alpha == 1.0 {
                return Err(CliError::Usage(
                    "`alpha`: T_1(t) = t is a point mass without a density".into(),
                ));
            }
            Command::TimeDensity {
                alpha,
                t: v.t()?,
                grid: v.required("grid")?,
                route,
            }
        }
        "solve" => {
            let route = match v.raw("route").unwrap_or("auto") {
                "auto" => Route::Auto,
                "subordination" => Route::Subordination,
                "fourier" => Route::FourierMl,
                other => {
                    return Err(CliError::Usage(format!(
                        "`route`: unknown solution route `{other}`"
                    )))
                }
            };
            Command::Solve {
                spec: v.spec()?,
                alpha: v.alpha()?,
                t: v.t()?,
                grid: v.required("grid")?,
                route,
            }
        }
        "moments" => {
            let orders: Option<Vec<u32>> = v.list("r")?;
            let deltas: Option<Vec<f64>> = v.list("delta")?;
            match (orders, deltas) {
                (Some(orders), None) => Command::Moments(MomentTarget::Solution {
                    spec: v.spec()?,
                    alpha: v.alpha()?,
                    t: v.t()?,
                    orders,
                }),
                (None, Some(deltas)) => {
                    if let Some(d) = deltas.iter().find(|d| !(**d >= 0.0) || !d.is_finite()) {
                        return Err(CliError::Usage(format!(
                            "`delta`: {d} must be non-negative"
                        )));
                    }
                    if v.raw("n").is_some() {
                        return Err(CliError::Usage(
                            "`n` does not apply to moments of T_alpha (`delta`)".into(),
                        ));
                    }
                    Command::Moments(MomentTarget::Time {
                        alpha: v.alpha()?,
                        t: v.t()?,
                        deltas,
                    })
                }
                _ => {
                    return Err(CliError::Usage(
                        "moments need exactly one of `r` and `delta`".into(),
                    ))
                }
            }
        }
        "sample" => {
            let count: usize = v.required("count")?;
            if count == 0 {
                return Err(CliError::Usage("`count`: must be at least 1".into()));
            }
            let m = || -> Result<u32, CliError> {
                let m: u32 = v.required("m")?;
                if m < 2 {
                    return Err(CliError::Usage(format!("`m`: {m} must be at least 2")));
                }
                Ok(m)
            };
            let law = match v.raw("law").unwrap_or("product") {
                "product" => SampleLaw::Product { m: m()?, t: v.t()? },
                "gj" => SampleLaw::Gj {
                    m: m()?,
                    j: v.required("j")?,
                    t: v.t()?,
                },
                "reflecting-bm" => SampleLaw::ReflectingBm { t: v.t()? },
                "composed-bm" => SampleLaw::ComposedBm {
                    alpha: v.alpha()?,
                    t: v.t()?,
                },
                other => return Err(CliError::Usage(format!("`law`: unknown law `{other}`"))),
            };
            Command::Sample {
                law,
                seed: v.required("seed")?,
                stream: v.optional("stream")?.unwrap_or(0),
                count,
            }
        }
        "validate" => Command::Validate {
            quick: v.optional("quick")?.unwrap_or(false),
        },
        _ => unreachable!("unregistered subcommand {name}"),
    })
}

//! Run configuration: defaults, `QSPEC_TOL`, an optional `key=value` file
//! and command-line flags, applied in that order.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use qspec_core::operator::default_half_width;
use qspec_core::{QParams, DEFAULT_TOL};

pub const TOL_ENV: &str = "QSPEC_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfWidth {
    Auto,
    Fixed(usize),
}

impl FromStr for HalfWidth {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(HalfWidth::Auto);
        }
        s.parse::<usize>()
            .map(HalfWidth::Fixed)
            .map_err(|_| format!("half-width must be a non-negative integer or \"auto\", got {s:?}"))
    }
}

impl fmt::Display for HalfWidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HalfWidth::Auto => f.write_str("auto"),
            HalfWidth::Fixed(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("format must be json or csv, got {s:?}")),
        }
    }
}

/// Values that may come from the config file or from flags. `None` means
/// "not given here".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub q: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub tol: Option<f64>,
    pub half_width: Option<HalfWidth>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub threshold: Option<f64>,
}

impl Overrides {
    /// Fields set in `other` replace those in `self`.
    pub fn merge(self, other: Overrides) -> Overrides {
        Overrides {
            q: other.q.or(self.q),
            alpha: other.alpha.or(self.alpha),
            beta: other.beta.or(self.beta),
            tol: other.tol.or(self.tol),
            half_width: other.half_width.or(self.half_width),
            format: other.format.or(self.format),
            output: other.output.or(self.output),
            seed: other.seed.or(self.seed),
            jobs: other.jobs.or(self.jobs),
            threshold: other.threshold.or(self.threshold),
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| anyhow::anyhow!("line {line}: bad value for {key}: {e}"))
}

/// Parses `key=value` lines. Blank lines and `#` comments are skipped;
/// keys use the flag names with `-` or `_`.
pub fn parse_config(text: &str) -> Result<Overrides> {
    let mut o = Overrides::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.split('#').next().unwrap_or("").trim();
        if s.is_empty() {
            continue;
        }
        let Some((k, v)) = s.split_once('=') else {
            bail!("line {line}: expected key=value, got {s:?}");
        };
        let key = k.trim().replace('-', "_");
        let v = v.trim();
        match key.as_str() {
            "q" => o.q = Some(parse_value(&key, v, line)?),
            "alpha" => o.alpha = Some(parse_value(&key, v, line)?),
            "beta" => o.beta = Some(parse_value(&key, v, line)?),
            "tol" => o.tol = Some(parse_value(&key, v, line)?),
            "half_width" => o.half_width = Some(parse_value(&key, v, line)?),
            "format" => o.format = Some(parse_value(&key, v, line)?),
            "output" => o.output = Some(PathBuf::from(v)),
            "seed" => o.seed = Some(parse_value(&key, v, line)?),
            "jobs" => o.jobs = Some(parse_value(&key, v, line)?),
            "threshold" => o.threshold = Some(parse_value(&key, v, line)?),
            _ => bail!("line {line}: unknown key {:?}", k.trim()),
        }
    }
    Ok(o)
}

pub fn read_config(path: &Path) -> Result<Overrides> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in config file {}", path.display()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: QParams,
    pub tol: f64,
    pub half_width: HalfWidth,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub seed: u64,
    pub jobs: usize,
    /// Replaces every per-check threshold of a verification suite.
    pub threshold: Option<f64>,
}

impl RunConfig {
    /// `env_tol` is the raw value of [`TOL_ENV`], if set.
    pub fn resolve(file: Overrides, flags: Overrides, env_tol: Option<&str>) -> Result<RunConfig> {
        let mut base = Overrides::default();
        if let Some(t) = env_tol {
            let t: f64 = t
                .trim()
                .parse()
                .with_context(|| format!("{TOL_ENV}={t:?} is not a number"))?;
            base.tol = Some(t);
        }
        let o = base.merge(file).merge(flags);
        let params = QParams::new(o.q.unwrap_or(0.5), o.alpha.unwrap_or(1.0), o.beta.unwrap_or(0.5))?;
        let tol = o.tol.unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol < 1.0) {
            bail!("tolerance {tol} must lie in (0, 1)");
        }
        let jobs = o.jobs.unwrap_or(1);
        if jobs == 0 {
            bail!("jobs must be at least 1");
        }
        if let Some(t) = o.threshold {
            if !(t > 0.0) {
                bail!("threshold {t} must be positive");
            }
        }
        Ok(RunConfig {
            params,
            tol,
            half_width: o.half_width.unwrap_or(HalfWidth::Auto),
            format: o.format.unwrap_or(Format::Json),
            output: o.output,
            seed: o.seed.unwrap_or(0),
            jobs,
            threshold: o.threshold,
        })
    }

    /// The operator truncation width; `auto` uses the coefficient-decay rule.
    pub fn operator_half_width(&self) -> usize {
        match self.half_width {
            HalfWidth::Auto => default_half_width(&self.params, self.tol),
            HalfWidth::Fixed(n) => n,
        }
    }
}

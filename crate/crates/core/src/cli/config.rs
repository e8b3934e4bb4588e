//! Flat `key = value` configuration files and their merge with flags.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{ProbabilityVector, DEFAULT_BURN_IN};
use crate::polynomial::PolynomialSpec;

pub const DEFAULT_SAMPLES: usize = 10_000;
pub const DEFAULT_SEED: u64 = 0;

/// Every setting a command can take. Unset fields fall back to per-command
/// defaults. Flags override values loaded from a file.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub height: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub general: Option<Vec<Complex64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub image: Option<PathBuf>,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[serde(skip)]
    pub table: Option<PathBuf>,
    #[serde(skip)]
    pub measure_out: Option<PathBuf>,
    #[serde(skip)]
    pub threads: Option<usize>,
    #[serde(skip)]
    pub no_timestamp: Option<bool>,
}

macro_rules! merge_fields {
    ($base:expr, $over:expr, $($field:ident),* $(,)?) => {
        RunConfig { $($field: $over.$field.or($base.$field),)* }
    };
}

impl RunConfig {
    /// Field-wise `over` if set, else `self`.
    pub fn overridden_by(self, over: RunConfig) -> RunConfig {
        merge_fields!(
            self, over, degree, alpha, beta, p, n, burn_in, seed, tail_tol, depth, zeta, schedule, branch, grid,
            h, theta, center, half_width, width, height, max_iter, general, image, output, table, measure_out,
            threads, no_timestamp,
        )
    }

    pub fn degree_or(&self, default: usize) -> usize {
        self.degree.unwrap_or(default)
    }

    /// The polynomial described by `degree`, `alpha` and `beta`; missing
    /// coefficient lists mean zeros.
    pub fn spec(&self) -> Result<PolynomialSpec> {
        let d = self
            .degree
            .ok_or_else(|| Error::invalid("degree", "a degree is required (--degree)"))?;
        self.spec_for(d)
    }

    pub fn spec_for(&self, d: usize) -> Result<PolynomialSpec> {
        if d < 2 {
            return Err(Error::invalid("degree", format!("degree must be at least 2, got {d}")));
        }
        let zeros = vec![0.0; d - 1];
        let alpha = self.alpha.clone().unwrap_or_else(|| zeros.clone());
        PolynomialSpec::from_parts(d, &alpha, self.beta.as_deref())
    }

    pub fn has_coefficients(&self) -> bool {
        self.alpha.is_some() || self.beta.is_some()
    }

    pub fn pvec(&self, d: usize) -> Result<ProbabilityVector> {
        match &self.p {
            Some(p) => {
                if p.len() != d {
                    return Err(Error::invalid("p", format!("degree {d} needs {d} probabilities, got {}", p.len())));
                }
                ProbabilityVector::new(p.clone())
            }
            None => Ok(ProbabilityVector::uniform(d)),
        }
    }

    pub fn samples(&self) -> usize {
        self.n.unwrap_or(DEFAULT_SAMPLES)
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in.unwrap_or(DEFAULT_BURN_IN)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}

pub fn parse_list<T: FromStr>(text: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| format!("cannot parse {s:?}: {e}")))
        .collect()
}

pub fn parse_value<T: FromStr>(text: &str) -> std::result::Result<T, String>
where
    T::Err: std::fmt::Display,
{
    let text = text.trim();
    text.parse::<T>().map_err(|e| format!("cannot parse {text:?}: {e}"))
}

/// A complex number written `re,im`, or in `a+bi` form.
pub fn parse_complex(text: &str) -> std::result::Result<Complex64, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [re, im] => Ok(Complex64::new(parse_value(re)?, parse_value(im)?)),
        [single] => parse_value::<Complex64>(single),
        _ => Err(format!("cannot parse {text:?} as a complex number")),
    }
}

/// Parses a configuration file. Keys mirror the long flags (`burn-in` and
/// `burn_in` are the same key); `#` starts a comment.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path)?;
    let mut cfg = RunConfig::default();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(format!("expected key = value, got {content:?}")))?;
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        let result: std::result::Result<(), String> = (|| {
            match key.as_str() {
                "degree" => cfg.degree = Some(parse_value(value)?),
                "alpha" => cfg.alpha = Some(parse_list(value)?),
                "beta" => cfg.beta = Some(parse_list(value)?),
                "p" => cfg.p = Some(parse_list(value)?),
                "n" => cfg.n = Some(parse_value(value)?),
                "burn_in" => cfg.burn_in = Some(parse_value(value)?),
                "seed" => cfg.seed = Some(parse_value(value)?),
                "tail_tol" => cfg.tail_tol = Some(parse_value(value)?),
                "depth" => cfg.depth = Some(parse_value(value)?),
                "zeta" => cfg.zeta = Some(parse_complex(value)?),
                "schedule" => cfg.schedule = Some(parse_list(value)?),
                "branch" => cfg.branch = Some(parse_list(value)?),
                "grid" => cfg.grid = Some(parse_value(value)?),
                "h" => cfg.h = Some(parse_value(value)?),
                "theta" => cfg.theta = Some(parse_list(value)?),
                "center" => cfg.center = Some(parse_complex(value)?),
                "half_width" => cfg.half_width = Some(parse_value(value)?),
                "width" => cfg.width = Some(parse_value(value)?),
                "height" => cfg.height = Some(parse_value(value)?),
                "max_iter" => cfg.max_iter = Some(parse_value(value)?),
                "general" => cfg.general = Some(parse_list(value)?),
                "image" => cfg.image = Some(PathBuf::from(value)),
                "output" => cfg.output = Some(PathBuf::from(value)),
                "table" => cfg.table = Some(PathBuf::from(value)),
                "measure_out" => cfg.measure_out = Some(PathBuf::from(value)),
                "threads" => cfg.threads = Some(parse_value(value)?),
                "no_timestamp" => cfg.no_timestamp = Some(parse_value(value)?),
                other => return Err(format!("unknown key {other:?}")),
            }
            Ok(())
        })();
        result.map_err(err)?;
    }
    Ok(cfg)
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::{parse_complex, parse_list, RunConfig};
use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "lyap",
    version,
    about = "Lyapunov exponents of monic centred polynomials on their Julia sets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo estimate over sampled backward orbits
    Estimate {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
        /// Write the sampled measure as `re im weight` columns
        #[arg(long)]
        measure_out: Option<PathBuf>,
        #[command(flatten)]
        shared: SharedArgs,
    },
    /// Exact average over the full preimage tree
    Tree {
        #[command(flatten)]
        model: ModelArgs,
        /// Branch probabilities, comma separated (default uniform)
        #[arg(long, allow_hyphen_values = true)]
        p: Option<String>,
        /// Tree depth (default 12)
        #[arg(long)]
        depth: Option<usize>,
        /// Root of the tree as `re,im` (default: escape radius on the real axis)
        #[arg(long, allow_hyphen_values = true)]
        zeta: Option<String>,
        #[arg(long)]
        measure_out: Option<PathBuf>,
        #[command(flatten)]
        shared: SharedArgs,
    },
    /// Degenerate-weight closed forms for real and complex coefficients
    ClosedForm {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        shared: SharedArgs,
    },
    /// Coefficient functions and conjugacy residuals on the unit circle
    Series {
        #[command(flatten)]
        model: ModelArgs,
        /// Angles in radians, comma separated (default 0)
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<String>,
        /// Truncation tolerance of every series tail (default 1e-12)
        #[arg(long)]
        tail_tol: Option<f64>,
        #[command(flatten)]
        shared: SharedArgs,
    },
    /// Derivative identities, reference closed-form values and degenerate-limit tables
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        /// Finite-difference step (default 1e-3)
        #[arg(long)]
        h: Option<f64>,
        #[command(flatten)]
        shared: SharedArgs,
    },
    /// Monte Carlo, closed form and fixed-point oracle as one weight tends to 1
    Compare {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
        /// Increasing weights on the distinguished branch (default 0.9,0.99,0.999)
        #[arg(long)]
        schedule: Option<String>,
        /// Branches to report (default all)
        #[arg(long)]
        branch: Option<String>,
        #[command(flatten)]
        shared: SharedArgs,
    },
    /// Entropy plus Lyapunov exponent over a grid of Bernoulli weights
    Pressure {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
        /// Grid resolution m, weights k/m (default 10)
        #[arg(long)]
        grid: Option<usize>,
        #[command(flatten)]
        shared: SharedArgs,
    },
    /// Escape-time image of the filled Julia set
    Render {
        #[command(flatten)]
        model: ModelArgs,
        /// Image centre as `re,im` (default 0,0)
        #[arg(long, allow_hyphen_values = true)]
        center: Option<String>,
        /// Half the width of the view (default 1.6)
        #[arg(long)]
        half_width: Option<f64>,
        #[arg(long)]
        width: Option<usize>,
        #[arg(long)]
        height: Option<usize>,
        #[arg(long)]
        max_iter: Option<u32>,
        /// Output pixmap (default julia.ppm)
        #[arg(long)]
        image: Option<PathBuf>,
        #[command(flatten)]
        shared: SharedArgs,
    },
    /// Affine conjugation of a general polynomial into monic centred form
    Normalize {
        /// Ascending coefficients B_0..B_d, each real or `a+bi`
        #[arg(long, allow_hyphen_values = true)]
        general: Option<String>,
        #[command(flatten)]
        shared: SharedArgs,
    },
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub degree: Option<usize>,
    /// Real parts alpha_0..alpha_{d-2}, comma separated
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Imaginary parts beta_0..beta_{d-2}; absent means all zero
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
}

#[derive(Debug, Args)]
pub struct SamplingArgs {
    /// Branch probabilities, comma separated (default uniform)
    #[arg(long)]
    pub p: Option<String>,
    /// Number of sampled orbits
    #[arg(long, short)]
    pub n: Option<usize>,
    /// Backward steps per orbit
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SharedArgs {
    /// key = value file; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Machine-readable JSON report
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Comma-separated table
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Worker threads
    #[arg(long, env = "LYAP_THREADS")]
    pub threads: Option<usize>,
    /// Leave the timestamp out of the JSON report
    #[arg(long)]
    pub no_timestamp: bool,
}

fn list<T: std::str::FromStr>(field: &'static str, text: &Option<String>) -> Result<Option<Vec<T>>>
where
    T::Err: std::fmt::Display,
{
    text.as_deref()
        .map(|t| parse_list(t).map_err(|m| Error::invalid(field, m)))
        .transpose()
}

fn complex(field: &'static str, text: &Option<String>) -> Result<Option<num_complex::Complex64>> {
    text.as_deref()
        .map(|t| parse_complex(t).map_err(|m| Error::invalid(field, m)))
        .transpose()
}

impl ModelArgs {
    fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        cfg.degree = self.degree;
        cfg.alpha = list("alpha", &self.alpha)?;
        cfg.beta = list("beta", &self.beta)?;
        Ok(())
    }
}

impl SamplingArgs {
    fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        cfg.p = list("p", &self.p)?;
        cfg.n = self.n;
        cfg.burn_in = self.burn_in;
        cfg.seed = self.seed;
        Ok(())
    }
}

impl SharedArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        cfg.output = self.output.clone();
        cfg.table = self.table.clone();
        cfg.threads = self.threads;
        cfg.no_timestamp = self.no_timestamp.then_some(true);
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Estimate { .. } => "estimate",
            Command::Tree { .. } => "tree",
            Command::ClosedForm { .. } => "closed-form",
            Command::Series { .. } => "series",
            Command::Verify { .. } => "verify",
            Command::Compare { .. } => "compare",
            Command::Pressure { .. } => "pressure",
            Command::Render { .. } => "render",
            Command::Normalize { .. } => "normalize",
        }
    }

    pub fn shared(&self) -> &SharedArgs {
        match self {
            Command::Estimate { shared, .. }
            | Command::Tree { shared, .. }
            | Command::ClosedForm { shared, .. }
            | Command::Series { shared, .. }
            | Command::Verify { shared, .. }
            | Command::Compare { shared, .. }
            | Command::Pressure { shared, .. }
            | Command::Render { shared, .. }
            | Command::Normalize { shared, .. } => shared,
        }
    }

    /// The settings given on the command line.
    pub fn flag_config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        self.shared().apply(&mut cfg);
        match self {
            Command::Estimate {
                model,
                sampling,
                measure_out,
                ..
            } => {
                model.apply(&mut cfg)?;
                sampling.apply(&mut cfg)?;
                cfg.measure_out = measure_out.clone();
            }
            Command::Tree {
                model,
                p,
                depth,
                zeta,
                measure_out,
                ..
            } => {
                model.apply(&mut cfg)?;
                cfg.p = list("p", p)?;
                cfg.depth = *depth;
                cfg.zeta = complex("zeta", zeta)?;
                cfg.measure_out = measure_out.clone();
            }
            Command::ClosedForm { model, .. } => model.apply(&mut cfg)?,
            Command::Series {
                model, theta, tail_tol, ..
            } => {
                model.apply(&mut cfg)?;
                cfg.theta = list("theta", theta)?;
                cfg.tail_tol = *tail_tol;
            }
            Command::Verify { model, h, .. } => {
                model.apply(&mut cfg)?;
                cfg.h = *h;
            }
            Command::Compare {
                model,
                sampling,
                schedule,
                branch,
                ..
            } => {
                model.apply(&mut cfg)?;
                sampling.apply(&mut cfg)?;
                cfg.schedule = list("schedule", schedule)?;
                cfg.branch = list("branch", branch)?;
            }
            Command::Pressure {
                model, sampling, grid, ..
            } => {
                model.apply(&mut cfg)?;
                sampling.apply(&mut cfg)?;
                cfg.grid = *grid;
            }
            Command::Render {
                model,
                center,
                half_width,
                width,
                height,
                max_iter,
                image,
                ..
            } => {
                model.apply(&mut cfg)?;
                cfg.center = complex("center", center)?;
                cfg.half_width = *half_width;
                cfg.width = *width;
                cfg.height = *height;
                cfg.max_iter = *max_iter;
                cfg.image = image.clone();
            }
            Command::Normalize { general, .. } => {
                cfg.general = list("general", general)?;
            }
        }
        Ok(cfg)
    }
}

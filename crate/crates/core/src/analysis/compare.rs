use serde::{Deserialize, Serialize};

use super::closed_form::closed_form_complex;
use super::estimate::{fixed_point_exponent, lyapunov_mc};
use crate::backward::check_branch;
use crate::error::{Error, Result};
use crate::measure::{ProbabilityVector, DEFAULT_BURN_IN};
use crate::polynomial::PolynomialSpec;

/// Sampling parameters shared by every Monte Carlo call of a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McParams {
    pub n_samples: usize,
    pub burn_in: usize,
    pub seed: u64,
}

impl Default for McParams {
    fn default() -> Self {
        Self {
            n_samples: 10_000,
            burn_in: DEFAULT_BURN_IN,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    /// Weight on the distinguished branch; the others share `1 - p_j` equally.
    pub p_j: f64,
    pub branch: usize,
    pub mc: f64,
    pub mc_stderr: f64,
    pub closed_form: f64,
    pub fixed_point: f64,
    pub gap_mc_fixed_point: f64,
    pub gap_closed_form_fixed_point: f64,
    pub gap_closed_form_mc: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub degree: usize,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub mc: McParams,
    pub rows: Vec<ComparisonRow>,
}

fn check_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::invalid("schedule", "at least one weight is needed"));
    }
    if schedule.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
        return Err(Error::invalid("schedule", "weights must lie strictly between 0 and 1"));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("schedule", "weights must be strictly increasing"));
    }
    Ok(())
}

/// Monte Carlo, closed form and fixed-point oracle side by side as the
/// weight on one branch increases toward 1. Gaps are reported, not judged.
pub fn comparison_report(
    spec: &PolynomialSpec,
    schedule: &[f64],
    branches: &[usize],
    mc: &McParams,
) -> Result<ComparisonReport> {
    check_schedule(schedule)?;
    if branches.is_empty() {
        return Err(Error::invalid("branch", "at least one branch is needed"));
    }
    for &j in branches {
        check_branch(spec, j)?;
    }
    let d = spec.degree();
    let closed_form = closed_form_complex(spec).value;
    let mut rows = Vec::with_capacity(schedule.len() * branches.len());
    for &j in branches {
        let fixed_point = fixed_point_exponent(spec, j)?.value;
        for &p_j in schedule {
            let p = ProbabilityVector::concentrated(d, j, p_j)?;
            let est = lyapunov_mc(spec, &p, mc.n_samples, mc.burn_in, mc.seed)?;
            rows.push(ComparisonRow {
                p_j,
                branch: j,
                mc: est.value,
                mc_stderr: est.stderr,
                closed_form,
                fixed_point,
                gap_mc_fixed_point: est.value - fixed_point,
                gap_closed_form_fixed_point: closed_form - fixed_point,
                gap_closed_form_mc: closed_form - est.value,
            });
        }
    }
    Ok(ComparisonReport {
        degree: d,
        alpha: spec.alpha(),
        beta: spec.beta(),
        mc: *mc,
        rows,
    })
}

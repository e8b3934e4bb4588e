use serde::{Deserialize, Serialize};

use super::compare::McParams;
use super::estimate::lyapunov_mc;
use crate::error::{Error, Result};
use crate::measure::ProbabilityVector;
use crate::polynomial::PolynomialSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PressureCell {
    /// Grid numerators `k_j`, with `p_j = k_j / m`.
    pub k: Vec<usize>,
    pub p: ProbabilityVector,
    pub entropy: f64,
    pub lyapunov: f64,
    pub stderr: f64,
    /// `entropy + lyapunov`
    pub value: f64,
}

/// Largest `h(p) + Lambda(p)` over Bernoulli weights on a simplex grid: a lower
/// bound for the pressure of `-log|P'|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PressureScanResult {
    pub degree: usize,
    pub grid_resolution: usize,
    pub mc: McParams,
    pub best_p: ProbabilityVector,
    pub best_value: f64,
    pub best_stderr: f64,
    pub cells: Vec<PressureCell>,
}

/// All `k` with `k_j >= 1` and `sum k_j = m`, in lexicographic order.
pub fn simplex_grid(d: usize, m: usize) -> Vec<Vec<usize>> {
    fn fill(prefix: &mut Vec<usize>, left: usize, slots: usize, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 1..=left - (slots - 1) {
            prefix.push(k);
            fill(prefix, left - k, slots - 1, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if d >= 1 && m >= d {
        fill(&mut Vec::with_capacity(d), m, d, &mut out);
    }
    out
}

/// Every cell uses the same seed, so differences between cells are not
/// sampling noise in the branch choices.
pub fn pressure_scan(spec: &PolynomialSpec, m: usize, mc: &McParams) -> Result<PressureScanResult> {
    let d = spec.degree();
    if m < 2 || m < d {
        return Err(Error::invalid(
            "grid_resolution",
            format!("resolution must be at least max(2, d) = {}, got {m}", d.max(2)),
        ));
    }
    let mut cells = Vec::new();
    for k in simplex_grid(d, m) {
        let p = ProbabilityVector::new(k.iter().map(|&kj| kj as f64 / m as f64).collect())?;
        let est = lyapunov_mc(spec, &p, mc.n_samples, mc.burn_in, mc.seed)?;
        let entropy = p.entropy();
        cells.push(PressureCell {
            k,
            p,
            entropy,
            lyapunov: est.value,
            stderr: est.stderr,
            value: entropy + est.value,
        });
    }
    let best = cells
        .iter()
        .fold(&cells[0], |best, c| if c.value > best.value { c } else { best });
    Ok(PressureScanResult {
        degree: d,
        grid_resolution: m,
        mc: *mc,
        best_p: best.p.clone(),
        best_value: best.value,
        best_stderr: best.stderr,
        cells: cells.clone(),
    })
}

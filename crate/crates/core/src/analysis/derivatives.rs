use serde::{Deserialize, Serialize};

use super::closed_form::{complex_excess, real_excess};
use crate::error::{Error, Result};
use crate::polynomial::PolynomialSpec;

/// Default central-difference step.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Finite-difference derivatives of the complex closed form with respect to
/// the real and imaginary parts of the coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeReport {
    pub degree: usize,
    pub step: f64,
    pub grad_alpha: Vec<f64>,
    pub grad_beta: Vec<f64>,
    pub h_alpha_alpha: Vec<Vec<f64>>,
    pub h_beta_beta: Vec<Vec<f64>>,
    /// `max |H_aa[r][s] + H_bb[r][s]|`
    pub max_antisymmetry_defect: f64,
    /// Diagonal second derivatives as stated alongside the closed form,
    /// `(d - 2r + 1) / (2 (d-1)^2)`.
    pub printed_diagonal: Vec<f64>,
    /// `H_aa[r][r] / printed_diagonal[r]`; differentiating the quadratic term
    /// directly gives 2.
    pub diagonal_ratio: Vec<f64>,
}

fn check_step(h: f64) -> Result<()> {
    if !(1e-4..=1e-2).contains(&h) {
        return Err(Error::invalid("h", format!("step must lie in [1e-4, 1e-2], got {h}")));
    }
    Ok(())
}

fn shifted(x: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut y = x.to_vec();
    for &(i, dx) in moves {
        y[i] += dx;
    }
    y
}

fn gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| (f(&shifted(x, &[(i, h)])) - f(&shifted(x, &[(i, -h)]))) / (2.0 * h))
        .collect()
}

fn hessian(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let n = x.len();
    let f0 = f(x);
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        m[i][i] = (f(&shifted(x, &[(i, h)])) - 2.0 * f0 + f(&shifted(x, &[(i, -h)]))) / (h * h);
        for j in i + 1..n {
            let pp = f(&shifted(x, &[(i, h), (j, h)]));
            let pm = f(&shifted(x, &[(i, h), (j, -h)]));
            let mp = f(&shifted(x, &[(i, -h), (j, h)]));
            let mm = f(&shifted(x, &[(i, -h), (j, -h)]));
            let v = ((pp - pm) - (mp - mm)) / (4.0 * h * h);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    m
}

pub fn derivative_report(spec: &PolynomialSpec, h: f64) -> Result<DerivativeReport> {
    check_step(h)?;
    let d = spec.degree();
    let alpha = spec.alpha();
    let beta = spec.beta();
    let in_alpha = |a: &[f64]| complex_excess(a, &beta);
    let in_beta = |b: &[f64]| complex_excess(&alpha, b);
    let h_alpha_alpha = hessian(&in_alpha, &alpha, h);
    let h_beta_beta = hessian(&in_beta, &beta, h);
    let mut defect: f64 = 0.0;
    for (ra, rb) in h_alpha_alpha.iter().zip(&h_beta_beta) {
        for (a, b) in ra.iter().zip(rb) {
            defect = defect.max((a + b).abs());
        }
    }
    let dm1 = d as f64 - 1.0;
    let printed_diagonal: Vec<f64> = (0..d - 1)
        .map(|r| (d as f64 - 2.0 * r as f64 + 1.0) / (2.0 * dm1 * dm1))
        .collect();
    let diagonal_ratio = printed_diagonal
        .iter()
        .enumerate()
        .map(|(r, p)| h_alpha_alpha[r][r] / p)
        .collect();
    Ok(DerivativeReport {
        degree: d,
        step: h,
        grad_alpha: gradient(&in_alpha, &alpha, h),
        grad_beta: gradient(&in_beta, &beta, h),
        h_alpha_alpha,
        h_beta_beta,
        max_antisymmetry_defect: defect,
        printed_diagonal,
        diagonal_ratio,
    })
}

/// Real-formula and complex-formula derivatives in `alpha` at `beta = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealFormulaReport {
    pub degree: usize,
    pub step: f64,
    pub grad_real: Vec<f64>,
    pub grad_complex: Vec<f64>,
    pub hessian_real: Vec<Vec<f64>>,
    pub hessian_complex: Vec<Vec<f64>>,
    pub grad_deviation: f64,
    pub hessian_deviation: f64,
    pub max_deviation: f64,
}

fn max_abs_diff<'a>(a: impl Iterator<Item = &'a f64>, b: impl Iterator<Item = &'a f64>) -> f64 {
    a.zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn real_formula_report(spec: &PolynomialSpec, h: f64) -> Result<RealFormulaReport> {
    check_step(h)?;
    if !spec.is_real() {
        return Err(Error::invalid("beta", "the comparison is made at beta = 0"));
    }
    let alpha = spec.alpha();
    let zeros = vec![0.0; alpha.len()];
    let real = |a: &[f64]| real_excess(a);
    let complex = |a: &[f64]| complex_excess(a, &zeros);
    let grad_real = gradient(&real, &alpha, h);
    let grad_complex = gradient(&complex, &alpha, h);
    let hessian_real = hessian(&real, &alpha, h);
    let hessian_complex = hessian(&complex, &alpha, h);
    let grad_deviation = max_abs_diff(grad_real.iter(), grad_complex.iter());
    let hessian_deviation = max_abs_diff(hessian_real.iter().flatten(), hessian_complex.iter().flatten());
    Ok(RealFormulaReport {
        degree: spec.degree(),
        step: h,
        grad_real,
        grad_complex,
        hessian_real,
        hessian_complex,
        grad_deviation,
        hessian_deviation,
        max_deviation: grad_deviation.max(hessian_deviation),
    })
}

/// Largest gradient or Hessian deviation between the two formulas.
pub fn verify_real_formula(spec: &PolynomialSpec, h: f64) -> Result<f64> {
    Ok(real_formula_report(spec, h)?.max_deviation)
}

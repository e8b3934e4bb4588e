use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::closed_form::closed_form_complex;
use super::{LyapunovEstimate, Method};
use crate::error::{Error, Result};
use crate::measure::{integrate_values, EmpiricalMeasure, MeasureMode};
use crate::polynomial::PolynomialSpec;
use crate::series::{CoefficientFunctions, ConjugacyApprox, ConjugacyOrder, SeriesTruncation};

/// The seven integrand families of the second-order expansion of
/// `-int log|Phi(z)|`, with `w_r = A_r conj(z) phi_r(z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionFamily {
    /// `Re(A_r conj(z) phi_r)`
    FirstOrder,
    /// `Re(A_r^2 conj(z) phi_{r^2})`
    Diagonal,
    /// `(Re w_r)^2 / 2`
    HalfReSquared,
    /// `(Im w_r)^2 / 2`
    HalfImSquared,
    /// `Re(A_r A_s conj(z) phi_{rs})`
    Mixed,
    /// `Re w_r * Re w_s`
    ReProduct,
    /// `Im w_r * Im w_s`
    ImProduct,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionRow {
    pub family: ExpansionFamily,
    pub r: usize,
    pub s: Option<usize>,
    pub value: f64,
    pub stderr: f64,
    /// The value of the integrand at `z = 1`, which is the limit when the
    /// measure collapses onto the fixed point `1` of `z^d`.
    pub degenerate_limit: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub degree: usize,
    pub truncation: SeriesTruncation,
    pub measure_mode: MeasureMode,
    pub n: usize,
    pub rows: Vec<ExpansionRow>,
    /// `int sum_r Re w_r`
    pub first_order: f64,
    /// `int sum_r [Re(A_r^2 conj(z) phi_{r^2}) - (Re w_r)^2/2 + (Im w_r)^2/2]`
    pub second_order_diagonal: f64,
    /// `int sum_{r<s} [Re(A_r A_s conj(z) phi_{rs}) - Re w_r Re w_s + Im w_r Im w_s]`
    pub second_order_mixed: f64,
    /// `-log d - (first_order + second_order_diagonal + second_order_mixed)`
    pub expansion: LyapunovEstimate,
    /// `-log d - int log|Phi_2(z)|` with the second-order conjugacy `Phi_2`.
    pub transferred_functional: f64,
    /// The complex closed form at the same coefficients, for reference.
    pub closed_form: f64,
}

fn limits(spec: &PolynomialSpec) -> Vec<(ExpansionFamily, usize, Option<usize>, f64)> {
    let d = spec.degree() as f64;
    let dm1_sq = (d - 1.0) * (d - 1.0);
    let a = spec.alpha();
    let b = spec.beta();
    let n = a.len();
    let mut rows = Vec::new();
    for r in 0..n {
        rows.push((ExpansionFamily::FirstOrder, r, None, -a[r] / (d - 1.0)));
    }
    for r in 0..n {
        let c = -(d - 2.0 * r as f64) / (2.0 * dm1_sq);
        rows.push((ExpansionFamily::Diagonal, r, None, c * (a[r] * a[r] - b[r] * b[r])));
    }
    for r in 0..n {
        rows.push((ExpansionFamily::HalfReSquared, r, None, 0.5 * a[r] * a[r] / dm1_sq));
    }
    for r in 0..n {
        rows.push((ExpansionFamily::HalfImSquared, r, None, 0.5 * b[r] * b[r] / dm1_sq));
    }
    for family in [ExpansionFamily::Mixed, ExpansionFamily::ReProduct, ExpansionFamily::ImProduct] {
        for r in 0..n {
            for s in r + 1..n {
                let limit = match family {
                    ExpansionFamily::Mixed => {
                        -(d - (r + s) as f64) / dm1_sq * (a[r] * a[s] - b[r] * b[s])
                    }
                    ExpansionFamily::ReProduct => a[r] * a[s] / dm1_sq,
                    _ => b[r] * b[s] / dm1_sq,
                };
                rows.push((family, r, Some(s), limit));
            }
        }
    }
    rows
}

/// Per-point values: one per row of [`limits`], then the three brackets and
/// `log|Phi_2(z)|`.
fn point_values(
    spec: &PolynomialSpec,
    layout: &[(ExpansionFamily, usize, Option<usize>, f64)],
    conjugacy: &ConjugacyApprox,
    z: Complex64,
) -> Result<Vec<f64>> {
    let phi = CoefficientFunctions::at(z, &conjugacy.trunc)?;
    let a = spec.coeffs();
    let n = a.len();
    let zc = z.conj();
    let w: Vec<Complex64> = (0..n)
        .map(|r| phi.phi_r(r).map(|v| a[r] * zc * v))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(layout.len() + 4);
    let mut first = 0.0;
    let mut diag = 0.0;
    let mut mixed = 0.0;
    for &(family, r, s, _) in layout {
        let v = match family {
            ExpansionFamily::FirstOrder => {
                first += w[r].re;
                w[r].re
            }
            ExpansionFamily::Diagonal => {
                let u = (a[r] * a[r] * zc * phi.phi_r2(r)?).re;
                diag += u - 0.5 * w[r].re * w[r].re + 0.5 * w[r].im * w[r].im;
                u
            }
            ExpansionFamily::HalfReSquared => 0.5 * w[r].re * w[r].re,
            ExpansionFamily::HalfImSquared => 0.5 * w[r].im * w[r].im,
            ExpansionFamily::Mixed => {
                let s = s.expect("mixed rows carry s");
                let u = (a[r] * a[s] * zc * phi.phi_rs(r, s)?).re;
                mixed += u - w[r].re * w[s].re + w[r].im * w[s].im;
                u
            }
            ExpansionFamily::ReProduct => w[r].re * w[s.expect("pair")].re,
            ExpansionFamily::ImProduct => w[r].im * w[s.expect("pair")].im,
        };
        out.push(v);
    }
    out.push(first);
    out.push(diag);
    out.push(mixed);
    out.push(conjugacy.eval(z)?.norm().ln());
    Ok(out)
}

/// Integrates every term of the second-order expansion of `-int log|Phi|`
/// against a measure on the unit circle (a measure of `z^d`).
pub fn expansion_terms(
    spec: &PolynomialSpec,
    measure: &EmpiricalMeasure,
    trunc: &SeriesTruncation,
) -> Result<ExpansionReport> {
    if measure.meta.spec.degree() != spec.degree() {
        return Err(Error::invalid(
            "measure",
            format!(
                "measure built for degree {}, coefficients have degree {}",
                measure.meta.spec.degree(),
                spec.degree()
            ),
        ));
    }
    let conjugacy = ConjugacyApprox::new(spec, ConjugacyOrder::Second, *trunc)?;
    let layout = limits(spec);
    let table = measure
        .points
        .par_iter()
        .map(|&z| point_values(spec, &layout, &conjugacy, z))
        .collect::<Result<Vec<_>>>()?;
    let column = |k: usize| {
        let values: Vec<f64> = table.iter().map(|row| row[k]).collect();
        integrate_values(measure, &values)
    };
    let rows = layout
        .iter()
        .enumerate()
        .map(|(k, &(family, r, s, degenerate_limit))| {
            let est = column(k);
            ExpansionRow {
                family,
                r,
                s,
                value: est.mean,
                stderr: est.stderr,
                degenerate_limit,
            }
        })
        .collect();
    let m = layout.len();
    let first = column(m);
    let diag = column(m + 1);
    let mixed = column(m + 2);
    let log_phi = column(m + 3);
    let d = spec.degree() as f64;
    let brackets = first.mean + diag.mean + mixed.mean;
    let stderr = first.stderr + diag.stderr + mixed.stderr;
    Ok(ExpansionReport {
        degree: spec.degree(),
        truncation: *trunc,
        measure_mode: measure.meta.mode,
        n: measure.len(),
        rows,
        first_order: first.mean,
        second_order_diagonal: diag.mean,
        second_order_mixed: mixed.mean,
        expansion: LyapunovEstimate {
            value: -d.ln() - brackets,
            stderr,
            n: measure.len(),
            method: Method::Expansion,
        },
        transferred_functional: -d.ln() - log_phi.mean,
        closed_form: closed_form_complex(spec).value,
    })
}

impl ExpansionReport {
    pub fn row(&self, family: ExpansionFamily, r: usize, s: Option<usize>) -> Option<&ExpansionRow> {
        self.rows.iter().find(|row| row.family == family && row.r == r && row.s == s)
    }
}

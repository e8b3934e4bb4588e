use super::{LyapunovEstimate, Method};
use crate::error::{Error, Result};
use crate::polynomial::PolynomialSpec;

struct Parts {
    linear: f64,
    diag_a: f64,
    diag_b: f64,
    cross_a: f64,
    cross_b: f64,
}

/// The linear and quadratic sums of the degenerate limit, each accumulated in
/// index order so that the real and complex formulas agree bitwise at `beta = 0`.
fn parts(alpha: &[f64], beta: &[f64]) -> Parts {
    let n = alpha.len();
    let d = (n + 1) as f64;
    let dm1 = d - 1.0;
    let dm1_sq = dm1 * dm1;
    let mut p = Parts {
        linear: 0.0,
        diag_a: 0.0,
        diag_b: 0.0,
        cross_a: 0.0,
        cross_b: 0.0,
    };
    for r in 0..n {
        p.linear += alpha[r] / dm1;
    }
    for r in 0..n {
        let c = (d - 2.0 * r as f64 + 1.0) / (2.0 * dm1_sq);
        p.diag_a += c * alpha[r] * alpha[r];
        p.diag_b += c * beta[r] * beta[r];
    }
    for r in 0..n {
        for s in r + 1..n {
            let c = (d - (r + s) as f64 + 1.0) / dm1_sq;
            p.cross_a += c * alpha[r] * alpha[s];
            p.cross_b += c * beta[r] * beta[s];
        }
    }
    p
}

/// `Lambda + log d` for the complex formula, without the constant. Finite
/// differences of this avoid cancellation against `log d`.
pub(crate) fn complex_excess(alpha: &[f64], beta: &[f64]) -> f64 {
    let p = parts(alpha, beta);
    ((p.linear + p.diag_a) - p.diag_b + p.cross_a) - p.cross_b
}

pub(crate) fn real_excess(alpha: &[f64]) -> f64 {
    let zeros = vec![0.0; alpha.len()];
    let p = parts(alpha, &zeros);
    (p.linear + p.diag_a) + p.cross_a
}

/// Degenerate-weight limit for real coefficients.
pub fn closed_form_real(spec: &PolynomialSpec) -> Result<LyapunovEstimate> {
    if !spec.is_real() {
        return Err(Error::DomainError(
            "the real-coefficient formula needs every beta_r = 0".into(),
        ));
    }
    let d = spec.degree() as f64;
    let p = parts(&spec.alpha(), &spec.beta());
    let value = ((-d.ln() + p.linear) + p.diag_a) + p.cross_a;
    Ok(LyapunovEstimate::exact(value, Method::ClosedFormReal))
}

/// Degenerate-weight limit for complex coefficients; the `beta` terms enter the
/// quadratic part with the opposite sign.
pub fn closed_form_complex(spec: &PolynomialSpec) -> LyapunovEstimate {
    let d = spec.degree() as f64;
    let p = parts(&spec.alpha(), &spec.beta());
    let value = ((((-d.ln() + p.linear) + p.diag_a) - p.diag_b) + p.cross_a) - p.cross_b;
    LyapunovEstimate::exact(value, Method::ClosedFormComplex)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(d: usize, alpha: &[f64]) -> PolynomialSpec {
        PolynomialSpec::from_parts(d, alpha, None).unwrap()
    }

    #[test]
    fn unperturbed_is_minus_log_d() {
        for d in 2..=8 {
            let q = PolynomialSpec::unperturbed(d);
            assert_eq!(closed_form_real(&q).unwrap().value, -(d as f64).ln());
            assert_eq!(closed_form_complex(&q).value, -(d as f64).ln());
        }
    }

    #[test]
    fn reference_values() {
        let v = closed_form_real(&real(2, &[0.1])).unwrap().value;
        assert!((v - (-0.5781471806)).abs() < 1e-10);
        let p = PolynomialSpec::from_parts(2, &[0.0], Some(&[0.1])).unwrap();
        assert!((closed_form_complex(&p).value - (-0.7081471806)).abs() < 1e-10);
        let v = closed_form_real(&real(3, &[0.1, 0.1])).unwrap().value;
        assert!((v - (-0.9836122887)).abs() < 1e-10);
        let p = PolynomialSpec::from_parts(3, &[0.0, 0.0], Some(&[0.1, 0.1])).unwrap();
        assert!((closed_form_complex(&p).value - (-1.1136122887)).abs() < 1e-10);
    }

    #[test]
    fn real_and_complex_agree_bitwise() {
        let p = real(5, &[0.1, -0.2, 0.05, 0.3]);
        assert_eq!(closed_form_real(&p).unwrap().value, closed_form_complex(&p).value);
    }

    #[test]
    fn real_formula_rejects_complex_input() {
        let p = PolynomialSpec::from_parts(2, &[0.0], Some(&[0.1])).unwrap();
        assert!(matches!(closed_form_real(&p), Err(Error::DomainError(_))));
    }
}

use num_complex::Complex64;

use super::{LyapunovEstimate, Method};
use crate::backward::{branch_fixed_point, FIXED_POINT_TOLERANCE};
use crate::error::{Error, Result};
use crate::measure::{
    full_preimage_measure, integrate, sample_weighted_lyubich, EmpiricalMeasure, MeasureMode, ProbabilityVector,
};
use crate::polynomial::{PolynomialSpec, DEFAULT_ORBIT_ITERATIONS};

/// `|P'|` below this at a sample point is treated as hitting a critical point.
const CRITICAL_FLOOR: f64 = 1e-300;

/// Rejects coefficients whose critical orbits escape (disconnected Julia set).
pub fn check_connected(spec: &PolynomialSpec) -> Result<()> {
    let orbit = spec.critical_orbit_bounded(DEFAULT_ORBIT_ITERATIONS)?;
    if !orbit.bounded {
        return Err(Error::invalid(
            "coefficients",
            format!(
                "a critical orbit escapes after {} iterations; the Julia set is not connected",
                orbit.iterations_used
            ),
        ));
    }
    Ok(())
}

/// `-int log|P'|` against an arbitrary empirical measure.
pub fn lyapunov_of_measure(spec: &PolynomialSpec, measure: &EmpiricalMeasure) -> Result<LyapunovEstimate> {
    // NaN makes the integrator report the offending point
    let est = integrate(measure, |z: Complex64| {
        let m = spec.derivative_at(z).norm();
        if m < CRITICAL_FLOOR {
            f64::NAN
        } else {
            -m.ln()
        }
    })?;
    let method = match measure.meta.mode {
        MeasureMode::MonteCarlo => Method::MonteCarlo,
        MeasureMode::FullTree => Method::Tree,
    };
    Ok(LyapunovEstimate {
        value: est.mean,
        stderr: est.stderr,
        n: est.n,
        method,
    })
}

/// Monte Carlo estimate over independent backward orbits.
pub fn lyapunov_mc(
    spec: &PolynomialSpec,
    p: &ProbabilityVector,
    n: usize,
    burn_in: usize,
    seed: u64,
) -> Result<LyapunovEstimate> {
    check_connected(spec)?;
    let measure = sample_weighted_lyubich(spec, p, n, burn_in, seed)?;
    lyapunov_of_measure(spec, &measure)
}

/// Exact expectation under the depth-`depth` preimage tree of `zeta`.
pub fn lyapunov_tree(
    spec: &PolynomialSpec,
    p: &ProbabilityVector,
    zeta: Complex64,
    depth: usize,
) -> Result<LyapunovEstimate> {
    check_connected(spec)?;
    let measure = full_preimage_measure(spec, p, zeta, depth)?;
    lyapunov_of_measure(spec, &measure)
}

/// `-log|P'|` at the fixed point of the constant inverse branch `j`: the
/// limit of the weighted measures as `p_j -> 1`.
pub fn fixed_point_exponent(spec: &PolynomialSpec, j: usize) -> Result<LyapunovEstimate> {
    let z = branch_fixed_point(spec, j, FIXED_POINT_TOLERANCE)?;
    Ok(LyapunovEstimate::exact(
        -spec.derivative_at(z).norm().ln(),
        Method::FixedPointOracle,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn unperturbed_mc_is_minus_log_d() {
        for d in [2, 3] {
            let q = PolynomialSpec::unperturbed(d);
            let p = ProbabilityVector::uniform(d);
            let est = lyapunov_mc(&q, &p, 200, 60, 7).unwrap();
            assert!((est.value + (d as f64).ln()).abs() < 1e-14);
            assert_eq!(est.stderr, 0.0);
        }
    }

    #[test]
    fn unperturbed_tree() {
        let q = PolynomialSpec::unperturbed(2);
        let est = lyapunov_tree(&q, &ProbabilityVector::uniform(2), c(1.0, 0.0), 10).unwrap();
        assert!((est.value + 2f64.ln()).abs() < 1e-14, "{}", est.value + 2f64.ln());
        assert_eq!(est.method, Method::Tree);
    }

    #[test]
    fn fixed_point_examples() {
        let p = PolynomialSpec::from_parts(2, &[0.1], None).unwrap();
        let v = fixed_point_exponent(&p, 1).unwrap().value;
        assert!((v + (1.0 + 0.6f64.sqrt()).ln()).abs() < 1e-12);
        assert!((v - (-0.573575)).abs() < 5e-6);
        let p = PolynomialSpec::from_parts(2, &[0.05], None).unwrap();
        let v = fixed_point_exponent(&p, 1).unwrap().value;
        assert!((v + (1.0 + 0.8f64.sqrt()).ln()).abs() < 1e-12);
        for d in 2..=5 {
            let q = PolynomialSpec::unperturbed(d);
            for j in 1..=d {
                let v = fixed_point_exponent(&q, j).unwrap().value;
                assert!((v + (d as f64).ln()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn disconnected_julia_set_is_rejected() {
        let p = PolynomialSpec::from_parts(2, &[0.5], None).unwrap();
        let err = lyapunov_mc(&p, &ProbabilityVector::uniform(2), 10, 10, 1).unwrap_err();
        assert!(err.is_validation());
    }
}

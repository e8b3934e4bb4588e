//! Monic, centred polynomials `P(z) = z^d + A_{d-2} z^{d-2} + ... + A_1 z + A_0`.
//!
//! Only the free coefficients `A_0..A_{d-2}` are stored; the leading `1` and the
//! vanishing `z^{d-1}` term are implicit, so every [`PolynomialSpec`] is monic
//! and centred by construction.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rootfinder;

/// Default iteration budget for [`PolynomialSpec::critical_orbit_bounded`].
pub const DEFAULT_ORBIT_ITERATIONS: usize = 1000;

fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialSpec {
    degree: usize,
    coeffs: Vec<Complex64>,
}

impl PolynomialSpec {
    /// Builds a spec from `A_0..A_{d-2}`. Every coefficient must be finite with
    /// `|A_r| < 1`.
    pub fn new(degree: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if degree < 2 {
            return Err(Error::invalid("degree", format!("degree must be at least 2, got {degree}")));
        }
        if coeffs.len() != degree - 1 {
            return Err(Error::invalid(
                "coefficients",
                format!("degree {degree} needs {} coefficients, got {}", degree - 1, coeffs.len()),
            ));
        }
        for (r, a) in coeffs.iter().enumerate() {
            if !is_finite(*a) {
                return Err(Error::invalid("coefficients", format!("A_{r} is not finite")));
            }
            if a.norm_sqr() >= 1.0 {
                return Err(Error::invalid(
                    "coefficients",
                    format!("A_{r} = {a} violates alpha^2 + beta^2 < 1"),
                ));
            }
        }
        Ok(Self { degree, coeffs })
    }

    /// Builds a spec from real and (optional) imaginary parts. A missing `beta`
    /// means every `beta_r = 0`.
    pub fn from_parts(degree: usize, alpha: &[f64], beta: Option<&[f64]>) -> Result<Self> {
        if let Some(beta) = beta {
            if beta.len() != alpha.len() {
                return Err(Error::invalid(
                    "beta",
                    format!("expected {} imaginary parts, got {}", alpha.len(), beta.len()),
                ));
            }
        }
        let coeffs = alpha
            .iter()
            .enumerate()
            .map(|(r, &a)| Complex64::new(a, beta.map_or(0.0, |b| b[r])))
            .collect();
        Self::new(degree, coeffs)
    }

    /// `Q(z) = z^d`.
    pub fn unperturbed(degree: usize) -> Self {
        assert!(degree >= 2, "degree must be at least 2");
        Self {
            degree,
            coeffs: vec![Complex64::new(0.0, 0.0); degree - 1],
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `A_0..A_{d-2}`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn alpha(&self) -> Vec<f64> {
        self.coeffs.iter().map(|a| a.re).collect()
    }

    pub fn beta(&self) -> Vec<f64> {
        self.coeffs.iter().map(|a| a.im).collect()
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|a| a.im == 0.0)
    }

    pub fn is_unperturbed(&self) -> bool {
        self.coeffs.iter().all(|a| a.re == 0.0 && a.im == 0.0)
    }

    /// Copy with a single coefficient replaced; the bound `|A_r| < 1` is not
    /// rechecked, which finite-difference stencils rely on.
    pub fn with_coeff(&self, r: usize, value: Complex64) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs[r] = value;
        Self {
            degree: self.degree,
            coeffs,
        }
    }

    /// Full ascending coefficient list `[A_0, ..., A_{d-2}, 0, 1]`.
    pub fn ascending_coeffs(&self) -> Vec<Complex64> {
        let mut all = self.coeffs.clone();
        all.push(Complex64::new(0.0, 0.0));
        all.push(Complex64::new(1.0, 0.0));
        all
    }

    /// `P(z)` by Horner's rule.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        // z^d + 0 z^{d-1} handled as the first two Horner steps
        let mut acc = z;
        for a in self.coeffs.iter().rev() {
            acc = acc * z + a;
        }
        acc
    }

    /// `P'(z) = d z^{d-1} + sum_{r>=1} r A_r z^{r-1}`.
    pub fn derivative_at(&self, z: Complex64) -> Complex64 {
        let d = self.degree;
        let mut acc = Complex64::new(d as f64, 0.0) * z;
        for r in (1..d - 1).rev() {
            acc = acc * z + self.coeffs[r] * r as f64;
        }
        acc
    }

    /// `R = 1 + sum |A_r|`; for `|z| >= R`, `|P(z)| >= |z|`.
    pub fn escape_radius(&self) -> f64 {
        1.0 + self.coeffs.iter().map(|a| a.norm()).sum::<f64>()
    }

    /// The `d - 1` roots of `P'` with multiplicity.
    pub fn critical_points(&self) -> Result<Vec<Complex64>> {
        let d = self.degree;
        // P'(z) ascending: [1*A_1, 2*A_2, ..., (d-2)*A_{d-2}, 0, d]
        let mut dcoeffs: Vec<Complex64> = (1..d - 1).map(|r| self.coeffs[r] * r as f64).collect();
        dcoeffs.push(Complex64::new(0.0, 0.0));
        dcoeffs.push(Complex64::new(d as f64, 0.0));
        if d == 2 {
            return Ok(vec![Complex64::new(0.0, 0.0)]);
        }
        Ok(rootfinder::roots(&dcoeffs)?.roots)
    }

    /// Screens for a bounded critical orbit by forward iteration.
    ///
    /// This is a heuristic certificate: `bounded = true` only means no
    /// critical orbit left the escape disk within `max_iter` steps.
    pub fn critical_orbit_bounded(&self, max_iter: usize) -> Result<OrbitClassification> {
        if max_iter == 0 {
            return Err(Error::invalid("max_iter", "must be at least 1"));
        }
        let radius = self.escape_radius();
        let mut max_seen: f64 = 0.0;
        let mut used = 0;
        for c in self.critical_points()? {
            let mut z = c;
            max_seen = max_seen.max(z.norm());
            for step in 1..=max_iter {
                z = self.evaluate(z);
                let m = z.norm();
                used = used.max(step);
                if !(m <= radius) {
                    return Ok(OrbitClassification {
                        bounded: false,
                        iterations_used: step,
                        max_modulus_seen: max_seen.max(m),
                    });
                }
                max_seen = max_seen.max(m);
            }
        }
        Ok(OrbitClassification {
            bounded: true,
            iterations_used: used,
            max_modulus_seen: max_seen,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitClassification {
    pub bounded: bool,
    pub iterations_used: usize,
    pub max_modulus_seen: f64,
}

/// Result of conjugating a general polynomial into monic centred form.
///
/// With `psi(z) = scale * z + shift`, the polynomial with coefficients
/// `coeffs` equals `psi^{-1} o P_general o psi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineNormalization {
    pub scale: Complex64,
    pub shift: Complex64,
    pub degree: usize,
    /// `A_0..A_{d-2}` of the normalized polynomial, before the `|A_r| < 1` check.
    pub coeffs: Vec<Complex64>,
}

impl AffineNormalization {
    pub fn psi(&self, z: Complex64) -> Complex64 {
        self.scale * z + self.shift
    }

    pub fn psi_inverse(&self, w: Complex64) -> Complex64 {
        (w - self.shift) / self.scale
    }

    /// Validates the normalized coefficients into a [`PolynomialSpec`].
    pub fn spec(&self) -> Result<PolynomialSpec> {
        PolynomialSpec::new(self.degree, self.coeffs.clone())
    }
}

/// Conjugates `B_d z^d + ... + B_0` (ascending `general`) by an affine map
/// into monic centred form.
pub fn normalize_affine(general: &[Complex64]) -> Result<AffineNormalization> {
    if general.len() < 3 {
        return Err(Error::invalid("coefficients", "degree must be at least 2"));
    }
    if general.iter().any(|c| !is_finite(*c)) {
        return Err(Error::invalid("coefficients", "coefficients must be finite"));
    }
    let d = general.len() - 1;
    let lead = general[d];
    if lead.norm() == 0.0 {
        return Err(Error::DegenerateInput("leading coefficient B_d is zero".into()));
    }
    // a^{d-1} = 1 / B_d (principal branch), b cancels the z^{d-1} term
    let scale = (lead.inv()).powf(1.0 / (d - 1) as f64);
    let shift = -general[d - 1] / (lead * d as f64);

    // coefficients of P(a z + b) by polynomial Horner
    let lin = [shift, scale];
    let mut composed = vec![lead];
    for k in (0..d).rev() {
        let mut next = vec![Complex64::new(0.0, 0.0); composed.len() + 1];
        for (i, &c) in composed.iter().enumerate() {
            next[i] += c * lin[0];
            next[i + 1] += c * lin[1];
        }
        next[0] += general[k];
        composed = next;
    }
    composed[0] -= shift;
    let coeffs: Vec<Complex64> = composed[..d - 1].iter().map(|&c| c / scale).collect();
    Ok(AffineNormalization {
        scale,
        shift,
        degree: d,
        coeffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spec(d: usize, coeffs: &[Complex64]) -> PolynomialSpec {
        PolynomialSpec::new(d, coeffs.to_vec()).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(PolynomialSpec::unperturbed(2).evaluate(c(2.0, 0.0)), c(4.0, 0.0));
        let p = spec(3, &[c(0.2, 0.0), c(0.1, 0.0)]);
        assert!((p.evaluate(c(1.0, 0.0)) - c(1.3, 0.0)).norm() < 1e-15);
        let p = spec(2, &[c(0.1, 0.2)]);
        assert!((p.evaluate(c(0.0, 1.0)) - c(-0.9, 0.2)).norm() < 1e-15);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(PolynomialSpec::unperturbed(3).derivative_at(c(1.0, 0.0)), c(3.0, 0.0));
        let z0 = c(0.3, -0.7);
        assert_eq!(spec(2, &[c(0.5, 0.1)]).derivative_at(z0), z0 * 2.0);
        let p = spec(3, &[c(0.2, 0.0), c(0.1, 0.0)]);
        assert!((p.derivative_at(c(1.0, 0.0)) - c(3.1, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn escape_radius_examples() {
        assert_eq!(PolynomialSpec::unperturbed(2).escape_radius(), 1.0);
        assert!((spec(2, &[c(0.3, 0.4)]).escape_radius() - 1.5).abs() < 1e-15);
        assert!((spec(3, &[c(0.1, 0.0), c(0.2, 0.0)]).escape_radius() - 1.3).abs() < 1e-15);
    }

    #[test]
    fn critical_point_examples() {
        assert_eq!(spec(2, &[c(0.4, 0.2)]).critical_points().unwrap(), vec![c(0.0, 0.0)]);
        let q5 = PolynomialSpec::unperturbed(5).critical_points().unwrap();
        assert_eq!(q5.len(), 4);
        assert!(q5.iter().all(|w| w.norm() < 1e-3));
        let z3 = spec(3, &[c(0.3, 0.0), c(0.0, 0.0)]).critical_points().unwrap();
        assert!(z3.iter().all(|w| w.norm() < 1e-6));
        let p = spec(3, &[c(0.0, 0.0), c(0.3, 0.0)]);
        let crit = p.critical_points().unwrap();
        let s = 0.1f64.sqrt();
        assert!(crit.iter().any(|w| (w - c(0.0, s)).norm() < 1e-12));
        assert!(crit.iter().any(|w| (w - c(0.0, -s)).norm() < 1e-12));
        for w in crit {
            assert!(p.derivative_at(w).norm() / 3.0 <= 1e-8);
        }
    }

    #[test]
    fn critical_orbit_screen() {
        let q = PolynomialSpec::unperturbed(2).critical_orbit_bounded(100).unwrap();
        assert!(q.bounded);
        let esc = spec(2, &[c(0.9, 0.43)]).critical_orbit_bounded(100).unwrap();
        assert!(!esc.bounded);
        assert!(esc.iterations_used <= 100);
        let p = spec(2, &[c(0.1, 0.0)]);
        let ok = p.critical_orbit_bounded(100).unwrap();
        assert!(ok.bounded);
        assert!(ok.max_modulus_seen <= p.escape_radius());
        assert!(p.critical_orbit_bounded(0).is_err());
    }

    #[test]
    fn rejects_out_of_range_coefficients() {
        assert!(PolynomialSpec::new(2, vec![c(1.0, 0.0)]).is_err());
        assert!(PolynomialSpec::new(2, vec![c(0.8, 0.6)]).is_err());
        assert!(PolynomialSpec::new(3, vec![c(0.1, 0.0)]).is_err());
        assert!(PolynomialSpec::new(1, vec![]).is_err());
        assert!(PolynomialSpec::from_parts(3, &[0.1, 0.2], Some(&[0.1])).is_err());
    }

    #[test]
    fn normalize_identity() {
        let n = normalize_affine(&[c(0.1, 0.2), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(n.scale, c(1.0, 0.0));
        assert_eq!(n.shift, c(0.0, 0.0));
        assert!((n.coeffs[0] - c(0.1, 0.2)).norm() < 1e-15);
    }

    #[test]
    fn normalize_scaled_square() {
        let n = normalize_affine(&[c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert!((n.scale - c(0.5, 0.0)).norm() < 1e-15);
        assert!(n.shift.norm() < 1e-15);
        assert!(n.coeffs[0].norm() < 1e-15);
    }

    #[test]
    fn normalize_completes_the_square() {
        let n = normalize_affine(&[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((n.shift - c(-0.5, 0.0)).norm() < 1e-15);
        assert!((n.coeffs[0] - c(0.25, 0.0)).norm() < 1e-15);
        assert!(n.spec().is_ok());
    }

    #[test]
    fn normalize_rejects_zero_leading() {
        assert!(matches!(
            normalize_affine(&[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
            Err(Error::DegenerateInput(_))
        ));
    }
}

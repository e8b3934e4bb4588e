//! Simultaneous root finding for complex polynomials.
//!
//! Roots are found with the Aberth-Ehrlich iteration (the third-order member
//! of the Durand-Kerner family), started from a rotated circle of guesses and
//! finished with a Newton polish. Every root set that leaves this module
//! satisfies the residual contract documented on [`RootSet`].

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Iteration cap for [`roots`].
pub const DEFAULT_MAX_ITERATIONS: usize = 500;

/// Roots closer than this are reported as one repeated root.
pub const CLUSTER_RADIUS: f64 = 1e-8;

/// Relative residual bound every returned root satisfies.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// All roots of a polynomial, with multiplicity.
///
/// `residuals[k] = |p(roots[k])| <= 1e-10 * max(1, max_k |c_k|)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

impl RootSet {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Evaluates `p(z)`, `p'(z)` and the running bound `sum |c_k| |z|^k` in one
/// Horner pass. Coefficients are in ascending order; `moduli[k] = |c_k|`.
#[inline]
fn horner_with_derivative(coeffs: &[Complex64], moduli: &[f64], z: Complex64) -> (Complex64, Complex64, f64) {
    let n = coeffs.len() - 1;
    let az = z.norm();
    let mut p = coeffs[n];
    let mut dp = Complex64::new(0.0, 0.0);
    let mut scale = moduli[n];
    for k in (0..n).rev() {
        dp = dp * z + p;
        p = p * z + coeffs[k];
        scale = scale * az + moduli[k];
    }
    (p, dp, scale)
}

#[inline]
fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Finds all roots of the polynomial with ascending coefficients `coeffs`.
pub fn roots(coeffs: &[Complex64]) -> Result<RootSet> {
    roots_with_cap(coeffs, DEFAULT_MAX_ITERATIONS)
}

/// [`roots`] with an explicit iteration cap.
pub fn roots_with_cap(coeffs: &[Complex64], max_iterations: usize) -> Result<RootSet> {
    if coeffs.len() < 2 {
        return Err(Error::invalid("coefficients", "polynomial degree must be at least 1"));
    }
    if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::invalid("coefficients", "coefficients must be finite"));
    }
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    if lead.norm() == 0.0 {
        return Err(Error::DegenerateInput("leading coefficient is zero".into()));
    }
    let monic: Vec<Complex64> = coeffs.iter().map(|&c| c / lead).collect();

    let (mut z, iterations) = if n == 1 {
        (vec![-monic[0]], 0)
    } else if n == 2 {
        (quadratic(monic[1], monic[0]).to_vec(), 0)
    } else {
        aberth(&monic, max_iterations)
    };

    snap_clusters(&mut z);
    for zi in z.iter_mut() {
        newton_polish(&monic, zi);
    }

    let residuals: Vec<f64> = z.iter().map(|&zi| horner(coeffs, zi).norm()).collect();
    let coeff_max = coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let bound = RESIDUAL_TOLERANCE * coeff_max;
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    if !(worst <= bound) || z.iter().any(|r| !r.re.is_finite() || !r.im.is_finite()) {
        return Err(Error::RootFindingFailed {
            iterations,
            residual: worst,
        });
    }
    Ok(RootSet {
        roots: z,
        residuals,
        iterations,
    })
}

/// Roots of `z^2 + b z + c`, using the larger-modulus root and Vieta's
/// product for the other to avoid cancellation.
fn quadratic(b: Complex64, c: Complex64) -> [Complex64; 2] {
    let s = (b * b - 4.0 * c).sqrt();
    let big = if (b.conj() * s).re >= 0.0 { b + s } else { b - s };
    if big.norm() == 0.0 {
        return [Complex64::new(0.0, 0.0); 2];
    }
    let q = -big / 2.0;
    [q, c / q]
}

fn initial_guesses(monic: &[Complex64]) -> Vec<Complex64> {
    let n = monic.len() - 1;
    let radius = 1.0 + monic[..n].iter().map(|c| c.norm_sqr()).fold(0.0, f64::max).sqrt();
    let offset = Complex64::new(0.4, 0.9);
    let first = offset * (radius / offset.norm());
    let step = Complex64::from_polar(1.0, TAU / n as f64);
    let mut guesses = Vec::with_capacity(n);
    let mut g = first;
    for _ in 0..n {
        guesses.push(g);
        g *= step;
    }
    guesses
}

fn aberth(monic: &[Complex64], max_iterations: usize) -> (Vec<Complex64>, usize) {
    let n = monic.len() - 1;
    let moduli: Vec<f64> = monic.iter().map(|c| c.norm()).collect();
    let mut z = initial_guesses(monic);
    let mut done = vec![false; n];
    let eps = f64::EPSILON;

    for iter in 1..=max_iterations {
        let mut all_done = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, dp, scale) = horner_with_derivative(monic, &moduli, z[i]);
            let bound = 4.0 * eps * scale;
            if p.norm_sqr() <= bound * bound {
                done[i] = true;
                continue;
            }
            let mut repulsion = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    repulsion += (z[i] - z[j]).inv();
                }
            }
            let w = p / (dp - p * repulsion);
            if w.re.is_finite() && w.im.is_finite() {
                z[i] -= w;
                if w.norm_sqr() <= eps * eps * z[i].norm_sqr() {
                    done[i] = true;
                    continue;
                }
            } else {
                // collided with a neighbour; nudge off it
                let nudge = Complex64::new(1e-7, 1e-7) * (1.0 + z[i].norm());
                z[i] += nudge;
            }
            all_done = false;
        }
        if all_done {
            return (z, iter);
        }
    }
    (z, max_iterations)
}

/// Replaces each group of roots within [`CLUSTER_RADIUS`] of one another by
/// the group centroid.
fn snap_clusters(z: &mut [Complex64]) {
    let n = z.len();
    let close = |i: usize, j: usize, z: &[Complex64]| (z[i] - z[j]).norm() < CLUSTER_RADIUS;
    if !(0..n).any(|i| (i + 1..n).any(|j| close(i, j, z))) {
        return;
    }
    let mut group: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if close(i, j, z) {
                let (gi, gj) = (group[i], group[j]);
                if gi != gj {
                    for g in group.iter_mut() {
                        if *g == gj {
                            *g = gi;
                        }
                    }
                }
            }
        }
    }
    for g in 0..n {
        let members: Vec<usize> = (0..n).filter(|&k| group[k] == g).collect();
        if members.len() > 1 {
            let centroid = members.iter().map(|&k| z[k]).sum::<Complex64>() / members.len() as f64;
            for k in members {
                z[k] = centroid;
            }
        }
    }
}

fn newton_polish(monic: &[Complex64], zi: &mut Complex64) {
    let (p, dp) = horner_pair(monic, *zi);
    if dp.norm_sqr() == 0.0 || p.norm_sqr() == 0.0 {
        return;
    }
    let candidate = *zi - p / dp;
    if horner(monic, candidate).norm_sqr() < p.norm_sqr() {
        *zi = candidate;
    }
}

#[inline]
fn horner_pair(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let n = coeffs.len() - 1;
    let mut p = coeffs[n];
    let mut dp = Complex64::new(0.0, 0.0);
    for k in (0..n).rev() {
        dp = dp * z + p;
        p = p * z + coeffs[k];
    }
    (p, dp)
}

/// Checks the root sum and product against the coefficients and returns the
/// larger absolute deviation.
pub fn verify_vieta(rootset: &RootSet, coeffs: &[Complex64]) -> f64 {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let sum: Complex64 = rootset.roots.iter().sum();
    let product: Complex64 = rootset.roots.iter().product();
    let expected_sum = -coeffs[n - 1] / lead;
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let expected_product = coeffs[0] / lead * sign;
    (sum - expected_sum).norm().max((product - expected_product).norm())
}

//! Inverse branches `P_1..P_d`, backward orbits and branch fixed points.
//!
//! The `d` preimages of a point are labelled by principal argument in
//! `[0, 2*pi)`, ties broken by modulus. Branch `j` (1-based) is the `j`-th
//! preimage in that order.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polynomial::PolynomialSpec;
use crate::rootfinder;

/// Step cap for [`branch_fixed_point`].
pub const FIXED_POINT_MAX_STEPS: usize = 10_000;

/// Default successive-difference tolerance for [`branch_fixed_point`].
pub const FIXED_POINT_TOLERANCE: f64 = 1e-13;

/// Principal argument mapped into `[0, 2*pi)`.
pub fn principal_argument(z: Complex64) -> f64 {
    let theta = z.im.atan2(z.re);
    if theta < 0.0 {
        theta + TAU
    } else {
        theta
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchLabeling {
    /// Preimages in label order; index 0 is branch 1.
    pub labeled_points: Vec<Complex64>,
}

impl BranchLabeling {
    /// The preimage on branch `j` (1-based).
    pub fn branch(&self, j: usize) -> Complex64 {
        self.labeled_points[j - 1]
    }
}

/// Default start of backward orbits: the real point `escape_radius + 0i`.
pub fn default_start(spec: &PolynomialSpec) -> Complex64 {
    Complex64::new(spec.escape_radius(), 0.0)
}

/// The `d` roots of `P(z) - zeta`, labelled.
pub fn preimages(spec: &PolynomialSpec, zeta: Complex64) -> Result<BranchLabeling> {
    if !(zeta.re.is_finite() && zeta.im.is_finite()) {
        return Err(Error::invalid("zeta", "point must be finite"));
    }
    let mut coeffs = spec.ascending_coeffs();
    coeffs[0] -= zeta;
    let points = rootfinder::roots(&coeffs)?.roots;
    let mut keyed: Vec<(f64, f64, Complex64)> = points
        .into_iter()
        .map(|z| (principal_argument(z), z.norm(), z))
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.total_cmp(&b.1)));
    let points = keyed.into_iter().map(|k| k.2).collect();
    Ok(BranchLabeling {
        labeled_points: points,
    })
}

pub(crate) fn check_branch(spec: &PolynomialSpec, j: usize) -> Result<()> {
    if j == 0 || j > spec.degree() {
        return Err(Error::invalid(
            "branch",
            format!("branch must lie in 1..={}, got {j}", spec.degree()),
        ));
    }
    Ok(())
}

/// A point reached from `start` by a word of inverse branches.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BackwardOrbitState {
    pub start: Complex64,
    pub current: Complex64,
    /// Branch indices `eta_1..eta_n`, in the order they were applied.
    pub word: Vec<usize>,
}

impl BackwardOrbitState {
    pub fn new(start: Complex64) -> Self {
        Self {
            start,
            current: start,
            word: Vec::new(),
        }
    }

    pub fn depth(&self) -> usize {
        self.word.len()
    }

    /// Applies `P` `depth` times to `current` and returns the distance to `start`.
    pub fn forward_residual(&self, spec: &PolynomialSpec) -> f64 {
        let end = (0..self.depth()).fold(self.current, |z, _| spec.evaluate(z));
        (end - self.start).norm()
    }
}

/// One inverse-branch step along branch `j`.
pub fn step_backward(
    spec: &PolynomialSpec,
    state: &BackwardOrbitState,
    j: usize,
) -> Result<BackwardOrbitState> {
    check_branch(spec, j)?;
    let next = preimages(spec, state.current)?.branch(j);
    let mut word = state.word.clone();
    word.push(j);
    Ok(BackwardOrbitState {
        start: state.start,
        current: next,
        word,
    })
}

/// Iterates the constant branch `j` from [`default_start`] until successive
/// points differ by less than `tol`. The limit is a repelling fixed point of `P`.
pub fn branch_fixed_point(spec: &PolynomialSpec, j: usize, tol: f64) -> Result<Complex64> {
    check_branch(spec, j)?;
    let mut z = default_start(spec);
    for _ in 0..FIXED_POINT_MAX_STEPS {
        let next = preimages(spec, z)?.branch(j);
        let moved = (next - z).norm();
        z = next;
        if moved < tol {
            let defect = (spec.evaluate(z) - z).norm();
            let multiplier = spec.derivative_at(z).norm();
            if !(multiplier > 1.0) {
                return Err(Error::NotRepelling { point: z, multiplier });
            }
            if defect > 1e-10 {
                return Err(Error::NoConvergence {
                    steps: FIXED_POINT_MAX_STEPS,
                });
            }
            return Ok(z);
        }
    }
    Err(Error::NoConvergence {
        steps: FIXED_POINT_MAX_STEPS,
    })
}

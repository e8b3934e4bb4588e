//! Coefficient functions of the conjugacy `Phi_P : S^1 -> J_P`.
//!
//! Writing `Phi_P(z) = z + sum_r A_r phi_r(z) + sum_r A_r^2 phi_{r^2}(z)
//! + sum_{r<s} A_r A_s phi_{rs}(z) + (order >= 3)`, the functional equation
//! `Phi_P(z^d) = P(Phi_P(z))` determines the first- and second-order
//! coefficient functions as lacunary series in negative powers of `z`:
//!
//! ```text
//! phi_r(z)      = -z sum_{k1} d^-k1 z^-(d^k1 - r d^(k1-1))
//! phi_{r^2}(z)  = -z [ d(d-1)/2 sum_{k3} d^-k3 sum_{k2} sum_{k1<=k2} d^-(k2+1) z^-E
//!                      - r sum_{k3} d^-k3 sum_{k1} d^-k1 z^-E' ]
//! phi_{rs}(z)   = analogous, with the d(d-1) prefactor and two single sums
//! ```
//!
//! Every exponent has the form `d^m (d - r)` summed over a few `m`, so all
//! monomials are products of `g_r(m) = z^{-(d-r) d^m}`. These are computed
//! directly from the argument of `z` (`z = e^{i theta}`), which avoids the
//! error build-up of repeated multiplication. The double sums over
//! `k1 <= k2 <= K2` are evaluated with prefix sums over the pair
//! `(k1, k2 - k1 + 1)`; the finite set of terms is exactly the printed one.
//!
//! All coefficients are positive reals and `|z| = 1`, so the truncation error
//! of each series is bounded by the same series evaluated at `z = 1` with the
//! kept terms removed. Those bounds are exposed on [`SeriesTruncation`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polynomial::PolynomialSpec;

/// Points farther than this from the unit circle are rejected.
pub const CIRCLE_TOLERANCE: f64 = 1e-9;

/// Default tail tolerance for [`SeriesTruncation::for_tolerance`].
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;

/// Largest cap `K` such that `d^K < 2^62`.
pub fn max_cap(d: usize) -> u32 {
    let mut k = 0u32;
    let mut power: u128 = 1;
    while power * (d as u128) < (1u128 << 62) {
        power *= d as u128;
        k += 1;
    }
    k
}

/// Summation caps for the three series indices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesTruncation {
    pub degree: usize,
    pub k1: u32,
    pub k2: u32,
    pub k3: u32,
    /// Largest tail bound over every coefficient function of this degree.
    pub tail_tol: f64,
}

// Closed forms for the geometric tails, x = 1/d.
fn tail_geometric(d: f64, k: u32) -> f64 {
    // sum_{m > k} d^-m
    d.powi(-(k as i32)) / (d - 1.0)
}

fn partial_geometric(d: f64, k: u32) -> f64 {
    // sum_{m = 1..k} d^-m
    (1.0 - d.powi(-(k as i32))) / (d - 1.0)
}

fn tail_weighted(d: f64, k: u32) -> f64 {
    // sum_{m > k} m d^-(m+1)
    let x = 1.0 / d;
    let kf = k as f64;
    x * x.powi(k as i32 + 1) * ((kf + 1.0) - kf * x) / ((1.0 - x) * (1.0 - x))
}

fn partial_weighted(d: f64, k: u32) -> f64 {
    1.0 / ((d - 1.0) * (d - 1.0)) - tail_weighted(d, k)
}

impl SeriesTruncation {
    /// Explicit caps; each must be at least 1 with `d^K < 2^62`.
    pub fn new(degree: usize, k1: u32, k2: u32, k3: u32) -> Result<Self> {
        if degree < 2 {
            return Err(Error::invalid("degree", "degree must be at least 2"));
        }
        let cap = max_cap(degree);
        for (name, k) in [("K1", k1), ("K2", k2), ("K3", k3)] {
            if k == 0 || k > cap {
                return Err(Error::invalid(
                    "truncation",
                    format!("{name} = {k} must lie in 1..={cap} for degree {degree}"),
                ));
            }
        }
        let mut t = Self {
            degree,
            k1,
            k2,
            k3,
            tail_tol: 0.0,
        };
        t.tail_tol = t.worst_tail_bound();
        Ok(t)
    }

    /// Smallest caps whose tail bounds are all below `tol`.
    pub fn for_tolerance(degree: usize, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::invalid("tail_tol", "tolerance must be positive"));
        }
        if degree < 2 {
            return Err(Error::invalid("degree", "degree must be at least 2"));
        }
        let d = degree as f64;
        let cap = max_cap(degree);
        let mut k1 = 1;
        while tail_geometric(d, k1) > tol {
            k1 += 1;
            if k1 > cap {
                return Err(Error::invalid("tail_tol", format!("{tol:e} is below what degree {degree} can reach")));
            }
        }
        for k in 1..=cap {
            let t = Self::new(degree, k1.max(k), k, k)?;
            if t.tail_tol <= tol {
                return Ok(Self { tail_tol: tol, ..t });
            }
        }
        Err(Error::invalid("tail_tol", format!("{tol:e} is below what degree {degree} can reach")))
    }

    /// Default caps for tolerance `1e-12`.
    pub fn default_for(degree: usize) -> Self {
        Self::for_tolerance(degree, DEFAULT_TAIL_TOLERANCE).expect("default tolerance is reachable")
    }

    /// Largest uniform caps for which every monomial in the second-order
    /// expansion has exponent below `d^depth`, so that integrating it against
    /// the uniform depth-`depth` tree of `z^d` gives exactly zero.
    pub fn for_full_tree(degree: usize, depth: usize) -> Result<Self> {
        let d = degree as u128;
        let leaves = d.checked_pow(depth as u32).unwrap_or(u128::MAX);
        let fits = |k: u32| {
            let dk = d.pow(k);
            let first = 2 * dk;
            let second = dk * (d.pow(k - 1) + 1);
            first < leaves && second < leaves
        };
        let mut best = 0;
        for k in 1..=max_cap(degree) {
            if fits(k) {
                best = k;
            } else {
                break;
            }
        }
        if best == 0 {
            return Err(Error::invalid("depth", format!("depth {depth} is too shallow for any truncation")));
        }
        Self::new(degree, best, best, best)
    }

    /// Bound on `|phi_r - phi_r truncated at K1|`.
    pub fn phi_r_tail(&self) -> f64 {
        tail_geometric(self.degree as f64, self.k1)
    }

    fn double_tail(&self) -> f64 {
        let d = self.degree as f64;
        let s_inf = 1.0 / (d - 1.0);
        s_inf * tail_weighted(d, self.k2) + partial_weighted(d, self.k2) * tail_geometric(d, self.k3)
    }

    fn single_tail(&self) -> f64 {
        let d = self.degree as f64;
        let s_inf = 1.0 / (d - 1.0);
        s_inf * tail_geometric(d, self.k1) + partial_geometric(d, self.k1) * tail_geometric(d, self.k3)
    }

    pub fn phi_r2_tail(&self, r: usize) -> f64 {
        let d = self.degree as f64;
        d * (d - 1.0) / 2.0 * self.double_tail() + r as f64 * self.single_tail()
    }

    pub fn phi_rs_tail(&self, r: usize, s: usize) -> f64 {
        let d = self.degree as f64;
        d * (d - 1.0) * self.double_tail() + (r + s) as f64 * self.single_tail()
    }

    fn worst_tail_bound(&self) -> f64 {
        let d = self.degree;
        let mut worst = self.phi_r_tail();
        for r in 0..d - 1 {
            worst = worst.max(self.phi_r2_tail(r));
            for s in r + 1..d - 1 {
                worst = worst.max(self.phi_rs_tail(r, s));
            }
        }
        worst
    }
}

/// Checks `|z| = 1` and returns its argument.
fn circle_argument(z: Complex64) -> Result<f64> {
    let m = z.norm();
    if !((m - 1.0).abs() <= CIRCLE_TOLERANCE) {
        return Err(Error::DomainError(format!(
            "coefficient functions are evaluated on the unit circle; |z| = {m}"
        )));
    }
    Ok(z.im.atan2(z.re))
}

/// Precomputed monomials `g_r(m) = z^{-(d-r) d^m}` at one point of the circle.
///
/// Evaluating several coefficient functions at the same `z` through one
/// `CoefficientFunctions` reuses the tables.
#[derive(Clone, Debug)]
pub struct CoefficientFunctions {
    degree: usize,
    z: Complex64,
    trunc: SeriesTruncation,
    tables: Vec<Vec<Complex64>>,
}

impl CoefficientFunctions {
    pub fn at(z: Complex64, trunc: &SeriesTruncation) -> Result<Self> {
        let theta = circle_argument(z)?;
        let d = trunc.degree;
        let len = (trunc.k3 + trunc.k1.max(trunc.k2)) as usize;
        let df = d as f64;
        let tables = (0..d - 1)
            .map(|r| {
                let base = (d - r) as f64;
                (0..len)
                    .map(|m| Complex64::from_polar(1.0, -theta * (base * df.powi(m as i32))))
                    .collect()
            })
            .collect();
        Ok(Self {
            degree: d,
            z,
            trunc: *trunc,
            tables,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn g(&self, r: usize, m: u32) -> Complex64 {
        self.tables[r][m as usize]
    }

    fn check_index(&self, r: usize) -> Result<()> {
        if r + 2 > self.degree {
            return Err(Error::DomainError(format!(
                "coefficient index {r} outside 0..={}",
                self.degree - 2
            )));
        }
        Ok(())
    }

    /// First-order coefficient function `phi_r(z)`.
    pub fn phi_r(&self, r: usize) -> Result<Complex64> {
        self.check_index(r)?;
        let d = self.degree as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut w = 1.0;
        for k in 1..=self.trunc.k1 {
            w /= d;
            sum += self.g(r, k - 1) * w;
        }
        Ok(-self.z * sum)
    }

    /// `sum_{k3} d^-k3 sum_{k1 + k' <= K2 + 1} d^-k1 g_r(k3+k1-2) d^-k' g_s(k3+k'-2)`
    fn paired_sum(&self, r: usize, s: usize) -> Complex64 {
        let d = self.degree as f64;
        let k2 = self.trunc.k2;
        let mut total = Complex64::new(0.0, 0.0);
        let mut outer_w = 1.0;
        let mut a = Vec::with_capacity(k2 as usize);
        let mut prefix_b = Vec::with_capacity(k2 as usize + 1);
        for k3 in 1..=self.trunc.k3 {
            outer_w /= d;
            a.clear();
            prefix_b.clear();
            prefix_b.push(Complex64::new(0.0, 0.0));
            let mut w = 1.0;
            for k in 1..=k2 {
                w /= d;
                a.push(self.g(r, k3 + k - 2) * w);
                let last = *prefix_b.last().unwrap();
                prefix_b.push(last + self.g(s, k3 + k - 2) * w);
            }
            let mut inner = Complex64::new(0.0, 0.0);
            for k1 in 1..=k2 {
                inner += a[k1 as usize - 1] * prefix_b[(k2 + 1 - k1) as usize];
            }
            total += inner * outer_w;
        }
        total
    }

    /// `sum_{k3} d^-k3 sum_{k1} d^-k1 g_a(k3+k1-2) g_b(k3-1)`
    fn single_sum(&self, a: usize, b: usize) -> Complex64 {
        let d = self.degree as f64;
        let mut total = Complex64::new(0.0, 0.0);
        let mut outer_w = 1.0;
        for k3 in 1..=self.trunc.k3 {
            outer_w /= d;
            let mut inner = Complex64::new(0.0, 0.0);
            let mut w = 1.0;
            for k1 in 1..=self.trunc.k1 {
                w /= d;
                inner += self.g(a, k3 + k1 - 2) * w;
            }
            total += inner * self.g(b, k3 - 1) * outer_w;
        }
        total
    }

    /// Second-order diagonal coefficient function `phi_{r^2}(z)`.
    pub fn phi_r2(&self, r: usize) -> Result<Complex64> {
        self.check_index(r)?;
        let d = self.degree as f64;
        let bracket = self.paired_sum(r, r) * (d * (d - 1.0) / 2.0) - self.single_sum(r, r) * r as f64;
        Ok(-self.z * bracket)
    }

    /// Second-order mixed coefficient function `phi_{rs}(z)`, `r < s`.
    pub fn phi_rs(&self, r: usize, s: usize) -> Result<Complex64> {
        self.check_index(s)?;
        if r >= s {
            return Err(Error::DomainError(format!("phi_rs needs r < s, got r = {r}, s = {s}")));
        }
        let d = self.degree as f64;
        let bracket = self.paired_sum(r, s) * (d * (d - 1.0))
            - self.single_sum(s, r) * r as f64
            - self.single_sum(r, s) * s as f64;
        Ok(-self.z * bracket)
    }
}

fn check_degree(d: usize, trunc: &SeriesTruncation) -> Result<()> {
    if trunc.degree != d {
        return Err(Error::invalid(
            "truncation",
            format!("truncation built for degree {}, used with degree {d}", trunc.degree),
        ));
    }
    Ok(())
}

pub fn phi_r(d: usize, r: usize, z: Complex64, trunc: &SeriesTruncation) -> Result<Complex64> {
    check_degree(d, trunc)?;
    CoefficientFunctions::at(z, trunc)?.phi_r(r)
}

pub fn phi_r2(d: usize, r: usize, z: Complex64, trunc: &SeriesTruncation) -> Result<Complex64> {
    check_degree(d, trunc)?;
    CoefficientFunctions::at(z, trunc)?.phi_r2(r)
}

pub fn phi_rs(d: usize, r: usize, s: usize, z: Complex64, trunc: &SeriesTruncation) -> Result<Complex64> {
    check_degree(d, trunc)?;
    CoefficientFunctions::at(z, trunc)?.phi_rs(r, s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConjugacyOrder {
    /// `z + sum A_r phi_r`
    First,
    /// adds `sum A_r^2 phi_{r^2} + sum_{r<s} A_r A_s phi_{rs}`
    Second,
}

impl TryFrom<u8> for ConjugacyOrder {
    type Error = Error;
    fn try_from(order: u8) -> Result<Self> {
        match order {
            1 => Ok(Self::First),
            2 => Ok(Self::Second),
            other => Err(Error::invalid("order", format!("order must be 1 or 2, got {other}"))),
        }
    }
}

/// Low-order approximation of the conjugacy from `S^1` to `J_P`.
#[derive(Clone, Debug)]
pub struct ConjugacyApprox {
    pub spec: PolynomialSpec,
    pub order: ConjugacyOrder,
    pub trunc: SeriesTruncation,
}

impl ConjugacyApprox {
    pub fn new(spec: &PolynomialSpec, order: ConjugacyOrder, trunc: SeriesTruncation) -> Result<Self> {
        check_degree(spec.degree(), &trunc)?;
        Ok(Self {
            spec: spec.clone(),
            order,
            trunc,
        })
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let phi = CoefficientFunctions::at(z, &self.trunc)?;
        let a = self.spec.coeffs();
        let n = a.len();
        let mut value = z;
        for r in 0..n {
            value += a[r] * phi.phi_r(r)?;
        }
        if self.order == ConjugacyOrder::Second {
            for r in 0..n {
                value += a[r] * a[r] * phi.phi_r2(r)?;
                for s in r + 1..n {
                    value += a[r] * a[s] * phi.phi_rs(r, s)?;
                }
            }
        }
        Ok(value)
    }

    /// `|Phi(z^d) - P(Phi(z))|`.
    pub fn residual(&self, z: Complex64) -> Result<f64> {
        let theta = circle_argument(z)?;
        let zd = Complex64::from_polar(1.0, theta * self.spec.degree() as f64);
        let lhs = self.eval(zd)?;
        let rhs = self.spec.evaluate(self.eval(z)?);
        Ok((lhs - rhs).norm())
    }
}

pub fn conjugacy_approx(spec: &PolynomialSpec, z: Complex64, order: ConjugacyOrder) -> Result<Complex64> {
    ConjugacyApprox::new(spec, order, SeriesTruncation::default_for(spec.degree()))?.eval(z)
}

pub fn conjugacy_residual(spec: &PolynomialSpec, z: Complex64, order: ConjugacyOrder) -> Result<f64> {
    ConjugacyApprox::new(spec, order, SeriesTruncation::default_for(spec.degree()))?.residual(z)
}

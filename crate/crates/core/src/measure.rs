//! Weighted Lyubich measures and their finite approximants.
//!
//! Two constructions of the depth-`n` measure
//! `sum_{eta} p_{eta_n} ... p_{eta_1} delta_{P_eta(zeta)}` are provided:
//!
//! * [`sample_weighted_lyubich`] draws independent backward orbits, picking
//!   branch `j` with probability `p_j` at every step. Endpoints carry uniform
//!   weights.
//! * [`full_preimage_measure`] enumerates all `d^n` words and carries the
//!   product weights explicitly. It has no sampling error and serves as the
//!   oracle for the sampler.
//!
//! Random numbers come from a ChaCha8 stream keyed by the seed, with one
//! stream per chain, so the point set does not depend on how chains are
//! scheduled across threads.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::backward::{default_start, preimages};
use crate::error::{Error, Result};
use crate::polynomial::PolynomialSpec;

/// Default backward-orbit depth for sampled measures.
pub const DEFAULT_BURN_IN: usize = 60;

/// Largest number of leaves [`full_preimage_measure`] will enumerate.
pub const MAX_TREE_LEAVES: u128 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    /// Strictly positive entries summing to one within `1e-12`.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::invalid("p", "probability vector is empty"));
        }
        if let Some(bad) = p.iter().find(|&&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::invalid("p", format!("entries must be strictly positive, got {bad}")));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("p", format!("entries sum to {sum}, not 1")));
        }
        Ok(Self(p))
    }

    pub fn uniform(d: usize) -> Self {
        Self(vec![1.0 / d as f64; d])
    }

    /// `p_j = weight` on branch `j` (1-based), the rest shared equally.
    pub fn concentrated(d: usize, j: usize, weight: f64) -> Result<Self> {
        if j == 0 || j > d {
            return Err(Error::invalid("branch", format!("branch must lie in 1..={d}, got {j}")));
        }
        let rest = (1.0 - weight) / (d - 1) as f64;
        let p = (1..=d).map(|k| if k == j { weight } else { rest }).collect();
        Self::new(p)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// `-sum p_j log p_j`.
    pub fn entropy(&self) -> f64 {
        -self.0.iter().map(|&p| p * p.ln()).sum::<f64>()
    }

    /// 1-based branch selected by a uniform draw `u` in `[0, 1)`.
    pub fn select(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (k, &p) in self.0.iter().enumerate() {
            acc += p;
            if u < acc {
                return k + 1;
            }
        }
        self.0.len()
    }

    pub(crate) fn check_degree(&self, spec: &PolynomialSpec) -> Result<()> {
        if self.len() != spec.degree() {
            return Err(Error::invalid(
                "p",
                format!("degree {} needs {} probabilities, got {}", spec.degree(), spec.degree(), self.len()),
            ));
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for ProbabilityVector {
    type Error = Error;
    fn try_from(p: Vec<f64>) -> Result<Self> {
        Self::new(p)
    }
}

impl From<ProbabilityVector> for Vec<f64> {
    fn from(p: ProbabilityVector) -> Self {
        p.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureMode {
    MonteCarlo,
    FullTree,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureMeta {
    pub mode: MeasureMode,
    pub seed: Option<u64>,
    /// Burn-in for sampled measures, tree depth for full trees.
    pub depth: usize,
    pub start: Complex64,
    pub spec: PolynomialSpec,
    pub p: ProbabilityVector,
}

/// Weighted point cloud; weights are positive and sum to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub points: Vec<Complex64>,
    pub weights: Vec<f64>,
    pub meta: MeasureMeta,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate<T> {
    pub mean: T,
    pub stderr: f64,
    pub n: usize,
}

/// The branch-selection stream for one chain.
pub(crate) fn chain_rng(seed: u64, chain: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chain);
    rng
}

fn run_chain(
    spec: &PolynomialSpec,
    p: &ProbabilityVector,
    start: Complex64,
    burn_in: usize,
    seed: u64,
    chain: usize,
) -> Result<Complex64> {
    let mut rng = chain_rng(seed, chain as u64);
    let mut z = start;
    for _ in 0..burn_in {
        let j = p.select(rng.gen::<f64>());
        z = preimages(spec, z)?.branch(j);
    }
    Ok(z)
}

/// Endpoints of `n_samples` independent backward orbits of depth `burn_in`
/// started at [`default_start`].
pub fn sample_weighted_lyubich(
    spec: &PolynomialSpec,
    p: &ProbabilityVector,
    n_samples: usize,
    burn_in: usize,
    seed: u64,
) -> Result<EmpiricalMeasure> {
    p.check_degree(spec)?;
    if n_samples == 0 {
        return Err(Error::invalid("n_samples", "must be at least 1"));
    }
    if burn_in == 0 {
        return Err(Error::invalid("burn_in", "must be at least 1"));
    }
    let start = default_start(spec);
    let points = (0..n_samples)
        .into_par_iter()
        .map(|chain| {
            run_chain(spec, p, start, burn_in, seed, chain).map_err(|e| Error::OrbitFailed {
                orbit: chain,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EmpiricalMeasure {
        weights: vec![1.0 / n_samples as f64; n_samples],
        points,
        meta: MeasureMeta {
            mode: MeasureMode::MonteCarlo,
            seed: Some(seed),
            depth: burn_in,
            start,
            spec: spec.clone(),
            p: p.clone(),
        },
    })
}

/// Number of leaves of a depth-`depth` tree, or `TreeTooLarge`.
pub(crate) fn tree_leaves(d: usize, depth: usize) -> Result<usize> {
    let leaves = (d as u128).checked_pow(depth as u32).unwrap_or(u128::MAX);
    if leaves > MAX_TREE_LEAVES {
        return Err(Error::TreeTooLarge {
            leaves,
            limit: MAX_TREE_LEAVES,
        });
    }
    Ok(leaves as usize)
}

/// All `d^depth` depth-`depth` preimages of `zeta` with product weights.
///
/// Leaves are ordered so that the children of leaf `k` at depth `n` sit at
/// `k*d .. k*d + d` at depth `n + 1`, child `j - 1` being branch `j`.
pub fn full_preimage_measure(
    spec: &PolynomialSpec,
    p: &ProbabilityVector,
    zeta: Complex64,
    depth: usize,
) -> Result<EmpiricalMeasure> {
    p.check_degree(spec)?;
    tree_leaves(spec.degree(), depth)?;
    let pv = p.as_slice();
    let mut level = vec![(zeta, 1.0f64)];
    for _ in 0..depth {
        let children = level
            .par_iter()
            .map(|&(z, w)| {
                let pre = preimages(spec, z)?;
                Ok(pre
                    .labeled_points
                    .iter()
                    .zip(pv)
                    .map(|(&c, &pj)| (c, w * pj))
                    .collect::<Vec<_>>())
            })
            .collect::<Result<Vec<_>>>()?;
        level = children.into_iter().flatten().collect();
    }
    let (points, weights) = level.into_iter().unzip();
    Ok(EmpiricalMeasure {
        points,
        weights,
        meta: MeasureMeta {
            mode: MeasureMode::FullTree,
            seed: None,
            depth,
            start: zeta,
            spec: spec.clone(),
            p: p.clone(),
        },
    })
}

impl EmpiricalMeasure {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Writes the measure as a columnar text file: a `# {json meta}` header,
    /// then `re im weight` per point with 17 significant digits.
    pub fn write_columns<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# {}", serde_json::to_string(&self.meta)?)?;
        for (z, w) in self.points.iter().zip(&self.weights) {
            writeln!(out, "{:.16e} {:.16e} {:.16e}", z.re, z.im, w)?;
        }
        Ok(())
    }

    /// Parses the format produced by [`EmpiricalMeasure::write_columns`].
    pub fn read_columns<R: BufRead>(input: R) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse {
            path: "<measure>".into(),
            line,
            message,
        };
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing header".into()))??;
        let meta_json = header
            .strip_prefix("# ")
            .ok_or_else(|| parse_err(1, "header must start with '# '".into()))?;
        let meta: MeasureMeta =
            serde_json::from_str(meta_json).map_err(|e| parse_err(1, e.to_string()))?;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (k, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<f64> = line
                .split_whitespace()
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| parse_err(k + 2, e.to_string()))?;
            if fields.len() != 3 {
                return Err(parse_err(k + 2, format!("expected 3 columns, got {}", fields.len())));
            }
            points.push(Complex64::new(fields[0], fields[1]));
            weights.push(fields[2]);
        }
        Ok(Self {
            points,
            weights,
            meta,
        })
    }
}

/// Weighted sample moments shared by the real and complex integrators.
pub(crate) fn estimate_from_values(
    measure: &EmpiricalMeasure,
    values: &[Complex64],
) -> IntegralEstimate<Complex64> {
    let n = values.len();
    let total = measure.total_weight();
    // centring on the first value keeps a constant integrand exact
    let shift = values.first().copied().unwrap_or_default();
    let mean = shift
        + values
            .iter()
            .zip(&measure.weights)
            .map(|(v, w)| (v - shift) * *w)
            .sum::<Complex64>()
            / total;
    let stderr = match measure.meta.mode {
        MeasureMode::FullTree => 0.0,
        MeasureMode::MonteCarlo if n < 2 => 0.0,
        MeasureMode::MonteCarlo => {
            let ss: f64 = values
                .iter()
                .zip(&measure.weights)
                .map(|(v, w)| w * (v - mean).norm_sqr())
                .sum::<f64>()
                / total;
            let sd = (ss * n as f64 / (n - 1) as f64).sqrt();
            let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
            // spread at the rounding level of the values is not sampling error
            if sd <= 16.0 * f64::EPSILON * scale {
                0.0
            } else {
                sd / (n as f64).sqrt()
            }
        }
    };
    IntegralEstimate { mean, stderr, n }
}

/// Integrates precomputed per-point values, one per point of `measure`.
pub(crate) fn integrate_values(measure: &EmpiricalMeasure, values: &[f64]) -> IntegralEstimate<f64> {
    let complex: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let est = estimate_from_values(measure, &complex);
    IntegralEstimate {
        mean: est.mean.re,
        stderr: est.stderr,
        n: est.n,
    }
}

fn evaluate_observable<F>(measure: &EmpiricalMeasure, observable: F) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Complex64,
{
    measure
        .points
        .iter()
        .map(|&z| {
            let v = observable(z);
            if v.re.is_finite() && v.im.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFiniteObservable { point: z })
            }
        })
        .collect()
}

/// Integrates a real observable. In Monte Carlo mode the standard error is the
/// sample standard deviation over `sqrt(n)`; full trees are exact.
pub fn integrate<F>(measure: &EmpiricalMeasure, observable: F) -> Result<IntegralEstimate<f64>>
where
    F: Fn(Complex64) -> f64,
{
    let values = evaluate_observable(measure, |z| Complex64::new(observable(z), 0.0))?;
    let est = estimate_from_values(measure, &values);
    Ok(IntegralEstimate {
        mean: est.mean.re,
        stderr: est.stderr,
        n: est.n,
    })
}

/// Integrates a complex observable; `stderr` bounds the modulus of the error.
pub fn integrate_complex<F>(
    measure: &EmpiricalMeasure,
    observable: F,
) -> Result<IntegralEstimate<Complex64>>
where
    F: Fn(Complex64) -> Complex64,
{
    let values = evaluate_observable(measure, observable)?;
    Ok(estimate_from_values(measure, &values))
}

/// A named test function for [`check_invariance`].
pub struct Observable<'a> {
    pub name: &'a str,
    pub f: &'a (dyn Fn(Complex64) -> f64 + Sync),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceRow {
    pub name: String,
    pub pushed_forward: f64,
    pub original: f64,
    pub deviation: f64,
    /// `3 * (stderr of f o P + stderr of f)`; zero for full trees.
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub rows: Vec<InvarianceRow>,
    pub max_deviation: f64,
}

impl InvarianceReport {
    pub fn within_tolerance(&self) -> bool {
        self.rows.iter().all(|r| r.deviation <= r.tolerance)
    }
}

/// Compares `int f o P` with `int f` for every observable.
pub fn check_invariance(
    spec: &PolynomialSpec,
    measure: &EmpiricalMeasure,
    observables: &[Observable<'_>],
) -> Result<InvarianceReport> {
    let mut rows = Vec::with_capacity(observables.len());
    for obs in observables {
        let pushed = integrate(measure, |z| (obs.f)(spec.evaluate(z)))?;
        let original = integrate(measure, |z| (obs.f)(z))?;
        rows.push(InvarianceRow {
            name: obs.name.to_string(),
            pushed_forward: pushed.mean,
            original: original.mean,
            deviation: (pushed.mean - original.mean).abs(),
            tolerance: 3.0 * (pushed.stderr + original.stderr),
        });
    }
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    Ok(InvarianceReport {
        rows,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn probability_vector_validation() {
        assert!(ProbabilityVector::new(vec![0.5, 0.5]).is_ok());
        assert!(ProbabilityVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityVector::new(vec![1.0, 0.0]).is_err());
        assert!(ProbabilityVector::new(vec![]).is_err());
        let p = ProbabilityVector::concentrated(3, 2, 0.9).unwrap();
        for (a, b) in p.as_slice().iter().zip([0.05, 0.9, 0.05]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((ProbabilityVector::uniform(4).entropy() - 4f64.ln()).abs() < 1e-15);
        assert_eq!(p.select(0.0), 1);
        assert_eq!(p.select(0.5), 2);
        assert_eq!(p.select(0.999), 3);
    }

    #[test]
    fn unperturbed_samples_lie_on_circle() {
        let q = PolynomialSpec::unperturbed(2);
        let m = sample_weighted_lyubich(&q, &ProbabilityVector::uniform(2), 1000, 60, 1).unwrap();
        assert_eq!(m.len(), 1000);
        assert!(m.points.iter().all(|z| (z.norm() - 1.0).abs() <= 1e-10));
        assert!((m.total_weight() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn degenerate_weights_collapse_to_fixed_point() {
        let p = PolynomialSpec::new(2, vec![c(0.1, 0.0)]).unwrap();
        let pv = ProbabilityVector::new(vec![1.0 - 1e-9, 1e-9]).unwrap();
        let m = sample_weighted_lyubich(&p, &pv, 100, 200, 3).unwrap();
        let fixed = (1.0 + 0.6f64.sqrt()) / 2.0;
        assert!(m.points.iter().all(|z| (z - c(fixed, 0.0)).norm() <= 1e-6));
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = PolynomialSpec::new(3, vec![c(0.1, 0.05), c(-0.1, 0.0)]).unwrap();
        let pv = ProbabilityVector::new(vec![0.2, 0.3, 0.5]).unwrap();
        let a = sample_weighted_lyubich(&p, &pv, 64, 30, 11).unwrap();
        let b = sample_weighted_lyubich(&p, &pv, 64, 30, 11).unwrap();
        let bits = |m: &EmpiricalMeasure| -> Vec<(u64, u64)> {
            m.points.iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect()
        };
        assert_eq!(bits(&a), bits(&b));
        let other = sample_weighted_lyubich(&p, &pv, 64, 30, 12).unwrap();
        assert_ne!(bits(&a), bits(&other));
    }

    #[test]
    fn sampler_rejects_bad_parameters() {
        let q = PolynomialSpec::unperturbed(2);
        let u = ProbabilityVector::uniform(2);
        assert!(sample_weighted_lyubich(&q, &u, 0, 10, 1).is_err());
        assert!(sample_weighted_lyubich(&q, &u, 10, 0, 1).is_err());
        assert!(sample_weighted_lyubich(&q, &ProbabilityVector::uniform(3), 10, 10, 1).is_err());
    }

    #[test]
    fn depth_one_tree() {
        let q = PolynomialSpec::unperturbed(2);
        let pv = ProbabilityVector::new(vec![0.3, 0.7]).unwrap();
        let m = full_preimage_measure(&q, &pv, c(1.0, 0.0), 1).unwrap();
        assert!((m.points[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((m.points[1] - c(-1.0, 0.0)).norm() < 1e-15);
        assert_eq!(m.weights, vec![0.3, 0.7]);
    }

    #[test]
    fn depth_ten_tree_is_roots_of_unity() {
        let q = PolynomialSpec::unperturbed(2);
        let m = full_preimage_measure(&q, &ProbabilityVector::uniform(2), c(1.0, 0.0), 10).unwrap();
        assert_eq!(m.len(), 1024);
        assert!(m.weights.iter().all(|&w| w == 1.0 / 1024.0));
        let mut turns: Vec<f64> = m
            .points
            .iter()
            .map(|z| crate::backward::principal_argument(*z) / TAU * 1024.0)
            .collect();
        turns.sort_by(f64::total_cmp);
        for (k, t) in turns.iter().enumerate() {
            assert!((t - k as f64).abs() < 1e-9, "{k}: {t}");
        }
    }

    #[test]
    fn depth_two_tree_maps_forward() {
        let p = PolynomialSpec::new(2, vec![c(0.1, 0.0)]).unwrap();
        let m = full_preimage_measure(&p, &ProbabilityVector::uniform(2), c(1.0, 0.0), 2).unwrap();
        assert_eq!(m.len(), 4);
        for z in &m.points {
            assert!((p.evaluate(p.evaluate(*z)) - c(1.0, 0.0)).norm() <= 1e-9);
        }
    }

    #[test]
    fn tree_guard() {
        let q = PolynomialSpec::unperturbed(3);
        let r = full_preimage_measure(&q, &ProbabilityVector::uniform(3), c(1.0, 0.0), 13);
        assert!(matches!(r, Err(Error::TreeTooLarge { .. })));
    }

    #[test]
    fn integrate_examples() {
        let q = PolynomialSpec::unperturbed(2);
        let m = full_preimage_measure(&q, &ProbabilityVector::uniform(2), c(1.0, 0.0), 10).unwrap();
        let one = integrate(&m, |_| 1.0).unwrap();
        assert!((one.mean - 1.0).abs() < 1e-15);
        assert_eq!(one.stderr, 0.0);
        let first = integrate_complex(&m, |z| z).unwrap();
        assert!(first.mean.norm() < 1e-12);
        let lyap = integrate(&m, |z| q.derivative_at(z).norm().ln()).unwrap();
        assert!((lyap.mean - 2f64.ln()).abs() < 1e-13, "{}", lyap.mean - 2f64.ln());

        let mc = sample_weighted_lyubich(&q, &ProbabilityVector::uniform(2), 200, 20, 5).unwrap();
        let one = integrate(&mc, |_| 1.0).unwrap();
        assert_eq!((one.mean, one.stderr, one.n), (1.0, 0.0, 200));
        assert!(integrate(&mc, |z| z.re).unwrap().stderr > 0.0);
    }

    #[test]
    fn non_finite_observable_is_reported() {
        let q = PolynomialSpec::unperturbed(2);
        let m = full_preimage_measure(&q, &ProbabilityVector::uniform(2), c(1.0, 0.0), 2).unwrap();
        assert!(matches!(
            integrate(&m, |z| if z.re > 0.5 { f64::NAN } else { 0.0 }),
            Err(Error::NonFiniteObservable { .. })
        ));
    }

    #[test]
    fn unperturbed_tree_is_invariant() {
        let q = PolynomialSpec::unperturbed(2);
        let m = full_preimage_measure(&q, &ProbabilityVector::uniform(2), c(1.0, 0.0), 10).unwrap();
        let re = |z: Complex64| z.re;
        let report = check_invariance(&q, &m, &[Observable { name: "re", f: &re }]).unwrap();
        assert!(report.max_deviation <= 1e-12);
    }

    #[test]
    fn columnar_round_trip() {
        let p = PolynomialSpec::new(2, vec![c(0.1, -0.2)]).unwrap();
        let m = sample_weighted_lyubich(&p, &ProbabilityVector::uniform(2), 16, 10, 9).unwrap();
        let mut buf = Vec::new();
        m.write_columns(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# {\"mode\":\"monte_carlo\""));
        let back = EmpiricalMeasure::read_columns(&buf[..]).unwrap();
        assert_eq!(back, m);
    }
}

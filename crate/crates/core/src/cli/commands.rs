use std::f64::consts::TAU;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use super::config::RunConfig;
use super::report::{fmt10, fmt_complex, num, Outcome, Table};
use crate::analysis::{
    check_connected, closed_form_complex, closed_form_real, comparison_report, derivative_report, expansion_terms,
    lyapunov_of_measure, pressure_scan, real_formula_report, ExpansionFamily, McParams, DEFAULT_STEP,
};
use crate::backward::default_start;
use crate::error::{Error, Result};
use crate::measure::{full_preimage_measure, sample_weighted_lyubich, EmpiricalMeasure, ProbabilityVector};
use crate::polynomial::{normalize_affine, PolynomialSpec};
use crate::render::{render_julia, write_image, Viewport};
use crate::series::{ConjugacyApprox, ConjugacyOrder, CoefficientFunctions, SeriesTruncation, DEFAULT_TAIL_TOLERANCE};

pub const DEFAULT_TREE_DEPTH: usize = 12;
pub const DEFAULT_SCHEDULE: [f64; 3] = [0.9, 0.99, 0.999];
pub const DEFAULT_GRID: usize = 10;

fn write_measure(measure: &EmpiricalMeasure, path: &Option<PathBuf>) -> Result<()> {
    if let Some(path) = path {
        measure.write_columns(BufWriter::new(File::create(path)?))?;
    }
    Ok(())
}

fn estimate_outcome(spec: &PolynomialSpec, measure: &EmpiricalMeasure, label: &str) -> Result<Outcome> {
    let est = lyapunov_of_measure(spec, measure)?;
    let mut table = Table::new(&["method", "value", "stderr", "n"]);
    table.push(vec![label.into(), num(est.value), num(est.stderr), est.n.to_string()]);
    Ok(Outcome {
        results: json!({
            "estimate": est,
            "p": measure.meta.p,
            "depth": measure.meta.depth,
            "start": measure.meta.start,
        }),
        lines: vec![format!(
            "Lyapunov exponent ({label}): {} ± {} (n = {})",
            fmt10(est.value),
            fmt10(est.stderr),
            est.n
        )],
        table,
        passed: true,
        ..Default::default()
    })
}

pub fn estimate(cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg.spec()?;
    let p = cfg.pvec(spec.degree())?;
    check_connected(&spec)?;
    let measure = sample_weighted_lyubich(&spec, &p, cfg.samples(), cfg.burn_in(), cfg.seed())?;
    write_measure(&measure, &cfg.measure_out)?;
    let mut out = estimate_outcome(&spec, &measure, "monte_carlo")?;
    out.seeds = vec![cfg.seed()];
    Ok(out)
}

pub fn tree(cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg.spec()?;
    let p = cfg.pvec(spec.degree())?;
    check_connected(&spec)?;
    let zeta = cfg.zeta.unwrap_or_else(|| default_start(&spec));
    let depth = cfg.depth.unwrap_or(DEFAULT_TREE_DEPTH);
    let measure = full_preimage_measure(&spec, &p, zeta, depth)?;
    write_measure(&measure, &cfg.measure_out)?;
    estimate_outcome(&spec, &measure, "tree")
}

pub fn closed_form(cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg.spec()?;
    let complex = closed_form_complex(&spec);
    let real = closed_form_real(&spec).ok();
    let mut lines = vec![format!("closed form (complex coefficients): {}", fmt10(complex.value))];
    let mut table = Table::new(&["method", "value"]);
    table.push(vec!["closed_form_complex".into(), num(complex.value)]);
    if let Some(r) = real {
        lines.push(format!("closed form (real coefficients):    {}", fmt10(r.value)));
        table.push(vec!["closed_form_real".into(), num(r.value)]);
    }
    Ok(Outcome {
        results: json!({ "closed_form_complex": complex, "closed_form_real": real }),
        lines,
        table,
        passed: true,
        ..Default::default()
    })
}

#[derive(Serialize)]
struct SeriesPoint {
    theta: f64,
    z: Complex64,
    phi_r: Vec<Complex64>,
    phi_r2: Vec<Complex64>,
    phi_rs: Vec<(usize, usize, Complex64)>,
    conjugacy_order1: Complex64,
    conjugacy_order2: Complex64,
    residual_order1: f64,
    residual_order2: f64,
}

pub fn series(cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg.spec()?;
    let d = spec.degree();
    let trunc = SeriesTruncation::for_tolerance(d, cfg.tail_tol.unwrap_or(DEFAULT_TAIL_TOLERANCE))?;
    let thetas = cfg.theta.clone().unwrap_or_else(|| vec![0.0]);
    let first = ConjugacyApprox::new(&spec, ConjugacyOrder::First, trunc)?;
    let second = ConjugacyApprox::new(&spec, ConjugacyOrder::Second, trunc)?;
    let mut points = Vec::new();
    let mut lines = vec![format!("truncation K1 = {}, K2 = {}, K3 = {}", trunc.k1, trunc.k2, trunc.k3)];
    let mut table = Table::new(&["theta", "function", "r", "s", "re", "im"]);
    for &theta in &thetas {
        if !theta.is_finite() {
            return Err(Error::invalid("theta", "angles must be finite"));
        }
        let z = Complex64::from_polar(1.0, theta);
        let phi = CoefficientFunctions::at(z, &trunc)?;
        let n = d - 1;
        let phi_r = (0..n).map(|r| phi.phi_r(r)).collect::<Result<Vec<_>>>()?;
        let phi_r2 = (0..n).map(|r| phi.phi_r2(r)).collect::<Result<Vec<_>>>()?;
        let mut phi_rs = Vec::new();
        for r in 0..n {
            for s in r + 1..n {
                phi_rs.push((r, s, phi.phi_rs(r, s)?));
            }
        }
        lines.push(format!("theta = {}", fmt10(theta)));
        for (r, v) in phi_r.iter().enumerate() {
            lines.push(format!("  phi_{r}      = {}", fmt_complex(*v)));
            table.push(vec![num(theta), "phi_r".into(), r.to_string(), String::new(), num(v.re), num(v.im)]);
        }
        for (r, v) in phi_r2.iter().enumerate() {
            lines.push(format!("  phi_{r}^2    = {}", fmt_complex(*v)));
            table.push(vec![num(theta), "phi_r2".into(), r.to_string(), String::new(), num(v.re), num(v.im)]);
        }
        for (r, s, v) in &phi_rs {
            lines.push(format!("  phi_{r}{s}     = {}", fmt_complex(*v)));
            table.push(vec![num(theta), "phi_rs".into(), r.to_string(), s.to_string(), num(v.re), num(v.im)]);
        }
        let point = SeriesPoint {
            theta,
            z,
            conjugacy_order1: first.eval(z)?,
            conjugacy_order2: second.eval(z)?,
            residual_order1: first.residual(z)?,
            residual_order2: second.residual(z)?,
            phi_r,
            phi_r2,
            phi_rs,
        };
        lines.push(format!(
            "  conjugacy residual: order 1 {}, order 2 {}",
            fmt10(point.residual_order1),
            fmt10(point.residual_order2)
        ));
        points.push(point);
    }
    Ok(Outcome {
        results: json!({ "truncation": trunc, "points": points }),
        lines,
        table,
        passed: true,
        ..Default::default()
    })
}

#[derive(Serialize)]
struct Check {
    name: String,
    value: f64,
    reference: f64,
    tolerance: f64,
    passed: bool,
}

impl Check {
    fn deviation(name: &str, deviation: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value: deviation,
            reference: 0.0,
            tolerance,
            passed: deviation <= tolerance,
        }
    }

    fn value(name: &str, value: f64, reference: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            reference,
            tolerance,
            passed: (value - reference).abs() <= tolerance,
        }
    }
}

/// Base points for the derivative checks: the origin, then random
/// coefficients with `|A_r| <= 0.3` from a fixed stream.
fn derivative_bases(d: usize, count: usize) -> Result<Vec<PolynomialSpec>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut bases = vec![PolynomialSpec::unperturbed(d)];
    while bases.len() < count {
        let coeffs = (0..d - 1)
            .map(|_| Complex64::from_polar(0.3 * rng.gen::<f64>(), TAU * rng.gen::<f64>()))
            .collect();
        bases.push(PolynomialSpec::new(d, coeffs)?);
    }
    Ok(bases)
}

/// Depth used for the table checks: 14 for quadratics, 9 for cubics, else
/// the largest depth with at most `2^14` leaves.
pub fn table_depth(d: usize) -> usize {
    match d {
        2 => 14,
        3 => 9,
        _ => {
            let mut depth = 1;
            while (d as u128).pow(depth as u32 + 1) <= 1 << 14 {
                depth += 1;
            }
            depth
        }
    }
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome> {
    let d = cfg.degree_or(2);
    let h = cfg.h.unwrap_or(DEFAULT_STEP);
    let mut checks = Vec::new();

    let bases = derivative_bases(d, 20)?;
    let mut defect: f64 = 0.0;
    let mut deviation: f64 = 0.0;
    for base in &bases {
        defect = defect.max(derivative_report(base, h)?.max_antisymmetry_defect);
        let real = PolynomialSpec::from_parts(d, &base.alpha(), None)?;
        deviation = deviation.max(real_formula_report(&real, h)?.max_deviation);
    }
    checks.push(Check::deviation("hessian antisymmetry max|H_aa + H_bb|", defect, 1e-9));
    checks.push(Check::deviation("real vs complex formula derivatives", deviation, 1e-9));
    let diagonal = derivative_report(&bases[0], h)?;

    let zeros = vec![0.0; d - 1];
    let tenths = vec![0.1; d - 1];
    let alpha_only = PolynomialSpec::from_parts(d, &tenths, None)?;
    let beta_only = PolynomialSpec::from_parts(d, &zeros, Some(&tenths))?;
    match d {
        2 => {
            checks.push(Check::value("closed form d=2 alpha=0.1", closed_form_real(&alpha_only)?.value, -0.5781471806, 1e-10));
            checks.push(Check::value("closed form d=2 beta=0.1", closed_form_complex(&beta_only).value, -0.7081471806, 1e-10));
        }
        3 => {
            checks.push(Check::value("closed form d=3 alpha=(0.1,0.1)", closed_form_real(&alpha_only)?.value, -0.9836122887, 1e-10));
            checks.push(Check::value("closed form d=3 beta=(0.1,0.1)", closed_form_complex(&beta_only).value, -1.1136122887, 1e-10));
        }
        _ => {
            let q = PolynomialSpec::unperturbed(d);
            checks.push(Check::value("closed form at A = 0", closed_form_complex(&q).value, -(d as f64).ln(), 0.0));
        }
    }

    let model = if cfg.has_coefficients() {
        cfg.spec_for(d)?
    } else {
        PolynomialSpec::from_parts(d, &tenths, Some(&vec![0.05; d - 1]))?
    };
    let depth = table_depth(d);
    let q = PolynomialSpec::unperturbed(d);
    let one = Complex64::new(1.0, 0.0);
    let concentrated = ProbabilityVector::concentrated(d, 1, 1.0 - 1e-6)?;
    let tree = full_preimage_measure(&q, &concentrated, one, depth)?;
    let limits = expansion_terms(&model, &tree, &SeriesTruncation::default_for(d))?;
    let table_dev = limits
        .rows
        .iter()
        .map(|r| (r.value - r.degenerate_limit).abs())
        .fold(0.0, f64::max);
    checks.push(Check::deviation("degenerate-limit table, p_1 = 1 - 1e-6", table_dev, 1e-3));

    let uniform = full_preimage_measure(&q, &ProbabilityVector::uniform(d), one, depth)?;
    let equi = expansion_terms(&model, &uniform, &SeriesTruncation::for_full_tree(d, depth)?)?;
    let linear_rows = equi
        .rows
        .iter()
        .filter(|r| matches!(r.family, ExpansionFamily::FirstOrder | ExpansionFamily::Diagonal | ExpansionFamily::Mixed))
        .map(|r| r.value.abs());
    let equi_dev = [equi.first_order, equi.second_order_diagonal, equi.second_order_mixed]
        .iter()
        .map(|v| v.abs())
        .chain(linear_rows)
        .fold(0.0, f64::max);
    checks.push(Check::deviation("equidistributed integrals vanish", equi_dev, 1e-12));

    let passed = checks.iter().all(|c| c.passed);
    let mut lines: Vec<String> = checks
        .iter()
        .map(|c| {
            let status = if c.passed { "PASS" } else { "FAIL" };
            if c.reference == 0.0 {
                format!("{status} {}: {} (tolerance {:e})", c.name, fmt10(c.value), c.tolerance)
            } else {
                format!(
                    "{status} {}: {} (expected {}, tolerance {:e})",
                    c.name,
                    fmt10(c.value),
                    fmt10(c.reference),
                    c.tolerance
                )
            }
        })
        .collect();
    lines.push(format!(
        "note: finite-difference diagonal H_aa[r][r] / ((d-2r+1)/(2(d-1)^2)) = {}",
        diagonal
            .diagonal_ratio
            .iter()
            .map(|v| if v.is_finite() { fmt10(*v) } else { "undefined".into() })
            .collect::<Vec<_>>()
            .join(", ")
    ));
    lines.push(format!(
        "note: expansion {} vs closed form {} at the concentrated tree",
        fmt10(limits.expansion.value),
        fmt10(limits.closed_form)
    ));
    lines.push(if passed { "all checks passed".into() } else { "some checks FAILED".into() });
    let mut table = Table::new(&["check", "value", "reference", "tolerance", "passed"]);
    for c in &checks {
        table.push(vec![c.name.clone(), num(c.value), num(c.reference), num(c.tolerance), c.passed.to_string()]);
    }
    Ok(Outcome {
        results: json!({
            "degree": d,
            "step": h,
            "checks": checks,
            "diagonal_ratio": diagonal.diagonal_ratio,
            "printed_diagonal": diagonal.printed_diagonal,
            "table_depth": depth,
            "degenerate_limit_table": limits,
            "equidistributed": equi,
        }),
        lines,
        table,
        passed,
        ..Default::default()
    })
}

fn mc_params(cfg: &RunConfig) -> McParams {
    McParams {
        n_samples: cfg.samples(),
        burn_in: cfg.burn_in(),
        seed: cfg.seed(),
    }
}

pub fn compare(cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg.spec()?;
    let d = spec.degree();
    let schedule = cfg.schedule.clone().unwrap_or_else(|| DEFAULT_SCHEDULE.to_vec());
    let branches = cfg.branch.clone().unwrap_or_else(|| (1..=d).collect());
    let mc = mc_params(cfg);
    let report = comparison_report(&spec, &schedule, &branches, &mc)?;
    let mut table = Table::new(&[
        "branch",
        "p_j",
        "mc",
        "mc_stderr",
        "closed_form",
        "fixed_point",
        "gap_mc_fixed_point",
        "gap_closed_form_fixed_point",
        "gap_closed_form_mc",
    ]);
    let mut lines = vec!["branch  p_j          monte carlo (± stderr)        closed form     fixed point     closed form - fixed point".to_string()];
    for r in &report.rows {
        table.push(vec![
            r.branch.to_string(),
            num(r.p_j),
            num(r.mc),
            num(r.mc_stderr),
            num(r.closed_form),
            num(r.fixed_point),
            num(r.gap_mc_fixed_point),
            num(r.gap_closed_form_fixed_point),
            num(r.gap_closed_form_mc),
        ]);
        lines.push(format!(
            "{:<7} {:<12} {} ± {}  {}  {}  {}",
            r.branch,
            fmt10(r.p_j),
            fmt10(r.mc),
            fmt10(r.mc_stderr),
            fmt10(r.closed_form),
            fmt10(r.fixed_point),
            fmt10(r.gap_closed_form_fixed_point)
        ));
    }
    Ok(Outcome {
        results: serde_json::to_value(&report)?,
        seeds: vec![mc.seed],
        lines,
        table,
        passed: true,
    })
}

pub fn pressure(cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg.spec()?;
    let m = cfg.grid.unwrap_or(DEFAULT_GRID);
    let mc = mc_params(cfg);
    let res = pressure_scan(&spec, m, &mc)?;
    let mut table = Table::new(&["p", "entropy", "lyapunov", "stderr", "value"]);
    for c in &res.cells {
        let p: Vec<String> = c.p.as_slice().iter().map(|v| num(*v)).collect();
        table.push(vec![p.join(" "), num(c.entropy), num(c.lyapunov), num(c.stderr), num(c.value)]);
    }
    let best: Vec<String> = res.best_p.as_slice().iter().map(|v| fmt10(*v)).collect();
    let lines = vec![
        format!("grid resolution {m}, {} cells", res.cells.len()),
        format!(
            "best h(p) + Lambda(p) = {} ± {} at p = ({})",
            fmt10(res.best_value),
            fmt10(res.best_stderr),
            best.join(", ")
        ),
        "this is a lower bound for the pressure of -log|P'| over Bernoulli weights".into(),
    ];
    Ok(Outcome {
        results: serde_json::to_value(&res)?,
        seeds: vec![mc.seed],
        lines,
        table,
        passed: true,
    })
}

pub fn render(cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg.spec()?;
    let view = Viewport::new(
        cfg.center.unwrap_or_default(),
        cfg.half_width.unwrap_or(1.6),
        cfg.width.unwrap_or(256),
        cfg.height.unwrap_or(256),
    )?;
    let max_iter = cfg.max_iter.unwrap_or(200);
    let image = render_julia(&spec, &view, max_iter)?;
    let path = cfg.image.clone().unwrap_or_else(|| PathBuf::from("julia.ppm"));
    write_image(&image, &path)?;
    let bounded = image.counts.iter().filter(|&&c| c == 0).count();
    let mut table = Table::new(&["width", "height", "max_iter", "bounded_pixels", "escaped_pixels"]);
    table.push(vec![
        image.width.to_string(),
        image.height.to_string(),
        max_iter.to_string(),
        bounded.to_string(),
        (image.counts.len() - bounded).to_string(),
    ]);
    Ok(Outcome {
        results: json!({
            "viewport": view,
            "max_iter": max_iter,
            "image": path,
            "bounded_pixels": bounded,
            "escaped_pixels": image.counts.len() - bounded,
        }),
        lines: vec![format!(
            "wrote {} ({}x{}, {} pixels never escaped)",
            path.display(),
            image.width,
            image.height,
            bounded
        )],
        table,
        passed: true,
        ..Default::default()
    })
}

pub fn normalize(cfg: &RunConfig) -> Result<Outcome> {
    let general = cfg
        .general
        .as_ref()
        .ok_or_else(|| Error::invalid("general", "coefficients B_0..B_d are required (--general)"))?;
    let norm = normalize_affine(general)?;
    let valid = norm.spec().is_ok();
    let mut lines = vec![
        format!("psi(z) = a z + b with a = {}, b = {}", fmt_complex(norm.scale), fmt_complex(norm.shift)),
    ];
    let mut table = Table::new(&["r", "re", "im"]);
    for (r, c) in norm.coeffs.iter().enumerate() {
        lines.push(format!("A_{r} = {}", fmt_complex(*c)));
        table.push(vec![r.to_string(), num(c.re), num(c.im)]);
    }
    if !valid {
        lines.push("warning: some |A_r| >= 1; outside the family studied here".into());
    }
    Ok(Outcome {
        results: json!({ "normalization": norm, "within_unit_bound": valid }),
        lines,
        table,
        passed: true,
        ..Default::default()
    })
}

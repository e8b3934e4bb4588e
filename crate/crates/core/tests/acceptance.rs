//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed. Run with `cargo test --test acceptance`.

#![allow(clippy::needless_range_loop)]

use std::f64::consts::{LN_2, TAU};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use julia_lyapunov::analysis::{
    closed_form_complex, closed_form_real, comparison_report, derivative_report, expansion_terms,
    fixed_point_exponent, lyapunov_mc, lyapunov_tree, pressure_scan, real_formula_report, ExpansionFamily, McParams,
    DEFAULT_STEP,
};
use julia_lyapunov::measure::{full_preimage_measure, EmpiricalMeasure, ProbabilityVector};
use julia_lyapunov::series::{conjugacy_residual, ConjugacyOrder, CoefficientFunctions, SeriesTruncation};
use julia_lyapunov::PolynomialSpec;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ms(t: Duration) -> String {
    format!("{:.1} ms", t.as_secs_f64() * 1e3)
}

fn random_coeffs(rng: &mut ChaCha8Rng, n: usize, radius: f64, real: bool) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            if real {
                c(radius * rng.gen_range(-1.0..=1.0), 0.0)
            } else {
                Complex64::from_polar(radius * rng.gen::<f64>(), TAU * rng.gen::<f64>())
            }
        })
        .collect()
}

fn quadratic_closed_form() -> Outcome {
    let real = PolynomialSpec::from_parts(2, &[0.1], None).unwrap();
    let imag = PolynomialSpec::from_parts(2, &[0.0], Some(&[0.1])).unwrap();
    let start = Instant::now();
    let a = closed_form_real(&real).unwrap().value;
    let elapsed = start.elapsed();
    let ac = closed_form_complex(&real).value;
    let b = closed_form_complex(&imag).value;
    let expected_a = -LN_2 + 0.1 + 0.015;
    let ok = (a - expected_a).abs() <= 1e-10
        && (a - (-0.5781471806)).abs() <= 1e-10
        && (ac - a).abs() <= 1e-10
        && (b - (-0.7081471806)).abs() <= 1e-10
        && elapsed < Duration::from_millis(1);
    ensure(ok, format!("alpha: {a:.10}, beta: {b:.10}, {}", ms(elapsed)))
}

fn cubic_closed_form() -> Outcome {
    let spec = PolynomialSpec::from_parts(3, &[0.1, 0.1], None).unwrap();
    let v = closed_form_real(&spec).unwrap().value;
    let vc = closed_form_complex(&spec).value;
    let expected = -3f64.ln() + 0.115;
    let ok = (v - expected).abs() <= 1e-10 && (v - (-0.9836122887)).abs() <= 1e-10 && (vc - v).abs() <= 1e-10;
    ensure(ok, format!("{v:.10}"))
}

fn sweep_specs(real: bool) -> Vec<PolynomialSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut specs = Vec::new();
    for d in 2..=8 {
        for _ in 0..20 {
            specs.push(PolynomialSpec::new(d, random_coeffs(&mut rng, d - 1, 0.3, real)).unwrap());
        }
    }
    specs
}

fn hessian_antisymmetry() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for spec in sweep_specs(false) {
        worst = worst.max(derivative_report(&spec, DEFAULT_STEP).unwrap().max_antisymmetry_defect);
    }
    let elapsed = start.elapsed();
    ensure(
        worst <= 1e-9 && elapsed < Duration::from_secs(5),
        format!("max |H_aa + H_bb| = {worst:.2e} over 140 points, {}", ms(elapsed)),
    )
}

fn real_complex_agreement() -> Outcome {
    let mut worst: f64 = 0.0;
    for spec in sweep_specs(true) {
        worst = worst.max(real_formula_report(&spec, DEFAULT_STEP).unwrap().max_deviation);
    }
    ensure(worst <= 1e-9, format!("max deviation = {worst:.2e} over 140 points"))
}

/// Bare integrals of the seven families against `measure`, computed point by
/// point, each with its value at `z = 1` derived by hand.
fn bare_integrals(measure: &EmpiricalMeasure, d: usize, trunc: &SeriesTruncation) -> Vec<(String, f64, f64)> {
    let n = d - 1;
    let df = d as f64;
    let m = (df - 1.0) * (df - 1.0);
    let mut names = Vec::new();
    let mut limits = Vec::new();
    for r in 0..n {
        names.push(format!("Re(z* phi_{r})"));
        limits.push(-1.0 / (df - 1.0));
    }
    for r in 0..n {
        names.push(format!("Re(z* phi_{r}{r}^2)"));
        limits.push(-(df - 2.0 * r as f64) / (2.0 * m));
    }
    for r in 0..n {
        names.push(format!("Re(z* phi_{r})^2/2"));
        limits.push(1.0 / (2.0 * m));
        names.push(format!("Im(z* phi_{r})^2/2"));
        limits.push(0.0);
    }
    for r in 0..n {
        for s in r + 1..n {
            names.push(format!("Re(z* phi_{r}{s})"));
            limits.push(-(df - (r + s) as f64) / m);
            names.push(format!("Re(z* phi_{r}) Re(z* phi_{s})"));
            limits.push(1.0 / m);
            names.push(format!("Im(z* phi_{r}) Im(z* phi_{s})"));
            limits.push(0.0);
        }
    }
    let mut sums = vec![0.0; names.len()];
    for (&z, &w) in measure.points.iter().zip(&measure.weights) {
        let phi = CoefficientFunctions::at(z, trunc).unwrap();
        let u: Vec<Complex64> = (0..n).map(|r| z.conj() * phi.phi_r(r).unwrap()).collect();
        let mut vals = Vec::with_capacity(names.len());
        for r in 0..n {
            vals.push(u[r].re);
        }
        for r in 0..n {
            vals.push((z.conj() * phi.phi_r2(r).unwrap()).re);
        }
        for r in 0..n {
            vals.push(u[r].re * u[r].re / 2.0);
            vals.push(u[r].im * u[r].im / 2.0);
        }
        for r in 0..n {
            for s in r + 1..n {
                vals.push((z.conj() * phi.phi_rs(r, s).unwrap()).re);
                vals.push(u[r].re * u[s].re);
                vals.push(u[r].im * u[s].im);
            }
        }
        for (acc, v) in sums.iter_mut().zip(vals) {
            *acc += w * v;
        }
    }
    names.into_iter().zip(sums).zip(limits).map(|((a, b), c)| (a, b, c)).collect()
}

fn table_limits() -> Outcome {
    let start = Instant::now();
    let mut worst_limit: f64 = 0.0;
    let mut worst_rows: f64 = 0.0;
    let mut worst_zero: f64 = 0.0;
    let one = c(1.0, 0.0);
    for (d, depth) in [(2, 14), (3, 9)] {
        let q = PolynomialSpec::unperturbed(d);
        let concentrated = ProbabilityVector::concentrated(d, 1, 1.0 - 1e-6).unwrap();
        let tree = full_preimage_measure(&q, &concentrated, one, depth).unwrap();
        let trunc = SeriesTruncation::default_for(d);
        for (_, value, limit) in bare_integrals(&tree, d, &trunc) {
            worst_limit = worst_limit.max((value - limit).abs());
        }
        // the same limits through the library's coefficient-weighted rows
        let model = PolynomialSpec::new(d, vec![c(0.1, 0.05); d - 1]).unwrap();
        let report = expansion_terms(&model, &tree, &trunc).unwrap();
        for row in &report.rows {
            worst_rows = worst_rows.max((row.value - row.degenerate_limit).abs());
        }

        let uniform = full_preimage_measure(&q, &ProbabilityVector::uniform(d), one, depth).unwrap();
        let exact = SeriesTruncation::for_full_tree(d, depth).unwrap();
        for (name, value, _) in bare_integrals(&uniform, d, &exact) {
            // squares of nonzero functions cannot integrate to zero
            if name.contains(")^2/2") || name.contains(") Re(") || name.contains(") Im(") {
                continue;
            }
            worst_zero = worst_zero.max(value.abs());
        }
        let equi = expansion_terms(&model, &uniform, &exact).unwrap();
        for v in [equi.first_order, equi.second_order_diagonal, equi.second_order_mixed] {
            worst_zero = worst_zero.max(v.abs());
        }
        for row in &equi.rows {
            if matches!(row.family, ExpansionFamily::FirstOrder | ExpansionFamily::Diagonal | ExpansionFamily::Mixed) {
                worst_zero = worst_zero.max(row.value.abs());
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(
        worst_limit <= 1e-3 && worst_rows <= 1e-3 && worst_zero <= 1e-12 && elapsed < Duration::from_secs(30),
        format!(
            "max limit error {worst_limit:.2e} (weighted rows {worst_rows:.2e}), equidistributed max {worst_zero:.2e}, {}",
            ms(elapsed)
        ),
    )
}

fn degenerate_oracle() -> Outcome {
    let start = Instant::now();
    let p = ProbabilityVector::new(vec![0.999, 0.001]).unwrap();
    let mut ok = true;
    let mut detail = Vec::new();
    for alpha in [0.02, 0.05, 0.1] {
        let spec = PolynomialSpec::from_parts(2, &[alpha], None).unwrap();
        let fixed = fixed_point_exponent(&spec, 1).unwrap().value;
        let gap = (closed_form_complex(&spec).value - fixed).abs();
        let bound = 4.0 * (10.0 / 3.0) * alpha.powi(3);
        let mc = lyapunov_mc(&spec, &p, 100_000, 60, 11).unwrap();
        let miss = (mc.value - fixed).abs();
        ok &= gap <= bound && miss <= 3.0 * mc.stderr + 2e-3;
        detail.push(format!("a={alpha}: gap {gap:.2e}/{bound:.2e}, mc miss {miss:.2e}"));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(60);
    ensure(ok, format!("{}, {}", detail.join("; "), ms(elapsed)))
}

fn maximal_entropy() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (d, depth) in [(2, 14), (3, 9)] {
        let spec = PolynomialSpec::from_parts(d, &vec![0.1; d - 1], None).unwrap();
        let p = ProbabilityVector::uniform(d);
        let mc = lyapunov_mc(&spec, &p, 100_000, 60, 3).unwrap();
        let tree = lyapunov_tree(&spec, &p, julia_lyapunov::backward::default_start(&spec), depth).unwrap();
        let target = -(d as f64).ln();
        ok &= (mc.value - tree.value).abs() <= 3.0 * mc.stderr
            && (mc.value - target).abs() <= 5e-3
            && (tree.value - target).abs() <= 5e-3;
        detail.push(format!("d={d}: mc {:.5} ± {:.1e}, tree {:.5}", mc.value, mc.stderr, tree.value));
    }
    ensure(ok, detail.join("; "))
}

fn series_tails() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..500 {
        let d = rng.gen_range(2..=8usize);
        let k = rng.gen_range(2..=10u32);
        let r = rng.gen_range(0..d - 1);
        let z = Complex64::from_polar(1.0, TAU * rng.gen::<f64>());
        let short = SeriesTruncation::new(d, k, k, k).unwrap();
        let long = SeriesTruncation::new(d, k + 10, k + 10, k + 10).unwrap();
        let a = CoefficientFunctions::at(z, &short).unwrap();
        let b = CoefficientFunctions::at(z, &long).unwrap();
        let mut pairs = vec![
            ((a.phi_r(r).unwrap() - b.phi_r(r).unwrap()).norm(), short.phi_r_tail()),
            ((a.phi_r2(r).unwrap() - b.phi_r2(r).unwrap()).norm(), short.phi_r2_tail(r)),
        ];
        if r + 1 < d - 1 {
            let s = rng.gen_range(r + 1..d - 1);
            pairs.push(((a.phi_rs(r, s).unwrap() - b.phi_rs(r, s).unwrap()).norm(), short.phi_rs_tail(r, s)));
        }
        for (diff, bound) in pairs {
            worst_ratio = worst_ratio.max(diff / bound);
        }
    }
    ensure(worst_ratio < 1.0, format!("max difference / tail bound = {worst_ratio:.3}"))
}

fn residual_scaling() -> Outcome {
    let bases = [
        (2, vec![c(0.02, 0.01)]),
        (3, vec![c(0.02, 0.01), c(0.01, -0.005)]),
    ];
    let points: Vec<Complex64> = (0..16).map(|k| Complex64::from_polar(1.0, TAU * (k as f64 + 0.5) / 16.0)).collect();
    let sup = |spec: &PolynomialSpec, order| {
        points
            .iter()
            .map(|&z| conjugacy_residual(spec, z, order).unwrap())
            .fold(0.0, f64::max)
    };
    let mut ok = true;
    let mut detail = Vec::new();
    for (d, base) in bases {
        let spec1 = PolynomialSpec::new(d, base.clone()).unwrap();
        let r1 = sup(&spec1, ConjugacyOrder::First);
        let r2 = sup(&spec1, ConjugacyOrder::Second);
        for t in [0.5, 0.25] {
            let scaled = PolynomialSpec::new(d, base.iter().map(|a| a * t).collect()).unwrap();
            let q1 = sup(&scaled, ConjugacyOrder::First) / r1;
            let q2 = sup(&scaled, ConjugacyOrder::Second) / r2;
            let t2 = t * t;
            let t3 = t2 * t;
            ok &= (t2 / 1.5..=1.5 * t2).contains(&q1) && (t3 / 2.0..=2.0 * t3).contains(&q2);
            detail.push(format!("d={d} t={t}: {:.3} t^2, {:.3} t^3", q1 / t2, q2 / t3));
        }
    }
    ensure(ok, detail.join("; "))
}

fn pressure() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    let mc = McParams {
        n_samples: 500,
        burn_in: 30,
        seed: 5,
    };
    for (d, m) in [(2, 20), (3, 21)] {
        let res = pressure_scan(&PolynomialSpec::unperturbed(d), m, &mc).unwrap();
        let uniform = res.cells.iter().find(|cell| cell.k.iter().all(|&k| k * d == m)).unwrap();
        ok &= uniform.value.abs() <= 1e-12 && uniform.stderr == 0.0;
        detail.push(format!("Q d={d}: {:.1e}", uniform.value));
    }
    let spec = PolynomialSpec::from_parts(2, &[0.1], None).unwrap();
    let mc = McParams {
        n_samples: 5000,
        burn_in: 60,
        seed: 5,
    };
    let a = pressure_scan(&spec, 20, &mc).unwrap();
    let b = pressure_scan(&spec, 40, &mc).unwrap();
    let sigma = a.best_stderr.hypot(b.best_stderr);
    ok &= (a.best_value - b.best_value).abs() <= 3.0 * sigma;
    detail.push(format!("m=20 {:.5}, m=40 {:.5}, 3 sigma {:.1e}", a.best_value, b.best_value, 3.0 * sigma));
    ensure(ok, detail.join("; "))
}

/// Newton on `P(z) - z` from the fixed point of `z^d` that branch `j` is
/// attached to, written independently of the library's root finder.
fn oracle_fixed_point(coeffs: &[Complex64], d: usize, j: usize) -> Complex64 {
    let eval = |z: Complex64| {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for k in (0..=d).rev() {
            let a = if k == d { c(1.0, 0.0) } else if k + 1 == d { c(0.0, 0.0) } else { coeffs[k] };
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp)
    };
    let mut z = Complex64::from_polar(1.0, TAU * (j - 1) as f64 / (d - 1) as f64);
    for _ in 0..100 {
        let (p, dp) = eval(z);
        let step = (p - z) / (dp - 1.0);
        z -= step;
        if step.norm() < 1e-16 {
            break;
        }
    }
    z
}

fn gap_report() -> Outcome {
    let spec = PolynomialSpec::from_parts(3, &[0.05, 0.0], None).unwrap();
    let mc = McParams {
        n_samples: 2000,
        ..McParams::default()
    };
    let report = comparison_report(&spec, &[0.99], &[1, 2, 3], &mc).unwrap();
    let mut ok = report.rows.len() == 3;
    let mut detail = Vec::new();
    for row in &report.rows {
        let z = oracle_fixed_point(spec.coeffs(), 3, row.branch);
        let dp = 3.0 * z * z + spec.coeffs()[1];
        let oracle = -dp.norm().ln();
        let gap = row.closed_form - row.fixed_point;
        ok &= (row.fixed_point - oracle).abs() <= 1e-10 && (row.gap_closed_form_fixed_point - gap).abs() <= 1e-15;
        detail.push(format!("j={}: gap {:+.5}, oracle diff {:.1e}", row.branch, gap, (row.fixed_point - oracle).abs()));
    }
    ensure(ok, detail.join("; "))
}

fn run_cli(args: &[&str], dir: &Path, tag: &str, threads: Option<usize>) -> (Vec<u8>, Vec<u8>) {
    let out = dir.join(format!("{tag}.json"));
    let table = dir.join(format!("{tag}.csv"));
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lyap"));
    cmd.args(args)
        .arg("--no-timestamp")
        .arg("--output")
        .arg(&out)
        .arg("--table")
        .arg(&table)
        .env_remove("LYAP_THREADS");
    if let Some(n) = threads {
        cmd.arg("--threads").arg(n.to_string());
    }
    let status = cmd.output().expect("lyap runs");
    assert!(status.status.success(), "{args:?}: {}", String::from_utf8_lossy(&status.stderr));
    (std::fs::read(out).unwrap(), std::fs::read(table).unwrap())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let commands: [&[&str]; 5] = [
        &["estimate", "--degree", "3", "--alpha", "0.1,0.05", "--beta", "0,0.1", "--n", "3000", "--seed", "9"],
        &["tree", "--degree", "2", "--alpha", "0.1", "--p", "0.7,0.3", "--depth", "10"],
        &["compare", "--degree", "2", "--alpha", "0.1", "--n", "1000", "--seed", "4"],
        &["pressure", "--degree", "2", "--alpha", "0.1", "--grid", "5", "--n", "500", "--seed", "2"],
        &["verify", "--degree", "2"],
    ];
    let mut mismatches = Vec::new();
    for args in commands {
        let reference = run_cli(args, dir.path(), "ref", None);
        for (i, threads) in [None, Some(1), Some(4), Some(8)].into_iter().enumerate() {
            if run_cli(args, dir.path(), &format!("run{i}"), threads) != reference {
                mismatches.push(format!("{} threads={threads:?}", args[0]));
            }
        }
    }
    ensure(
        mismatches.is_empty(),
        if mismatches.is_empty() {
            "5 commands byte-identical across repeat runs and 1, 4, 8 threads".into()
        } else {
            format!("differences: {}", mismatches.join(", "))
        },
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("1  quadratic closed form", quadratic_closed_form),
        ("2  cubic closed form", cubic_closed_form),
        ("3  hessian antisymmetry", hessian_antisymmetry),
        ("4  real and complex formulas agree", real_complex_agreement),
        ("5  degenerate-limit table", table_limits),
        ("6  fixed-point oracle, d=2", degenerate_oracle),
        ("7  maximal-entropy measure", maximal_entropy),
        ("8  series tail bounds", series_tails),
        ("9  conjugacy residual scaling", residual_scaling),
        ("10 pressure scan", pressure),
        ("11 gap report, d=3", gap_report),
        ("12 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} [{secs:.2} s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail} [{secs:.2} s]");
            }
        }
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

//! Finite-difference derivatives of the closed form: the Hessian in the real
//! and imaginary directions cancels, and the real and complex formulas agree.
use julia_lyapunov::analysis::{derivative_report, real_formula_report, DEFAULT_STEP};
use julia_lyapunov::PolynomialSpec;

fn main() -> julia_lyapunov::Result<()> {
    let spec = PolynomialSpec::from_parts(3, &[0.1, -0.2], Some(&[0.05, 0.1]))?;
    let report = derivative_report(&spec, DEFAULT_STEP)?;
    println!("grad alpha     {:?}", report.grad_alpha);
    println!("grad beta      {:?}", report.grad_beta);
    println!("max |H_aa + H_bb| = {:.3e}", report.max_antisymmetry_defect);

    let real = PolynomialSpec::from_parts(3, &[0.1, -0.2], None)?;
    let t2 = real_formula_report(&real, DEFAULT_STEP)?;
    println!("real vs complex formula, max deviation = {:.3e}", t2.max_deviation);

    let origin = derivative_report(&PolynomialSpec::unperturbed(3), DEFAULT_STEP)?;
    println!("diagonal at A = 0 over (d-2r+1)/(2(d-1)^2): {:?}", origin.diagonal_ratio);
    Ok(())
}

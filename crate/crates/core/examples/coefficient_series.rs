//! Coefficient functions on the unit circle and the conjugacy residual at
//! first and second order.
use julia_lyapunov::series::{conjugacy_residual, ConjugacyOrder, CoefficientFunctions, SeriesTruncation};
use julia_lyapunov::PolynomialSpec;
use num_complex::Complex64;

fn main() -> julia_lyapunov::Result<()> {
    let d = 3;
    let trunc = SeriesTruncation::default_for(d);
    println!("caps K1 = {}, K2 = {}, K3 = {}", trunc.k1, trunc.k2, trunc.k3);

    let spec = PolynomialSpec::from_parts(d, &[0.02, 0.01], Some(&[0.01, 0.0]))?;
    for k in 0..4 {
        let z = Complex64::from_polar(1.0, 0.4 * k as f64);
        let phi = CoefficientFunctions::at(z, &trunc)?;
        println!(
            "theta = {:.1}: phi_0 = {:.6}, phi_01 = {:.6}, residual {:.2e} -> {:.2e}",
            0.4 * k as f64,
            phi.phi_r(0)?,
            phi.phi_rs(0, 1)?,
            conjugacy_residual(&spec, z, ConjugacyOrder::First)?,
            conjugacy_residual(&spec, z, ConjugacyOrder::Second)?,
        );
    }
    Ok(())
}

//! Closed-form Lyapunov exponents of the degenerate limit, real and complex.
use julia_lyapunov::analysis::{closed_form_complex, closed_form_real};
use julia_lyapunov::PolynomialSpec;

fn main() -> julia_lyapunov::Result<()> {
    for d in 2..=5 {
        let tenths = vec![0.1; d - 1];
        let zeros = vec![0.0; d - 1];
        let real = PolynomialSpec::from_parts(d, &tenths, None)?;
        let imag = PolynomialSpec::from_parts(d, &zeros, Some(&tenths))?;
        println!(
            "d = {d}: -log d = {:.10}  alpha = 0.1: {:.10}  beta = 0.1: {:.10}",
            -(d as f64).ln(),
            closed_form_real(&real)?.value,
            closed_form_complex(&imag).value
        );
    }
    Ok(())
}

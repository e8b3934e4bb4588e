//! As one branch weight tends to one, the exponent approaches the closed form
//! and the fixed point of that branch.
use julia_lyapunov::analysis::{comparison_report, McParams};
use julia_lyapunov::PolynomialSpec;

fn main() -> julia_lyapunov::Result<()> {
    let spec = PolynomialSpec::from_parts(2, &[0.1], None)?;
    let mc = McParams {
        n_samples: 20_000,
        ..McParams::default()
    };
    let report = comparison_report(&spec, &[0.9, 0.99, 0.999], &[1], &mc)?;
    for row in &report.rows {
        println!(
            "p_1 = {:<6} mc = {:.5} ± {:.5}  closed form = {:.5}  fixed point = {:.5}",
            row.p_j, row.mc, row.mc_stderr, row.closed_form, row.fixed_point
        );
    }
    Ok(())
}

//! Monte Carlo and full-tree estimates against the closed form.
use julia_lyapunov::analysis::{closed_form_complex, lyapunov_mc, lyapunov_tree};
use julia_lyapunov::backward::default_start;
use julia_lyapunov::measure::ProbabilityVector;
use julia_lyapunov::PolynomialSpec;

fn main() -> julia_lyapunov::Result<()> {
    let spec = PolynomialSpec::from_parts(2, &[0.1], Some(&[0.05]))?;
    let p = ProbabilityVector::new(vec![0.7, 0.3])?;

    let mc = lyapunov_mc(&spec, &p, 20_000, 60, 7)?;
    println!("monte carlo  {:.6} ± {:.6}", mc.value, mc.stderr);

    let tree = lyapunov_tree(&spec, &p, default_start(&spec), 14)?;
    println!("tree (14)    {:.6}", tree.value);

    // only the degenerate limit p -> (1, 0) has a closed form
    println!("closed form  {:.6}", closed_form_complex(&spec).value);
    Ok(())
}

//! Scan h(p) + Lambda(p) over a simplex grid of Bernoulli weights.
use julia_lyapunov::analysis::{pressure_scan, McParams};
use julia_lyapunov::PolynomialSpec;

fn main() -> julia_lyapunov::Result<()> {
    let spec = PolynomialSpec::from_parts(2, &[0.2], Some(&[0.1]))?;
    let mc = McParams {
        n_samples: 4000,
        ..McParams::default()
    };
    let res = pressure_scan(&spec, 10, &mc)?;
    for cell in &res.cells {
        println!("p = {:?}  h + Lambda = {:+.5}", cell.p.as_slice(), cell.value);
    }
    println!("best {:.5} at {:?}", res.best_value, res.best_p.as_slice());
    Ok(())
}

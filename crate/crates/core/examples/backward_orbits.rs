//! Inverse branches: labelled preimages, a backward orbit and the
//! repelling fixed points reached by iterating one branch.
use julia_lyapunov::backward::{branch_fixed_point, default_start, preimages, step_backward, BackwardOrbitState};
use julia_lyapunov::PolynomialSpec;

fn main() -> julia_lyapunov::Result<()> {
    let spec = PolynomialSpec::from_parts(3, &[0.1, 0.2], Some(&[0.0, -0.1]))?;
    let start = default_start(&spec);
    for (j, w) in preimages(&spec, start)?.labeled_points.iter().enumerate() {
        println!("branch {}: {w:.6}", j + 1);
    }

    let mut state = BackwardOrbitState::new(start);
    for j in [1, 3, 2, 2, 1, 3, 3, 1] {
        state = step_backward(&spec, &state, j)?;
    }
    println!("word {:?} ends at {:.6}", state.word, state.current);
    println!("forward residual {:.2e}", state.forward_residual(&spec));

    // a branch whose candidate fixed point sits on the labelling cut can
    // flip between labels and never settle
    for j in 1..=3 {
        match branch_fixed_point(&spec, j, 1e-14) {
            Ok(z) => println!("fixed point of branch {j}: {z:.10}  |P'| = {:.6}", spec.derivative_at(z).norm()),
            Err(e) => println!("branch {j}: {e}"),
        }
    }
    Ok(())
}

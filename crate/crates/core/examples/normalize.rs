//! Conjugating a general polynomial into monic centred form.
use julia_lyapunov::polynomial::normalize_affine;
use num_complex::Complex64;

fn main() -> julia_lyapunov::Result<()> {
    // 2 z^3 - 3 z^2 + 0.5 z + 0.25
    let general = [0.25, 0.5, -3.0, 2.0].map(|b| Complex64::new(b, 0.0));
    let norm = normalize_affine(&general)?;
    println!("scale {}  shift {}", norm.scale, norm.shift);
    for (r, c) in norm.coeffs.iter().enumerate() {
        println!("A_{r} = {c}");
    }
    match norm.spec() {
        Ok(spec) => println!("in family, degree {}", spec.degree()),
        Err(e) => println!("outside family: {e}"),
    }
    Ok(())
}

//! Escape-time picture of a Julia set, written as a binary PPM.
use julia_lyapunov::render::{render_julia, write_image, Viewport};
use julia_lyapunov::PolynomialSpec;
use num_complex::Complex64;

fn main() -> julia_lyapunov::Result<()> {
    let spec = PolynomialSpec::from_parts(3, &[0.3, -0.2], Some(&[0.1, 0.4]))?;
    let view = Viewport::new(Complex64::new(0.0, 0.0), 1.6, 400, 400)?;
    let image = render_julia(&spec, &view, 300)?;
    let path = std::env::temp_dir().join("julia_cubic.ppm");
    write_image(&image, &path)?;
    println!("wrote {}", path.display());
    Ok(())
}

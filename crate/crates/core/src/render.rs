//! Escape-time rendering of the filled Julia set.
//!
//! Pixel `(x, y)` of a `W x H` viewport sits at
//! `center + half_width * ((2x+1)/W - 1) - i * half_width * (H/W) * ((2y+1)/H - 1)`,
//! so `x` grows to the right and `y` grows downward.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polynomial::PolynomialSpec;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Viewport {
    pub center: Complex64,
    pub half_width: f64,
    pub pixels_x: usize,
    pub pixels_y: usize,
}

impl Viewport {
    pub fn new(center: Complex64, half_width: f64, pixels_x: usize, pixels_y: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::invalid("half_width", "must be positive and finite"));
        }
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(Error::invalid("center", "must be finite"));
        }
        if pixels_x < 16 || pixels_y < 16 {
            return Err(Error::invalid("pixels", "each dimension needs at least 16 pixels"));
        }
        Ok(Self {
            center,
            half_width,
            pixels_x,
            pixels_y,
        })
    }

    pub fn pixel(&self, x: usize, y: usize) -> Complex64 {
        let w = self.pixels_x as f64;
        let h = self.pixels_y as f64;
        let re = self.center.re + self.half_width * ((2 * x + 1) as f64 / w - 1.0);
        let im = self.center.im - self.half_width * (h / w) * ((2 * y + 1) as f64 / h - 1.0);
        Complex64::new(re, im)
    }
}

/// Escape counts in row-major order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RasterImage {
    pub width: usize,
    pub height: usize,
    pub max_iter: u32,
    /// First `n >= 1` with `|P^n(z)| > R`, or 0 if the orbit never escaped.
    pub counts: Vec<u32>,
}

impl RasterImage {
    pub fn count(&self, x: usize, y: usize) -> u32 {
        self.counts[y * self.width + x]
    }
}

fn escape_count(spec: &PolynomialSpec, z0: Complex64, radius_sq: f64, max_iter: u32) -> u32 {
    let mut z = z0;
    for n in 1..=max_iter {
        z = spec.evaluate(z);
        if z.norm_sqr() > radius_sq {
            return n;
        }
    }
    0
}

pub fn render_julia(spec: &PolynomialSpec, viewport: &Viewport, max_iter: u32) -> Result<RasterImage> {
    if max_iter == 0 {
        return Err(Error::invalid("max_iter", "must be at least 1"));
    }
    let r = spec.escape_radius();
    let radius_sq = r * r;
    let counts = (0..viewport.pixels_y)
        .into_par_iter()
        .flat_map_iter(|y| {
            (0..viewport.pixels_x).map(move |x| escape_count(spec, viewport.pixel(x, y), radius_sq, max_iter))
        })
        .collect();
    Ok(RasterImage {
        width: viewport.pixels_x,
        height: viewport.pixels_y,
        max_iter,
        counts,
    })
}

/// Gray level: black for points that never escaped, brighter for faster escape.
fn gray(count: u32, max_iter: u32) -> u8 {
    if count == 0 {
        0
    } else if max_iter == 1 {
        255
    } else {
        (1 + 254 * (max_iter - count) as u64 / (max_iter - 1) as u64) as u8
    }
}

/// Encodes the image as a binary `P6` pixmap.
pub fn encode_ppm(image: &RasterImage) -> Vec<u8> {
    let header = format!("P6\n{} {}\n255\n", image.width, image.height);
    let mut bytes = Vec::with_capacity(header.len() + 3 * image.counts.len());
    bytes.extend_from_slice(header.as_bytes());
    for &c in &image.counts {
        let g = gray(c, image.max_iter);
        bytes.extend_from_slice(&[g, g, g]);
    }
    bytes
}

pub fn write_image(image: &RasterImage, path: &Path) -> Result<()> {
    if image.counts.len() != image.width * image.height {
        return Err(Error::invalid("image", "pixel count does not match dimensions"));
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(&encode_ppm(image))?;
    Ok(())
}

//! Synthetic banding noise and the Airy diffraction pattern.

use std::f64::consts::PI;

use crate::convert::{recenter, CartesianImage, PolarImage};
use crate::error::{Error, Result};
use crate::geometry::{MeasureKind, PolarGrid};
use crate::matrix::Matrix;

/// Largest |x| accepted by [`bessel_j1`].
pub const BESSEL_MAX_ARG: f64 = 1e4;
const SERIES_LIMIT: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSpec {
    /// Value `amplitude` on blocks of `period / 2` rings, 0 on the next
    /// block, starting with `amplitude` at ring 0.
    CircularBands {
        period: usize,
        amplitude: f64,
        measure: MeasureKind,
    },
    /// Same along the angular index.
    AzimuthalBands {
        period: usize,
        amplitude: f64,
    },
    AiryPattern {
        i0: f64,
        ka: f64,
    },
}

fn band_value(index: usize, period: usize, amplitude: f64) -> f64 {
    if (index / (period / 2)).is_multiple_of(2) {
        amplitude
    } else {
        0.0
    }
}

fn check_band(period: usize, amplitude: f64, dim: usize) -> Result<()> {
    if period < 2 || !period.is_multiple_of(2) || !dim.is_multiple_of(period) {
        return Err(Error::InvalidPeriod { period, dim });
    }
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(Error::InvalidNoise(format!(
            "amplitude {amplitude} must be finite and >= 0"
        )));
    }
    Ok(())
}

/// Banding pattern as a polar matrix on `grid`.
pub fn gen_banding_polar(grid: &PolarGrid, spec: &NoiseSpec) -> Result<PolarImage> {
    let values = match *spec {
        NoiseSpec::CircularBands {
            period,
            amplitude,
            measure,
        } => {
            if measure != grid.measure() {
                return Err(Error::InvalidNoise(format!(
                    "circular bands defined for {measure:?}, grid uses {:?}",
                    grid.measure()
                )));
            }
            check_band(period, amplitude, grid.n1())?;
            Matrix::from_fn(grid.n1(), grid.n2(), |k, _| {
                band_value(k, period, amplitude)
            })
        }
        NoiseSpec::AzimuthalBands { period, amplitude } => {
            check_band(period, amplitude, grid.n2())?;
            Matrix::from_fn(grid.n1(), grid.n2(), |_, q| {
                band_value(q, period, amplitude)
            })
        }
        NoiseSpec::AiryPattern { .. } => {
            return Err(Error::InvalidNoise(
                "the Airy pattern is rendered on a raster, not a polar grid".into(),
            ))
        }
    };
    PolarImage::new(*grid, values)
}

/// Bessel function of the first kind, order one.
///
/// Power series up to |x| = 12, Hankel asymptotic expansion (truncated at its
/// smallest term) beyond. Absolute error is below 1e-12 on [0, 1e4].
pub fn bessel_j1(x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() >= BESSEL_MAX_ARG {
        return Err(Error::ArgumentOutOfRange(x));
    }
    let ax = x.abs();
    let v = if ax <= SERIES_LIMIT {
        j1_series(ax)
    } else {
        j1_asymptotic(ax)
    };
    // J1 is odd.
    Ok(if x < 0.0 { -v } else { v })
}

fn j1_series(x: f64) -> f64 {
    let half = 0.5 * x;
    let q = half * half;
    let mut term = half;
    let mut sum = term;
    let mut m = 0.0;
    loop {
        term *= -q / ((m + 1.0) * (m + 2.0));
        m += 1.0;
        sum += term;
        if m > x && term.abs() <= 1e-17 * sum.abs() {
            return sum;
        }
    }
}

fn j1_asymptotic(x: f64) -> f64 {
    // a_k = prod_{i=1..k} (4 - (2i - 1)^2) / (8 i); P collects even k, Q odd.
    let mut a = 1.0;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut prev = f64::INFINITY;
    let mut xk = 1.0;
    for k in 1..200u32 {
        let odd = f64::from(2 * k - 1);
        a *= (4.0 - odd * odd) / (8.0 * f64::from(k));
        xk *= x;
        let t = a / xk;
        if t.abs() >= prev || t.abs() < 1e-17 {
            break;
        }
        prev = t.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * t;
        } else {
            q += sign * t;
        }
    }
    let chi = x - 0.75 * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Airy intensity `i0 (2 J1(x) / x)^2`, equal to `i0` at `x = 0`.
pub fn airy_intensity(x: f64, i0: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::ArgumentOutOfRange(x));
    }
    if x == 0.0 {
        return Ok(i0);
    }
    let ratio = 2.0 * bessel_j1(x)? / x;
    Ok(i0 * ratio * ratio)
}

/// Renders a `size x size` Airy pattern centred at `(size/2, size/2)`.
///
/// The argument at a pixel is `ka * r / R` with `R = floor(size / 2)`, i.e.
/// `sin(theta)` grows linearly with the pixel radius and reaches 1 at the
/// disk edge. Pixels at or beyond `R` are black. Brightness is
/// `255 (I / i0)^(1 / enhance)`; `enhance > 1` lifts the outer rings.
pub fn render_airy(size: usize, ka: f64, i0: f64, enhance: f64) -> Result<CartesianImage> {
    if size < 2 {
        return Err(Error::ImageTooSmall(size, size, 2));
    }
    if !(ka > 0.0 && ka.is_finite()) {
        return Err(Error::InvalidNoise(format!("ka {ka} must be positive")));
    }
    if !(enhance >= 1.0 && enhance.is_finite()) {
        return Err(Error::InvalidNoise(format!(
            "enhance {enhance} must be >= 1"
        )));
    }
    if !(i0 >= 0.0 && i0.is_finite()) {
        return Err(Error::InvalidNoise(format!("i0 {i0} must be >= 0")));
    }
    let radius = (size / 2) as f64;
    let mut img = CartesianImage::filled(size, size, 0.0);
    if i0 == 0.0 {
        return Ok(img);
    }
    for i in 0..size {
        for j in 0..size {
            let (dy, dx) = recenter(i, j, size, size);
            let r = ((dy * dy + dx * dx) as f64).sqrt();
            if r >= radius {
                continue;
            }
            let rel = airy_intensity(ka * r / radius, i0)? / i0;
            img.set(i, j, 255.0 * rel.powf(1.0 / enhance));
        }
    }
    Ok(img)
}

/// Pixelwise sum, optionally clipped to `[0, 255]`.
pub fn add_noise(
    img: &CartesianImage,
    noise: &CartesianImage,
    clamp: bool,
) -> Result<CartesianImage> {
    if (img.rows(), img.cols()) != (noise.rows(), noise.cols()) {
        return Err(Error::DimensionMismatch(
            img.rows(),
            img.cols(),
            noise.rows(),
            noise.cols(),
        ));
    }
    Ok(CartesianImage::from_fn(img.rows(), img.cols(), |i, j| {
        let v = img.get(i, j) + noise.get(i, j);
        if clamp {
            v.clamp(0.0, 255.0)
        } else {
            v
        }
    }))
}

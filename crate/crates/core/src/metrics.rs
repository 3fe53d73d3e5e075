//! MSE, PSNR and SSIM.

use std::fmt;

use crate::convert::{recenter, CartesianImage};
use crate::error::{Error, Result};

pub const DEFAULT_PEAK: f64 = 255.0;

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_RANGE: f64 = 255.0;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

/// Pixel selection for masked metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    rows: usize,
    cols: usize,
    keep: Vec<bool>,
}

impl Mask {
    /// Pixels strictly inside the centred disk of radius `floor(min/2)`.
    pub fn disk(rows: usize, cols: usize) -> Self {
        Self::disk_with_radius(rows, cols, (rows.min(cols) / 2) as f64)
    }

    pub fn disk_with_radius(rows: usize, cols: usize, radius: f64) -> Self {
        let mut keep = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let (dy, dx) = recenter(i, j, rows, cols);
                keep.push((((dy * dy + dx * dx) as f64).sqrt()) < radius);
            }
        }
        Self { rows, cols, keep }
    }

    pub fn count(&self) -> usize {
        self.keep.iter().filter(|&&k| k).count()
    }
}

fn check_same_shape(a: &CartesianImage, b: &CartesianImage) -> Result<()> {
    if (a.rows(), a.cols()) != (b.rows(), b.cols()) {
        return Err(Error::DimensionMismatch(
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols(),
        ));
    }
    Ok(())
}

pub fn mse(a: &CartesianImage, b: &CartesianImage, mask: Option<&Mask>) -> Result<f64> {
    check_same_shape(a, b)?;
    let pa = a.pixels().as_slice();
    let pb = b.pixels().as_slice();
    let (sum, n) = match mask {
        None => (
            pa.iter()
                .zip(pb)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>(),
            pa.len(),
        ),
        Some(m) => {
            if (m.rows, m.cols) != (a.rows(), a.cols()) {
                return Err(Error::DimensionMismatch(m.rows, m.cols, a.rows(), a.cols()));
            }
            pa.iter()
                .zip(pb)
                .zip(&m.keep)
                .filter(|(_, &k)| k)
                .fold((0.0, 0usize), |(s, n), ((x, y), _)| {
                    (s + (x - y) * (x - y), n + 1)
                })
        }
    };
    if n == 0 {
        return Ok(0.0);
    }
    Ok(sum / n as f64)
}

/// `10 log10(peak^2 / mse)`; `+inf` when `mse == 0`.
pub fn psnr_from_mse(mse: f64, peak: f64) -> Result<f64> {
    if !(peak > 0.0 && peak.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "peak {peak} must be positive"
        )));
    }
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (peak * peak / mse).log10())
}

pub fn psnr(a: &CartesianImage, b: &CartesianImage, peak: f64, mask: Option<&Mask>) -> Result<f64> {
    psnr_from_mse(mse(a, b, mask)?, peak)
}

fn gaussian_window() -> Vec<f64> {
    let half = (SSIM_WINDOW / 2) as f64;
    let w: Vec<f64> = (0..SSIM_WINDOW)
        .map(|i| {
            let d = i as f64 - half;
            (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp()
        })
        .collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

/// Separable "valid" filtering with the 1D kernel along both axes.
fn filter_valid(data: &[f64], rows: usize, cols: usize, w: &[f64]) -> (Vec<f64>, usize, usize) {
    let n = w.len();
    let out_cols = cols - n + 1;
    let out_rows = rows - n + 1;
    let mut horiz = vec![0.0; rows * out_cols];
    for i in 0..rows {
        let row = &data[i * cols..(i + 1) * cols];
        for j in 0..out_cols {
            horiz[i * out_cols + j] = row[j..j + n].iter().zip(w).map(|(x, k)| x * k).sum();
        }
    }
    let mut out = vec![0.0; out_rows * out_cols];
    for i in 0..out_rows {
        for j in 0..out_cols {
            out[i * out_cols + j] = (0..n).map(|t| horiz[(i + t) * out_cols + j] * w[t]).sum();
        }
    }
    (out, out_rows, out_cols)
}

/// Mean SSIM over all fully-contained 11x11 Gaussian (sigma 1.5) windows with
/// the standard constants for 8-bit data.
pub fn ssim(a: &CartesianImage, b: &CartesianImage) -> Result<f64> {
    check_same_shape(a, b)?;
    let (rows, cols) = (a.rows(), a.cols());
    if rows < SSIM_WINDOW || cols < SSIM_WINDOW {
        return Err(Error::ImageTooSmall(rows, cols, SSIM_WINDOW));
    }
    let w = gaussian_window();
    let x = a.pixels().as_slice();
    let y = b.pixels().as_slice();
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(y).map(|(p, q)| p * q).collect();

    let (mu_x, _, _) = filter_valid(x, rows, cols, &w);
    let (mu_y, _, _) = filter_valid(y, rows, cols, &w);
    let (s_xx, _, _) = filter_valid(&xx, rows, cols, &w);
    let (s_yy, _, _) = filter_valid(&yy, rows, cols, &w);
    let (s_xy, _, _) = filter_valid(&xy, rows, cols, &w);

    let c1 = (SSIM_K1 * SSIM_RANGE).powi(2);
    let c2 = (SSIM_K2 * SSIM_RANGE).powi(2);
    let n = mu_x.len();
    let total: f64 = (0..n)
        .map(|i| {
            let (mx, my) = (mu_x[i], mu_y[i]);
            let vx = s_xx[i] - mx * mx;
            let vy = s_yy[i] - my * my;
            let cov = s_xy[i] - mx * my;
            ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2))
        })
        .sum();
    Ok(total / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    pub mse: f64,
    /// `+inf` for identical images.
    pub psnr: f64,
    pub ssim: f64,
    pub peak: f64,
}

impl QualityReport {
    pub fn compute(
        reference: &CartesianImage,
        test: &CartesianImage,
        peak: f64,
        mask: Option<&Mask>,
    ) -> Result<Self> {
        let mse = mse(reference, test, mask)?;
        Ok(Self {
            mse,
            psnr: psnr_from_mse(mse, peak)?,
            ssim: ssim(reference, test)?,
            peak,
        })
    }

    pub fn is_identical(&self) -> bool {
        self.mse == 0.0
    }
}

impl fmt::Display for QualityReport {
    /// Flat `key=value` record, one field per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mse={:.6}", self.mse)?;
        if self.is_identical() {
            writeln!(f, "psnr=identical")?;
        } else {
            writeln!(f, "psnr={:.6}", self.psnr)?;
        }
        writeln!(f, "ssim={:.6}", self.ssim)?;
        writeln!(f, "peak={}", self.peak)
    }
}

//! Conversion between Cartesian rasters and polar sector matrices.

use crate::error::{Error, Result};
use crate::geometry::{MeasureKind, PolarGrid, SectorIndex};
use crate::matrix::Matrix;

/// Background gray level written outside the disk by [`polar_to_cartesian`].
pub const WHITE: f64 = 255.0;

/// Grayscale raster, nominally in `[0, 255]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianImage {
    pixels: Matrix,
}

impl CartesianImage {
    pub fn from_matrix(pixels: Matrix) -> Self {
        Self { pixels }
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Self::from_matrix(Matrix::filled(rows, cols, value))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> f64) -> Self {
        Self::from_matrix(Matrix::from_fn(rows, cols, f))
    }

    pub fn rows(&self) -> usize {
        self.pixels.rows()
    }

    pub fn cols(&self) -> usize {
        self.pixels.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.pixels[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.pixels[(i, j)] = value;
    }

    pub fn pixels(&self) -> &Matrix {
        &self.pixels
    }

    pub fn into_matrix(self) -> Matrix {
        self.pixels
    }

    /// Disk radius used for polar conversion, `floor(min(rows, cols) / 2)`.
    pub fn disk_radius(&self) -> f64 {
        disk_radius(self.rows(), self.cols())
    }

    pub fn clamped(&self) -> Self {
        Self::from_matrix(self.pixels.map(|v| v.clamp(0.0, 255.0)))
    }
}

pub fn disk_radius(rows: usize, cols: usize) -> f64 {
    (rows.min(cols) / 2) as f64
}

/// Offsets of pixel `(i, j)` from the centre `(floor(rows/2), floor(cols/2))`.
pub fn recenter(i: usize, j: usize, rows: usize, cols: usize) -> (i64, i64) {
    (i as i64 - (rows / 2) as i64, j as i64 - (cols / 2) as i64)
}

/// Sector intensities on a polar grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarImage {
    grid: PolarGrid,
    values: Matrix,
}

impl PolarImage {
    pub fn new(grid: PolarGrid, values: Matrix) -> Result<Self> {
        if values.shape() != (grid.n1(), grid.n2()) {
            return Err(Error::DimensionMismatch(
                values.rows(),
                values.cols(),
                grid.n1(),
                grid.n2(),
            ));
        }
        values.check_finite()?;
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn get(&self, s: SectorIndex) -> f64 {
        self.values[(s.k, s.q)]
    }

    pub fn into_values(self) -> Matrix {
        self.values
    }
}

/// Bookkeeping from one Cartesian to polar conversion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConversionStats {
    /// Pixels that fell inside the disk and were averaged into a sector.
    pub assigned: usize,
    /// Pixels at or beyond `r_max`.
    pub outside: usize,
    /// Sectors that received no pixel and were interpolated.
    pub empty_sectors: usize,
    /// Pixel count per sector, `n1 x n2` row-major.
    pub counts: Vec<usize>,
}

/// Averages the image over the sectors of an `n1 x n2` grid centred on the
/// image with `r_max = floor(min(rows, cols) / 2)`.
pub fn cartesian_to_polar(
    img: &CartesianImage,
    n1: usize,
    n2: usize,
    measure: MeasureKind,
) -> Result<PolarImage> {
    cartesian_to_polar_with_stats(img, n1, n2, measure).map(|(p, _)| p)
}

pub fn cartesian_to_polar_with_stats(
    img: &CartesianImage,
    n1: usize,
    n2: usize,
    measure: MeasureKind,
) -> Result<(PolarImage, ConversionStats)> {
    let (rows, cols) = (img.rows(), img.cols());
    if rows < 2 || cols < 2 {
        return Err(Error::ImageTooSmall(rows, cols, 2));
    }
    img.pixels.check_finite()?;
    let grid = PolarGrid::new(n1, n2, disk_radius(rows, cols), measure)?;

    // Sums are kept relative to the first pixel seen in each sector so that a
    // sector of identical pixels averages back to exactly that value.
    let mut reference = vec![0.0; n1 * n2];
    let mut shifted_sum = vec![0.0; n1 * n2];
    let mut counts = vec![0usize; n1 * n2];
    let mut outside = 0;
    for i in 0..rows {
        for j in 0..cols {
            let (dy, dx) = recenter(i, j, rows, cols);
            let Some(s) = grid.locate_offset(dy, dx) else {
                outside += 1;
                continue;
            };
            let idx = s.k * n2 + s.q;
            let v = img.get(i, j);
            if counts[idx] == 0 {
                reference[idx] = v;
            } else {
                shifted_sum[idx] += v - reference[idx];
            }
            counts[idx] += 1;
        }
    }

    let mut empty_sectors = 0;
    let values = Matrix::from_fn(n1, n2, |k, q| {
        let idx = k * n2 + q;
        match counts[idx] {
            0 => {
                empty_sectors += 1;
                interpolate_empty(img, &grid, SectorIndex { k, q })
            }
            d => reference[idx] + shifted_sum[idx] / d as f64,
        }
    });
    let stats = ConversionStats {
        assigned: counts.iter().sum(),
        outside,
        empty_sectors,
        counts,
    };
    Ok((PolarImage { grid, values }, stats))
}

/// Mean of the (up to) four lattice pixels surrounding the sector centroid.
fn interpolate_empty(img: &CartesianImage, grid: &PolarGrid, s: SectorIndex) -> f64 {
    let (r, theta) = grid.sector_centroid(s);
    let y = (img.rows() / 2) as f64 + r * theta.sin();
    let x = (img.cols() / 2) as f64 + r * theta.cos();
    let (y0, x0) = (y.floor() as i64, x.floor() as i64);
    let mut sum = 0.0;
    let mut n = 0usize;
    for yy in [y0, y0 + 1] {
        for xx in [x0, x0 + 1] {
            if (0..img.rows() as i64).contains(&yy) && (0..img.cols() as i64).contains(&xx) {
                sum += img.get(yy as usize, xx as usize);
                n += 1;
            }
        }
    }
    // The centroid lies strictly inside the disk, which lies inside the
    // raster, so at least one neighbour is always in bounds.
    debug_assert!(n > 0);
    sum / n.max(1) as f64
}

/// Paints each in-disk pixel with its sector's value; everything else gets
/// `background`.
pub fn render_polar(
    pimg: &PolarImage,
    rows: usize,
    cols: usize,
    background: f64,
) -> Result<CartesianImage> {
    let raster = disk_radius(rows, cols);
    if raster != pimg.grid.r_max() {
        return Err(Error::RmaxMismatch {
            grid: pimg.grid.r_max(),
            raster,
        });
    }
    Ok(CartesianImage::from_fn(rows, cols, |i, j| {
        let (dy, dx) = recenter(i, j, rows, cols);
        match pimg.grid.locate_offset(dy, dx) {
            Some(s) => pimg.get(s),
            None => background,
        }
    }))
}

/// Cartesian reconstruction on a white background. The raster must imply the
/// same `r_max` as the polar image's grid.
pub fn polar_to_cartesian(pimg: &PolarImage, rows: usize, cols: usize) -> Result<CartesianImage> {
    render_polar(pimg, rows, cols, WHITE)
}

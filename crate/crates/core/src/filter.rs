//! Banding-noise removal in the polar sequency domain.
//!
//! Circular bands vary only with the ring index, so their 2D sequency
//! spectrum lives in column 0; azimuthal bands live in row 0. Zeroing those
//! coefficients (except DC) and transforming back removes the bands, leaving
//! their mean as a constant offset.

use crate::convert::{cartesian_to_polar, polar_to_cartesian, CartesianImage, PolarImage};
use crate::error::Result;
use crate::geometry::MeasureKind;
use crate::matrix::Matrix;
use crate::transform::{wht2d, HybridConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterRequest {
    pub n1: usize,
    pub n2: usize,
    pub measure: MeasureKind,
    /// Remove circular bands (column 0 below DC).
    pub cflag: bool,
    /// Remove azimuthal bands (row 0 right of DC).
    pub aflag: bool,
    pub hybrid: HybridConfig,
}

impl Default for FilterRequest {
    fn default() -> Self {
        Self {
            n1: 256,
            n2: 512,
            measure: MeasureKind::UniformArea,
            cflag: false,
            aflag: false,
            hybrid: HybridConfig::default(),
        }
    }
}

/// Zeroes column 0 (rows >= 1) when `cflag`, row 0 (columns >= 1) when
/// `aflag`. The DC entry is always kept.
pub fn suppress_spectrum(spectrum: &Matrix, cflag: bool, aflag: bool) -> Matrix {
    let mut out = spectrum.clone();
    if cflag {
        for i in 1..out.rows() {
            out[(i, 0)] = 0.0;
        }
    }
    if aflag {
        for j in 1..out.cols() {
            out[(0, j)] = 0.0;
        }
    }
    out
}

/// Transform, suppress, transform back, all on a polar matrix.
pub fn filter_polar(
    values: &Matrix,
    cflag: bool,
    aflag: bool,
    cfg: &HybridConfig,
) -> Result<Matrix> {
    let spectrum = wht2d(values, cfg)?;
    let kept = suppress_spectrum(&spectrum, cflag, aflag);
    // The sequency transform is symmetric and orthogonal, hence its own inverse.
    wht2d(&kept, cfg)
}

/// Full pipeline: polar conversion, spectral suppression, reconstruction on
/// the original raster. Output pixels are clamped to `[0, 255]`.
pub fn remove_banding(img: &CartesianImage, req: &FilterRequest) -> Result<CartesianImage> {
    let polar = cartesian_to_polar(img, req.n1, req.n2, req.measure)?;
    let filtered = filter_polar(polar.values(), req.cflag, req.aflag, &req.hybrid)?;
    let filtered = PolarImage::new(*polar.grid(), filtered)?;
    Ok(polar_to_cartesian(&filtered, img.rows(), img.cols())?.clamped())
}

/// Spectrum of the polar representation with energy fractions.
///
/// `column0_fraction` and `row0_fraction` are shares of the non-DC energy;
/// `dc_fraction` is the DC share of the total energy. All are 0 when the
/// corresponding denominator is 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub spectrum: Matrix,
    pub total_energy: f64,
    pub dc_fraction: f64,
    pub column0_fraction: f64,
    pub row0_fraction: f64,
}

impl SpectrumReport {
    pub fn from_spectrum(spectrum: Matrix) -> Self {
        let sq = |v: f64| v * v;
        let total: f64 = spectrum.as_slice().iter().map(|&v| sq(v)).sum();
        let dc = sq(spectrum[(0, 0)]);
        let col0: f64 = (1..spectrum.rows()).map(|i| sq(spectrum[(i, 0)])).sum();
        let row0: f64 = (1..spectrum.cols()).map(|j| sq(spectrum[(0, j)])).sum();
        let ac = total - dc;
        let frac = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
        Self {
            dc_fraction: frac(dc, total),
            column0_fraction: frac(col0, ac),
            row0_fraction: frac(row0, ac),
            total_energy: total,
            spectrum,
        }
    }

    /// `key=value` lines.
    pub fn summary(&self) -> String {
        format!(
            "rows={}\ncols={}\ntotal_energy={}\ndc_fraction={}\ncolumn0_fraction={}\nrow0_fraction={}\n",
            self.spectrum.rows(),
            self.spectrum.cols(),
            self.total_energy,
            self.dc_fraction,
            self.column0_fraction,
            self.row0_fraction,
        )
    }
}

pub fn spectrum_report(img: &CartesianImage, req: &FilterRequest) -> Result<SpectrumReport> {
    let polar = cartesian_to_polar(img, req.n1, req.n2, req.measure)?;
    Ok(SpectrumReport::from_spectrum(wht2d(
        polar.values(),
        &req.hybrid,
    )?))
}

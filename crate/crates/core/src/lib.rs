//! Polar Walsh-Hadamard image processing.
//!
//! The crate is organised bottom-up:
//!
//! - [`transform`]: 1D/2D Walsh-Hadamard transforms in natural and sequency
//!   order, plus the hybrid classical-quantum variant driven by a simulated
//!   measurement backend.
//! - [`geometry`]: polar grids (ring radii, sector angles, sector lookup) and
//!   polar Walsh basis functions.
//! - [`convert`]: Cartesian to polar sector averaging and back.
//! - [`noise`]: circular/azimuthal banding patterns, Bessel J1 and the Airy
//!   pattern.
//! - [`filter`]: the banding-noise removal pipeline.
//! - [`metrics`]: MSE, PSNR and SSIM.
//! - [`imgio`]: PGM and the `PWP1` polar matrix format.

pub mod convert;
pub mod error;
pub mod filter;
pub mod geometry;
pub mod imgio;
pub mod matrix;
pub mod metrics;
pub mod noise;
pub mod transform;

pub use convert::{cartesian_to_polar, polar_to_cartesian, CartesianImage, PolarImage};
pub use error::{Error, Result};
pub use filter::{remove_banding, FilterRequest};
pub use geometry::{MeasureKind, PolarGrid, SectorIndex};
pub use matrix::Matrix;
pub use transform::{HybridConfig, MeasurementModel, TransformOrder};

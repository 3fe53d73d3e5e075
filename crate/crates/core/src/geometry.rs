//! Polar grids and polar Walsh basis functions.
//!
//! A grid splits the open disk of radius `r_max` into `n1` rings and `n2`
//! angular sectors. Sector `(k, q)` covers `r_{k-1} <= r < r_k` and
//! `theta_{q-1} <= theta < theta_q` with `r_{-1} = theta_{-1} = 0`.
//!
//! Angles follow one convention everywhere: `theta = atan2(y, x)` shifted
//! into `[0, 2pi)`, where `x` is the column offset and `y` the row offset
//! from the image centre.

use std::f64::consts::{PI, TAU};

use crate::convert::CartesianImage;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::transform::{log2_exact, sequency_to_natural_index, TransformOrder};

/// Gray level for a `+1` basis value in rendered figures.
pub const BASIS_POSITIVE_LEVEL: f64 = 0.0;
/// Gray level for a `-1` basis value and for the background.
pub const BASIS_NEGATIVE_LEVEL: f64 = 255.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeasureKind {
    /// Equal-area rings, `f = 1/2`.
    #[default]
    UniformArea,
    /// Equally spaced rings, `f = 1`.
    UniformRadial,
}

impl MeasureKind {
    pub fn exponent(self) -> f64 {
        match self {
            Self::UniformArea => 0.5,
            Self::UniformRadial => 1.0,
        }
    }

    /// `(numerator, denominator)` of the exponent.
    pub fn ratio(self) -> (u32, u32) {
        match self {
            Self::UniformArea => (1, 2),
            Self::UniformRadial => (1, 1),
        }
    }

    pub fn from_ratio(num: u32, den: u32) -> Option<Self> {
        match (num, den) {
            (1, 2) => Some(Self::UniformArea),
            (1, 1) => Some(Self::UniformRadial),
            _ => None,
        }
    }

    /// Maps a normalized radius `r / r_max` to the fraction of rings it
    /// passes, `(r / r_max)^(1/f)`.
    fn ring_fraction(self, rho: f64) -> f64 {
        match self {
            Self::UniformArea => rho * rho,
            Self::UniformRadial => rho,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SectorIndex {
    pub k: usize,
    pub q: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarGrid {
    n1: usize,
    n2: usize,
    r_max: f64,
    measure: MeasureKind,
}

impl PolarGrid {
    pub fn new(n1: usize, n2: usize, r_max: f64, measure: MeasureKind) -> Result<Self> {
        if log2_exact(n1).is_err() {
            return Err(Error::InvalidGrid(format!(
                "ring count {n1} is not a power of two >= 2"
            )));
        }
        if log2_exact(n2).is_err() {
            return Err(Error::InvalidGrid(format!(
                "sector count {n2} is not a power of two >= 2"
            )));
        }
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "r_max {r_max} must be positive"
            )));
        }
        Ok(Self {
            n1,
            n2,
            r_max,
            measure,
        })
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn measure(&self) -> MeasureKind {
        self.measure
    }

    pub fn with_r_max(&self, r_max: f64) -> Result<Self> {
        Self::new(self.n1, self.n2, r_max, self.measure)
    }

    /// Outer radius of ring `k`: `((1 + k) / n1)^f * r_max`.
    pub fn ring_radius(&self, k: usize) -> Result<f64> {
        if k >= self.n1 {
            return Err(Error::IndexOutOfRange {
                what: "ring",
                index: k,
                bound: self.n1,
            });
        }
        Ok(self.ring_radius_unchecked(k))
    }

    fn ring_radius_unchecked(&self, k: usize) -> f64 {
        if k + 1 == self.n1 {
            return self.r_max;
        }
        let frac = (1 + k) as f64 / self.n1 as f64;
        match self.measure {
            MeasureKind::UniformArea => frac.sqrt() * self.r_max,
            MeasureKind::UniformRadial => frac * self.r_max,
        }
    }

    /// Upper angle of sector `q`: `2pi (1 + q) / n2`.
    pub fn sector_angle(&self, q: usize) -> Result<f64> {
        if q >= self.n2 {
            return Err(Error::IndexOutOfRange {
                what: "sector",
                index: q,
                bound: self.n2,
            });
        }
        Ok(TAU * (1 + q) as f64 / self.n2 as f64)
    }

    /// Sector containing the polar point, or `None` outside the open disk.
    pub fn locate_sector(&self, r: f64, theta: f64) -> Result<Option<SectorIndex>> {
        if r.is_nan() || r < 0.0 {
            return Err(Error::NegativeRadius(r));
        }
        if !(0.0..TAU).contains(&theta) {
            return Err(Error::AngleOutOfRange(theta));
        }
        let t = self.measure.ring_fraction(r / self.r_max);
        Ok(self.index_from_fractions(t, theta / TAU))
    }

    /// Sector containing the lattice point at row offset `dy` and column
    /// offset `dx` from the centre.
    ///
    /// Works from the exact integer `r^2`, so lattice points lying exactly on
    /// a ring boundary are classified without rounding drift.
    pub fn locate_offset(&self, dy: i64, dx: i64) -> Option<SectorIndex> {
        let r2 = (dy * dy + dx * dx) as f64;
        let t = match self.measure {
            MeasureKind::UniformArea => r2 / (self.r_max * self.r_max),
            MeasureKind::UniformRadial => r2.sqrt() / self.r_max,
        };
        self.index_from_fractions(t, lattice_angle(dy, dx) / TAU)
    }

    fn index_from_fractions(&self, ring_frac: f64, turn_frac: f64) -> Option<SectorIndex> {
        let k = (ring_frac * self.n1 as f64).floor();
        if k >= self.n1 as f64 {
            return None;
        }
        let q = ((turn_frac * self.n2 as f64).floor() as usize).min(self.n2 - 1);
        Some(SectorIndex { k: k as usize, q })
    }

    /// Mid-ring radius and mid-sector angle of `s`.
    pub fn sector_centroid(&self, s: SectorIndex) -> (f64, f64) {
        let f = self.measure.exponent();
        let inner = (s.k as f64 / self.n1 as f64).powf(f);
        let outer = ((1 + s.k) as f64 / self.n1 as f64).powf(f);
        let r = 0.5 * self.r_max * (inner + outer);
        let theta = PI * (1 + 2 * s.q) as f64 / self.n2 as f64;
        (r, theta)
    }

    /// Sign of basis function `(j, p)` on sector `(k, q)`.
    pub fn sector_sign(&self, j: usize, p: usize, s: SectorIndex, order: TransformOrder) -> i8 {
        let ones = match order {
            TransformOrder::Natural => (j & s.k).count_ones() + (p & s.q).count_ones(),
            TransformOrder::Sequency => {
                let n1 = self.n1.trailing_zeros();
                let n2 = self.n2.trailing_zeros();
                (j & sequency_to_natural_index(s.k, n1)).count_ones()
                    + (p & sequency_to_natural_index(s.q, n2)).count_ones()
            }
        };
        if ones % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Polar Walsh basis function `W_{j,p}(r, theta)`.
    pub fn basis_value(
        &self,
        j: usize,
        p: usize,
        r: f64,
        theta: f64,
        order: TransformOrder,
    ) -> Result<i8> {
        self.check_basis_indices(j, p)?;
        let s = self.locate_sector(r, theta)?.ok_or(Error::OutsideDisk(r))?;
        Ok(self.sector_sign(j, p, s, order))
    }

    /// The basis function sampled once per sector, as an `n1 x n2` matrix.
    pub fn basis_matrix(&self, j: usize, p: usize, order: TransformOrder) -> Result<Matrix> {
        self.check_basis_indices(j, p)?;
        Ok(Matrix::from_fn(self.n1, self.n2, |k, q| {
            f64::from(self.sector_sign(j, p, SectorIndex { k, q }, order))
        }))
    }

    fn check_basis_indices(&self, j: usize, p: usize) -> Result<()> {
        if j >= self.n1 {
            return Err(Error::IndexOutOfRange {
                what: "radial basis",
                index: j,
                bound: self.n1,
            });
        }
        if p >= self.n2 {
            return Err(Error::IndexOutOfRange {
                what: "angular basis",
                index: p,
                bound: self.n2,
            });
        }
        Ok(())
    }
}

/// `atan2(dy, dx)` in `[0, 2pi)`.
pub(crate) fn lattice_angle(dy: i64, dx: i64) -> f64 {
    let theta = (dy as f64).atan2(dx as f64);
    if theta < 0.0 {
        let shifted = theta + TAU;
        if shifted >= TAU {
            0.0
        } else {
            shifted
        }
    } else {
        theta
    }
}

/// Renders basis function `(j, p)` on a `size x size` raster whose disk has
/// radius `floor(size / 2)`; the grid's own `r_max` is replaced by that
/// radius. `+1` sectors are painted [`BASIS_POSITIVE_LEVEL`], `-1` sectors and
/// everything outside the disk [`BASIS_NEGATIVE_LEVEL`].
pub fn render_basis(
    grid: &PolarGrid,
    j: usize,
    p: usize,
    order: TransformOrder,
    size: usize,
) -> Result<CartesianImage> {
    if size < 2 {
        return Err(Error::ImageTooSmall(size, size, 2));
    }
    grid.check_basis_indices(j, p)?;
    let half = size / 2;
    let raster = grid.with_r_max(half as f64)?;
    let pixels = Matrix::from_fn(size, size, |i, c| {
        let dy = i as i64 - half as i64;
        let dx = c as i64 - half as i64;
        match raster.locate_offset(dy, dx) {
            Some(s) if raster.sector_sign(j, p, s, order) > 0 => BASIS_POSITIVE_LEVEL,
            _ => BASIS_NEGATIVE_LEVEL,
        }
    });
    Ok(CartesianImage::from_matrix(pixels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid(n1: usize, n2: usize, r_max: f64, m: MeasureKind) -> PolarGrid {
        PolarGrid::new(n1, n2, r_max, m).unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(PolarGrid::new(3, 4, 1.0, MeasureKind::UniformArea).is_err());
        assert!(PolarGrid::new(4, 1, 1.0, MeasureKind::UniformArea).is_err());
        assert!(PolarGrid::new(4, 4, 0.0, MeasureKind::UniformArea).is_err());
    }

    #[test]
    fn ring_radii() {
        let g = grid(4, 4, 1.0, MeasureKind::UniformRadial);
        let r: Vec<f64> = (0..4).map(|k| g.ring_radius(k).unwrap()).collect();
        assert_eq!(r, vec![0.25, 0.5, 0.75, 1.0]);

        let g = grid(4, 4, 1.0, MeasureKind::UniformArea);
        for (k, expect) in [0.25f64, 0.5, 0.75, 1.0].into_iter().enumerate() {
            assert_abs_diff_eq!(g.ring_radius(k).unwrap(), expect.sqrt(), epsilon = 1e-15);
        }
        assert!(g.ring_radius(4).is_err());
        assert_eq!(
            grid(16, 4, 37.5, MeasureKind::UniformArea)
                .ring_radius(15)
                .unwrap(),
            37.5
        );
    }

    #[test]
    fn equal_ring_areas() {
        let g = grid(64, 4, 123.4, MeasureKind::UniformArea);
        let mut prev = 0.0;
        let target = PI * 123.4 * 123.4 / 64.0;
        for k in 0..64 {
            let r = g.ring_radius(k).unwrap();
            assert!(r > prev);
            let area = PI * (r * r - prev * prev);
            assert!(((area - target) / target).abs() < 1e-9);
            prev = r;
        }
    }

    #[test]
    fn sector_angles() {
        let g = grid(2, 4, 1.0, MeasureKind::UniformRadial);
        assert_abs_diff_eq!(g.sector_angle(3).unwrap(), TAU);
        assert_abs_diff_eq!(g.sector_angle(0).unwrap(), PI / 2.0);
        assert!(g.sector_angle(4).is_err());
        let g = grid(2, 512, 1.0, MeasureKind::UniformRadial);
        assert_abs_diff_eq!(g.sector_angle(255).unwrap(), PI, epsilon = 1e-15);
    }

    #[test]
    fn locate_examples() {
        let g = grid(2, 2, 1.0, MeasureKind::UniformRadial);
        assert_eq!(
            g.locate_sector(0.4, 0.1).unwrap(),
            Some(SectorIndex { k: 0, q: 0 })
        );
        assert_eq!(g.locate_sector(1.0, 2.0).unwrap(), None);
        let g = grid(2, 2, 1.0, MeasureKind::UniformArea);
        assert_eq!(
            g.locate_sector(0.8, 4.0).unwrap(),
            Some(SectorIndex { k: 1, q: 1 })
        );
        assert!(matches!(
            g.locate_sector(-0.1, 0.0),
            Err(Error::NegativeRadius(_))
        ));
        assert!(matches!(
            g.locate_sector(0.1, TAU),
            Err(Error::AngleOutOfRange(_))
        ));
        assert!(g.locate_sector(0.1, -0.01).is_err());
    }

    #[test]
    fn locate_just_inside_boundaries() {
        for m in [MeasureKind::UniformArea, MeasureKind::UniformRadial] {
            let g = grid(8, 16, 10.0, m);
            for k in 0..8 {
                for q in 0..16 {
                    let r = g.ring_radius(k).unwrap() - 1e-9;
                    let t = g.sector_angle(q).unwrap() - 1e-9;
                    assert_eq!(g.locate_sector(r, t).unwrap(), Some(SectorIndex { k, q }));
                }
            }
        }
    }

    #[test]
    fn located_points_lie_in_their_sector() {
        let g = grid(8, 8, 5.0, MeasureKind::UniformArea);
        for step in 0..500 {
            let r = 4.999 * step as f64 / 500.0;
            let theta = (step as f64 * 0.7) % TAU;
            let s = g.locate_sector(r, theta).unwrap().unwrap();
            let lo = if s.k == 0 {
                0.0
            } else {
                g.ring_radius(s.k - 1).unwrap()
            };
            assert!(lo <= r + 1e-12 && r < g.ring_radius(s.k).unwrap());
            let a_lo = if s.q == 0 {
                0.0
            } else {
                g.sector_angle(s.q - 1).unwrap()
            };
            assert!(a_lo <= theta + 1e-12 && theta < g.sector_angle(s.q).unwrap());
        }
    }

    #[test]
    fn centroids() {
        let g = grid(2, 2, 1.0, MeasureKind::UniformRadial);
        let (r, t) = g.sector_centroid(SectorIndex { k: 0, q: 0 });
        assert_abs_diff_eq!(r, 0.25);
        assert_abs_diff_eq!(t, PI / 2.0);
        let g = grid(4, 4, 1.0, MeasureKind::UniformArea);
        let (r, t) = g.sector_centroid(SectorIndex { k: 3, q: 0 });
        assert_abs_diff_eq!(r, 0.93301, epsilon = 1e-5);
        assert_abs_diff_eq!(t, PI / 4.0);
        let g = grid(2, 1 << 20, 1.0, MeasureKind::UniformArea);
        let (_, t) = g.sector_centroid(SectorIndex { k: 0, q: 0 });
        assert!(t > 0.0 && t < 1e-5);
    }

    #[test]
    fn basis_examples() {
        let g = grid(2, 2, 1.0, MeasureKind::UniformRadial);
        assert_eq!(
            g.basis_value(0, 0, 0.3, 5.0, TransformOrder::Natural)
                .unwrap(),
            1
        );
        // S(1, 0): r in [0.5, 1), theta in [0, pi)
        assert_eq!(
            g.basis_value(1, 0, 0.7, 1.0, TransformOrder::Natural)
                .unwrap(),
            -1
        );
        let g = grid(4, 4, 1.0, MeasureKind::UniformArea);
        assert_eq!(
            g.basis_value(1, 1, 0.1, 0.1, TransformOrder::Sequency)
                .unwrap(),
            1
        );
        assert!(matches!(
            g.basis_value(0, 0, 1.0, 0.0, TransformOrder::Natural),
            Err(Error::OutsideDisk(_))
        ));
        assert!(g
            .basis_value(4, 0, 0.1, 0.0, TransformOrder::Natural)
            .is_err());
    }

    #[test]
    fn sector_sampled_basis_is_orthogonal() {
        for order in [TransformOrder::Natural, TransformOrder::Sequency] {
            let g = grid(4, 8, 1.0, MeasureKind::UniformArea);
            let mut all = Vec::new();
            for j in 0..4 {
                for p in 0..8 {
                    all.push(g.basis_matrix(j, p, order).unwrap());
                }
            }
            for (a, ma) in all.iter().enumerate() {
                for (b, mb) in all.iter().enumerate() {
                    let dot: f64 = ma
                        .as_slice()
                        .iter()
                        .zip(mb.as_slice())
                        .map(|(x, y)| x * y)
                        .sum();
                    let expect = if a == b { 32.0 } else { 0.0 };
                    assert_eq!(dot, expect);
                }
            }
        }
    }

    #[test]
    fn sequency_basis_matches_bitwise_exponent() {
        // Exponent sum_i j_{n-1-i} (k_i xor k_{i+1}) written out bit by bit.
        let exponent = |j: usize, k: usize, n: u32| {
            let bit = |x: usize, i: u32| if i >= n { 0 } else { (x >> i) & 1 };
            (0..n)
                .map(|i| bit(j, n - 1 - i) * (bit(k, i) ^ bit(k, i + 1)))
                .sum::<usize>()
        };
        let g = grid(8, 4, 1.0, MeasureKind::UniformRadial);
        for j in 0..8 {
            for p in 0..4 {
                for k in 0..8 {
                    for q in 0..4 {
                        let e = exponent(j, k, 3) + exponent(p, q, 2);
                        let expect = if e % 2 == 0 { 1 } else { -1 };
                        let s = SectorIndex { k, q };
                        assert_eq!(g.sector_sign(j, p, s, TransformOrder::Sequency), expect);
                    }
                }
            }
        }
    }

    #[test]
    fn render_uniform_disk() {
        let g = grid(2, 2, 1.0, MeasureKind::UniformRadial);
        let img = render_basis(&g, 0, 0, TransformOrder::Natural, 32).unwrap();
        for i in 0..32 {
            for c in 0..32 {
                let (dy, dx) = (i as i64 - 16, c as i64 - 16);
                let inside = dy * dy + dx * dx < 256;
                let expect = if inside {
                    BASIS_POSITIVE_LEVEL
                } else {
                    BASIS_NEGATIVE_LEVEL
                };
                assert_eq!(img.get(i, c), expect);
            }
        }
    }

    #[test]
    fn render_half_disks() {
        let g = grid(2, 2, 1.0, MeasureKind::UniformRadial);
        let img = render_basis(&g, 0, 1, TransformOrder::Natural, 64).unwrap();
        for i in 0..64 {
            for c in 0..64 {
                let (dy, dx) = (i as i64 - 32, c as i64 - 32);
                if dy * dy + dx * dx >= 1024 {
                    assert_eq!(img.get(i, c), BASIS_NEGATIVE_LEVEL);
                    continue;
                }
                let upper = lattice_angle(dy, dx) < PI;
                let expect = if upper {
                    BASIS_POSITIVE_LEVEL
                } else {
                    BASIS_NEGATIVE_LEVEL
                };
                assert_eq!(img.get(i, c), expect, "pixel ({i}, {c})");
            }
        }
    }

    #[test]
    fn render_sequency_ring_flip() {
        let g = grid(4, 4, 1.0, MeasureKind::UniformArea);
        let img = render_basis(&g, 1, 0, TransformOrder::Sequency, 128).unwrap();
        let r1 = (2.0f64 / 4.0).sqrt() * 64.0;
        // Walk along the positive x axis: sign flips once, crossing r_1.
        for c in 64..128 {
            let r = (c - 64) as f64;
            let expect = if r < r1 {
                BASIS_POSITIVE_LEVEL
            } else {
                BASIS_NEGATIVE_LEVEL
            };
            assert_eq!(img.get(64, c), expect, "r = {r}");
        }
    }

    #[test]
    fn lattice_partition_counts() {
        let g = grid(8, 8, 20.0, MeasureKind::UniformArea);
        let mut counts = vec![0usize; 64];
        let mut inside = 0;
        for dy in -20i64..=20 {
            for dx in -20i64..=20 {
                if let Some(s) = g.locate_offset(dy, dx) {
                    counts[s.k * 8 + s.q] += 1;
                    inside += 1;
                    assert!(dy * dy + dx * dx < 400);
                } else {
                    assert!(dy * dy + dx * dx >= 400);
                }
            }
        }
        assert_eq!(counts.iter().sum::<usize>(), inside);
    }
}

//! Walsh-Hadamard transforms in natural and sequency order.
//!
//! All transforms use the orthonormal `1/sqrt(N)` scaling per dimension, so
//! every transform here is its own inverse.
//!
//! The hybrid transform reproduces the classical-quantum scheme: the first
//! input component is shifted by `b0 = eps + sum |a_k|`, which makes every
//! natural-order coefficient of the shifted vector at least `eps / sqrt(N)`.
//! Magnitudes recovered from measurement probabilities therefore carry the
//! correct sign, and the shift is undone by subtracting
//! `delta = (b0 - a0) / sqrt(N)` from every coefficient.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Tolerance on the Euclidean norm accepted by [`simulate_measurement`].
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TransformOrder {
    Natural,
    #[default]
    Sequency,
}

/// How measurement probabilities of the transformed register are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeasurementModel {
    /// Probabilities are the squared amplitudes, computed analytically.
    #[default]
    Exact,
    /// Empirical frequencies from `shots` independent draws.
    Shots { shots: u64, seed: u64 },
}

impl MeasurementModel {
    /// Returns a model whose generator is independent of the one used for any
    /// other `stream`. `Exact` is returned unchanged.
    pub fn derive(self, stream: u64) -> Self {
        match self {
            Self::Exact => Self::Exact,
            Self::Shots { shots, seed } => Self::Shots {
                shots,
                seed: splitmix64(seed ^ splitmix64(stream.wrapping_add(0x9E37_79B9_7F4A_7C15))),
            },
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridConfig {
    pub epsilon: f64,
    pub model: MeasurementModel,
}

impl Default for HybridConfig {
    fn default() -> Self {
        Self {
            epsilon: 1.0,
            model: MeasurementModel::Exact,
        }
    }
}

impl HybridConfig {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn shots(shots: u64, seed: u64) -> Self {
        Self {
            epsilon: 1.0,
            model: MeasurementModel::Shots { shots, seed },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::NonPositiveEpsilon(self.epsilon));
        }
        if let MeasurementModel::Shots { shots: 0, .. } = self.model {
            return Err(Error::ZeroShots);
        }
        Ok(())
    }
}

/// Operation counts of one hybrid transform: classical pre/post-processing
/// versus the work done by the simulated backend (state preparation is not
/// counted on either side).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HybridCost {
    pub classical_ops: usize,
    pub backend_ops: usize,
}

/// Returns `n` such that `len == 2^n`, `n >= 1`.
pub fn log2_exact(len: usize) -> Result<u32> {
    if len >= 2 && len.is_power_of_two() {
        Ok(len.trailing_zeros())
    } else {
        Err(Error::InvalidLength(len))
    }
}

fn check_signal(v: &[f64]) -> Result<u32> {
    let n = log2_exact(v.len())?;
    if let Some(idx) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite(idx));
    }
    Ok(n)
}

/// Unnormalized in-place butterfly. Length must be a power of two.
fn butterfly(data: &mut [f64]) {
    let len = data.len();
    let mut h = 1;
    while h < len {
        for block in data.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// In-place orthonormal natural-order transform.
pub fn fwht_natural_in_place(data: &mut [f64]) -> Result<()> {
    check_signal(data)?;
    butterfly(data);
    let scale = 1.0 / (data.len() as f64).sqrt();
    data.iter_mut().for_each(|x| *x *= scale);
    Ok(())
}

/// Natural (Hadamard) order transform, `v_hat[k] = N^-1/2 sum_j (-1)^(j.k) v[j]`.
pub fn fwht_natural(v: &[f64]) -> Result<Vec<f64>> {
    let mut out = v.to_vec();
    fwht_natural_in_place(&mut out)?;
    Ok(out)
}

/// Maps a sequency index to the natural-order row with the same Walsh
/// function: bit `n-1-r` of the result is `j_r xor j_{r+1}`.
///
/// This is the Gray code of `j` with its `n` bits reversed.
pub fn sequency_to_natural_index(j: usize, n: u32) -> usize {
    debug_assert!(n < usize::BITS && j >> n == 0);
    if n == 0 {
        return 0;
    }
    let gray = j ^ (j >> 1);
    gray.reverse_bits() >> (usize::BITS - n)
}

/// `perm[j]` = natural index of sequency row `j`, for length `2^n`.
pub fn sequency_permutation(n: u32) -> Vec<usize> {
    (0..1usize << n)
        .map(|j| sequency_to_natural_index(j, n))
        .collect()
}

/// Reorders a natural-order spectrum into sequency order.
fn natural_to_sequency(natural: &[f64], n: u32) -> Vec<f64> {
    (0..natural.len())
        .map(|j| natural[sequency_to_natural_index(j, n)])
        .collect()
}

/// Classical sequency-ordered transform.
pub fn wht_sequency(v: &[f64]) -> Result<Vec<f64>> {
    let n = check_signal(v)?;
    let natural = fwht_natural(v)?;
    Ok(natural_to_sequency(&natural, n))
}

/// Measurement statistics of the register after applying `H^{(x)n}` to
/// `state`. Returns one probability (or empirical frequency) per basis state.
pub fn simulate_measurement(state: &[f64], model: MeasurementModel) -> Result<Vec<f64>> {
    check_signal(state)?;
    let norm = state.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized(norm));
    }
    let amplitudes = fwht_natural(state)?;
    let exact: Vec<f64> = amplitudes.iter().map(|a| a * a).collect();
    match model {
        MeasurementModel::Exact => Ok(exact),
        MeasurementModel::Shots { shots, seed } => {
            if shots == 0 {
                return Err(Error::ZeroShots);
            }
            let counts = multinomial(shots, &exact, &mut ChaCha8Rng::seed_from_u64(seed));
            Ok(counts
                .into_iter()
                .map(|c| c as f64 / shots as f64)
                .collect())
        }
    }
}

/// Multinomial draw by sequential conditional binomials.
fn multinomial(trials: u64, probs: &[f64], rng: &mut ChaCha8Rng) -> Vec<u64> {
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = trials;
    let mut mass: f64 = probs.iter().sum();
    for (slot, &p) in counts.iter_mut().zip(probs) {
        if remaining == 0 {
            break;
        }
        let cond = if mass > 0.0 {
            (p / mass).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let draw = if cond >= 1.0 {
            remaining
        } else if cond <= 0.0 {
            0
        } else {
            Binomial::new(remaining, cond)
                .expect("conditional probability lies in (0, 1)")
                .sample(rng)
        };
        *slot = draw;
        remaining -= draw;
        mass -= p;
    }
    // Rounding in `mass` can leave a few trials unassigned; they belong to
    // the last outcome with nonzero probability.
    if remaining > 0 {
        if let Some(last) = probs.iter().rposition(|&p| p > 0.0) {
            counts[last] += remaining;
        }
    }
    counts
}

/// Hybrid classical-quantum transform, returned in sequency order.
pub fn hybrid_wht(a: &[f64], cfg: &HybridConfig) -> Result<Vec<f64>> {
    hybrid_wht_counted(a, cfg).map(|(v, _)| v)
}

/// [`hybrid_wht`] together with its operation counts.
pub fn hybrid_wht_counted(a: &[f64], cfg: &HybridConfig) -> Result<(Vec<f64>, HybridCost)> {
    let n = check_signal(a)?;
    cfg.validate()?;
    let len = a.len();

    let b0 = cfg.epsilon + a.iter().map(|x| x.abs()).sum::<f64>();
    let c = (b0 * b0 + a[1..].iter().map(|x| x * x).sum::<f64>()).sqrt();

    let mut state = Vec::with_capacity(len);
    state.push(b0 / c);
    state.extend(a[1..].iter().map(|x| x / c));

    let probs = simulate_measurement(&state, cfg.model)?;

    let delta = (b0 - a[0]) / (len as f64).sqrt();
    let u: Vec<f64> = probs.iter().map(|p| c * p.sqrt() - delta).collect();
    let cost = HybridCost {
        // b0, c, delta, u and the reordering are each one pass over the input.
        classical_ops: 5 * len,
        backend_ops: len * n as usize,
    };
    Ok((natural_to_sequency(&u, n), cost))
}

/// 2D sequency transform: [`hybrid_wht`] on every column, then every row.
///
/// With the exact measurement model this is an involution and doubles as the
/// inverse transform. Under the shot model each column and row draws from its
/// own generator derived from the configured seed.
pub fn wht2d(x: &Matrix, cfg: &HybridConfig) -> Result<Matrix> {
    let (rows, cols) = x.shape();
    log2_exact(rows)?;
    log2_exact(cols)?;
    x.check_finite()?;
    cfg.validate()?;

    let stream_cfg = |stream: u64| HybridConfig {
        epsilon: cfg.epsilon,
        model: cfg.model.derive(stream),
    };

    // Columns are transformed as rows of the transpose.
    let t = x.transpose();
    let col_out = (0..cols)
        .into_par_iter()
        .map(|j| hybrid_wht(t.row(j), &stream_cfg(j as u64)))
        .collect::<Result<Vec<_>>>()?;
    let mut mid = Matrix::zeros(rows, cols);
    for (j, col) in col_out.iter().enumerate() {
        mid.set_column(j, col);
    }

    let row_out = (0..rows)
        .into_par_iter()
        .map(|i| hybrid_wht(mid.row(i), &stream_cfg((cols + i) as u64)))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Matrix::zeros(rows, cols);
    for (i, row) in row_out.into_iter().enumerate() {
        out.row_mut(i).copy_from_slice(&row);
    }
    Ok(out)
}

/// Classical 2D transform in the requested order (no measurement model).
pub fn wht2d_classical(x: &Matrix, order: TransformOrder) -> Result<Matrix> {
    let (rows, cols) = x.shape();
    log2_exact(rows)?;
    log2_exact(cols)?;
    x.check_finite()?;
    let one = |v: &[f64]| match order {
        TransformOrder::Natural => fwht_natural(v),
        TransformOrder::Sequency => wht_sequency(v),
    };
    let t = x.transpose();
    let mut mid = Matrix::zeros(rows, cols);
    for j in 0..cols {
        mid.set_column(j, &one(t.row(j))?);
    }
    let mut out = Matrix::zeros(rows, cols);
    for i in 0..rows {
        let row = one(mid.row(i))?;
        out.row_mut(i).copy_from_slice(&row);
    }
    Ok(out)
}

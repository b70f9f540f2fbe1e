//! Level-spacing statistics: central-window selection, local unfolding,
//! P(s) histograms, the η crossover parameter and border interpolation.
//!
//! η interpolates between the Poisson spacing law `P_P(s) = exp(−s)` (η = 1)
//! and the Wigner-Dyson surmise `P_W(s) = (πs/2)exp(−πs²/4)` (η = 0),
//! integrating the difference up to their intersection `s0 = 0.4729…`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use crate::eig::SpectralResult;
use crate::error::CoreError;

/// Intersection point of the Poisson and Wigner-Dyson densities.
pub const S0: f64 = 0.4729;

/// Default fraction of the band kept on each side of the center.
pub const DEFAULT_WINDOW_FRACTION: f64 = 0.0625;

/// Default spacing-histogram layout: 40 bins on [0, 4].
pub const DEFAULT_S_MAX: f64 = 4.0;
pub const DEFAULT_BINS: usize = 40;

/// Poisson spacing density.
pub fn poisson_density(s: f64) -> f64 {
    libm::exp(-s)
}

/// Wigner-Dyson (GOE surmise) spacing density.
pub fn wigner_density(s: f64) -> f64 {
    core::f64::consts::FRAC_PI_2 * s * libm::exp(-core::f64::consts::PI * s * s / 4.0)
}

fn poisson_cdf(s: f64) -> f64 {
    1.0 - libm::exp(-s)
}

fn wigner_cdf(s: f64) -> f64 {
    1.0 - libm::exp(-core::f64::consts::PI * s * s / 4.0)
}

/// Index range of the `2·floor(fraction·dim) + 1` levels around the median
/// index.
pub fn central_window(dim: usize, fraction: f64) -> Result<RangeInclusive<usize>, CoreError> {
    if !(fraction > 0.0 && fraction <= 0.5) {
        return Err(CoreError::BadWindowFraction);
    }
    let center = (dim.saturating_sub(1)) / 2;
    let half = (fraction * dim as f64) as usize;
    if half == 0 {
        return Err(CoreError::WindowTooSmall {
            dim,
            fraction_milli: (fraction * 1000.0) as usize,
        });
    }
    let lo = center.saturating_sub(half);
    let hi = (center + half).min(dim.saturating_sub(1));
    Ok(lo..=hi)
}

/// Window spacings of one spectrum, divided by their window mean (local
/// unfolding); the returned samples have mean exactly 1.
pub fn window_spacings(result: &SpectralResult, fraction: f64) -> Result<Vec<f64>, CoreError> {
    let range = central_window(result.dim(), fraction)?;
    let (lo, hi) = (*range.start(), *range.end());
    let levels = &result.eigenvalues[lo..=hi];
    let count = levels.len() - 1;
    let total = levels[count] - levels[0];
    if total <= 0.0 {
        // Fully degenerate window: every spacing is zero; unfolding is
        // undefined, return the zero samples as-is.
        return Ok(vec![0.0; count]);
    }
    let mean = total / count as f64;
    Ok(levels.windows(2).map(|w| (w[1] - w[0]) / mean).collect())
}

/// Fixed-range histogram; samples outside [lo, hi) still count toward the
/// density normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub weights: Vec<f64>,
    pub total_weight: f64,
    pub out_of_range: f64,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Self {
        Histogram { lo, hi, weights: vec![0.0; bins.max(1)], total_weight: 0.0, out_of_range: 0.0 }
    }

    pub fn bins(&self) -> usize {
        self.weights.len()
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn add(&mut self, x: f64, w: f64) {
        self.total_weight += w;
        if x >= self.lo && x < self.hi {
            let b = (((x - self.lo) / self.bin_width()) as usize).min(self.bins() - 1);
            self.weights[b] += w;
        } else {
            self.out_of_range += w;
        }
    }

    pub fn merge(&mut self, other: &Histogram) {
        debug_assert_eq!(self.bins(), other.bins());
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            *a += b;
        }
        self.total_weight += other.total_weight;
        self.out_of_range += other.out_of_range;
    }

    /// Probability density of bin `b`.
    pub fn density(&self, b: usize) -> f64 {
        if self.total_weight == 0.0 {
            0.0
        } else {
            self.weights[b] / (self.total_weight * self.bin_width())
        }
    }

    pub fn bin_center(&self, b: usize) -> f64 {
        self.lo + (b as f64 + 0.5) * self.bin_width()
    }

    /// ∫ density over [lo, x], with the partial bin at `x` weighted by the
    /// overlap fraction.
    pub fn cumulative(&self, x: f64) -> f64 {
        if self.total_weight == 0.0 {
            return 0.0;
        }
        let mut mass = 0.0;
        let w = self.bin_width();
        for (b, weight) in self.weights.iter().enumerate() {
            let left = self.lo + b as f64 * w;
            if x <= left {
                break;
            }
            let frac = ((x - left) / w).min(1.0);
            mass += weight * frac;
        }
        mass / self.total_weight
    }
}

/// Pooled, unfolded spacing statistics.
#[derive(Debug, Clone)]
pub struct SpacingStats {
    pub window_fraction: f64,
    pub histogram: Histogram,
    pub eta: f64,
    pub sample_count: usize,
    pub realization_count: usize,
}

/// Accumulates window spacings realization by realization; the merge is a
/// pool concatenation, so the result is independent of processing order.
#[derive(Debug, Clone)]
pub struct SpacingAccumulator {
    pub window_fraction: f64,
    pub histogram: Histogram,
    pub sample_count: usize,
    pub realization_count: usize,
}

impl SpacingAccumulator {
    pub fn new(window_fraction: f64, bins: usize) -> Self {
        SpacingAccumulator {
            window_fraction,
            histogram: Histogram::new(0.0, DEFAULT_S_MAX, bins),
            sample_count: 0,
            realization_count: 0,
        }
    }

    pub fn push_samples(&mut self, spacings: &[f64]) {
        for &s in spacings {
            self.histogram.add(s, 1.0);
        }
        self.sample_count += spacings.len();
        self.realization_count += 1;
    }

    pub fn push_result(&mut self, result: &SpectralResult) -> Result<(), CoreError> {
        let s = window_spacings(result, self.window_fraction)?;
        self.push_samples(&s);
        Ok(())
    }

    pub fn merge(&mut self, other: &SpacingAccumulator) {
        self.histogram.merge(&other.histogram);
        self.sample_count += other.sample_count;
        self.realization_count += other.realization_count;
    }

    pub fn finish(self) -> Result<SpacingStats, CoreError> {
        if self.sample_count == 0 {
            return Err(CoreError::EmptyPool);
        }
        let eta = eta_parameter(&self.histogram);
        Ok(SpacingStats {
            window_fraction: self.window_fraction,
            histogram: self.histogram,
            eta,
            sample_count: self.sample_count,
            realization_count: self.realization_count,
        })
    }
}

/// Pools window spacings of several spectra and computes η.
pub fn spacing_statistics(
    results: &[SpectralResult],
    fraction: f64,
    bins: usize,
) -> Result<SpacingStats, CoreError> {
    let mut acc = SpacingAccumulator::new(fraction, bins);
    for r in results {
        acc.push_result(r)?;
    }
    acc.finish()
}

/// η = ∫₀^{s0}(P(s) − P_W(s))ds / ∫₀^{s0}(P_P(s) − P_W(s))ds.
pub fn eta_parameter(histogram: &Histogram) -> f64 {
    let numerator = histogram.cumulative(S0) - wigner_cdf(S0);
    let denominator = poisson_cdf(S0) - wigner_cdf(S0);
    numerator / denominator
}

/// 3-point moving average; endpoints are kept unsmoothed.
fn smooth3(ys: &[f64]) -> Vec<f64> {
    let mut out = ys.to_vec();
    for i in 1..ys.len().saturating_sub(1) {
        out[i] = (ys[i - 1] + ys[i] + ys[i + 1]) / 3.0;
    }
    out
}

/// First crossing of `threshold` on the lightly smoothed curve, by linear
/// interpolation between the bracketing points. Serves both the η = 0.3
/// chaos border and the S_q = 1 mixing border.
pub fn find_border(curve: &[(f64, f64)], threshold: f64) -> Result<f64, CoreError> {
    if curve.len() < 2 {
        return Err(CoreError::ThresholdNotBracketed);
    }
    let ys = smooth3(&curve.iter().map(|&(_, y)| y).collect::<Vec<_>>());
    for i in 0..curve.len() - 1 {
        let (x0, y0) = (curve[i].0, ys[i]);
        let (x1, y1) = (curve[i + 1].0, ys[i + 1]);
        if (y0 - threshold) * (y1 - threshold) <= 0.0 && y0 != y1 {
            return Ok(x0 + (threshold - y0) / (y1 - y0) * (x1 - x0));
        }
    }
    Err(CoreError::ThresholdNotBracketed)
}

/// Density of register-state energies pooled over all bands, with the
/// per-band sample standard deviation.
pub struct BandDensity {
    pub histogram: Histogram,
    /// (band k, standard deviation of its diagonal energies).
    pub band_std: Vec<(usize, f64)>,
}

pub fn band_density(per_band_energies: &[(usize, Vec<f64>)], bins: usize) -> BandDensity {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (_, es) in per_band_energies {
        for &e in es {
            lo = lo.min(e);
            hi = hi.max(e);
        }
    }
    if !(hi > lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    let span = hi - lo;
    let mut histogram = Histogram::new(lo - 0.01 * span, hi + 0.01 * span, bins);
    let mut band_std = Vec::with_capacity(per_band_energies.len());
    for (k, es) in per_band_energies {
        for &e in es {
            histogram.add(e, 1.0);
        }
        let m = es.len() as f64;
        let mean = es.iter().sum::<f64>() / m;
        let var = if es.len() > 1 {
            es.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (m - 1.0)
        } else {
            0.0
        };
        band_std.push((*k, libm::sqrt(var)));
    }
    BandDensity { histogram, band_std }
}

//! Eigenstate structure diagnostics: projection probabilities
//! `W_im = |<ψ_i|φ_m>|²`, the eigenstate entropy `S_q = −Σ_i W_im log₂ W_im`,
//! the local density of states `ρ_W(E − E_i) = Σ_m W_im δ(E − E_m)` with
//! Breit-Wigner and Gaussian width fits, and register-map matrices.

use alloc::vec::Vec;
use core::ops::RangeInclusive;

use crate::eig::SpectralResult;
use crate::error::CoreError;
use crate::spectra::Histogram;

/// Entropy of one eigenstate's register distribution, with 0·log 0 = 0.
pub fn state_entropy(result: &SpectralResult, m: usize) -> f64 {
    let dim = result.dim();
    let mut s = 0.0;
    for i in 0..dim {
        let w = result.weight(i, m);
        if w > 0.0 {
            s -= w * libm::log2(w);
        }
    }
    s
}

/// Mean `S_q` over the eigenstates in `window`.
pub fn eigenstate_entropy(
    result: &SpectralResult,
    window: RangeInclusive<usize>,
) -> Result<f64, CoreError> {
    if result.eigenvectors.is_none() {
        return Err(CoreError::MissingVectors);
    }
    let count = window.end() - window.start() + 1;
    let sum: f64 = window.map(|m| state_entropy(result, m)).sum();
    Ok(sum / count as f64)
}

/// Register-state indices ordered by unperturbed energy (the band diagonal).
pub fn energy_order(diag: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..diag.len()).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));
    order
}

/// Which line shape fits the pooled profile better.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineShape {
    BreitWigner,
    Gaussian,
}

/// Pooled local density of states with its width fits.
#[derive(Debug, Clone)]
pub struct LdosProfile {
    /// Histogram over E_m − E_i^(0).
    pub histogram: Histogram,
    /// Fitted Breit-Wigner full width Γ.
    pub gamma_bw: f64,
    /// Fitted Gaussian standard deviation.
    pub gamma_gauss: f64,
    /// Model-free full width at half maximum of the histogram.
    pub fwhm: f64,
    pub bw_residual: f64,
    pub gauss_residual: f64,
    pub preferred_fit: LineShape,
    /// Fraction of the pooled weight that fell inside the histogram range.
    pub captured_mass: f64,
    pub state_count: usize,
}

/// Accumulates W_im mass at E_m − E_i^(0) for the register states in the
/// central window of the unperturbed energy ranking.
#[derive(Debug, Clone)]
pub struct LdosAccumulator {
    pub histogram: Histogram,
    pub state_count: usize,
    /// Half-width of the fit window around the peak; `None` falls back to a
    /// window proportional to the measured FWHM.
    pub fit_half: Option<f64>,
}

impl LdosAccumulator {
    /// `range` is the half-width of the centered-energy axis.
    pub fn new(range: f64, bins: usize) -> Self {
        LdosAccumulator {
            histogram: Histogram::new(-range, range, bins),
            state_count: 0,
            fit_half: None,
        }
    }

    /// Pools one realization: `diag` are the unperturbed register energies
    /// `E_i^(0)` (the band-Hamiltonian diagonal) and `fraction` selects the
    /// central window of their ranking.
    pub fn add(
        &mut self,
        result: &SpectralResult,
        diag: &[f64],
        fraction: f64,
    ) -> Result<(), CoreError> {
        if result.eigenvectors.is_none() {
            return Err(CoreError::MissingVectors);
        }
        let order = energy_order(diag);
        let window = crate::spectra::central_window(order.len(), fraction)?;
        let dim = result.dim();
        for rank in window {
            let i = order[rank];
            let e0 = diag[i];
            for m in 0..dim {
                let w = result.weight(i, m);
                if w > 0.0 {
                    self.histogram.add(result.eigenvalues[m] - e0, w);
                }
            }
            self.state_count += 1;
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &LdosAccumulator) {
        self.histogram.merge(&other.histogram);
        self.state_count += other.state_count;
    }

    pub fn finish(self) -> Result<LdosProfile, CoreError> {
        let captured_mass = if self.histogram.total_weight > 0.0 {
            1.0 - self.histogram.out_of_range / self.histogram.total_weight
        } else {
            0.0
        };
        let (_, fwhm) = peak_and_halfwidth(&self.histogram).ok_or(CoreError::FitFailed)?;
        let (gamma_bw, bw_residual) = fit_breit_wigner(&self.histogram, self.fit_half)?;
        let (gamma_gauss, gauss_residual) = fit_gaussian(&self.histogram, self.fit_half)?;
        let preferred_fit = if gauss_residual < bw_residual {
            LineShape::Gaussian
        } else {
            LineShape::BreitWigner
        };
        Ok(LdosProfile {
            histogram: self.histogram,
            gamma_bw,
            gamma_gauss,
            fwhm,
            bw_residual,
            gauss_residual,
            preferred_fit,
            captured_mass,
            state_count: self.state_count,
        })
    }
}

/// Breit-Wigner density with full width `gamma`, centered at `peak`.
pub fn breit_wigner_density(e: f64, peak: f64, gamma: f64) -> f64 {
    let x = e - peak;
    gamma / (2.0 * core::f64::consts::PI * (x * x + gamma * gamma / 4.0))
}

fn gaussian_density(e: f64, peak: f64, sigma: f64) -> f64 {
    let x = (e - peak) / sigma;
    libm::exp(-0.5 * x * x) / (sigma * libm::sqrt(2.0 * core::f64::consts::PI))
}

fn peak_and_halfwidth(h: &Histogram) -> Option<(f64, f64)> {
    let mut peak_bin = 0;
    let mut peak_density = 0.0;
    let mut nonempty = 0;
    for b in 0..h.bins() {
        let d = h.density(b);
        if d > 0.0 {
            nonempty += 1;
        }
        if d > peak_density {
            peak_density = d;
            peak_bin = b;
        }
    }
    if nonempty < 10 || peak_density == 0.0 {
        return None;
    }
    let peak = h.bin_center(peak_bin);
    // Full width at half maximum, scanning out from the peak.
    let half = peak_density / 2.0;
    let mut right = h.hi;
    for b in peak_bin..h.bins() {
        if h.density(b) < half {
            right = h.bin_center(b);
            break;
        }
    }
    let mut left = h.lo;
    for b in (0..=peak_bin).rev() {
        if h.density(b) < half {
            left = h.bin_center(b);
            break;
        }
    }
    let fwhm = (right - left).max(h.bin_width());
    Some((peak, fwhm))
}

/// Mean squared log-density residual of `model(e, width)` against the
/// histogram bins with `|e − peak| <= fit_half`, minimized over `width` by
/// golden section. Log residuals give the core and the tails of the profile
/// equal relative weight, so the fitted width tracks the wings where the
/// line shapes actually differ. Bins below 10^−4 of the peak density are
/// excluded: they are dominated by single stray samples whose log residual
/// would otherwise swamp the fit.
///
/// With `fit_half = None` the window is `3·fwhm` of the histogram, refined
/// once on the fitted width.
fn fit_width<F: Fn(f64, f64, f64) -> f64>(
    h: &Histogram,
    model: F,
    width_of_fwhm: f64,
    fit_half: Option<f64>,
) -> Result<(f64, f64), CoreError> {
    let (peak, fwhm0) = peak_and_halfwidth(h).ok_or(CoreError::FitFailed)?;
    let floor = (0..h.bins()).map(|b| h.density(b)).fold(0.0, f64::max) * 1e-4;
    let mut width = width_of_fwhm * fwhm0;
    let mut residual = f64::INFINITY;
    let passes = if fit_half.is_some() { 1 } else { 2 };
    for _ in 0..passes {
        let half = fit_half.unwrap_or(3.0 * width / width_of_fwhm);
        let cost = |w: f64| -> f64 {
            let mut sum = 0.0;
            let mut count = 0usize;
            for b in 0..h.bins() {
                let e = h.bin_center(b);
                let d = h.density(b);
                if d > floor && libm::fabs(e - peak) <= half {
                    let r = libm::log(model(e, peak, w)) - libm::log(d);
                    sum += r * r;
                    count += 1;
                }
            }
            if count == 0 {
                f64::INFINITY
            } else {
                sum / count as f64
            }
        };
        // The cost is not unimodal (far tails form a plateau), so bracket the
        // minimum with a geometric grid scan before refining.
        let (lo, hi) = (width / 20.0, width * 20.0);
        let grid_points = 120;
        let ratio = libm::pow(hi / lo, 1.0 / grid_points as f64);
        let mut best_k = 0usize;
        let mut best_cost = f64::INFINITY;
        for k in 0..=grid_points {
            let w = lo * libm::pow(ratio, k as f64);
            let c = cost(w);
            if c < best_cost {
                best_cost = c;
                best_k = k;
            }
        }
        // Golden-section refinement between the grid neighbors.
        let inv_phi = 0.618_033_988_749_895;
        let mut a = lo * libm::pow(ratio, best_k.saturating_sub(1) as f64);
        let mut b = lo * libm::pow(ratio, (best_k + 1).min(grid_points) as f64);
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let (mut fc, mut fd) = (cost(c), cost(d));
        for _ in 0..40 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = cost(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = cost(d);
            }
        }
        width = (a + b) / 2.0;
        residual = cost(width);
    }
    if !(width > 0.0) || !residual.is_finite() {
        return Err(CoreError::FitFailed);
    }
    Ok((width, residual))
}

/// Breit-Wigner log-residual fit; returns (full width Γ, residual).
pub fn fit_breit_wigner(h: &Histogram, fit_half: Option<f64>) -> Result<(f64, f64), CoreError> {
    fit_width(h, breit_wigner_density, 1.0, fit_half)
}

/// Gaussian log-residual fit; returns (standard deviation, residual).
pub fn fit_gaussian(h: &Histogram, fit_half: Option<f64>) -> Result<(f64, f64), CoreError> {
    // FWHM of a Gaussian is 2√(2 ln 2) σ.
    fit_width(h, gaussian_density, 1.0 / 2.354_820_045_030_949_4, fit_half)
}

/// `count × count` matrix of W_im: rows are the central eigenstates, columns
/// the central register states (by unperturbed-energy rank), both ordered in
/// energy. Row-major, `map[row * count + col]`.
pub fn register_map(
    result: &SpectralResult,
    diag: &[f64],
    count: usize,
) -> Result<Vec<f64>, CoreError> {
    if result.eigenvectors.is_none() {
        return Err(CoreError::MissingVectors);
    }
    let dim = result.dim();
    let count = count.min(dim);
    let order = energy_order(diag);
    let eig_start = (dim - count) / 2;
    let reg_start = (dim - count) / 2;
    let mut map = Vec::with_capacity(count * count);
    for row in 0..count {
        let m = eig_start + row;
        for col in 0..count {
            let i = order[reg_start + col];
            map.push(result.weight(i, m));
        }
    }
    Ok(map)
}

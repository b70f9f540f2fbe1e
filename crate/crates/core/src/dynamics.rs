//! Time evolution of register states under a band Hamiltonian.
//!
//! Propagation goes through the eigenbasis: with `A_im = <ψ_i|φ_m>` and
//! `c = Aᵀ χ(0)`, the state at time `t` is `χ(t) = A · diag(e^{−iE_m t}) · c`
//! (ħ = 1). This is the quadruple-sum projection formula collapsed to an
//! O(D²) rotation per time point. The fidelity is `F(t) = |<χ(0)|χ(t)>|²`
//! and the register entropy `S(t) = −Σ_i F_{ii0}(t) log₂ F_{ii0}(t)` with
//! `F_{ii0}(t) = |χ_i(t)|²`.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::BandBasis;
use crate::eig::{eigendecompose, SpectralResult};
use crate::error::CoreError;
use crate::lattice::LatticeSpec;
use crate::model::{build_band_hamiltonian, derive_seed, draw_realization, ModelParams};

/// Default time grid: 150 uniform points on t·δ ∈ [0, 2].
pub const DEFAULT_T_MAX: f64 = 2.0;
pub const DEFAULT_T_STEPS: usize = 150;

/// Uniform grid of `steps` points from 0 to `t_max` inclusive.
pub fn time_grid(t_max: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 {
        return vec![0.0];
    }
    (0..steps).map(|i| t_max * i as f64 / (steps - 1) as f64).collect()
}

/// Spectral propagator for one initial state.
pub struct Propagator<'a> {
    result: &'a SpectralResult,
    init_re: Vec<f64>,
    init_im: Vec<f64>,
    coef_re: Vec<f64>,
    coef_im: Vec<f64>,
}

impl<'a> Propagator<'a> {
    pub fn new(result: &'a SpectralResult, initial: &[f64]) -> Result<Self, CoreError> {
        let zeros = vec![0.0; initial.len()];
        Self::new_complex(result, initial, &zeros)
    }

    /// Initial state `χ_i(0) = re[i] + i·im[i]`, which must be normalized.
    pub fn new_complex(
        result: &'a SpectralResult,
        re: &[f64],
        im: &[f64],
    ) -> Result<Self, CoreError> {
        let dim = result.dim();
        if result.eigenvectors.is_none() {
            return Err(CoreError::MissingVectors);
        }
        if re.len() != dim || im.len() != dim {
            return Err(CoreError::DimensionMismatch { expected: dim, got: re.len() });
        }
        let norm: f64 = re.iter().zip(im).map(|(a, b)| a * a + b * b).sum();
        if libm::fabs(norm - 1.0) > 1e-9 {
            return Err(CoreError::NotNormalized);
        }
        let mut coef_re = Vec::with_capacity(dim);
        let mut coef_im = Vec::with_capacity(dim);
        for m in 0..dim {
            let col = result.vector(m);
            let mut cr = 0.0;
            let mut ci = 0.0;
            for i in 0..dim {
                cr += col[i] * re[i];
                ci += col[i] * im[i];
            }
            coef_re.push(cr);
            coef_im.push(ci);
        }
        Ok(Propagator {
            result,
            init_re: re.to_vec(),
            init_im: im.to_vec(),
            coef_re,
            coef_im,
        })
    }

    /// Register-basis amplitudes of `χ(t)`, as (real, imaginary) vectors.
    pub fn state_at(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let dim = self.result.dim();
        let mut out_re = vec![0.0; dim];
        let mut out_im = vec![0.0; dim];
        for m in 0..dim {
            let phase = -self.result.eigenvalues[m] * t;
            let (sin, cos) = libm::sincos(phase);
            let wr = self.coef_re[m] * cos - self.coef_im[m] * sin;
            let wi = self.coef_re[m] * sin + self.coef_im[m] * cos;
            let col = self.result.vector(m);
            for i in 0..dim {
                out_re[i] += wr * col[i];
                out_im[i] += wi * col[i];
            }
        }
        (out_re, out_im)
    }

    /// `F(t) = |<χ(0)|χ(t)>|²`.
    pub fn fidelity_at(&self, state_re: &[f64], state_im: &[f64]) -> f64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for i in 0..state_re.len() {
            // conj(χ0) · χ(t)
            re += self.init_re[i] * state_re[i] + self.init_im[i] * state_im[i];
            im += self.init_re[i] * state_im[i] - self.init_im[i] * state_re[i];
        }
        re * re + im * im
    }
}

/// Register-distribution entropy of a propagated state.
pub fn register_entropy(state_re: &[f64], state_im: &[f64]) -> f64 {
    let mut s = 0.0;
    for (r, i) in state_re.iter().zip(state_im) {
        let w = r * r + i * i;
        if w > 0.0 {
            s -= w * libm::log2(w);
        }
    }
    s
}

/// First time with `F <= 1/2`, by linear interpolation between grid points.
pub fn extract_tau_chi(times: &[f64], fidelity: &[f64]) -> Option<f64> {
    for k in 0..fidelity.len() {
        if fidelity[k] <= 0.5 {
            if k == 0 {
                return Some(times[0]);
            }
            let (t0, f0) = (times[k - 1], fidelity[k - 1]);
            let (t1, f1) = (times[k], fidelity[k]);
            if f0 == f1 {
                return Some(t1);
            }
            return Some(t0 + (0.5 - f0) / (f1 - f0) * (t1 - t0));
        }
    }
    None
}

/// Fidelity, entropy and τ_χ along a time grid.
#[derive(Debug, Clone)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub fidelity: Vec<f64>,
    pub entropy: Vec<f64>,
    pub tau_chi: Option<f64>,
}

/// Full evolution of a (real) initial state in the register basis.
pub fn evolve_projection(
    result: &SpectralResult,
    initial: &[f64],
    times: &[f64],
) -> Result<EvolutionTrace, CoreError> {
    let prop = Propagator::new(result, initial)?;
    let mut fidelity = Vec::with_capacity(times.len());
    let mut entropy = Vec::with_capacity(times.len());
    for &t in times {
        let (re, im) = prop.state_at(t);
        fidelity.push(prop.fidelity_at(&re, &im));
        entropy.push(register_entropy(&re, &im));
    }
    let tau_chi = extract_tau_chi(times, &fidelity);
    Ok(EvolutionTrace { times: times.to_vec(), fidelity, entropy, tau_chi })
}

/// Survival probability `F_{i0i0}(t) = |Σ_m W_{i0m} e^{−iE_m t}|²` for a
/// single register initial state; O(D) per time point.
pub fn fidelity_trace(
    result: &SpectralResult,
    i0: usize,
    times: &[f64],
) -> Result<Vec<f64>, CoreError> {
    if result.eigenvectors.is_none() {
        return Err(CoreError::MissingVectors);
    }
    let dim = result.dim();
    let weights: Vec<f64> = (0..dim).map(|m| result.weight(i0, m)).collect();
    Ok(times
        .iter()
        .map(|&t| {
            let mut re = 0.0;
            let mut im = 0.0;
            for m in 0..dim {
                let (sin, cos) = libm::sincos(-result.eigenvalues[m] * t);
                re += weights[m] * cos;
                im += weights[m] * sin;
            }
            re * re + im * im
        })
        .collect())
}

/// Mean fidelity and entropy over several register initial states of one
/// spectrum, with τ_χ of the averaged fidelity.
pub fn average_decay(
    result: &SpectralResult,
    initials: &[usize],
    times: &[f64],
) -> Result<EvolutionTrace, CoreError> {
    let dim = result.dim();
    let mut fidelity = vec![0.0; times.len()];
    let mut entropy = vec![0.0; times.len()];
    for &i0 in initials {
        let mut initial = vec![0.0; dim];
        initial[i0] = 1.0;
        let prop = Propagator::new(result, &initial)?;
        for (k, &t) in times.iter().enumerate() {
            let (re, im) = prop.state_at(t);
            fidelity[k] += prop.fidelity_at(&re, &im);
            entropy[k] += register_entropy(&re, &im);
        }
    }
    let count = initials.len() as f64;
    for f in &mut fidelity {
        *f /= count;
    }
    for s in &mut entropy {
        *s /= count;
    }
    let tau_chi = extract_tau_chi(times, &fidelity);
    Ok(EvolutionTrace { times: times.to_vec(), fidelity, entropy, tau_chi })
}

/// Ensemble-averaged decay over disorder realizations and random central-band
/// initial states.
#[derive(Debug, Clone)]
pub struct AveragedTrace {
    pub times: Vec<f64>,
    pub fidelity: Vec<f64>,
    pub entropy: Vec<f64>,
    pub tau_chi: Option<f64>,
    /// Standard error of the per-realization mean fidelity, per time point.
    pub fidelity_stderr: Vec<f64>,
    pub realization_count: usize,
    pub states_per_realization: usize,
}

/// Draws `realizations` disorder realizations, diagonalizes each, averages
/// fidelity and entropy over `sample_count` random band initial states per
/// realization, and reports τ_χ of the averaged curve.
pub fn decay_ensemble(
    lattice: &LatticeSpec,
    params: &ModelParams,
    basis: &BandBasis,
    realizations: usize,
    sample_count: usize,
    times: &[f64],
    master_seed: u64,
) -> Result<AveragedTrace, CoreError> {
    let dim = basis.dim();
    let mut mean_f = vec![0.0; times.len()];
    let mut mean_s = vec![0.0; times.len()];
    let mut sum_f2 = vec![0.0; times.len()];
    for r in 0..realizations {
        let seed = derive_seed(master_seed, 0, r as u64);
        let real = draw_realization(params, seed);
        let h = build_band_hamiltonian(lattice, &real, basis)?;
        let result = eigendecompose(h.to_dense(), true)?;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(master_seed, 1, r as u64));
        let initials: Vec<usize> =
            (0..sample_count.max(1)).map(|_| rng.gen_range(0..dim)).collect();
        let trace = average_decay(&result, &initials, times)?;
        for k in 0..times.len() {
            mean_f[k] += trace.fidelity[k];
            mean_s[k] += trace.entropy[k];
            sum_f2[k] += trace.fidelity[k] * trace.fidelity[k];
        }
    }
    let nd = realizations.max(1) as f64;
    let mut stderr = vec![0.0; times.len()];
    for k in 0..times.len() {
        mean_f[k] /= nd;
        mean_s[k] /= nd;
        if realizations > 1 {
            let var = (sum_f2[k] / nd - mean_f[k] * mean_f[k]).max(0.0) * nd / (nd - 1.0);
            stderr[k] = libm::sqrt(var / nd);
        }
    }
    let tau_chi = extract_tau_chi(times, &mean_f);
    Ok(AveragedTrace {
        times: times.to_vec(),
        fidelity: mean_f,
        entropy: mean_s,
        tau_chi,
        fidelity_stderr: stderr,
        realization_count: realizations,
        states_per_realization: sample_count,
    })
}

/// Time × register matrix of `|<ψ_i|χ(t)>|²` for an initial two-state
/// superposition; columns are the `count` central register states ordered by
/// unperturbed energy, rows follow `times`. Row-major.
pub fn explosion_map(
    result: &SpectralResult,
    diag: &[f64],
    initial_pair: (usize, usize),
    times: &[f64],
    count: usize,
) -> Result<Vec<f64>, CoreError> {
    let dim = result.dim();
    let count = count.min(dim);
    let mut initial = vec![0.0; dim];
    let amp = core::f64::consts::FRAC_1_SQRT_2;
    initial[initial_pair.0] = amp;
    initial[initial_pair.1] += amp;
    let prop = Propagator::new(result, &initial)?;
    let order = crate::states::energy_order(diag);
    let start = (dim - count) / 2;
    let mut map = Vec::with_capacity(times.len() * count);
    for &t in times {
        let (re, im) = prop.state_at(t);
        for col in 0..count {
            let i = order[start + col];
            map.push(re[i] * re[i] + im[i] * im[i]);
        }
    }
    Ok(map)
}

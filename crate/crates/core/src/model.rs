//! Disorder realizations and Hamiltonian assembly.
//!
//! The full Hamiltonian is `H = Σ_i Γ_i σ^z_i + Σ_{i<j} J_ij σ^x_i σ^x_j`
//! with the second sum over lattice bonds. Restricted to one magnetization
//! band, `σ^x σ^x` keeps only its flip-flop part (the double-raise and
//! double-lower terms leave the band), so the band Hamiltonian couples
//! states differing by exactly one opposite-bit swap on a bond, with the
//! unchanged element `J_ij`.

use alloc::vec;
use alloc::vec::Vec;

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::basis::BandBasis;
use crate::eig::SymMatrix;
use crate::error::CoreError;
use crate::lattice::LatticeSpec;

/// Default cap on `n` for dense full-Hamiltonian assembly (4^n entries).
pub const FULL_HAMILTONIAN_CAP: usize = 14;

/// Model parameters. `delta0` is the average one-qubit spacing Δ0, `delta`
/// the detuning width δ, `j` the coupling scale J.
///
/// Band-only studies depend on `n` and `J/δ` alone, so they conventionally
/// use `delta0 = 0, delta = 1` (energies in units of δ), or `j = 1` when
/// `delta = 0` (units of J).
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub delta0: f64,
    pub delta: f64,
    pub j: f64,
    pub lattice: LatticeSpec,
}

impl ModelParams {
    /// Units-of-δ parameters for band studies: Δ0 = 0, δ = 1.
    pub fn band_units(j_over_delta: f64, lattice: LatticeSpec) -> Self {
        ModelParams { delta0: 0.0, delta: 1.0, j: j_over_delta, lattice }
    }

    /// The δ = 0 branch, energies in units of J.
    pub fn coupling_units(lattice: LatticeSpec) -> Self {
        ModelParams { delta0: 0.0, delta: 0.0, j: 1.0, lattice }
    }

    pub fn n(&self) -> usize {
        self.lattice.n
    }
}

/// One draw of detunings and couplings, reproducible from `(params, seed)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DisorderRealization {
    pub gammas: Vec<f64>,
    /// Aligned with `lattice.bonds`.
    pub couplings: Vec<f64>,
    pub seed: u64,
}

/// splitmix64 finalizer; used to derive per-realization seeds.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for realization `r` of stream `stream` under `master_seed`,
/// independent of execution order.
pub fn derive_seed(master_seed: u64, stream: u64, r: u64) -> u64 {
    master_seed ^ splitmix64(stream.wrapping_mul(0x1_0000_0001).wrapping_add(r))
}

/// Draws Γ_i uniform on [Δ0 − δ/2, Δ0 + δ/2] and J_ij uniform on [−J, J]
/// from a ChaCha stream keyed by `seed` (counter-based, so the draw is
/// platform-independent and bit-for-bit reproducible).
pub fn draw_realization(params: &ModelParams, seed: u64) -> DisorderRealization {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.n();
    let gammas: Vec<f64> = if params.delta == 0.0 {
        vec![params.delta0; n]
    } else {
        let u = Uniform::new_inclusive(params.delta0 - params.delta / 2.0, params.delta0 + params.delta / 2.0);
        (0..n).map(|_| u.sample(&mut rng)).collect()
    };
    let couplings: Vec<f64> = if params.j == 0.0 {
        vec![0.0; params.lattice.bonds.len()]
    } else {
        let u = Uniform::new_inclusive(-params.j, params.j);
        (0..params.lattice.bonds.len()).map(|_| u.sample(&mut rng)).collect()
    };
    DisorderRealization { gammas, couplings, seed }
}

/// Band-projected Hamiltonian in sparse symmetric form.
#[derive(Debug, Clone)]
pub struct BandHamiltonian {
    /// `diag[p] = Σ_i s_i Γ_i` with `s_i = ±1` from the bits of state `p`.
    pub diag: Vec<f64>,
    /// `(row, col, J_ij)` with `row < col`; upper triangle only.
    pub offdiag: Vec<(usize, usize, f64)>,
    pub dim: usize,
}

impl BandHamiltonian {
    pub fn to_dense(&self) -> SymMatrix {
        let mut a = SymMatrix::zeros(self.dim);
        for (p, &d) in self.diag.iter().enumerate() {
            a.set(p, p, d);
        }
        for &(p, q, v) in &self.offdiag {
            a.set_sym(p, q, v);
        }
        a
    }

    /// Frobenius norm (counting both triangles).
    pub fn norm_fro(&self) -> f64 {
        let d: f64 = self.diag.iter().map(|x| x * x).sum();
        let o: f64 = self.offdiag.iter().map(|(_, _, v)| v * v).sum();
        libm::sqrt(d + 2.0 * o)
    }
}

fn diag_energy(mask: u64, gammas: &[f64]) -> f64 {
    gammas
        .iter()
        .enumerate()
        .map(|(i, g)| if (mask >> i) & 1 == 1 { *g } else { -*g })
        .sum()
}

/// Unperturbed register energies `Σ_i s_i Γ_i` of every state in `basis`
/// (the J = 0 diagonal).
pub fn band_diagonal(real: &DisorderRealization, basis: &BandBasis) -> Vec<f64> {
    basis.states().iter().map(|&m| diag_energy(m, &real.gammas)).collect()
}

/// Assembles the band Hamiltonian of `real` on `basis`.
pub fn build_band_hamiltonian(
    lattice: &LatticeSpec,
    real: &DisorderRealization,
    basis: &BandBasis,
) -> Result<BandHamiltonian, CoreError> {
    if real.gammas.len() != basis.n {
        return Err(CoreError::DimensionMismatch { expected: basis.n, got: real.gammas.len() });
    }
    let dim = basis.dim();
    let mut diag = Vec::with_capacity(dim);
    let mut offdiag = Vec::new();
    for p in 0..dim {
        let mask = basis.state(p);
        diag.push(diag_energy(mask, &real.gammas));
        for (b, &(i, j)) in lattice.bonds.iter().enumerate() {
            let bi = (mask >> i) & 1;
            let bj = (mask >> j) & 1;
            if bi != bj {
                let flipped = mask ^ ((1u64 << i) | (1u64 << j));
                let q = basis
                    .index_of(flipped)
                    .expect("flip-flop leaves the band; enumeration is complete");
                if q > p && real.couplings[b] != 0.0 {
                    offdiag.push((p, q, real.couplings[b]));
                }
            }
        }
    }
    Ok(BandHamiltonian { diag, offdiag, dim })
}

/// Dense 2^n × 2^n Hamiltonian; `σ^x σ^x` couples masks differing in both
/// bits of a bond regardless of their values.
pub fn build_full_hamiltonian(
    lattice: &LatticeSpec,
    real: &DisorderRealization,
    cap: usize,
) -> Result<SymMatrix, CoreError> {
    let n = lattice.n;
    if n > cap {
        return Err(CoreError::FullHamiltonianCap { n, cap });
    }
    let dim = 1usize << n;
    let mut a = SymMatrix::zeros(dim);
    for mask in 0..dim as u64 {
        let p = mask as usize;
        a.set(p, p, diag_energy(mask, &real.gammas));
        for (b, &(i, j)) in lattice.bonds.iter().enumerate() {
            let flipped = mask ^ ((1u64 << i) | (1u64 << j));
            let q = flipped as usize;
            if q > p {
                a.set_sym(p, q, real.couplings[b]);
            }
        }
    }
    Ok(a)
}

/// Splits a band Hamiltonian into the two blocks of the global spin flip
/// `Π σ^x`, in the adapted basis `(|m> ± |~m>)/√2`.
///
/// When every `Γ_i` is equal (δ = 0) the flip commutes with `H`, and for
/// even `n` it maps the central band onto itself, so the spectrum is a
/// superposition of two independent blocks; spacing statistics taken on the
/// unsplit matrix would mix them and never show level repulsion. Returns
/// `None` unless the band is its own flip image and the diagonal vanishes
/// (which is exactly the δ = 0 central band: `Σ_i s_i Γ_i = (2k−n)Δ0 = 0`).
pub fn flip_sector_blocks(
    h: &BandHamiltonian,
    basis: &BandBasis,
) -> Option<(SymMatrix, SymMatrix)> {
    if basis.n % 2 != 0 || 2 * basis.k != basis.n || h.dim != basis.dim() {
        return None;
    }
    if h.diag.iter().any(|&d| d != 0.0) {
        return None;
    }
    let all = (1u64 << basis.n) - 1;
    let flip: Vec<usize> = (0..h.dim)
        .map(|p| basis.index_of(basis.state(p) ^ all).expect("flip stays in the band"))
        .collect();
    // No state is its own complement, so the band splits into dim/2 pairs.
    let reps: Vec<usize> = (0..h.dim).filter(|&p| p < flip[p]).collect();
    let d2 = reps.len();
    let dense = h.to_dense();
    let mut plus = SymMatrix::zeros(d2);
    let mut minus = SymMatrix::zeros(d2);
    // <r±|H|s±> = H[p_r, p_s] ± H[p_r, ~p_s]
    for r in 0..d2 {
        for s in r..d2 {
            let direct = dense.get(reps[r], reps[s]);
            let crossed = dense.get(reps[r], flip[reps[s]]);
            if r == s {
                plus.set(r, r, direct + crossed);
                minus.set(r, r, direct - crossed);
            } else {
                plus.set_sym(r, s, direct + crossed);
                minus.set_sym(r, s, direct - crossed);
            }
        }
    }
    Some((plus, minus))
}

/// Which width law applies to the theory Γ estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaScaling {
    /// Fermi-golden-rule regime, Γ ∝ J²n/δ.
    BreitWigner,
    /// δ = 0 (or J ≫ δ) branch, Γ ∝ J√n.
    StrongCoupling,
}

/// Closed-form estimates; all fields are pure functions of (n, Δ0, δ, J).
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryEstimates {
    /// Chaos border Cδ/n.
    pub jc_theory: f64,
    /// Mixing border 0.41 δ/n.
    pub jcs_theory: f64,
    /// LDOS width: 1.3 J²n/δ, or J√n on the strong-coupling branch.
    pub gamma_theory: f64,
    pub gamma_scaling: GammaScaling,
    /// Chaotic time scale 1.27/Γ.
    pub tau_chi_theory: f64,
    /// Multi-qubit spacing n Δ0 2^−n.
    pub delta_n: f64,
    /// Intra-band spacing n^{3/2} 2^−n δ.
    pub delta_band_n: f64,
    /// Band width √n δ.
    pub band_width: f64,
    /// Spacing between directly coupled states, δ/n.
    pub coupled_spacing: f64,
    /// Number of states directly coupled to one register state, ≈ 2n.
    pub transitions_per_state: f64,
    /// Energy interval of the direct transitions, ~δ.
    pub bandwidth_b: f64,
    /// Root-mean-square transition matrix element, ~J.
    pub u_s: f64,
    /// Density of directly coupled states, ~n/δ.
    pub rho_c: f64,
}

/// Default C in the border law `J_c = Cδ/n` (fitted value; the rough
/// estimate is C ≈ 3).
pub const DEFAULT_C: f64 = 3.3;

pub fn theory_estimates(params: &ModelParams, n: usize, c: f64) -> TheoryEstimates {
    let nf = n as f64;
    let (delta0, delta, j) = (params.delta0, params.delta, params.j);
    let (gamma, scaling) = if delta > 0.0 {
        (1.3 * j * j * nf / delta, GammaScaling::BreitWigner)
    } else {
        (j * libm::sqrt(nf), GammaScaling::StrongCoupling)
    };
    let pow2 = libm::exp2(-nf);
    TheoryEstimates {
        jc_theory: if delta > 0.0 { c * delta / nf } else { f64::INFINITY },
        jcs_theory: if delta > 0.0 { 0.41 * delta / nf } else { f64::INFINITY },
        gamma_theory: gamma,
        gamma_scaling: scaling,
        tau_chi_theory: if gamma > 0.0 { 1.27 / gamma } else { f64::INFINITY },
        delta_n: nf * delta0 * pow2,
        delta_band_n: nf * libm::sqrt(nf) * pow2 * delta,
        band_width: libm::sqrt(nf) * delta,
        coupled_spacing: delta / nf,
        transitions_per_state: 2.0 * nf,
        bandwidth_b: delta,
        u_s: j,
        rho_c: if delta > 0.0 { nf / delta } else { f64::INFINITY },
    }
}

//! Quantum-chaos diagnostics for a disordered qubit lattice.
//!
//! The model is a 2D periodic lattice of `n` qubits with random detunings
//! `Γ_i ∈ [Δ0 − δ/2, Δ0 + δ/2]` and random nearest-neighbor couplings
//! `J_ij σ^x_i σ^x_j` with `J_ij ∈ [−J, J]`. For `δ, J ≪ Δ0` the spectrum
//! splits into `n+1` magnetization bands; restricting the Hamiltonian to the
//! central band (the part with the highest density of states) keeps only the
//! flip-flop coupling terms and yields a problem that depends on `n` and
//! `J/δ` alone.
//!
//! This crate builds those band Hamiltonians, diagonalizes them and computes
//! the chaos diagnostics: nearest-neighbor spacing statistics and the η
//! crossover parameter, eigenstate entropy `S_q`, the local density of states
//! with Breit-Wigner/Gaussian width fits, and fidelity decay under time
//! evolution with the chaotic time scale `τ_χ`.
//!
//! The crate is `no_std` (with `alloc`); all IO, parallel sweeps and the CLI
//! live in the companion `sgqc` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod basis;
pub mod dynamics;
pub mod eig;
pub mod error;
pub mod lattice;
pub mod model;
pub mod spectra;
pub mod states;

pub use basis::BandBasis;
pub use dynamics::Propagator;
pub use eig::SpectralResult;
pub use error::CoreError;
pub use lattice::LatticeSpec;
pub use model::{BandHamiltonian, DisorderRealization, ModelParams, TheoryEstimates};

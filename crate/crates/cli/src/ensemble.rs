//! Parameter sweeps over (n, J/δ) grids and disorder realizations.
//!
//! Every realization is keyed by a seed derived from the master seed and its
//! grid position, so results are independent of scheduling; per-realization
//! samples are merged in realization order, making aggregated statistics
//! bit-for-bit identical for any worker count.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use sgqc_core::basis::{central_band, enumerate_band, BandBasis};
use sgqc_core::dynamics::{average_decay, extract_tau_chi, time_grid};
use sgqc_core::eig::eigendecompose;
use sgqc_core::lattice::LatticeSpec;
use sgqc_core::model::{
    band_diagonal, build_band_hamiltonian, derive_seed, draw_realization, flip_sector_blocks,
    theory_estimates, ModelParams, DEFAULT_C,
};
use sgqc_core::spectra::{
    central_window, find_border, window_spacings, BandDensity, SpacingAccumulator,
};
use sgqc_core::states::{eigenstate_entropy, LdosAccumulator, LineShape};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Which per-point outputs a sweep computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct AnalysisSet {
    pub eta: bool,
    pub sq: bool,
    pub ldos: bool,
    pub evolve: bool,
}

impl AnalysisSet {
    pub fn needs_vectors(&self) -> bool {
        self.sq || self.ldos || self.evolve
    }

    pub fn parse(list: &str) -> Result<Self> {
        let mut set = AnalysisSet::default();
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item {
                "eta" => set.eta = true,
                "sq" => set.sq = true,
                "ldos" => set.ldos = true,
                "evolve" => set.evolve = true,
                other => bail!("unknown analysis '{other}' (expected eta, sq, ldos, evolve)"),
            }
        }
        Ok(set)
    }
}

/// Default cap on the band dimension when eigenvectors are requested.
pub const DEFAULT_VECTOR_CAP: usize = 4000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub qubit_counts: Vec<usize>,
    /// J/δ values (J values when `delta_zero`).
    pub coupling_grid: Vec<f64>,
    /// Use the δ = 0 branch: energies in units of J, coupling grid fixed at 1.
    pub delta_zero: bool,
    /// Disorder realizations per grid point (N_D).
    pub realizations: usize,
    pub master_seed: u64,
    pub analyses: AnalysisSet,
    pub window_fraction: f64,
    pub bins: usize,
    pub vector_cap: usize,
    /// Random initial register states per realization for decay averaging.
    pub decay_states: usize,
    /// Fixed end of the time grid; `None` extends it from the theory Γ.
    pub tmax: Option<f64>,
    pub tsteps: usize,
}

impl SweepPlan {
    pub fn new(qubit_counts: Vec<usize>, coupling_grid: Vec<f64>, realizations: usize, master_seed: u64) -> Self {
        SweepPlan {
            qubit_counts,
            coupling_grid,
            delta_zero: false,
            realizations,
            master_seed,
            analyses: AnalysisSet { eta: true, ..AnalysisSet::default() },
            window_fraction: sgqc_core::spectra::DEFAULT_WINDOW_FRACTION,
            bins: sgqc_core::spectra::DEFAULT_BINS,
            vector_cap: DEFAULT_VECTOR_CAP,
            decay_states: 20,
            tmax: None,
            tsteps: sgqc_core::dynamics::DEFAULT_T_STEPS,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.qubit_counts.is_empty() || self.coupling_grid.is_empty() {
            bail!("empty sweep grid");
        }
        if self.realizations == 0 {
            bail!("need at least one realization");
        }
        if self.analyses.needs_vectors() {
            for &n in &self.qubit_counts {
                let dim = central_band_dim(n);
                if dim > self.vector_cap as u128 {
                    bail!(
                        "central band of n={n} has dimension {dim}, over the eigenvector cap {} \
                         (largest allowed n is {}); rerun eigenvalues-only or raise the cap",
                        self.vector_cap,
                        largest_n_under_cap(self.vector_cap),
                    );
                }
            }
        }
        Ok(())
    }
}

/// Central-band dimension C(n, floor(n/2)) without enumerating the states.
pub fn central_band_dim(n: usize) -> u128 {
    let k = n / 2;
    let mut c: u128 = 1;
    for t in 0..k {
        c = c * (n - t) as u128 / (t + 1) as u128;
    }
    c
}

/// Largest qubit count whose central band fits under `cap`.
pub fn largest_n_under_cap(cap: usize) -> usize {
    let mut best = 2;
    for n in 2..=60 {
        if central_band_dim(n) <= cap as u128 {
            best = n;
        }
    }
    best
}

/// Aggregated results of one (n, coupling) grid point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointResult {
    pub n: usize,
    pub coupling: f64,
    pub eta: Option<f64>,
    pub eta_stderr: Option<f64>,
    pub spacing_histogram: Option<(Vec<f64>, Vec<f64>)>, // (bin centers, densities)
    pub sq_mean: Option<f64>,
    pub sq_stderr: Option<f64>,
    pub gamma_bw: Option<f64>,
    pub gamma_gauss: Option<f64>,
    pub ldos_fwhm: Option<f64>,
    pub bw_residual: Option<f64>,
    pub gauss_residual: Option<f64>,
    pub preferred_fit: Option<String>,
    pub ldos_captured_mass: Option<f64>,
    pub ldos_histogram: Option<(Vec<f64>, Vec<f64>)>, // (bin centers, densities)
    pub tau_chi: Option<f64>,
    /// Largest value of the ensemble-averaged S(t).
    pub entropy_plateau: Option<f64>,
    pub sample_count: usize,
    pub realization_count: usize,
    /// Seeds of realizations whose decomposition failed (point kept, flagged).
    pub failed_seeds: Vec<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BorderResult {
    pub n: usize,
    /// Coupling with η = 0.3.
    pub jc: Option<f64>,
    /// Coupling with S_q = 1.
    pub jcs: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    pub plan: SweepPlan,
    pub points: Vec<PointResult>,
    pub borders: Vec<BorderResult>,
}

/// Per-realization samples, merged in realization order.
struct RealizationSample {
    spacings: Vec<f64>,
    sq: Option<f64>,
    ldos: Option<LdosAccumulator>,
    fidelity: Option<Vec<f64>>,
    entropy: Option<Vec<f64>>,
}

fn point_params(plan: &SweepPlan, lattice: &LatticeSpec, coupling: f64) -> ModelParams {
    if plan.delta_zero {
        ModelParams::coupling_units(lattice.clone())
    } else {
        ModelParams::band_units(coupling, lattice.clone())
    }
}

/// Time grid for decay traces: uniform on [0, 2], log-extended to cover both
/// the fidelity decay (~5/Γ_theory) and the slower entropy saturation, which
/// for the sizes treated here needs t·δ ≈ 30.
fn decay_times(plan: &SweepPlan, params: &ModelParams, n: usize) -> Vec<f64> {
    let base_max = 2.0;
    let tmax = plan.tmax.unwrap_or_else(|| {
        let gamma = theory_estimates(params, n, DEFAULT_C).gamma_theory;
        if gamma > 0.0 { (5.0 / gamma).clamp(30.0, 200.0) } else { base_max }
    });
    let mut times = time_grid(base_max.min(tmax), plan.tsteps);
    if tmax > base_max {
        let extra = 60;
        let ratio = tmax / base_max;
        for k in 1..=extra {
            times.push(base_max * ratio.powf(k as f64 / extra as f64));
        }
    }
    times
}

fn run_realization(
    plan: &SweepPlan,
    lattice: &LatticeSpec,
    basis: &BandBasis,
    params: &ModelParams,
    point_stream: u64,
    r: usize,
    times: &[f64],
) -> Result<RealizationSample, (u64, String)> {
    let seed = derive_seed(plan.master_seed, point_stream, r as u64);
    let real = draw_realization(params, seed);
    let h = build_band_hamiltonian(lattice, &real, basis).map_err(|e| (seed, e.to_string()))?;
    let diag = h.diag.clone();
    let want_vectors = plan.analyses.needs_vectors();
    let result = eigendecompose(h.to_dense(), want_vectors).map_err(|e| (seed, e.to_string()))?;

    let spacings = if plan.analyses.eta {
        // At δ = 0 with even n the global spin flip is an exact symmetry of
        // the band; spacings must come from each flip sector separately or
        // the superposed blocks wash out the level repulsion.
        match flip_sector_blocks(&h, basis).filter(|_| plan.delta_zero) {
            Some((plus, minus)) => {
                let mut s = window_spacings(
                    &eigendecompose(plus, false).map_err(|e| (seed, e.to_string()))?,
                    plan.window_fraction,
                )
                .map_err(|e| (seed, e.to_string()))?;
                s.extend(
                    window_spacings(
                        &eigendecompose(minus, false).map_err(|e| (seed, e.to_string()))?,
                        plan.window_fraction,
                    )
                    .map_err(|e| (seed, e.to_string()))?,
                );
                s
            }
            None => window_spacings(&result, plan.window_fraction)
                .map_err(|e| (seed, e.to_string()))?,
        }
    } else {
        Vec::new()
    };

    let sq = if plan.analyses.sq {
        let window = central_window(result.dim(), plan.window_fraction)
            .map_err(|e| (seed, e.to_string()))?;
        Some(eigenstate_entropy(&result, window).map_err(|e| (seed, e.to_string()))?)
    } else {
        None
    };

    let ldos = if plan.analyses.ldos {
        let mut acc = ldos_accumulator(params, basis.n);
        acc.add(&result, &diag, plan.window_fraction).map_err(|e| (seed, e.to_string()))?;
        Some(acc)
    } else {
        None
    };

    let (fidelity, entropy) = if plan.analyses.evolve {
        let mut rng =
            ChaCha8Rng::seed_from_u64(derive_seed(plan.master_seed, point_stream ^ u64::MAX, r as u64));
        let initials: Vec<usize> =
            (0..plan.decay_states.max(1)).map(|_| rng.gen_range(0..result.dim())).collect();
        let trace = average_decay(&result, &initials, times).map_err(|e| (seed, e.to_string()))?;
        (Some(trace.fidelity), Some(trace.entropy))
    } else {
        (None, None)
    };

    Ok(RealizationSample { spacings, sq, ldos, fidelity, entropy })
}

/// LDOS histogram layout: range wide enough for the theory width, bins fine
/// enough to resolve it. The fit window covers the golden-rule tails out to
/// the half-bandwidth of the direct transitions (δ/2), or 4 theory widths
/// when those are broader.
fn ldos_accumulator(params: &ModelParams, n: usize) -> LdosAccumulator {
    let gamma = theory_estimates(params, n, DEFAULT_C).gamma_theory.max(1e-3);
    let half_range = (4.0 * gamma).max(2.0);
    let bins = ((2.0 * half_range / (gamma / 8.0)).ceil() as usize).clamp(100, 2000);
    let mut acc = LdosAccumulator::new(half_range, bins);
    acc.fit_half = Some((4.0 * gamma).max(params.delta / 2.0));
    acc
}

/// Number of batches used for the spacing-statistics error bar.
const ETA_BATCHES: usize = 10;

fn run_point(plan: &SweepPlan, n_idx: usize, j_idx: usize) -> Result<PointResult> {
    let n = plan.qubit_counts[n_idx];
    let coupling = if plan.delta_zero { 1.0 } else { plan.coupling_grid[j_idx] };
    let lattice = LatticeSpec::squarest(n).map_err(|e| anyhow!("{e}"))?;
    let basis = central_band(n).map_err(|e| anyhow!("{e}"))?;
    let params = point_params(plan, &lattice, coupling);
    let point_stream = ((n_idx as u64) << 20) | (j_idx as u64 + 1);
    let times = if plan.analyses.evolve { decay_times(plan, &params, n) } else { Vec::new() };

    let samples: Vec<Result<RealizationSample, (u64, String)>> = (0..plan.realizations)
        .into_par_iter()
        .map(|r| run_realization(plan, &lattice, &basis, &params, point_stream, r, &times))
        .collect();

    let mut failed_seeds = Vec::new();
    let mut good: Vec<RealizationSample> = Vec::with_capacity(samples.len());
    for s in samples {
        match s {
            Ok(sample) => good.push(sample),
            Err((seed, msg)) => {
                eprintln!("realization seed {seed} failed: {msg}");
                failed_seeds.push(seed);
            }
        }
    }
    if good.is_empty() {
        bail!("every realization of point (n={n}, coupling={coupling}) failed");
    }

    let mut point = PointResult {
        n,
        coupling,
        eta: None,
        eta_stderr: None,
        spacing_histogram: None,
        sq_mean: None,
        sq_stderr: None,
        gamma_bw: None,
        gamma_gauss: None,
        ldos_fwhm: None,
        bw_residual: None,
        gauss_residual: None,
        preferred_fit: None,
        ldos_captured_mass: None,
        ldos_histogram: None,
        tau_chi: None,
        entropy_plateau: None,
        sample_count: 0,
        realization_count: good.len(),
        failed_seeds,
    };

    if plan.analyses.eta {
        let mut total = SpacingAccumulator::new(plan.window_fraction, plan.bins);
        let mut batches: Vec<SpacingAccumulator> = (0..ETA_BATCHES)
            .map(|_| SpacingAccumulator::new(plan.window_fraction, plan.bins))
            .collect();
        for (r, sample) in good.iter().enumerate() {
            total.push_samples(&sample.spacings);
            batches[r * ETA_BATCHES / good.len()].push_samples(&sample.spacings);
        }
        point.sample_count = total.sample_count;
        let stats = total.finish().map_err(|e| anyhow!("{e}"))?;
        point.eta = Some(stats.eta);
        let batch_etas: Vec<f64> =
            batches.into_iter().filter(|b| b.sample_count > 0).filter_map(|b| b.finish().ok().map(|s| s.eta)).collect();
        if batch_etas.len() > 1 {
            let m = batch_etas.len() as f64;
            let mean = batch_etas.iter().sum::<f64>() / m;
            let var = batch_etas.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (m - 1.0);
            point.eta_stderr = Some((var / m).sqrt());
        }
        let h = &stats.histogram;
        point.spacing_histogram = Some((
            (0..h.bins()).map(|b| h.bin_center(b)).collect(),
            (0..h.bins()).map(|b| h.density(b)).collect(),
        ));
    }

    if plan.analyses.sq {
        let sqs: Vec<f64> = good.iter().filter_map(|s| s.sq).collect();
        let m = sqs.len() as f64;
        let mean = sqs.iter().sum::<f64>() / m;
        point.sq_mean = Some(mean);
        if sqs.len() > 1 {
            let var = sqs.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (m - 1.0);
            point.sq_stderr = Some((var / m).sqrt());
        }
    }

    if plan.analyses.ldos {
        let mut merged: Option<LdosAccumulator> = None;
        for sample in &good {
            if let Some(acc) = &sample.ldos {
                match merged.as_mut() {
                    Some(m) => m.merge(acc),
                    None => merged = Some(acc.clone()),
                }
            }
        }
        if let Some(acc) = merged {
            let profile = acc.finish().map_err(|e| anyhow!("LDOS fit: {e}"))?;
            point.gamma_bw = Some(profile.gamma_bw);
            point.gamma_gauss = Some(profile.gamma_gauss);
            point.ldos_fwhm = Some(profile.fwhm);
            point.bw_residual = Some(profile.bw_residual);
            point.gauss_residual = Some(profile.gauss_residual);
            point.preferred_fit = Some(
                match profile.preferred_fit {
                    LineShape::BreitWigner => "breit-wigner",
                    LineShape::Gaussian => "gaussian",
                }
                .to_string(),
            );
            point.ldos_captured_mass = Some(profile.captured_mass);
            let h = &profile.histogram;
            point.ldos_histogram = Some((
                (0..h.bins()).map(|b| h.bin_center(b)).collect(),
                (0..h.bins()).map(|b| h.density(b)).collect(),
            ));
        }
    }

    if plan.analyses.evolve {
        let nd = good.iter().filter(|s| s.fidelity.is_some()).count() as f64;
        let mut mean_f = vec![0.0; times.len()];
        let mut mean_s = vec![0.0; times.len()];
        for sample in &good {
            if let (Some(f), Some(s)) = (&sample.fidelity, &sample.entropy) {
                for k in 0..times.len() {
                    mean_f[k] += f[k] / nd;
                    mean_s[k] += s[k] / nd;
                }
            }
        }
        point.tau_chi = extract_tau_chi(&times, &mean_f);
        point.entropy_plateau = mean_s.iter().copied().fold(f64::NAN, f64::max).into();
    }

    Ok(point)
}

fn compute_borders(plan: &SweepPlan, points: &[PointResult]) -> Vec<BorderResult> {
    plan.qubit_counts
        .iter()
        .map(|&n| {
            let eta_curve: Vec<(f64, f64)> = points
                .iter()
                .filter(|p| p.n == n)
                .filter_map(|p| p.eta.map(|e| (p.coupling, e)))
                .collect();
            let sq_curve: Vec<(f64, f64)> = points
                .iter()
                .filter(|p| p.n == n)
                .filter_map(|p| p.sq_mean.map(|s| (p.coupling, s)))
                .collect();
            BorderResult {
                n,
                jc: find_border(&eta_curve, 0.3).ok(),
                jcs: find_border(&sq_curve, 1.0).ok(),
            }
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    plan: SweepPlan,
    points: Vec<PointResult>,
}

fn load_checkpoint(path: &Path, plan: &SweepPlan) -> Vec<PointResult> {
    let Ok(text) = fs::read_to_string(path) else { return Vec::new() };
    match serde_json::from_str::<Checkpoint>(&text) {
        Ok(cp) if &cp.plan == plan => {
            eprintln!("resuming sweep: {} grid points already done", cp.points.len());
            cp.points
        }
        Ok(_) => {
            eprintln!("checkpoint at {} belongs to a different plan; ignoring", path.display());
            Vec::new()
        }
        Err(e) => {
            eprintln!("unreadable checkpoint at {}: {e}; ignoring", path.display());
            Vec::new()
        }
    }
}

fn save_checkpoint(path: &Path, plan: &SweepPlan, points: &[PointResult]) -> Result<()> {
    let cp = Checkpoint { plan: plan.clone(), points: points.to_vec() };
    let text = serde_json::to_string(&cp)?;
    fs::write(path, text).with_context(|| format!("writing checkpoint {}", path.display()))?;
    Ok(())
}

/// Executes the full grid, flushing partial results to `checkpoint` after
/// every grid point; a resumed sweep reproduces the identical remainder.
pub fn run_sweep_with_checkpoint(
    plan: &SweepPlan,
    checkpoint: Option<&Path>,
) -> Result<SweepResult> {
    plan.validate()?;
    let coupling_points = if plan.delta_zero { 1 } else { plan.coupling_grid.len() };
    let total = plan.qubit_counts.len() * coupling_points;
    let mut points = match checkpoint {
        Some(path) => load_checkpoint(path, plan),
        None => Vec::new(),
    };
    points.truncate(total);
    let mut done = points.len();
    for n_idx in 0..plan.qubit_counts.len() {
        for j_idx in 0..coupling_points {
            let flat = n_idx * coupling_points + j_idx;
            if flat < done {
                continue;
            }
            points.push(run_point(plan, n_idx, j_idx)?);
            done += 1;
            if let Some(path) = checkpoint {
                save_checkpoint(path, plan, &points)?;
            }
        }
    }
    let borders = compute_borders(plan, &points);
    Ok(SweepResult { plan: plan.clone(), points, borders })
}

pub fn run_sweep(plan: &SweepPlan) -> Result<SweepResult> {
    run_sweep_with_checkpoint(plan, None)
}

/// Mean adjacent spacing of the central-band unperturbed levels (units of δ),
/// averaged over realizations.
pub fn multi_qubit_spacing(n: usize, realizations: usize, master_seed: u64) -> Result<f64> {
    let lattice = LatticeSpec::squarest(n).map_err(|e| anyhow!("{e}"))?;
    let basis = central_band(n).map_err(|e| anyhow!("{e}"))?;
    let params = ModelParams::band_units(0.0, lattice);
    let mut sum = 0.0;
    for r in 0..realizations.max(1) {
        let real = draw_realization(&params, derive_seed(master_seed, 0, r as u64));
        let mut diag = band_diagonal(&real, &basis);
        diag.sort_unstable_by(f64::total_cmp);
        let span = diag[diag.len() - 1] - diag[0];
        sum += span / (diag.len() - 1) as f64;
    }
    Ok(sum / realizations.max(1) as f64)
}

/// Pooled density of register-state energies over all bands at J = 0
/// (Δ0 = 1, δ = `delta_ratio`), averaged over realizations.
pub fn band_density_scan(
    n: usize,
    delta_ratio: f64,
    realizations: usize,
    master_seed: u64,
    bins: usize,
) -> Result<BandDensity> {
    let lattice = LatticeSpec::squarest(n).map_err(|e| anyhow!("{e}"))?;
    let params = ModelParams { delta0: 1.0, delta: delta_ratio, j: 0.0, lattice };
    let mut per_band: Vec<(usize, Vec<f64>)> = (0..=n).map(|k| (k, Vec::new())).collect();
    for r in 0..realizations.max(1) {
        let real = draw_realization(&params, derive_seed(master_seed, 0, r as u64));
        for k in 0..=n {
            let basis = enumerate_band(n, k).map_err(|e| anyhow!("{e}"))?;
            per_band[k].1.extend(band_diagonal(&real, &basis));
        }
    }
    Ok(sgqc_core::spectra::band_density(&per_band, bins))
}

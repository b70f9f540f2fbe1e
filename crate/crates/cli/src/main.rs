use sgqc::{config, ensemble, output};

use std::path::PathBuf;

use anyhow::{anyhow, bail, Result};
use clap::Parser;
use serde::Serialize;

use config::{Cli, Command, MapKind, Resolved};
use ensemble::{AnalysisSet, SweepPlan};
use output::{base_metadata, meta, Metadata};

use sgqc_core::basis::central_band;
use sgqc_core::dynamics::{decay_ensemble, explosion_map, time_grid};
use sgqc_core::eig::eigendecompose;
use sgqc_core::lattice::build_lattice;
use sgqc_core::model::{
    build_band_hamiltonian, derive_seed, draw_realization, theory_estimates, ModelParams,
    DEFAULT_C,
};
use sgqc_core::states::{energy_order, register_map};

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Spectrum(args) => run_spectrum(args),
        Command::Pstats(args) => run_grid(args, AnalysisSet { eta: true, ..Default::default() }),
        Command::Entropy(args) => run_grid(args, AnalysisSet { sq: true, ..Default::default() }),
        Command::Ldos(args) => run_grid(args, AnalysisSet { ldos: true, ..Default::default() }),
        Command::Evolve(args) => run_evolve(args),
        Command::Map(args) => run_map(args),
        Command::Sweep(args) => run_sweep_cmd(args),
        Command::Border(args) => run_border(args),
    }
}

fn init_threads(threads: Option<usize>) {
    if let Some(t) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
}

fn unit_metadata(r: &Resolved, delta_zero: bool) -> Metadata {
    let mut m = base_metadata(r.seed);
    m.push(meta("n", r.n));
    m.push(meta("lattice", format!("{}x{}", r.rows, r.cols)));
    m.push(meta("realizations", r.nd));
    m.push(meta("window_fraction", r.window_fraction));
    m.push(meta("energy_unit", if delta_zero { "J" } else { "delta" }));
    m
}

fn out_path(r: &Resolved, name: &str) -> PathBuf {
    r.out.join(name)
}

fn run_spectrum(args: config::SpectrumArgs) -> Result<()> {
    let r = args.common.resolve()?;
    init_threads(args.common.threads);
    let density = ensemble::band_density_scan(r.n, args.delta_ratio, r.nd, r.seed, r.bins)?;
    let h = &density.histogram;
    let centers: Vec<f64> = (0..h.bins()).map(|b| h.bin_center(b)).collect();
    let densities: Vec<f64> = (0..h.bins()).map(|b| h.density(b)).collect();
    let mut m = unit_metadata(&r, false);
    m.push(meta("delta_ratio", args.delta_ratio));
    m.push(meta("energy_unit", "Delta0"));
    for (k, std) in &density.band_std {
        m.push(meta(&format!("band_{k}_std"), format!("{std:.6}")));
    }
    let path = out_path(&r, &format!("spectrum_n{}.csv", r.n));
    output::write_table(&path, &m, &["energy", "density"], &[&centers, &densities])?;
    println!("wrote {}", path.display());
    Ok(())
}

fn grid_plan(r: &Resolved, grid: Vec<f64>, delta_zero: bool, analyses: AnalysisSet) -> SweepPlan {
    let mut plan = SweepPlan::new(vec![r.n], grid, r.nd, r.seed);
    plan.delta_zero = delta_zero;
    plan.analyses = analyses;
    plan.window_fraction = r.window_fraction;
    plan.bins = r.bins;
    plan
}

fn run_grid(args: config::GridArgs, analyses: AnalysisSet) -> Result<()> {
    let r = args.common.resolve()?;
    init_threads(args.common.threads);
    if args.j_over_delta.is_empty() && !args.delta_zero {
        bail!("no couplings given: pass --j-over-delta (or --delta-zero)");
    }
    let plan = grid_plan(&r, args.j_over_delta, args.delta_zero, analyses);
    let result = ensemble::run_sweep(&plan)?;

    let mut m = unit_metadata(&r, args.delta_zero);
    let kind = if analyses.eta {
        "pstats"
    } else if analyses.sq {
        "entropy"
    } else {
        "ldos"
    };
    let summary_path = out_path(&r, &format!("{kind}_n{}.json", r.n));
    output::write_json(&summary_path, &result)?;
    println!("wrote {}", summary_path.display());

    for point in &result.points {
        let hist = if analyses.eta { &point.spacing_histogram } else { &point.ldos_histogram };
        if let Some((centers, densities)) = hist {
            let mut pm = m.clone();
            pm.push(meta("coupling", point.coupling));
            if let Some(eta) = point.eta {
                pm.push(meta("eta", eta));
            }
            if let Some(g) = point.gamma_bw {
                pm.push(meta("gamma_bw", g));
            }
            if let Some(g) = point.gamma_gauss {
                pm.push(meta("gamma_gauss_sigma", g));
            }
            if let Some(fit) = &point.preferred_fit {
                pm.push(meta("preferred_fit", fit));
            }
            let (x, y) = if analyses.eta { ("s", "p") } else { ("energy", "ldos") };
            let path = out_path(&r, &format!("{kind}_n{}_j{:.4}.csv", r.n, point.coupling));
            output::write_table(&path, &pm, &[x, y], &[centers, densities])?;
            println!("wrote {}", path.display());
        }
    }
    m.push(meta("note", "per-point summaries in the JSON file"));
    Ok(())
}

fn run_evolve(args: config::EvolveArgs) -> Result<()> {
    let r = args.common.resolve()?;
    init_threads(args.common.threads);
    if args.j_over_delta.is_empty() {
        bail!("no couplings given: pass --j-over-delta");
    }
    let lattice = build_lattice(r.rows, r.cols).map_err(|e| anyhow!("{e}"))?;
    let basis = central_band(r.n).map_err(|e| anyhow!("{e}"))?;
    check_vector_cap(basis.dim(), ensemble::DEFAULT_VECTOR_CAP)?;
    for &j in &args.j_over_delta {
        let params = ModelParams::band_units(j, lattice.clone());
        let times = {
            let est = theory_estimates(&params, r.n, DEFAULT_C);
            let tmax = args
                .tmax
                .unwrap_or_else(|| (5.0 / est.gamma_theory.max(1e-3)).clamp(30.0, 200.0));
            time_grid(tmax, args.tsteps)
        };
        let trace = decay_ensemble(
            &lattice,
            &params,
            &basis,
            r.nd,
            args.states,
            &times,
            derive_seed(r.seed, 7, j.to_bits()),
        )
        .map_err(|e| anyhow!("{e}"))?;
        let mut m = unit_metadata(&r, false);
        m.push(meta("coupling", j));
        m.push(meta("states_per_realization", args.states));
        m.push(meta(
            "tau_chi",
            trace.tau_chi.map_or("none".to_string(), |t| format!("{t:.6}")),
        ));
        m.push(meta("gamma_theory", theory_estimates(&params, r.n, DEFAULT_C).gamma_theory));
        let path = out_path(&r, &format!("evolve_n{}_j{j:.4}.csv", r.n));
        output::write_table(
            &path,
            &m,
            &["time", "fidelity", "fidelity_stderr", "entropy"],
            &[&trace.times, &trace.fidelity, &trace.fidelity_stderr, &trace.entropy],
        )?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn check_vector_cap(dim: usize, cap: usize) -> Result<()> {
    if dim > cap {
        bail!(
            "band dimension {dim} exceeds the eigenvector cap {cap}; \
             the largest qubit count under the cap is {}",
            ensemble::largest_n_under_cap(cap)
        );
    }
    Ok(())
}

fn run_map(args: config::MapArgs) -> Result<()> {
    let r = args.common.resolve()?;
    init_threads(args.common.threads);
    let lattice = build_lattice(r.rows, r.cols).map_err(|e| anyhow!("{e}"))?;
    let basis = central_band(r.n).map_err(|e| anyhow!("{e}"))?;
    check_vector_cap(basis.dim(), ensemble::DEFAULT_VECTOR_CAP)?;
    let params = ModelParams::band_units(args.j_over_delta, lattice.clone());
    let seed = derive_seed(r.seed, 3, 0);
    let real = draw_realization(&params, seed);
    let h = build_band_hamiltonian(&lattice, &real, &basis).map_err(|e| anyhow!("{e}"))?;
    let diag = h.diag.clone();
    let result = eigendecompose(h.to_dense(), true)
        .map_err(|e| anyhow!("realization seed {seed}: {e}"))?;

    let mut m = unit_metadata(&r, false);
    m.push(meta("coupling", args.j_over_delta));
    m.push(meta("realization_seed", seed));
    match args.map_kind {
        MapKind::Register => {
            let count = args.count.min(result.dim());
            let map = register_map(&result, &diag, count).map_err(|e| anyhow!("{e}"))?;
            m.push(meta("kind", "register"));
            m.push(meta("rows", "central eigenstates, ascending energy"));
            m.push(meta("cols", "central register states, ascending unperturbed energy"));
            let path = out_path(&r, &format!("map_register_n{}.csv", r.n));
            output::write_matrix(&path, &m, &map, count, count)?;
            println!("wrote {}", path.display());
        }
        MapKind::Explosion => {
            let count = args.count.min(result.dim());
            let order = energy_order(&diag);
            let center = (result.dim() - 1) / 2;
            let pair = (order[center], order[center + 1]);
            let times = time_grid(args.tmax, args.tsteps);
            let map = explosion_map(&result, &diag, pair, &times, count)
                .map_err(|e| anyhow!("{e}"))?;
            m.push(meta("kind", "explosion"));
            m.push(meta("rows", format!("{} times, 0..{}", times.len(), args.tmax)));
            m.push(meta("cols", "central register states, ascending unperturbed energy"));
            let path = out_path(&r, &format!("map_explosion_n{}.csv", r.n));
            output::write_matrix(&path, &m, &map, times.len(), count)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn run_sweep_cmd(args: config::SweepArgs) -> Result<()> {
    let r = args.common.resolve_allow_missing_n()?;
    init_threads(args.common.threads);
    if args.qubits.is_empty() {
        bail!("no qubit counts given: pass --qubits");
    }
    if args.j_over_delta.is_empty() && !args.delta_zero {
        bail!("no couplings given: pass --j-over-delta (or --delta-zero)");
    }
    let mut plan = SweepPlan::new(args.qubits, args.j_over_delta, r.nd, r.seed);
    plan.delta_zero = args.delta_zero;
    plan.analyses = AnalysisSet::parse(&args.analyses)?;
    plan.window_fraction = r.window_fraction;
    plan.bins = r.bins;
    plan.vector_cap = args.vector_cap;
    plan.decay_states = args.decay_states;
    plan.tmax = args.tmax;
    plan.tsteps = args.tsteps;
    let result = ensemble::run_sweep_with_checkpoint(&plan, args.checkpoint.as_deref())?;
    let path = r.out.join("sweep_summary.json");
    output::write_json(&path, &result)?;
    println!("wrote {}", path.display());
    Ok(())
}

#[derive(Serialize)]
struct BorderSummary {
    borders: Vec<ensemble::BorderResult>,
    /// Least-squares slope of ln J_c vs ln n (the border law predicts -1).
    jc_slope: Option<f64>,
    /// C in J_c = C delta / n, from the same fit.
    jc_prefactor: Option<f64>,
    /// Mean adjacent spacing of the unperturbed central band, per n.
    band_spacing: Vec<(usize, f64)>,
}

/// Least-squares line through (ln x, ln y); returns (slope, intercept).
fn loglog_fit(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let m = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    let denom = m * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return None;
    }
    let slope = (m * sxy - sx * sy) / denom;
    Some((slope, (sy - slope * sx) / m))
}

fn run_border(args: config::BorderArgs) -> Result<()> {
    let r = args.common.resolve_allow_missing_n()?;
    init_threads(args.common.threads);
    if args.qubits.is_empty() || args.j_over_delta.is_empty() {
        bail!("border needs --qubits and a --j-over-delta grid");
    }
    let mut plan = SweepPlan::new(args.qubits.clone(), args.j_over_delta, r.nd, r.seed);
    plan.analyses = AnalysisSet { eta: true, sq: true, ..Default::default() };
    plan.window_fraction = r.window_fraction;
    plan.bins = r.bins;
    let result = ensemble::run_sweep_with_checkpoint(&plan, args.checkpoint.as_deref())?;

    let jc_points: Vec<(f64, f64)> = result
        .borders
        .iter()
        .filter_map(|b| b.jc.map(|jc| (b.n as f64, jc)))
        .collect();
    let fit = loglog_fit(&jc_points);
    let mut band_spacing = Vec::new();
    for &n in &args.qubits {
        band_spacing.push((n, ensemble::multi_qubit_spacing(n, r.nd, r.seed)?));
    }
    let summary = BorderSummary {
        borders: result.borders.clone(),
        jc_slope: fit.map(|(s, _)| s),
        jc_prefactor: fit.map(|(_, i)| i.exp()),
        band_spacing,
    };
    let path = r.out.join("border_summary.json");
    output::write_json(&path, &summary)?;
    let sweep_path = r.out.join("border_sweep.json");
    output::write_json(&sweep_path, &result)?;
    println!("wrote {} and {}", path.display(), sweep_path.display());
    Ok(())
}

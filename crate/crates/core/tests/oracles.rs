//! Cross-checks against independent reference implementations: a dense
//! matrix exponential for time evolution, a dense projector for the band
//! restriction, and full-spectrum diagonalization for the projected
//! eigenvalues.

use sgqc_core::basis::central_band;
use sgqc_core::eig::{eigendecompose, SymMatrix};
use sgqc_core::lattice::build_lattice;
use sgqc_core::model::{
    build_band_hamiltonian, build_full_hamiltonian, draw_realization, ModelParams,
};
use sgqc_core::Propagator;

/// Dense matrix product c = a·b, row-agnostic (both column-major).
fn matmul(a: &[f64], b: &[f64], dim: usize) -> Vec<f64> {
    let mut c = vec![0.0; dim * dim];
    for j in 0..dim {
        for k in 0..dim {
            let s = b[j * dim + k];
            if s != 0.0 {
                for i in 0..dim {
                    c[j * dim + i] += a[k * dim + i] * s;
                }
            }
        }
    }
    c
}

/// e^M by scaling and squaring with a Taylor series, for the oracle only.
fn expm(m: &[f64], dim: usize) -> Vec<f64> {
    let norm: f64 = m.iter().map(|x| x.abs()).fold(0.0, f64::max) * dim as f64;
    let squarings = norm.log2().ceil().max(0.0) as u32 + 4;
    let scale = 0.5f64.powi(squarings as i32);
    let scaled: Vec<f64> = m.iter().map(|x| x * scale).collect();
    // exp(scaled) = sum scaled^k / k!
    let mut result = vec![0.0; dim * dim];
    for i in 0..dim {
        result[i * dim + i] = 1.0;
    }
    let mut term = result.clone();
    for k in 1..30 {
        term = matmul(&term, &scaled, dim);
        for t in &mut term {
            *t /= k as f64;
        }
        for (r, t) in result.iter_mut().zip(&term) {
            *r += t;
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result, dim);
    }
    result
}

fn band_setup(n: usize, j: f64, seed: u64) -> (SymMatrix, usize) {
    let lattice = build_lattice(2, n / 2).unwrap();
    let params = ModelParams::band_units(j, lattice.clone());
    let real = draw_realization(&params, seed);
    let basis = central_band(n).unwrap();
    let h = build_band_hamiltonian(&lattice, &real, &basis).unwrap();
    let dim = h.dim;
    (h.to_dense(), dim)
}

#[test]
fn eigenresidual_relative_bound() {
    // ‖H v − λ v‖ ≤ 1e-10 ‖H‖_F for every eigenpair of an n = 10 band.
    let (a, dim) = band_setup(10, 0.4, 31);
    let norm = a.norm_fro();
    let result = eigendecompose(a.clone(), true).unwrap();
    for m in 0..dim {
        let v = result.vector(m);
        let lambda = result.eigenvalues[m];
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            let mut hv = 0.0;
            for j in 0..dim {
                hv += a.get(i, j) * v[j];
            }
            worst = worst.max((hv - lambda * v[i]).abs());
        }
        assert!(worst <= 1e-10 * norm, "residual {worst:e} at eigenpair {m}");
    }
}

#[test]
fn weight_rows_and_columns_normalized() {
    let (a, dim) = band_setup(10, 0.3, 7);
    let result = eigendecompose(a, true).unwrap();
    for m in 0..dim {
        let col: f64 = (0..dim).map(|i| result.weight(i, m)).sum();
        assert!((col - 1.0).abs() <= 1e-10, "column {m}: {col}");
    }
    for i in 0..dim {
        let row: f64 = (0..dim).map(|m| result.weight(i, m)).sum();
        assert!((row - 1.0).abs() <= 1e-10, "row {i}: {row}");
    }
}

#[test]
fn evolution_unitarity_bound() {
    let (a, dim) = band_setup(10, 0.4, 12);
    let result = eigendecompose(a, true).unwrap();
    let mut initial = vec![0.0; dim];
    initial[dim / 3] = 1.0;
    let prop = Propagator::new(&result, &initial).unwrap();
    for k in 0..40 {
        let t = 0.5 * k as f64;
        let (re, im) = prop.state_at(t);
        let norm: f64 = re.iter().zip(&im).map(|(r, i)| r * r + i * i).sum();
        assert!((norm - 1.0).abs() <= 1e-10, "norm {norm} at t = {t}");
    }
}

#[test]
fn spectral_evolution_matches_matrix_exponential() {
    // e^{−iHt} via the real 2D×2D block form [[0, Ht], [−Ht, 0]], compared
    // to the eigenbasis propagation at dimension ≤ 64.
    let lattice = build_lattice(2, 4).unwrap(); // n = 8, band dim 70 -> use k band of dim <= 64
    let params = ModelParams::band_units(0.5, lattice.clone());
    let real = draw_realization(&params, 3);
    let basis = sgqc_core::basis::enumerate_band(8, 3).unwrap(); // dim 56
    let h = build_band_hamiltonian(&lattice, &real, &basis).unwrap();
    let dim = h.dim;
    assert!(dim <= 64);
    let dense = h.to_dense();
    let result = eigendecompose(dense.clone(), true).unwrap();

    let mut initial = vec![0.0; dim];
    initial[5] = 1.0;
    let prop = Propagator::new(&result, &initial).unwrap();

    for &t in &[0.3, 1.7] {
        // block[(col-major)] of the 2dim x 2dim real matrix.
        let big = 2 * dim;
        let mut block = vec![0.0; big * big];
        for i in 0..dim {
            for j in 0..dim {
                let v = dense.get(i, j) * t;
                block[(j + dim) * big + i] = v; // upper right  Ht
                block[j * big + (i + dim)] = -v; // lower left  -Ht
            }
        }
        let e = expm(&block, big);
        // apply to [chi_re; chi_im] with chi_im = 0
        let mut re = vec![0.0; dim];
        let mut im = vec![0.0; dim];
        for j in 0..dim {
            let s = initial[j];
            if s != 0.0 {
                for i in 0..dim {
                    re[i] += e[j * big + i] * s;
                    im[i] += e[j * big + (i + dim)] * s;
                }
            }
        }
        let (sre, sim) = prop.state_at(t);
        for i in 0..dim {
            assert!(
                (re[i] - sre[i]).abs() <= 1e-8 && (im[i] - sim[i]).abs() <= 1e-8,
                "component {i} at t = {t}: ({}, {}) vs ({}, {})",
                re[i],
                im[i],
                sre[i],
                sim[i]
            );
        }
    }
}

#[test]
fn band_restriction_matches_dense_projector() {
    // P H P on the band subspace, built from the full 2^n Hamiltonian, must
    // equal the direct band assembly entry for entry (exactly: both paths
    // copy the same inputs, no arithmetic differs).
    for n in [2usize, 4] {
        let lattice = build_lattice(2, n / 2).unwrap();
        let params = ModelParams { delta0: 1.0, delta: 0.3, j: 0.2, lattice: lattice.clone() };
        let real = draw_realization(&params, 40 + n as u64);
        let basis = central_band(n).unwrap();
        let full = build_full_hamiltonian(&lattice, &real, 14).unwrap();
        let band = build_band_hamiltonian(&lattice, &real, &basis).unwrap().to_dense();
        for p in 0..basis.dim() {
            for q in 0..basis.dim() {
                let i = basis.state(p) as usize;
                let j = basis.state(q) as usize;
                assert_eq!(full.get(i, j), band.get(p, q), "entry ({p}, {q}) of n = {n}");
            }
        }
    }
}

#[test]
fn projected_eigenvalues_match_full_spectrum_at_weak_coupling() {
    // Leakage out of the band is second order in J/Delta0.
    let lattice = build_lattice(2, 3).unwrap();
    let j_over_delta0 = 1e-2;
    let params = ModelParams { delta0: 1.0, delta: 0.2, j: j_over_delta0, lattice: lattice.clone() };
    let real = draw_realization(&params, 99);
    let basis = central_band(6).unwrap();

    let full = build_full_hamiltonian(&lattice, &real, 14).unwrap();
    let full_values = eigendecompose(full, false).unwrap().eigenvalues;
    let band = build_band_hamiltonian(&lattice, &real, &basis).unwrap();
    let band_values = eigendecompose(band.to_dense(), false).unwrap().eigenvalues;

    // The central band sits around E = 0; its neighbors around ±2 Delta0.
    let central: Vec<f64> =
        full_values.iter().copied().filter(|e| e.abs() < 1.0).collect();
    assert_eq!(central.len(), band_values.len());
    let tol = 10.0 * j_over_delta0 * j_over_delta0;
    for (a, b) in central.iter().zip(&band_values) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }
}

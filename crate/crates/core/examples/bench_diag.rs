use std::time::Instant;
use sgqc_core::basis::central_band;
use sgqc_core::eig::eigendecompose;
use sgqc_core::lattice::build_lattice;
use sgqc_core::model::{build_band_hamiltonian, draw_realization, ModelParams};

fn main() {
    let lattice = build_lattice(3, 4).unwrap();
    let basis = central_band(12).unwrap();
    let params = ModelParams::band_units(0.3, lattice.clone());
    let real = draw_realization(&params, 1);
    let h = build_band_hamiltonian(&lattice, &real, &basis).unwrap();
    println!("dim = {}", h.dim);

    let t = Instant::now();
    let r = eigendecompose(h.to_dense(), false).unwrap();
    println!("values only: {:?} (E0={})", t.elapsed(), r.eigenvalues[0]);

    let t = Instant::now();
    let r = eigendecompose(h.to_dense(), true).unwrap();
    println!("with vectors: {:?} (E0={})", t.elapsed(), r.eigenvalues[0]);
}

//! Dense symmetric eigensolver: Householder tridiagonalization followed by
//! the implicit-shift QL iteration, with optional accumulation of the
//! transformation into the eigenvector matrix.
//!
//! The reduction and QL steps follow the classic Algol/EISPACK `tred2`/`tql2`
//! pair (via the public-domain Jama port). Eigenvalues are returned in
//! ascending order; eigenvectors are the columns of an orthogonal matrix in
//! the original basis, stored column-major so each eigenvector is contiguous.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::CoreError;

/// Dense symmetric matrix, column-major (`a[(i, j)] = data[j * dim + i]`).
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        SymMatrix { dim, data: vec![0.0; dim * dim] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.dim + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.dim + i] = v;
    }

    /// Adds `v` at `(i, j)` and `(j, i)`.
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.set(i, j, v);
        self.set(j, i, v);
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|x| x * x).sum())
    }
}

/// Eigendecomposition of a symmetric matrix.
///
/// `eigenvalues` ascending; `eigenvectors`, when present, is column-major
/// with `amp(i, m)` the component of eigenvector `m` on basis state `i`.
#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<Vec<f64>>,
}

impl SpectralResult {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `A[i][m] = <ψ_i | φ_m>`.
    #[inline]
    pub fn amp(&self, i: usize, m: usize) -> f64 {
        self.eigenvectors.as_ref().expect("eigenvectors not computed")[m * self.dim() + i]
    }

    /// Eigenvector `m` as a contiguous slice.
    pub fn vector(&self, m: usize) -> &[f64] {
        let d = self.dim();
        &self.eigenvectors.as_ref().expect("eigenvectors not computed")[m * d..(m + 1) * d]
    }

    /// Projection probability `W_im = |<ψ_i | φ_m>|²`.
    #[inline]
    pub fn weight(&self, i: usize, m: usize) -> f64 {
        let a = self.amp(i, m);
        a * a
    }
}

/// Diagonalizes `a`, consuming it (the storage is reused for the eigenvector
/// accumulation). Set `want_vectors` to false for an eigenvalues-only run,
/// which skips the accumulation and runs roughly 4x faster.
pub fn eigendecompose(a: SymMatrix, want_vectors: bool) -> Result<SpectralResult, CoreError> {
    let n = a.dim;
    if n == 0 {
        return Ok(SpectralResult { eigenvalues: Vec::new(), eigenvectors: None });
    }
    let mut v = a.data;
    let mut d = vec![0.0f64; n];
    let mut e = vec![0.0f64; n];
    if want_vectors {
        tred2(n, &mut v, &mut d, &mut e);
        tql(n, &mut d, &mut e, Some(&mut v))?;
        sort_ascending(n, &mut d, Some(&mut v));
        Ok(SpectralResult { eigenvalues: d, eigenvectors: Some(v) })
    } else {
        tred_novec(n, &mut v, &mut d, &mut e);
        tql(n, &mut d, &mut e, None)?;
        d.sort_unstable_by(f64::total_cmp);
        Ok(SpectralResult { eigenvalues: d, eigenvectors: None })
    }
}

#[inline]
fn hypot(a: f64, b: f64) -> f64 {
    libm::hypot(a, b)
}

/// Householder reduction to tridiagonal form with accumulation of the
/// orthogonal transformation in `v` (column-major, symmetric input).
fn tred2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let idx = |i: usize, j: usize| j * n + i;
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
    }

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += libm::fabs(d[k]);
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = 0.0;
                v[idx(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = libm::sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = 0.0;
            }

            // Similarity transformation on the remaining leading block.
            for j in 0..i {
                f = d[j];
                v[idx(j, i)] = f;
                let mut g = e[j] + v[idx(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[idx(k, j)] * d[k];
                    e[k] += v[idx(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                let g = e[j];
                for k in j..i {
                    v[idx(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    // Accumulate the Householder transformations.
    for i in 0..(n - 1) {
        v[idx(n - 1, i)] = v[idx(i, i)];
        v[idx(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[idx(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[idx(k, i + 1)] * v[idx(k, j)];
                }
                for k in 0..=i {
                    v[idx(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[idx(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
        v[idx(n - 1, j)] = 0.0;
    }
    v[idx(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Householder reduction without accumulation (eigenvalues only).
fn tred_novec(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let idx = |i: usize, j: usize| j * n + i;
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += libm::fabs(d[k]);
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[idx(i - 1, j)];
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = libm::sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[idx(j, i)] = f;
                let mut g = e[j] + v[idx(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[idx(k, j)] * d[k];
                    e[k] += v[idx(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                let g = e[j];
                for k in j..i {
                    v[idx(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[idx(i - 1, j)];
            }
        }
        d[i] = h;
    }
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
    }
    e[0] = 0.0;
    // tred2 leaves the squared Householder norms in d; recover the diagonal.
    for i in (1..n).rev() {
        d[i] = v[idx(i, i)];
    }
    d[0] = v[idx(0, 0)];
}

const MAX_QL_ITER: usize = 50;

/// Implicit-shift QL on the tridiagonal (`d`, `e`), rotating the columns of
/// `v` along when present.
fn tql(n: usize, d: &mut [f64], e: &mut [f64], mut v: Option<&mut [f64]>) -> Result<(), CoreError> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0f64;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON / 2.0;
    for l in 0..n {
        tst1 = tst1.max(libm::fabs(d[l]) + libm::fabs(e[l]));
        let mut m = l;
        while m < n {
            if libm::fabs(e[m]) <= eps * tst1 {
                break;
            }
            m += 1;
        }

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITER {
                    return Err(CoreError::NonConvergence { index: l });
                }

                // Implicit shift from the leading 2x2.
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;

                // QL sweep with plane rotations from m-1 down to l.
                p = d[m];
                let mut c = 1.0f64;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0f64;
                let mut s2 = 0.0f64;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    if let Some(v) = v.as_deref_mut() {
                        // Rotate columns i and i+1 (contiguous, column-major).
                        let (lo, hi) = v.split_at_mut((i + 1) * n);
                        let col_i = &mut lo[i * n..];
                        let col_j = &mut hi[..n];
                        for (a, b) in col_i.iter_mut().zip(col_j.iter_mut()) {
                            let h = *b;
                            *b = s * *a + c * h;
                            *a = c * *a - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if libm::fabs(e[l]) <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Selection sort of eigenvalues with matching column swaps.
fn sort_ascending(n: usize, d: &mut [f64], mut v: Option<&mut [f64]>) {
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        for j in (i + 1)..n {
            if d[j] < d[k] {
                k = j;
            }
        }
        if k != i {
            d.swap(i, k);
            if let Some(v) = v.as_deref_mut() {
                let (a, b) = v.split_at_mut(k * n);
                a[i * n..i * n + n].swap_with_slice(&mut b[..n]);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sym(dim: usize, seed: u64) -> SymMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = SymMatrix::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                let x: f64 = rng.gen_range(-1.0..1.0);
                a.set_sym(i, j, x);
            }
        }
        a
    }

    fn residual(a: &SymMatrix, r: &SpectralResult) -> f64 {
        let n = a.dim;
        let mut worst = 0.0f64;
        for m in 0..n {
            let v = r.vector(m);
            let lam = r.eigenvalues[m];
            let mut sum = 0.0;
            for i in 0..n {
                let mut hv = 0.0;
                for j in 0..n {
                    hv += a.get(i, j) * v[j];
                }
                let res = hv - lam * v[i];
                sum += res * res;
            }
            worst = worst.max(libm::sqrt(sum));
        }
        worst / a.norm_fro()
    }

    #[test]
    fn two_by_two_closed_form() {
        let (a, c) = (0.7, -0.3);
        let mut m = SymMatrix::zeros(2);
        m.set(0, 0, a);
        m.set(1, 1, -a);
        m.set_sym(0, 1, c);
        let r = eigendecompose(m, true).unwrap();
        let lam = libm::sqrt(a * a + c * c);
        assert!((r.eigenvalues[0] + lam).abs() < 1e-14);
        assert!((r.eigenvalues[1] - lam).abs() < 1e-14);
    }

    #[test]
    fn diagonal_matrix_sorted() {
        let mut m = SymMatrix::zeros(4);
        for (i, v) in [3.0, -1.0, 2.0, 0.5].iter().enumerate() {
            m.set(i, i, *v);
        }
        let r = eigendecompose(m, false).unwrap();
        assert_eq!(r.eigenvalues, vec![-1.0, 0.5, 2.0, 3.0]);
    }

    #[test]
    fn residual_and_orthonormality() {
        let a = random_sym(60, 7);
        let r = eigendecompose(a.clone(), true).unwrap();
        assert!(residual(&a, &r) < 1e-12);
        // max |VᵀV − I|
        let n = a.dim;
        let mut worst = 0.0f64;
        for p in 0..n {
            for q in 0..n {
                let dot: f64 = (0..n).map(|i| r.amp(i, p) * r.amp(i, q)).sum();
                let target = if p == q { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        assert!(worst < 1e-12, "orthonormality defect {worst}");
    }

    #[test]
    fn values_only_matches_vectors_path() {
        let a = random_sym(40, 11);
        let rv = eigendecompose(a.clone(), true).unwrap();
        let rn = eigendecompose(a, false).unwrap();
        for (x, y) in rv.eigenvalues.iter().zip(rn.eigenvalues.iter()) {
            assert!((x - y).abs() < 1e-11, "{x} vs {y}");
        }
    }

    #[test]
    fn trace_preserved() {
        let a = random_sym(33, 3);
        let tr: f64 = (0..33).map(|i| a.get(i, i)).sum();
        let r = eigendecompose(a, true).unwrap();
        let s: f64 = r.eigenvalues.iter().sum();
        assert!((tr - s).abs() < 1e-10);
    }
}

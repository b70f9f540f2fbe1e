//! 2D periodic qubit lattice and its nearest-neighbor bond list.

use alloc::vec::Vec;

use crate::error::CoreError;

/// A `rows × cols` lattice with periodic boundary conditions.
///
/// Sites are indexed row-major: site `(r, c)` is qubit `r * cols + c`.
/// `bonds` holds every unique nearest-neighbor pair `(i, j)` with `i < j`;
/// couplings are indexed by position in this list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeSpec {
    pub rows: usize,
    pub cols: usize,
    pub n: usize,
    pub bonds: Vec<(usize, usize)>,
}

impl LatticeSpec {
    /// Builds the bond list by connecting each site to its right and down
    /// neighbor under periodic wrap, deduplicating pairs and dropping
    /// self-pairs (a dimension of size 1 wraps a site onto itself, a
    /// dimension of size 2 produces each pair twice).
    pub fn build(rows: usize, cols: usize) -> Result<Self, CoreError> {
        let n = rows * cols;
        if n < 2 {
            return Err(CoreError::LatticeTooSmall { rows, cols });
        }
        let mut bonds: Vec<(usize, usize)> = Vec::with_capacity(2 * n);
        let site = |r: usize, c: usize| r * cols + c;
        for r in 0..rows {
            for c in 0..cols {
                let a = site(r, c);
                for b in [site(r, (c + 1) % cols), site((r + 1) % rows, c)] {
                    if a != b {
                        bonds.push((a.min(b), a.max(b)));
                    }
                }
            }
        }
        bonds.sort_unstable();
        bonds.dedup();
        Ok(LatticeSpec { rows, cols, n, bonds })
    }

    /// Most-square factorization of `n` with `rows <= cols`.
    ///
    /// This fixes the geometry used for a bare qubit count:
    /// 6→2×3, 9→3×3, 12→3×4, 15→3×5, 16→4×4.
    pub fn squarest(n: usize) -> Result<Self, CoreError> {
        if n < 2 {
            return Err(CoreError::LatticeTooSmall { rows: 1, cols: n });
        }
        let mut rows = 1;
        let mut r = 1;
        while r * r <= n {
            if n % r == 0 {
                rows = r;
            }
            r += 1;
        }
        Self::build(rows, n / rows)
    }
}

/// See [`LatticeSpec::build`].
pub fn build_lattice(rows: usize, cols: usize) -> Result<LatticeSpec, CoreError> {
    LatticeSpec::build(rows, cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn four_by_four_has_2n_bonds() {
        let l = build_lattice(4, 4).unwrap();
        assert_eq!(l.n, 16);
        assert_eq!(l.bonds.len(), 32);
    }

    #[test]
    fn two_by_three_dedups_vertical_wrap() {
        // 6 horizontal bonds plus 3 vertical ones (each counted twice by the
        // wrap in the dimension of size 2).
        let l = build_lattice(2, 3).unwrap();
        assert_eq!(l.n, 6);
        assert_eq!(l.bonds.len(), 9);
    }

    #[test]
    fn one_by_two_single_bond() {
        let l = build_lattice(1, 2).unwrap();
        assert_eq!(l.bonds, vec![(0, 1)]);
    }

    #[test]
    fn rejects_single_site() {
        assert!(build_lattice(1, 1).is_err());
    }

    #[test]
    fn bonds_sorted_unique_in_range() {
        for (r, c) in [(1, 2), (2, 2), (2, 3), (3, 3), (3, 4), (3, 5), (4, 4)] {
            let l = build_lattice(r, c).unwrap();
            for w in l.bonds.windows(2) {
                assert!(w[0] < w[1], "duplicate or unsorted bond in {r}x{c}");
            }
            for &(i, j) in &l.bonds {
                assert!(i < j && j < l.n);
            }
        }
    }

    #[test]
    fn degree_four_when_both_dims_at_least_three() {
        let l = build_lattice(3, 5).unwrap();
        let mut degree = vec![0usize; l.n];
        for &(i, j) in &l.bonds {
            degree[i] += 1;
            degree[j] += 1;
        }
        assert!(degree.iter().all(|&d| d == 4));
        assert_eq!(l.bonds.len(), 2 * l.n);
    }

    #[test]
    fn transpose_has_equal_bond_count() {
        for (r, c) in [(1, 4), (2, 3), (2, 5), (3, 4)] {
            let a = build_lattice(r, c).unwrap();
            let b = build_lattice(c, r).unwrap();
            assert_eq!(a.bonds.len(), b.bonds.len());
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(build_lattice(3, 4).unwrap(), build_lattice(3, 4).unwrap());
    }

    #[test]
    fn squarest_factorizations() {
        for (n, rows, cols) in [(6, 2, 3), (9, 3, 3), (12, 3, 4), (15, 3, 5), (16, 4, 4)] {
            let l = LatticeSpec::squarest(n).unwrap();
            assert_eq!((l.rows, l.cols), (rows, cols));
        }
    }
}

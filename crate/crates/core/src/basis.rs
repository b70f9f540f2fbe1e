//! Register-state enumeration and magnetization bands.
//!
//! A register state is an `n`-bit mask; bit `b` set means qubit `b` is up
//! (σ^z eigenvalue +1). The `J = 0` spectrum splits into `n+1` bands labelled
//! by the up-spin count `k`, with band center energy `(2k − n)Δ0`. The band
//! closest to `E = 0` is the one studied throughout: `k = n/2` for even `n`,
//! `k = (n−1)/2` (center `−Δ0`) for odd `n`.

use alloc::vec::Vec;

use crate::error::CoreError;

/// Masks are stored in a single 64-bit word, capping `n` at 63.
pub const MAX_QUBITS: usize = 63;

/// All register states of a fixed up-spin count, in ascending mask order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandBasis {
    pub n: usize,
    pub k: usize,
    states: Vec<u64>,
    /// Binomial table used for combinatorial ranking; binom[m][t] = C(m, t).
    binom: Vec<Vec<u64>>,
}

fn binomial_table(n: usize, k: usize) -> Vec<Vec<u64>> {
    let mut binom = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let mut row = Vec::with_capacity(k + 1);
        for t in 0..=k {
            let v: u64 = if t > m {
                0
            } else if t == 0 || t == m {
                1
            } else {
                let prev: &Vec<u64> = &binom[m - 1];
                prev[t - 1] + prev[t]
            };
            row.push(v);
        }
        binom.push(row);
    }
    binom
}

impl BandBasis {
    /// Enumerates the band with `k` up spins among `n` qubits.
    pub fn enumerate(n: usize, k: usize) -> Result<Self, CoreError> {
        if n == 0 || n > MAX_QUBITS {
            return Err(CoreError::QubitCountUnsupported { n, max: MAX_QUBITS });
        }
        if k > n {
            return Err(CoreError::BandOutOfRange { n, k });
        }
        let binom = binomial_table(n, k);
        let dim = binom[n][k] as usize;
        let mut states = Vec::with_capacity(dim);
        if k == 0 {
            states.push(0);
        } else {
            // Gosper's hack: next mask with the same popcount.
            let mut m: u64 = (1u64 << k) - 1;
            let limit: u64 = m << (n - k);
            loop {
                states.push(m);
                if m == limit {
                    break;
                }
                let c = m & m.wrapping_neg();
                let r = m + c;
                m = (((r ^ m) >> 2) / c) | r;
            }
        }
        Ok(BandBasis { n, k, states, binom })
    }

    /// The band nearest `E = 0`: `k = n/2` for even `n`, `k = (n−1)/2` for odd.
    pub fn central(n: usize) -> Result<Self, CoreError> {
        if n < 2 {
            return Err(CoreError::QubitCountUnsupported { n, max: MAX_QUBITS });
        }
        Self::enumerate(n, n / 2)
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn state(&self, index: usize) -> u64 {
        self.states[index]
    }

    /// Position of `mask` in the ascending enumeration, by colexicographic
    /// ranking: rank = Σ_t C(b_t, t) over the set bit positions b_1 < … < b_k.
    pub fn index_of(&self, mask: u64) -> Option<usize> {
        if mask.count_ones() as usize != self.k || mask >> self.n != 0 {
            return None;
        }
        let mut rank = 0u64;
        let mut rest = mask;
        for t in 1..=self.k {
            let b = rest.trailing_zeros() as usize;
            rank += self.binom[b].get(t).copied().unwrap_or(0);
            rest &= rest - 1;
        }
        Some(rank as usize)
    }

    /// Band center energy in units of Δ0: `2k − n`.
    pub fn center_offset(&self) -> i64 {
        2 * self.k as i64 - self.n as i64
    }
}

/// See [`BandBasis::central`].
pub fn central_band(n: usize) -> Result<BandBasis, CoreError> {
    BandBasis::central(n)
}

/// See [`BandBasis::enumerate`].
pub fn enumerate_band(n: usize, k: usize) -> Result<BandBasis, CoreError> {
    BandBasis::enumerate(n, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn central_band_dimensions() {
        let b = central_band(16).unwrap();
        assert_eq!(b.k, 8);
        assert_eq!(b.dim(), 12870);

        let b = central_band(15).unwrap();
        assert_eq!(b.k, 7);
        assert_eq!(b.dim(), 6435);
        assert_eq!(b.center_offset(), -1);

        let b = central_band(2).unwrap();
        assert_eq!(b.states(), &[0b01, 0b10]);
    }

    #[test]
    fn extreme_band_single_state() {
        assert_eq!(enumerate_band(4, 0).unwrap().states(), &[0]);
        assert_eq!(enumerate_band(4, 4).unwrap().states(), &[0b1111]);
    }

    #[test]
    fn band_4_2() {
        assert_eq!(enumerate_band(4, 2).unwrap().dim(), 6);
    }

    #[test]
    fn first_state_is_smallest_mask() {
        assert_eq!(enumerate_band(16, 8).unwrap().state(0), 0b0000_0000_1111_1111);
    }

    #[test]
    fn rejects_k_above_n() {
        assert!(enumerate_band(4, 5).is_err());
    }

    #[test]
    fn bands_partition_hilbert_space() {
        for n in [2, 5, 10, 16, 20] {
            let total: usize = (0..=n).map(|k| enumerate_band(n, k).unwrap().dim()).sum();
            assert_eq!(total, 1usize << n);
        }
    }

    #[test]
    fn index_round_trip() {
        let b = enumerate_band(12, 6).unwrap();
        for (p, &m) in b.states().iter().enumerate() {
            assert_eq!(b.index_of(m), Some(p));
        }
        assert_eq!(b.index_of(0b111), None);
    }

    #[test]
    fn states_strictly_ascending_with_popcount_k() {
        let b = enumerate_band(10, 4).unwrap();
        for w in b.states().windows(2) {
            assert!(w[0] < w[1]);
        }
        assert!(b.states().iter().all(|m| m.count_ones() == 4));
    }

    proptest! {
        #[test]
        fn flip_flop_stays_in_band(n in 2usize..12, seed in any::<u64>()) {
            let k = n / 2;
            let b = enumerate_band(n, k).unwrap();
            let m = b.state((seed % b.dim() as u64) as usize);
            for i in 0..n {
                for j in (i + 1)..n {
                    let bi = (m >> i) & 1;
                    let bj = (m >> j) & 1;
                    if bi != bj {
                        let flipped = m ^ ((1 << i) | (1 << j));
                        prop_assert!(b.index_of(flipped).is_some());
                    }
                }
            }
        }
    }
}

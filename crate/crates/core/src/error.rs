use core::fmt;

/// Errors produced by construction and analysis routines.
#[derive(Debug, Clone, PartialEq)]
pub enum CoreError {
    /// Lattice too small to carry any bond.
    LatticeTooSmall { rows: usize, cols: usize },
    /// Requested up-spin count exceeds the qubit count.
    BandOutOfRange { n: usize, k: usize },
    /// Qubit count outside the supported range.
    QubitCountUnsupported { n: usize, max: usize },
    /// Realization and basis were built for different qubit counts.
    DimensionMismatch { expected: usize, got: usize },
    /// Full-Hamiltonian qubit count exceeds the memory cap.
    FullHamiltonianCap { n: usize, cap: usize },
    /// QL iteration failed to converge on some eigenvalue.
    NonConvergence { index: usize },
    /// Central window would contain fewer than two levels.
    WindowTooSmall { dim: usize, fraction_milli: usize },
    /// Window fraction outside (0, 0.5].
    BadWindowFraction,
    /// No spacing samples were collected.
    EmptyPool,
    /// Border threshold is not bracketed by the curve.
    ThresholdNotBracketed,
    /// Eigenvectors were required but not computed.
    MissingVectors,
    /// Initial state vector is not normalized.
    NotNormalized,
    /// Width fit did not converge or had too little data.
    FitFailed,
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::LatticeTooSmall { rows, cols } => {
                write!(f, "lattice {rows}x{cols} has fewer than 2 sites")
            }
            CoreError::BandOutOfRange { n, k } => {
                write!(f, "band k={k} out of range for n={n} qubits")
            }
            CoreError::QubitCountUnsupported { n, max } => {
                write!(f, "qubit count n={n} unsupported (max {max})")
            }
            CoreError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected n={expected}, got n={got}")
            }
            CoreError::FullHamiltonianCap { n, cap } => {
                write!(f, "full Hamiltonian needs 4^{n} entries, over the n<={cap} cap")
            }
            CoreError::NonConvergence { index } => {
                write!(f, "QL iteration did not converge at eigenvalue {index}")
            }
            CoreError::WindowTooSmall { dim, fraction_milli } => {
                write!(
                    f,
                    "central window of {}.{:03} around the center of {dim} levels holds < 2 levels",
                    fraction_milli / 1000,
                    fraction_milli % 1000
                )
            }
            CoreError::BadWindowFraction => write!(f, "window fraction must be in (0, 0.5]"),
            CoreError::EmptyPool => write!(f, "no spacing samples collected"),
            CoreError::ThresholdNotBracketed => {
                write!(f, "threshold is not bracketed by the curve")
            }
            CoreError::MissingVectors => write!(f, "eigenvectors required but absent"),
            CoreError::NotNormalized => write!(f, "initial state is not normalized"),
            CoreError::FitFailed => write!(f, "width fit failed"),
        }
    }
}

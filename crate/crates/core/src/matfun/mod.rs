//! Dense real matrix functions and equation solvers.
//!
//! Everything downstream is built from the primitives here: the matrix
//! exponential, the principal matrix logarithm and q-th root, continuous and
//! discrete Lyapunov solvers, the integrated noise Gramian, and symmetric
//! eigenvalue utilities (PSD tests and rank-revealing factorization).
//!
//! All solvers are dense `f64` routines intended for state dimensions up to
//! roughly 100; the Lyapunov solvers use Kronecker vectorization, which is
//! O(n^6) and therefore only sensible at that scale.

mod expm;
mod lyap;
mod schur_fun;

pub use expm::expm;
pub use lyap::{lyap_ct, lyap_dt, noise_gramian};
pub use schur_fun::{eigenvalues_of, logm_principal, rootq_principal};

pub(crate) use expm::expm_raw;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Dense real matrix used throughout the crate.
pub type Matrix = DMatrix<f64>;

/// Default tolerances. All are overridable where an operation takes an
/// explicit tolerance argument or an options struct.
pub mod tol {
    /// Relative max-norm asymmetry accepted by [`super::SymMatrix::new`].
    pub const TAU_SYM: f64 = 1e-10;
    /// Relative accuracy expected of matrix-function identities.
    pub const TAU_FUN: f64 = 1e-9;
    /// Relative residual accepted from the Lyapunov solvers.
    pub const TAU_LYAP: f64 = 1e-9;
    /// Relative eigenvalue/singular-value cutoff for rank decisions.
    pub const RANK_TOL: f64 = 1e-8;
    /// Relative update size at which the Riccati iteration stops.
    pub const TAU_RICCATI: f64 = 1e-12;
}

/// Errors from the matrix-function layer.
#[derive(Debug, Clone, Error)]
pub enum MatError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("eigenvalue {eigenvalue} lies on the closed negative real axis; no principal logarithm/root")]
    SpectrumOnBranchCut { eigenvalue: Complex64 },
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not stable: eigenvalue {eigenvalue} has nonnegative real part")]
    Unstable { eigenvalue: Complex64 },
    #[error("matrix is not Schur-stable: eigenvalue {eigenvalue} has modulus >= 1")]
    NotSchurStable { eigenvalue: Complex64 },
    #[error("Lyapunov operator nearly singular (eigenvalue pair sum {pair_sum:.3e})")]
    IllConditioned { pair_sum: f64 },
    #[error("matrix is not positive semidefinite: min eigenvalue {min_eig:.3e}")]
    NotPsd { min_eig: f64 },
    #[error("matrix is not symmetric: relative asymmetry {asymmetry:.3e}")]
    NotSymmetric { asymmetry: f64 },
}

/// Symmetric matrix, stored in full. Construction symmetrizes the entries
/// after checking that the asymmetry is within tolerance, so downstream
/// eigenvalue code can rely on exact symmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    /// Accepts `m` if `max|m - m'| <= TAU_SYM * max|m|` and all entries are
    /// finite; stores `(m + m')/2`.
    pub fn new(m: Matrix) -> Result<Self, MatError> {
        Self::new_with_tol(m, tol::TAU_SYM)
    }

    pub fn new_with_tol(m: Matrix, tau_sym: f64) -> Result<Self, MatError> {
        if m.nrows() != m.ncols() {
            return Err(MatError::NonSquare { rows: m.nrows(), cols: m.ncols() });
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(MatError::InvalidArgument("matrix has non-finite entries".into()));
        }
        let scale = m.amax();
        let asym = (&m - m.transpose()).amax();
        if asym > tau_sym * scale.max(f64::MIN_POSITIVE) {
            return Err(MatError::NotSymmetric { asymmetry: asym / scale });
        }
        Ok(Self::symmetrize(m))
    }

    /// Symmetrizes without an asymmetry check, for matrices that are
    /// symmetric by construction up to roundoff.
    pub(crate) fn symmetrize(m: Matrix) -> Self {
        let s = (&m + m.transpose()) * 0.5;
        SymMatrix(s)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    /// Eigenvalues sorted in descending order.
    pub fn eigenvalues_desc(&self) -> Vec<f64> {
        let mut eigs: Vec<f64> = self.0.symmetric_eigenvalues().iter().copied().collect();
        eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        eigs
    }

    /// Symmetric PSD square root, with negative eigenvalues (roundoff from a
    /// nominally PSD matrix) clamped to zero.
    pub fn sqrt_psd(&self) -> Matrix {
        let eig = self.0.clone().symmetric_eigen();
        let sqrt_vals = eig.eigenvalues.map(|l| if l > 0.0 { l.sqrt() } else { 0.0 });
        &eig.eigenvectors * Matrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.transpose()
    }
}

impl std::ops::Deref for SymMatrix {
    type Target = Matrix;
    fn deref(&self) -> &Matrix {
        &self.0
    }
}

/// Outcome of a positive-semidefiniteness test.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdVerdict {
    pub is_psd: bool,
    pub min_eig: f64,
    pub tolerance_used: f64,
}

/// Rank-revealing factor of a PSD matrix: `factor * factor' ~ M` with
/// `factor` of full column rank.
#[derive(Debug, Clone)]
pub struct RankFactor {
    /// dim x rank matrix with columns ordered by decreasing eigenvalue; the
    /// first nonzero entry of each column is positive.
    pub factor: Matrix,
    pub rank: usize,
    /// Eigenvalues below the rank threshold, descending.
    pub dropped_eigs: Vec<f64>,
    /// Eigenvalues within 10% of the rank threshold on either side. A
    /// nonempty list means the rank decision is sensitive to the tolerance.
    pub borderline_eigs: Vec<f64>,
}

impl RankFactor {
    pub fn is_rank_ambiguous(&self) -> bool {
        !self.borderline_eigs.is_empty()
    }
}

/// Tests `M >= -tol` by its minimum eigenvalue. With `tol = None` the
/// threshold defaults to `dim * ||M||_2 * 1e-10`.
pub fn psd_check(m: &SymMatrix, tol: Option<f64>) -> PsdVerdict {
    let eigs = m.eigenvalues_desc();
    let min_eig = eigs.last().copied().unwrap_or(0.0);
    let spec_norm = eigs
        .iter()
        .map(|l| l.abs())
        .fold(0.0_f64, f64::max);
    let tolerance_used = tol.unwrap_or(m.dim() as f64 * spec_norm * 1e-10);
    PsdVerdict { is_psd: min_eig >= -tolerance_used, min_eig, tolerance_used }
}

/// Rank-revealing symmetric factorization of a PSD matrix.
///
/// Keeps eigenvalues above `rank_tol * lambda_max` and returns
/// `L = V_r diag(sqrt(lambda_r))` so that `L L' ~ M`. Eigenvalues within
/// 10% of the threshold are reported in `borderline_eigs` rather than
/// silently truncated one way or the other.
pub fn psd_rank_factor(m: &SymMatrix, rank_tol: f64) -> Result<RankFactor, MatError> {
    let verdict = psd_check(m, None);
    if !verdict.is_psd {
        return Err(MatError::NotPsd { min_eig: verdict.min_eig });
    }
    let eig = m.as_matrix().clone().symmetric_eigen();
    let n = m.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());

    let lambda_max = order.first().map(|&i| eig.eigenvalues[i].max(0.0)).unwrap_or(0.0);
    let threshold = rank_tol * lambda_max;
    let kept: Vec<usize> = order.iter().copied().filter(|&i| eig.eigenvalues[i] > threshold).collect();
    let dropped_eigs: Vec<f64> =
        order.iter().copied().filter(|&i| eig.eigenvalues[i] <= threshold).map(|i| eig.eigenvalues[i]).collect();
    let borderline_eigs: Vec<f64> = order
        .iter()
        .map(|&i| eig.eigenvalues[i])
        .filter(|&l| threshold > 0.0 && l >= 0.9 * threshold && l <= 1.1 * threshold)
        .collect();

    let rank = kept.len();
    let mut factor = Matrix::zeros(n, rank);
    for (col, &i) in kept.iter().enumerate() {
        let scale = eig.eigenvalues[i].sqrt();
        let mut column = eig.eigenvectors.column(i) * scale;
        // Sign convention: first entry of nontrivial magnitude positive.
        let lead = column.iter().find(|v| v.abs() > 1e-300 * scale.max(1.0)).copied().unwrap_or(0.0);
        if lead < 0.0 {
            column = -column;
        }
        factor.set_column(col, &column);
    }
    Ok(RankFactor { factor, rank, dropped_eigs, borderline_eigs })
}

/// Number of singular values above `rank_tol * sigma_max`.
pub fn numerical_rank(m: &Matrix, rank_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let smax = sv.max();
    if smax <= 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rank_tol * smax).count()
}

/// Max column absolute sum.
pub(crate) fn norm_1(m: &Matrix) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

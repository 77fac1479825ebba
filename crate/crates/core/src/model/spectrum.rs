//! Spectral density evaluation on frequency grids.
//!
//! The density of a continuous model is `Phi(i w) = V(i w) V(-i w)'` with
//! spectral factor `V(s) = H (sI - F)^{-1} G`; for a discrete model it is
//! `Psi(z) = W(z) W(1/z)'` with `W(z) = C (zI - A)^{-1} B + D`, evaluated on
//! the unit circle `z = e^{i theta}`. Both are computed by a direct
//! resolvent solve per frequency, which stays well-behaved for
//! non-diagonalizable state matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{CtModel, DtModel, ModelError};
use crate::matfun::{self, Matrix};

pub(crate) type CMatrix = DMatrix<Complex64>;

/// One evaluation of a matrix spectral density.
#[derive(Debug, Clone)]
pub struct SpectrumSample {
    /// Angular frequency `w` (continuous) or angle `theta` (discrete).
    pub frequency: f64,
    /// Hermitian PSD density matrix at this frequency.
    pub density: CMatrix,
    /// Numerical rank of the density (relative tolerance
    /// [`matfun::tol::RANK_TOL`] on its singular values).
    pub rank: usize,
}

pub(crate) fn to_complex(m: &Matrix) -> CMatrix {
    m.map(|v| Complex64::new(v, 0.0))
}

/// Spectral factor value `H (sI - F)^{-1} G` at `s`.
pub(crate) fn ct_factor_at(model: &CtModel, s: Complex64) -> CMatrix {
    let n = model.n();
    let resolvent_arg = CMatrix::from_diagonal_element(n, n, s) - to_complex(model.f());
    let x = resolvent_arg
        .lu()
        .solve(&to_complex(model.g()))
        .expect("imaginary-axis resolvent of a stable matrix is nonsingular");
    to_complex(model.h()) * x
}

/// Transfer function value `C (zI - A)^{-1} B + D` at `z`.
pub(crate) fn dt_factor_at(model: &DtModel, z: Complex64) -> Option<CMatrix> {
    let n = model.n();
    let resolvent_arg = CMatrix::from_diagonal_element(n, n, z) - to_complex(model.a());
    let x = resolvent_arg.lu().solve(&to_complex(model.b()))?;
    Some(to_complex(model.c()) * x + to_complex(model.d()))
}

fn density_sample(frequency: f64, factor: CMatrix) -> SpectrumSample {
    let density = &factor * factor.adjoint();
    // Hermitian by construction up to roundoff; enforce it exactly.
    let density = (&density + density.adjoint()) * Complex64::new(0.5, 0.0);
    let rank = rank_complex(&density, matfun::tol::RANK_TOL);
    SpectrumSample { frequency, density, rank }
}

pub(crate) fn rank_complex(m: &CMatrix, rank_tol: f64) -> usize {
    let sv = m.clone().singular_values();
    let smax = sv.max();
    if smax <= 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rank_tol * smax).count()
}

/// Evaluates `Phi(i w)` at each frequency of the grid.
pub fn spectrum_ct(model: &CtModel, omegas: &[f64]) -> Vec<SpectrumSample> {
    omegas
        .iter()
        .map(|&w| density_sample(w, ct_factor_at(model, Complex64::new(0.0, w))))
        .collect()
}

/// Evaluates `Psi(e^{i theta})` at each angle of the grid.
pub fn spectrum_dt(model: &DtModel, thetas: &[f64]) -> Vec<SpectrumSample> {
    thetas
        .iter()
        .map(|&theta| {
            let z = Complex64::new(theta.cos(), theta.sin());
            let w = dt_factor_at(model, z)
                .expect("unit-circle resolvent of a Schur-stable matrix is nonsingular");
            density_sample(theta, w)
        })
        .collect()
}

/// The density at the interior point `z = 0`:
/// `Psi(0) = W(0) W(inf)' = (D - C A^{-1} B) D'`.
///
/// This vanishes exactly for models obtained by sampling a continuous
/// process. Errors when `A` is singular.
pub fn spectrum_dt_at_zero(model: &DtModel) -> Result<Matrix, ModelError> {
    let x = model.a().clone().lu().solve(model.b()).ok_or(ModelError::SingularAtZero)?;
    Ok((model.d() - model.c() * x) * model.d().transpose())
}

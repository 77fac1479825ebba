//! Minimum-phase spectral factor via the covariance iteration.
//!
//! Among all state-space models with a given output covariance sequence
//! (fixed `A`, `C`, output data `Lambda0 = C P C' + D D'` and
//! `Cbar = C P A' + D B'`), the minimum-phase one has the smallest state
//! covariance `P-`. It is the limit of the monotone iteration
//!
//! ```text
//!     Pi_{k+1} = A Pi_k A' + K_k Delta_k^+ K_k',
//!     K_k = Cbar' - A Pi_k C',   Delta_k = Lambda0 - C Pi_k C',
//! ```
//!
//! started at `Pi_0 = 0`. `Delta` is inverted on its numerically positive
//! eigenspace; densities of rank below the output dimension keep `Delta`
//! structurally singular, so a plain inverse would rule out exactly the
//! rank-deficient processes this crate is about.

use crate::matfun::{lyap_dt, psd_rank_factor, Matrix, SymMatrix};
use crate::model::DtModel;

use super::{LiftOptions, ResampleError};

/// Minimum-phase factor data: `(A, B-, C, D-)` realizes the same spectral
/// density as the input model, with `D-` of full column rank.
#[derive(Debug, Clone)]
pub struct MinPhaseResult {
    /// Limit of the covariance iteration; the smallest state covariance
    /// consistent with the output statistics.
    pub p_minus: SymMatrix,
    pub b_minus: Matrix,
    pub d_minus: Matrix,
    pub iterations: usize,
    /// Relative residual of `P- = A P- A' + B- B-'`.
    pub residual: f64,
    /// Output-state cross covariance `C P A' + D B'`.
    pub cbar: Matrix,
    /// Output covariance `C P C' + D D'`.
    pub lambda0: SymMatrix,
}

pub fn minphase(model: &DtModel) -> Result<MinPhaseResult, ResampleError> {
    minphase_with(model, &LiftOptions::default())
}

pub fn minphase_with(model: &DtModel, opts: &LiftOptions) -> Result<MinPhaseResult, ResampleError> {
    let (a, b, c, d) = (model.a(), model.b(), model.c(), model.d());
    let n = model.n();

    let bb = SymMatrix::symmetrize(b * b.transpose());
    let p_cov = lyap_dt(a, &bb)?;
    let lambda0 = SymMatrix::symmetrize(c * p_cov.as_matrix() * c.transpose() + d * d.transpose());
    let cbar = c * p_cov.as_matrix() * a.transpose() + d * b.transpose();

    let mut pi = Matrix::zeros(n, n);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let delta = SymMatrix::symmetrize(lambda0.as_matrix() - c * &pi * c.transpose());
        let delta_pinv = psd_pseudo_inverse(&delta)?;
        let gain = cbar.transpose() - a * &pi * c.transpose();
        let next =
            SymMatrix::symmetrize(a * &pi * a.transpose() + &gain * delta_pinv * gain.transpose());
        let update = (next.as_matrix() - &pi).amax();
        let scale = next.as_matrix().amax().max(f64::MIN_POSITIVE);
        pi = next.into_matrix();
        if update <= opts.riccati_tol * scale {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(ResampleError::NoConvergence { iterations });
    }

    let p_minus = SymMatrix::symmetrize(pi);
    let delta = SymMatrix::symmetrize(lambda0.as_matrix() - c * p_minus.as_matrix() * c.transpose());
    let d_factor = psd_rank_factor(&delta, opts.rank_tol)?;
    let d_minus = d_factor.factor;
    let gain = cbar.transpose() - a * p_minus.as_matrix() * c.transpose();
    let gram = (d_minus.transpose() * &d_minus)
        .try_inverse()
        .ok_or_else(|| ResampleError::DeltaSingular("innovation factor lost column rank".into()))?;
    let b_minus = &gain * &d_minus * gram;

    let recon = a * p_minus.as_matrix() * a.transpose() + &b_minus * b_minus.transpose();
    let residual = (p_minus.as_matrix() - recon).amax()
        / p_minus.as_matrix().amax().max(f64::MIN_POSITIVE);

    Ok(MinPhaseResult { p_minus, b_minus, d_minus, iterations, residual, cbar, lambda0 })
}

/// Inverts a PSD matrix on its numerically positive eigenspace (relative
/// cut 1e-12). A significantly negative eigenvalue means the iteration has
/// left the feasible cone and is reported as singular.
fn psd_pseudo_inverse(m: &SymMatrix) -> Result<Matrix, ResampleError> {
    let eig = m.as_matrix().clone().symmetric_eigen();
    let lambda_max = eig.eigenvalues.max();
    if !(lambda_max > 0.0) {
        return Err(ResampleError::DeltaSingular(format!(
            "no positive eigenvalue (max {lambda_max:.3e})"
        )));
    }
    let lambda_min = eig.eigenvalues.min();
    if lambda_min < -1e-8 * lambda_max {
        return Err(ResampleError::DeltaSingular(format!(
            "indefinite innovation covariance (min {lambda_min:.3e}, max {lambda_max:.3e})"
        )));
    }
    let cut = 1e-12 * lambda_max;
    let inv_vals = eig.eigenvalues.map(|l| if l > cut { 1.0 / l } else { 0.0 });
    Ok(&eig.eigenvectors * Matrix::from_diagonal(&inv_vals) * eig.eigenvectors.transpose())
}

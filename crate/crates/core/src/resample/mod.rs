//! Transforms between time scales: sampling, subsampling, and their
//! inverses (liftings).
//!
//! Sampling a continuous model and reading a discrete model every `q` steps
//! are exact, always-defined maps. The reverse direction only exists when a
//! principal matrix logarithm or q-th root is available and a positivity
//! certificate built from the stationary state covariance holds; those
//! checks return a [`LiftReport`] verdict with the certificate attached
//! instead of failing, so infeasibility is ordinary data (it is the
//! interesting outcome of a sweep).

mod minphase;

pub use minphase::{minphase, minphase_with, MinPhaseResult};

use thiserror::Error;

use crate::matfun::{
    self, expm, logm_principal, lyap_dt, noise_gramian, numerical_rank, psd_check, psd_rank_factor,
    rootq_principal, MatError, Matrix, SymMatrix,
};
use crate::model::{spectrum_dt, spectrum_dt_at_zero, CtModel, DtModel, ModelError};

#[derive(Debug, Clone, Error)]
pub enum ResampleError {
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("subsampling factor q must be positive")]
    InvalidFactor,
    #[error("model has nonzero feedthrough; use the general lifting")]
    FeedthroughNotZero,
    #[error("innovation covariance is numerically singular ({0})")]
    DeltaSingular(String),
    #[error("covariance iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
}

/// Tolerances and iteration limits for the lifting tests.
#[derive(Debug, Clone)]
pub struct LiftOptions {
    /// Relative eigenvalue cutoff for rank decisions and factor extraction.
    pub rank_tol: f64,
    /// Absolute floor for the PSD verdict; `None` picks
    /// `dim * ||M||_2 * 1e-10` per test matrix.
    pub psd_tol: Option<f64>,
    /// Relative update size at which the covariance iteration stops.
    pub riccati_tol: f64,
    /// Iteration cap for the covariance iteration.
    pub max_iter: usize,
}

impl Default for LiftOptions {
    fn default() -> Self {
        LiftOptions {
            rank_tol: matfun::tol::RANK_TOL,
            psd_tol: None,
            riccati_tol: matfun::tol::TAU_RICCATI,
            max_iter: 10_000,
        }
    }
}

/// The theorem condition a lifting failed, when it failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailedCondition {
    /// No principal matrix logarithm (spectrum touches the negative axis).
    NoLogarithm,
    /// No principal q-th root.
    NoRoot,
    /// `B B'` (or its minimum-phase counterpart) is numerically singular.
    BbSingular,
    /// The positivity certificate failed.
    PsdFail,
    /// The density does not vanish at `z = 0`, so no sampled origin exists.
    PsiZeroFail,
}

impl std::fmt::Display for FailedCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            FailedCondition::NoLogarithm => "NoLogarithm",
            FailedCondition::NoRoot => "NoRoot",
            FailedCondition::BbSingular => "BBSingular",
            FailedCondition::PsdFail => "PsdFail",
            FailedCondition::PsiZeroFail => "PsiZeroFail",
        };
        f.write_str(name)
    }
}

/// A lifted model: continuous, or discrete at a finer step.
#[derive(Debug, Clone)]
pub enum LiftedModel {
    Ct(CtModel),
    Dt(DtModel),
}

/// Evidence backing a lifting verdict: the state covariance, the symmetric
/// matrix whose positivity was tested, its eigenvalues (descending), and the
/// recovered noise rank on success.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub p: SymMatrix,
    pub tested: SymMatrix,
    pub eigenvalues: Vec<f64>,
    pub rank: Option<usize>,
}

/// Feasibility verdict of a lifting attempt.
#[derive(Debug, Clone)]
pub struct LiftReport {
    pub feasible: bool,
    pub failed_condition: Option<FailedCondition>,
    pub lifted: Option<LiftedModel>,
    /// Present whenever the positivity test was reached; absent for
    /// failures before it (no logarithm/root, singular `B B'`).
    pub certificate: Option<Certificate>,
}

impl LiftReport {
    fn feasible(lifted: LiftedModel, certificate: Certificate) -> Self {
        LiftReport {
            feasible: true,
            failed_condition: None,
            lifted: Some(lifted),
            certificate: Some(certificate),
        }
    }

    fn infeasible(condition: FailedCondition, certificate: Option<Certificate>) -> Self {
        LiftReport { feasible: false, failed_condition: Some(condition), lifted: None, certificate }
    }
}

/// Samples a continuous model with period `h`:
/// `A = exp(F h)`, `C = H`, `D = 0`, and `B` the symmetric PSD square root
/// of the noise Gramian over one interval.
pub fn sample_ct(model: &CtModel, h: f64) -> Result<DtModel, ResampleError> {
    let a = expm(model.f(), h)?;
    let q = noise_gramian(model.f(), model.g(), h)?;
    let b = q.sqrt_psd();
    let d = Matrix::zeros(model.p(), b.ncols());
    Ok(DtModel::new(a, b, model.h().clone(), d, h)?)
}

/// Tests whether a sampled-form model (`D = 0`) arises from a continuous
/// one at period `h`, and reconstructs it when it does.
///
/// The checks are: a principal logarithm of `A` exists; `B B'` is
/// nonsingular; and `-(F P + P F')` is PSD for `F = log(A)/h` and `P` the
/// stationary covariance. On success the factor of that matrix is the
/// recovered noise gain and its rank the recovered noise dimension.
pub fn lift_to_ct(model: &DtModel, h: f64) -> Result<LiftReport, ResampleError> {
    lift_to_ct_with(model, h, &LiftOptions::default())
}

pub fn lift_to_ct_with(
    model: &DtModel,
    h: f64,
    opts: &LiftOptions,
) -> Result<LiftReport, ResampleError> {
    if !model.is_feedthrough_zero() {
        return Err(ResampleError::FeedthroughNotZero);
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(ResampleError::Mat(MatError::InvalidArgument(
            "sampling period h must be positive and finite".into(),
        )));
    }
    let bb = SymMatrix::symmetrize(model.b() * model.b().transpose());
    let p_cov = lyap_dt(model.a(), &bb)?;

    if numerical_rank(model.b(), opts.rank_tol) < model.n() {
        return Ok(LiftReport::infeasible(FailedCondition::BbSingular, None));
    }

    let log_a = match logm_principal(model.a()) {
        Ok(l) => l,
        Err(MatError::SpectrumOnBranchCut { .. }) | Err(MatError::Singular) => {
            return Ok(LiftReport::infeasible(FailedCondition::NoLogarithm, None));
        }
        Err(e) => return Err(e.into()),
    };
    let f = log_a / h;

    finish_ct_lift(f, p_cov, model.c().clone(), opts)
}

/// Shared tail of the continuous liftings: PSD-test `-(F P + P F')`,
/// factor it into the noise gain, and assemble the model.
fn finish_ct_lift(
    f: Matrix,
    p_cov: SymMatrix,
    output_map: Matrix,
    opts: &LiftOptions,
) -> Result<LiftReport, ResampleError> {
    let tested =
        SymMatrix::symmetrize(-(&f * p_cov.as_matrix() + p_cov.as_matrix() * f.transpose()));
    let eigenvalues = tested.eigenvalues_desc();
    let verdict = psd_check(&tested, opts.psd_tol);
    if !verdict.is_psd {
        let certificate = Certificate { p: p_cov, tested, eigenvalues, rank: None };
        return Ok(LiftReport::infeasible(FailedCondition::PsdFail, Some(certificate)));
    }
    let factor = psd_rank_factor(&tested, opts.rank_tol)?;
    let rank = factor.rank;
    let ct = CtModel::new(f, factor.factor, output_map)?;
    let certificate = Certificate { p: p_cov, tested, eigenvalues, rank: Some(rank) };
    Ok(LiftReport::feasible(LiftedModel::Ct(ct), certificate))
}

/// Reads a fine-scale discrete model `(F, G, H, J)` every `q` steps:
/// `A = F^q`, `B = [G, FG, ..., F^{q-1} G]`, `C = H`, `D = [0, ..., 0, J]`,
/// step multiplied by `q`.
pub fn subsample(model: &DtModel, q: usize) -> Result<DtModel, ResampleError> {
    if q == 0 {
        return Err(ResampleError::InvalidFactor);
    }
    let (n, r, p) = (model.n(), model.r(), model.p());
    let mut a = Matrix::identity(n, n);
    let mut b = Matrix::zeros(n, q * r);
    let mut d = Matrix::zeros(p, q * r);
    let mut power = Matrix::identity(n, n);
    for k in 0..q {
        b.view_mut((0, k * r), (n, r)).copy_from(&(&power * model.b()));
        power = model.a() * power;
    }
    a.copy_from(&power);
    d.view_mut((0, (q - 1) * r), (p, r)).copy_from(model.d());
    Ok(DtModel::new(a, b, model.c().clone(), d, model.step() * q as f64)?)
}

/// Tests whether a coarse discrete model is the `q`-fold subsample of a
/// finer one, and reconstructs the fine model when it is.
///
/// Needs a principal q-th root `R = A^{1/q}` and positivity of
/// `P - R P R'` (feedthrough-free case) or of the block matrix
///
/// ```text
///     M(P) = [ P - R P R'      R A^{-1} B D' ]
///            [ (R A^{-1} B D')'        D D'  ]
/// ```
///
/// whose joint factor stacks the recovered noise gain over the recovered
/// feedthrough, guaranteeing a consistent cross term.
pub fn lift_q(model: &DtModel, q: usize) -> Result<LiftReport, ResampleError> {
    lift_q_with(model, q, &LiftOptions::default())
}

pub fn lift_q_with(model: &DtModel, q: usize, opts: &LiftOptions) -> Result<LiftReport, ResampleError> {
    if q == 0 {
        return Err(ResampleError::InvalidFactor);
    }
    let (n, p) = (model.n(), model.p());
    let bb = SymMatrix::symmetrize(model.b() * model.b().transpose());
    let p_cov = lyap_dt(model.a(), &bb)?;

    let root = match rootq_principal(model.a(), q as u32) {
        Ok(r) => r,
        Err(MatError::SpectrumOnBranchCut { .. }) | Err(MatError::Singular) => {
            return Ok(LiftReport::infeasible(FailedCondition::NoRoot, None));
        }
        Err(e) => return Err(e.into()),
    };

    let shrink = p_cov.as_matrix() - &root * p_cov.as_matrix() * root.transpose();
    let feedthrough_free = model.is_feedthrough_zero();

    let tested = if feedthrough_free {
        SymMatrix::symmetrize(shrink)
    } else {
        let a_inv = model
            .a()
            .clone()
            .lu()
            .try_inverse()
            .ok_or(ResampleError::Mat(MatError::Singular))?;
        let cross = &root * a_inv * model.b() * model.d().transpose();
        let mut block = Matrix::zeros(n + p, n + p);
        block.view_mut((0, 0), (n, n)).copy_from(&shrink);
        block.view_mut((0, n), (n, p)).copy_from(&cross);
        block.view_mut((n, 0), (p, n)).copy_from(&cross.transpose());
        block.view_mut((n, n), (p, p)).copy_from(&(model.d() * model.d().transpose()));
        SymMatrix::symmetrize(block)
    };

    let eigenvalues = tested.eigenvalues_desc();
    let verdict = psd_check(&tested, opts.psd_tol);
    if !verdict.is_psd {
        let certificate = Certificate { p: p_cov, tested, eigenvalues, rank: None };
        return Ok(LiftReport::infeasible(FailedCondition::PsdFail, Some(certificate)));
    }
    let factor = psd_rank_factor(&tested, opts.rank_tol)?;
    let rank = factor.rank;

    let (gain, feedthrough) = if feedthrough_free {
        (factor.factor, Matrix::zeros(p, rank))
    } else {
        let gain = factor.factor.view((0, 0), (n, rank)).into_owned();
        let feed = factor.factor.view((n, 0), (p, rank)).into_owned();
        (gain, feed)
    };
    let fine = DtModel::new(root, gain, model.c().clone(), feedthrough, model.step() / q as f64)?;
    let certificate = Certificate { p: p_cov, tested, eigenvalues, rank: Some(rank) };
    Ok(LiftReport::feasible(LiftedModel::Dt(fine), certificate))
}

/// Tests whether the output of a general discrete model (nonzero
/// feedthrough allowed) is the sampled output of a continuous model at
/// period `h`, and reconstructs that model when it is.
///
/// First requires the density to vanish at `z = 0`; then replaces the model
/// by its minimum-phase factor, shifts to the sampled-form state
/// `x_k = A^{-1} xi_{k+1}` whose covariance is
/// `P_hat = A^{-1} P_- A^{-T}`, and applies the continuous lifting
/// machinery to `P_hat`.
pub fn lift_general(model: &DtModel, h: f64) -> Result<LiftReport, ResampleError> {
    lift_general_with(model, h, &LiftOptions::default())
}

pub fn lift_general_with(
    model: &DtModel,
    h: f64,
    opts: &LiftOptions,
) -> Result<LiftReport, ResampleError> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(ResampleError::Mat(MatError::InvalidArgument(
            "sampling period h must be positive and finite".into(),
        )));
    }
    let psi0 = match spectrum_dt_at_zero(model) {
        Ok(m) => m,
        // A singular also means no logarithm can exist.
        Err(ModelError::SingularAtZero) => {
            return Ok(LiftReport::infeasible(FailedCondition::NoLogarithm, None));
        }
        Err(e) => return Err(e.into()),
    };
    let density_scale = unit_circle_density_scale(model, 16);
    let psi0_norm = psi0.clone().singular_values().max();
    if psi0_norm > matfun::tol::TAU_FUN * density_scale.max(f64::MIN_POSITIVE) {
        return Ok(LiftReport::infeasible(FailedCondition::PsiZeroFail, None));
    }

    let mp = minphase_with(model, opts)?;

    // The zero of the minimum-phase factor at z = 0: D- = C A^{-1} B-.
    let a_inv = model
        .a()
        .clone()
        .lu()
        .try_inverse()
        .ok_or(ResampleError::Mat(MatError::Singular))?;
    let w0_gap = (&mp.d_minus - model.c() * &a_inv * &mp.b_minus).amax();
    if w0_gap > 1e-6 * mp.d_minus.amax().max(f64::MIN_POSITIVE) {
        return Ok(LiftReport::infeasible(FailedCondition::PsiZeroFail, None));
    }

    if numerical_rank(&mp.b_minus, opts.rank_tol) < model.n() {
        return Ok(LiftReport::infeasible(FailedCondition::BbSingular, None));
    }

    let p_hat =
        SymMatrix::symmetrize(&a_inv * mp.p_minus.as_matrix() * a_inv.transpose());

    let log_a = match logm_principal(model.a()) {
        Ok(l) => l,
        Err(MatError::SpectrumOnBranchCut { .. }) | Err(MatError::Singular) => {
            return Ok(LiftReport::infeasible(FailedCondition::NoLogarithm, None));
        }
        Err(e) => return Err(e.into()),
    };
    let f = log_a / h;

    finish_ct_lift(f, p_hat, model.c().clone(), opts)
}

/// Largest spectral norm of the density on a coarse unit-circle grid; used
/// to scale the `Psi(0) = 0` test.
fn unit_circle_density_scale(model: &DtModel, points: usize) -> f64 {
    let thetas: Vec<f64> =
        (0..points).map(|k| std::f64::consts::PI * (2 * k + 1) as f64 / (2 * points) as f64).collect();
    spectrum_dt(model, &thetas)
        .iter()
        .map(|s| s.density.clone().singular_values().max())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_dt;
    use crate::presets;

    fn scalar_ct() -> CtModel {
        CtModel::new(
            Matrix::from_element(1, 1, -1.0),
            Matrix::from_element(1, 1, 1.0),
            Matrix::from_element(1, 1, 1.0),
        )
        .unwrap()
    }

    #[test]
    fn scalar_sampling_closed_form() {
        let dt = sample_ct(&scalar_ct(), 2f64.ln()).unwrap();
        assert!((dt.a()[(0, 0)] - 0.5).abs() < 1e-14);
        assert!((dt.b()[(0, 0)] - 0.375f64.sqrt()).abs() < 1e-14);
        assert_eq!(dt.c()[(0, 0)], 1.0);
        assert_eq!(dt.d()[(0, 0)], 0.0);
        assert_eq!(dt.step(), 2f64.ln());
    }

    #[test]
    fn sampled_model_is_schur_stable() {
        let dt = sample_ct(&presets::companion_ct(), 1.0).unwrap();
        assert!(validate_dt(&dt).is_empty());
    }

    #[test]
    fn scalar_lift_inverts_sampling() {
        let h = 2f64.ln();
        let dt = sample_ct(&scalar_ct(), h).unwrap();
        let report = lift_to_ct(&dt, h).unwrap();
        assert!(report.feasible);
        let Some(LiftedModel::Ct(ct)) = report.lifted else { panic!("expected ct model") };
        assert!((ct.f()[(0, 0)] + 1.0).abs() < 1e-12);
        assert!((ct.g()[(0, 0)] - 1.0).abs() < 1e-12);
        assert_eq!(ct.h()[(0, 0)], 1.0);
        assert_eq!(report.certificate.unwrap().rank, Some(1));
    }

    #[test]
    fn benchmark_roundtrip_recovers_model() {
        let ct = presets::companion_ct();
        let h = 0.25;
        let dt = sample_ct(&ct, h).unwrap();
        let report = lift_to_ct(&dt, h).unwrap();
        assert!(report.feasible);
        let Some(LiftedModel::Ct(rec)) = report.lifted else { panic!("expected ct model") };
        assert!((rec.f() - ct.f()).amax() < 1e-8, "F diff {}", (rec.f() - ct.f()).amax());
        let gg = ct.g() * ct.g().transpose();
        let gg_rec = rec.g() * rec.g().transpose();
        assert!((&gg_rec - &gg).amax() < 1e-8, "GG' diff {}", (&gg_rec - &gg).amax());
        assert_eq!(rec.h(), ct.h());
        assert_eq!(report.certificate.unwrap().rank, Some(2));
    }

    #[test]
    fn negative_eigenvalue_has_no_logarithm() {
        let dt = DtModel::new(
            Matrix::from_element(1, 1, -0.5),
            Matrix::from_element(1, 1, 1.0),
            Matrix::from_element(1, 1, 1.0),
            Matrix::from_element(1, 1, 0.0),
            1.0,
        )
        .unwrap();
        let report = lift_to_ct(&dt, 1.0).unwrap();
        assert!(!report.feasible);
        assert_eq!(report.failed_condition, Some(FailedCondition::NoLogarithm));
        assert!(report.lifted.is_none());
    }

    #[test]
    fn nonzero_feedthrough_is_a_contract_error() {
        let dt = DtModel::new(
            Matrix::from_element(1, 1, 0.5),
            Matrix::from_element(1, 1, 1.0),
            Matrix::from_element(1, 1, 1.0),
            Matrix::from_element(1, 1, 0.5),
            1.0,
        )
        .unwrap();
        assert!(matches!(lift_to_ct(&dt, 1.0), Err(ResampleError::FeedthroughNotZero)));
    }

    #[test]
    fn subsample_by_one_is_identity() {
        let fine = presets::companion_fine_dt();
        let same = subsample(&fine, 1).unwrap();
        assert_eq!(same.a(), fine.a());
        assert_eq!(same.b(), fine.b());
        assert_eq!(same.c(), fine.c());
        assert_eq!(same.d(), fine.d());
        assert_eq!(same.step(), fine.step());
    }

    #[test]
    fn subsample_zero_rejected() {
        assert!(matches!(subsample(&presets::companion_fine_dt(), 0), Err(ResampleError::InvalidFactor)));
    }

    #[test]
    fn scalar_subsample_accumulates_noise() {
        let fine = DtModel::new(
            Matrix::from_element(1, 1, 0.5),
            Matrix::from_element(1, 1, 1.0),
            Matrix::from_element(1, 1, 1.0),
            Matrix::from_element(1, 1, 0.0),
            1.0,
        )
        .unwrap();
        let coarse = subsample(&fine, 2).unwrap();
        assert!((coarse.a()[(0, 0)] - 0.25).abs() < 1e-15);
        let bb = coarse.b() * coarse.b().transpose();
        assert!((bb[(0, 0)] - 1.25).abs() < 1e-15);
        assert_eq!(coarse.step(), 2.0);
    }

    #[test]
    fn subsample_noise_sum_identity() {
        let fine = presets::companion_fine_dt();
        let q = 5;
        let coarse = subsample(&fine, q).unwrap();
        // BB' = sum_k F^k G G' (F^k)'.
        let mut expected = Matrix::zeros(4, 4);
        let mut power = Matrix::identity(4, 4);
        let gg = fine.b() * fine.b().transpose();
        for _ in 0..q {
            expected += &power * &gg * power.transpose();
            power = fine.a() * power;
        }
        let bb = coarse.b() * coarse.b().transpose();
        assert!((&bb - &expected).amax() < 1e-12);
        assert_eq!(coarse.a(), &power);
    }

    #[test]
    fn scalar_lift_q_arithmetic() {
        let coarse = DtModel::new(
            Matrix::from_element(1, 1, 0.25),
            Matrix::from_element(1, 1, 1.25f64.sqrt()),
            Matrix::from_element(1, 1, 1.0),
            Matrix::from_element(1, 1, 0.0),
            2.0,
        )
        .unwrap();
        let report = lift_q(&coarse, 2).unwrap();
        assert!(report.feasible);
        let Some(LiftedModel::Dt(fine)) = report.lifted else { panic!("expected dt model") };
        assert!((fine.a()[(0, 0)] - 0.5).abs() < 1e-12);
        let gg = fine.b() * fine.b().transpose();
        assert!((gg[(0, 0)] - 1.0).abs() < 1e-12);
        assert_eq!(fine.step(), 1.0);
    }

    #[test]
    fn benchmark_lift_q_five_recovers_fine_model() {
        let fine = presets::companion_fine_dt();
        let coarse = presets::companion_coarse_dt();
        let report = lift_q(&coarse, 5).unwrap();
        assert!(report.feasible);
        let cert = report.certificate.as_ref().unwrap();
        assert_eq!(cert.rank, Some(2));
        let Some(LiftedModel::Dt(rec)) = report.lifted else { panic!("expected dt model") };
        assert!((rec.a() - fine.a()).amax() < 1e-8, "F diff {}", (rec.a() - fine.a()).amax());
        let gg = fine.b() * fine.b().transpose();
        let gg_rec = rec.b() * rec.b().transpose();
        assert!((&gg_rec - &gg).amax() < 1e-8);
        assert_eq!(rec.step(), 0.5);
    }

    #[test]
    fn benchmark_lift_q_six_fails_psd() {
        let coarse = presets::companion_coarse_dt();
        let report = lift_q(&coarse, 6).unwrap();
        assert!(!report.feasible);
        assert_eq!(report.failed_condition, Some(FailedCondition::PsdFail));
        let cert = report.certificate.expect("certificate present for PSD failures");
        assert!(cert.eigenvalues.last().unwrap() < &0.0);
    }

    #[test]
    fn lift_q_with_feedthrough_recovers_cross_terms() {
        // Fine model with J != 0; subsample by 3 and lift back.
        let a = Matrix::from_row_slice(2, 2, &[0.6, 0.1, -0.1, 0.4]);
        let g = Matrix::from_row_slice(2, 1, &[1.0, 0.5]);
        let h = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]);
        let j = Matrix::from_row_slice(2, 1, &[0.3, -0.2]);
        let fine = DtModel::new(a, g, h, j, 1.0).unwrap();
        let coarse = subsample(&fine, 3).unwrap();
        let report = lift_q(&coarse, 3).unwrap();
        assert!(report.feasible, "failed: {:?}", report.failed_condition);
        let Some(LiftedModel::Dt(rec)) = report.lifted else { panic!("expected dt model") };
        assert!((rec.a() - fine.a()).amax() < 1e-10);
        let close = |x: &Matrix, y: &Matrix| (x - y).amax() < 1e-10;
        assert!(close(&(rec.b() * rec.b().transpose()), &(fine.b() * fine.b().transpose())));
        assert!(close(&(rec.d() * rec.d().transpose()), &(fine.d() * fine.d().transpose())));
        assert!(close(&(rec.b() * rec.d().transpose()), &(fine.b() * fine.d().transpose())));
    }

    #[test]
    fn sampled_density_vanishes_at_zero() {
        let dt = sample_ct(&presets::companion_ct(), 1.0).unwrap();
        let psi0 = spectrum_dt_at_zero(&dt).unwrap();
        assert!(psi0.amax() < 1e-12);
    }

    #[test]
    fn lift_general_rejects_nonvanishing_density_at_zero() {
        // D = I, B = 0: Psi(0) = I.
        let dt = DtModel::new(
            Matrix::from_element(1, 1, 0.5),
            Matrix::from_element(1, 1, 0.0),
            Matrix::from_element(1, 1, 1.0),
            Matrix::from_element(1, 1, 1.0),
            1.0,
        )
        .unwrap();
        let report = lift_general(&dt, 1.0).unwrap();
        assert!(!report.feasible);
        assert_eq!(report.failed_condition, Some(FailedCondition::PsiZeroFail));
    }

    #[test]
    fn lift_general_inverts_the_shift_construction() {
        // Sample a scalar model, then present it in shifted form
        // (A, A B, C, C B), which has nonzero feedthrough but the same
        // output statistics.
        let h = 2f64.ln();
        let dt = sample_ct(&scalar_ct(), h).unwrap();
        let shifted = DtModel::new(
            dt.a().clone(),
            dt.a() * dt.b(),
            dt.c().clone(),
            dt.c() * dt.b(),
            h,
        )
        .unwrap();
        let report = lift_general(&shifted, h).unwrap();
        assert!(report.feasible, "failed: {:?}", report.failed_condition);
        let Some(LiftedModel::Ct(ct)) = report.lifted else { panic!("expected ct model") };
        assert!((ct.f()[(0, 0)] + 1.0).abs() < 1e-10);
        assert!((ct.g()[(0, 0)] - 1.0).abs() < 1e-10);
    }
}

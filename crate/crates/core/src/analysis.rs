//! Experiment drivers: eigenvalue sweeps over the sampling period and the
//! subsampling factor, the finest-feasible-time-scale search, relation
//! counting, and a seeded trajectory simulator.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::matfun::{self, lyap_dt, noise_gramian, numerical_rank, Matrix, SymMatrix};
use crate::model::{CtModel, DtModel};
use crate::resample::{
    lift_q_with, lift_to_ct_with, lift_general_with, FailedCondition, LiftOptions, LiftReport,
    LiftedModel, ResampleError,
};

/// Which quantity a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    SamplePeriod,
    SubsampleFactor,
}

/// One sweep row: the axis value, the certificate eigenvalues sorted
/// descending, and the feasibility verdict at that value.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: f64,
    /// Empty when the test matrix was never formed (no q-th root).
    pub eigenvalues: Vec<f64>,
    pub feasible: bool,
}

/// Eigenvalue table backing the sweep plots; points sorted by axis value.
#[derive(Debug, Clone)]
pub struct SweepTable {
    pub axis: SweepAxis,
    pub points: Vec<SweepPoint>,
}

/// For each period `h`, the eigenvalues of the one-interval noise Gramian
/// `Q(h)` (equal to `P - e^{Fh} P e^{F'h}` with `P` the stationary
/// covariance). The forward direction always exists, so every point is
/// feasible.
pub fn sweep_h(model: &CtModel, periods: &[f64]) -> Result<SweepTable, ResampleError> {
    let mut points = Vec::with_capacity(periods.len());
    for &h in periods {
        let q = noise_gramian(model.f(), model.g(), h)?;
        points.push(SweepPoint { value: h, eigenvalues: q.eigenvalues_desc(), feasible: true });
    }
    sort_points(&mut points);
    Ok(SweepTable { axis: SweepAxis::SamplePeriod, points })
}

/// For each factor `q`, the eigenvalues of the lifting test matrix
/// (`P - A^{1/q} P (A^{1/q})'`, or its block extension when the model has
/// feedthrough) together with the lifting verdict. Rows without a q-th
/// root are infeasible with no eigenvalues.
pub fn sweep_q(model: &DtModel, qs: &[usize]) -> Result<SweepTable, ResampleError> {
    sweep_q_with(model, qs, &LiftOptions::default())
}

pub fn sweep_q_with(
    model: &DtModel,
    qs: &[usize],
    opts: &LiftOptions,
) -> Result<SweepTable, ResampleError> {
    let mut points = Vec::with_capacity(qs.len());
    for &q in qs {
        let report = lift_q_with(model, q, opts)?;
        let eigenvalues = report.certificate.map(|c| c.eigenvalues).unwrap_or_default();
        points.push(SweepPoint { value: q as f64, eigenvalues, feasible: report.feasible });
    }
    sort_points(&mut points);
    Ok(SweepTable { axis: SweepAxis::SubsampleFactor, points })
}

fn sort_points(points: &mut [SweepPoint]) {
    points.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap());
}

/// Compact lifting verdict kept per tested factor.
#[derive(Debug, Clone)]
pub struct LiftSummary {
    pub feasible: bool,
    pub failed_condition: Option<FailedCondition>,
    /// Recovered noise rank, when the lift succeeded.
    pub rank: Option<usize>,
}

impl From<&LiftReport> for LiftSummary {
    fn from(report: &LiftReport) -> Self {
        LiftSummary {
            feasible: report.feasible,
            failed_condition: report.failed_condition,
            rank: report.certificate.as_ref().and_then(|c| c.rank),
        }
    }
}

/// Outcome of the finest-time-scale search.
#[derive(Debug, Clone)]
pub struct FinestScaleResult {
    /// Largest tested factor with a feasible lifting (1 at worst).
    pub q_star: usize,
    /// Verdict for every tested factor.
    pub verdicts: BTreeMap<usize, LiftSummary>,
    /// The lifted model at `q_star`.
    pub fine_model: LiftedModel,
    /// Verdict of the continuous lifting, when one was requested.
    pub continuous: Option<LiftReport>,
}

/// Tries `lift_q` for every `q = 1..=q_max` and reports the largest feasible
/// factor together with the model lifted there. Since feasibility is not
/// known to be monotone in `q`, every factor is tested rather than stopping
/// at the first failure.
///
/// With `h_per_step = Some(h)` a continuous lifting is attempted as well
/// (the sampled-form one when the model has zero feedthrough, the general
/// one otherwise) and reported alongside.
pub fn finest_scale(
    model: &DtModel,
    q_max: usize,
    h_per_step: Option<f64>,
) -> Result<FinestScaleResult, ResampleError> {
    finest_scale_with(model, q_max, h_per_step, &LiftOptions::default())
}

pub fn finest_scale_with(
    model: &DtModel,
    q_max: usize,
    h_per_step: Option<f64>,
    opts: &LiftOptions,
) -> Result<FinestScaleResult, ResampleError> {
    if q_max == 0 {
        return Err(ResampleError::InvalidFactor);
    }
    let mut verdicts = BTreeMap::new();
    let mut best: Option<(usize, LiftReport)> = None;
    for q in 1..=q_max {
        let report = lift_q_with(model, q, opts)?;
        verdicts.insert(q, LiftSummary::from(&report));
        if report.feasible {
            best = Some((q, report));
        }
    }
    let (q_star, best_report) =
        best.expect("q = 1 lifting of a Schur-stable model is always feasible");
    let fine_model = best_report.lifted.expect("feasible report carries the lifted model");

    let continuous = match h_per_step {
        Some(h) => Some(if model.is_feedthrough_zero() {
            lift_to_ct_with(model, h, opts)?
        } else {
            lift_general_with(model, h, opts)?
        }),
        None => None,
    };

    Ok(FinestScaleResult { q_star, verdicts, fine_model, continuous })
}

/// Number of deterministic relations of a continuous model:
/// `p - rank(G)`.
pub fn relation_count_ct(model: &CtModel) -> usize {
    model.p() - numerical_rank(model.g(), matfun::tol::RANK_TOL)
}

/// Number of deterministic relations of a fine-scale discrete model:
/// `p - rank([G; J])`.
pub fn relation_count_dt(model: &DtModel) -> usize {
    let mut stacked = Matrix::zeros(model.n() + model.p(), model.r());
    stacked.view_mut((0, 0), (model.n(), model.r())).copy_from(model.b());
    stacked.view_mut((model.n(), 0), (model.p(), model.r())).copy_from(model.d());
    model.p() - numerical_rank(&stacked, matfun::tol::RANK_TOL)
}

/// Relation count of either kind of lifted model.
pub fn relation_count(model: &LiftedModel) -> usize {
    match model {
        LiftedModel::Ct(ct) => relation_count_ct(ct),
        LiftedModel::Dt(dt) => relation_count_dt(dt),
    }
}

/// Simulates `steps` outputs of a discrete model driven by standard normal
/// noise, one output row per step.
///
/// The generator is ChaCha12 seeded with `seed`, so trajectories are
/// reproducible bit-for-bit across platforms. The initial state is drawn
/// from the stationary distribution via the PSD square root of the state
/// covariance; the model must therefore be Schur-stable.
pub fn simulate_dt(model: &DtModel, steps: usize, seed: u64) -> Matrix {
    let (n, r, p) = (model.n(), model.r(), model.p());
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let normal = StandardNormal;

    let bb = SymMatrix::symmetrize(model.b() * model.b().transpose());
    let p_cov = lyap_dt(model.a(), &bb).expect("simulation needs a Schur-stable model");
    let sqrt_cov = p_cov.sqrt_psd();

    let z = nalgebra::DVector::from_fn(n, |_, _| normal.sample(&mut rng));
    let mut state = &sqrt_cov * z;

    let mut out = Matrix::zeros(steps, p);
    for k in 0..steps {
        let noise = nalgebra::DVector::from_fn(r, |_, _| normal.sample(&mut rng));
        let output = model.c() * &state + model.d() * &noise;
        out.row_mut(k).copy_from(&output.transpose());
        state = model.a() * state + model.b() * noise;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matfun::expm;
    use crate::presets;
    use crate::resample::subsample;

    #[test]
    fn sweep_h_dominant_pair_emerges() {
        let model = presets::companion_ct();
        let periods: Vec<f64> = (0..8).map(|k| 2f64.powi(-k)).collect();
        let table = sweep_h(&model, &periods).unwrap();
        assert_eq!(table.points.len(), 8);
        assert!(table.points.windows(2).all(|w| w[0].value < w[1].value));
        for point in &table.points {
            assert_eq!(point.eigenvalues.len(), 4);
            assert!(point.feasible);
        }
        // The bottom two eigenvalues shrink relative to the top two as h
        // decreases; at the finest period the split is three decades.
        let ratio = |p: &SweepPoint| p.eigenvalues[2] / p.eigenvalues[0];
        let finest = &table.points[0];
        assert!((finest.value - 2f64.powi(-7)).abs() < 1e-15);
        assert!(ratio(finest) < 1e-3, "ratio {}", ratio(finest));
        for w in table.points.windows(2) {
            assert!(ratio(&w[0]) < ratio(&w[1]));
        }
        // In the h -> 0 limit the dominant pair approaches the nonzero
        // eigenvalues {6, 2} of GG', whose ratio is 3.
        let top_ratio = finest.eigenvalues[0] / finest.eigenvalues[1];
        assert!((top_ratio - 3.0).abs() < 0.09, "top ratio {top_ratio}");
    }

    #[test]
    fn sweep_h_matches_covariance_route() {
        // Q(h) = P - e^{Fh} P e^{F'h}: the two computation routes agree.
        let model = presets::companion_ct();
        let gg = SymMatrix::symmetrize(model.g() * model.g().transpose());
        let p = crate::matfun::lyap_ct(model.f(), &gg).unwrap();
        let table = sweep_h(&model, &[0.25, 1.0]).unwrap();
        for point in &table.points {
            let a = expm(model.f(), point.value).unwrap();
            let shrink =
                SymMatrix::symmetrize(p.as_matrix() - &a * p.as_matrix() * a.transpose());
            let eigs = shrink.eigenvalues_desc();
            for (x, y) in point.eigenvalues.iter().zip(eigs.iter()) {
                assert!((x - y).abs() < 1e-9 * eigs[0].abs(), "h={}", point.value);
            }
        }
    }

    #[test]
    fn sweep_q_feasibility_boundary() {
        let coarse = presets::companion_coarse_dt();
        let qs: Vec<usize> = (1..=8).collect();
        let table = sweep_q(&coarse, &qs).unwrap();
        for point in &table.points {
            let q = point.value as usize;
            assert_eq!(point.feasible, q <= 5, "q={q}");
            assert_eq!(point.eigenvalues.len(), 4);
        }
        // q = 1 row shows the eigenvalues of BB'.
        let bb = SymMatrix::symmetrize(coarse.b() * coarse.b().transpose());
        let expected = bb.eigenvalues_desc();
        for (x, y) in table.points[0].eigenvalues.iter().zip(expected.iter()) {
            assert!((x - y).abs() < 1e-9 * expected[0]);
        }
        // At q = 5 the bottom two eigenvalues are numerically zero.
        let at5 = &table.points[4];
        assert!(at5.eigenvalues[1] > 1e-3);
        assert!(at5.eigenvalues[2].abs() < 1e-8 * at5.eigenvalues[0]);
        assert!(at5.eigenvalues[3].abs() < 1e-8 * at5.eigenvalues[0]);
    }

    #[test]
    fn finest_scale_on_benchmark() {
        let coarse = presets::companion_coarse_dt();
        let result = finest_scale(&coarse, 8, None).unwrap();
        assert_eq!(result.q_star, 5);
        assert_eq!(result.verdicts.len(), 8);
        assert!(result.verdicts[&3].feasible);
        assert!(!result.verdicts[&7].feasible);
        let LiftedModel::Dt(fine) = &result.fine_model else { panic!("expected dt model") };
        let expected = presets::companion_fine_dt();
        assert!((fine.a() - expected.a()).amax() < 1e-8);
        assert_eq!(relation_count(&result.fine_model), 8);
    }

    #[test]
    fn finest_scale_trivial_qmax() {
        let coarse = presets::companion_coarse_dt();
        let result = finest_scale(&coarse, 1, None).unwrap();
        assert_eq!(result.q_star, 1);
        let LiftedModel::Dt(fine) = &result.fine_model else { panic!("expected dt model") };
        assert_eq!(fine.a(), coarse.a());
        assert_eq!(fine.step(), coarse.step());
    }

    #[test]
    fn finest_scale_reports_continuous_lift() {
        let ct = presets::companion_ct();
        let dt = crate::resample::sample_ct(&ct, 0.5).unwrap();
        let result = finest_scale(&dt, 2, Some(dt.step())).unwrap();
        let continuous = result.continuous.expect("continuous lift requested");
        assert!(continuous.feasible);
        let Some(LiftedModel::Ct(rec)) = continuous.lifted else { panic!("expected ct") };
        assert!((rec.f() - ct.f()).amax() < 1e-8);
    }

    #[test]
    fn finest_scale_recovers_generating_factor() {
        // Lifting finds at least the scale a model was generated from.
        let fine = presets::companion_fine_dt();
        for q in [2usize, 3] {
            let coarse = subsample(&fine, q).unwrap();
            let result = finest_scale(&coarse, q + 2, None).unwrap();
            assert!(result.q_star >= q, "q={q} gave q*={}", result.q_star);
        }
    }

    #[test]
    fn relation_counts() {
        assert_eq!(relation_count_ct(&presets::companion_ct()), 8);
        assert_eq!(relation_count_dt(&presets::companion_fine_dt()), 8);
        let square = CtModel::new(
            Matrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -2.0]),
            Matrix::identity(2, 2),
            Matrix::identity(2, 2),
        )
        .unwrap();
        assert_eq!(relation_count_ct(&square), 0);
    }

    #[test]
    fn simulation_is_deterministic_and_shaped() {
        let dt = crate::resample::sample_ct(&presets::companion_ct(), 0.5).unwrap();
        let a = simulate_dt(&dt, 16, 7);
        let b = simulate_dt(&dt, 16, 7);
        assert_eq!(a, b);
        assert_eq!(a.nrows(), 16);
        assert_eq!(a.ncols(), 10);
        let c = simulate_dt(&dt, 16, 8);
        assert!((&a - &c).amax() > 0.0);
    }

    #[test]
    fn simulation_empty_and_noiseless_cases() {
        let dt = crate::resample::sample_ct(&presets::companion_ct(), 0.5).unwrap();
        let empty = simulate_dt(&dt, 0, 1);
        assert_eq!(empty.nrows(), 0);

        let silent = DtModel::new(
            Matrix::from_element(1, 1, 0.5),
            Matrix::from_element(1, 1, 0.0),
            Matrix::from_element(1, 1, 1.0),
            Matrix::from_element(1, 1, 0.0),
            1.0,
        )
        .unwrap();
        let traj = simulate_dt(&silent, 32, 3);
        assert_eq!(traj.amax(), 0.0);
    }

    #[test]
    fn simulation_matches_output_covariance() {
        // Law of large numbers at 10^6 steps: the sample covariance matches
        // C P C' + D D' within 5% relative in norm.
        let model = DtModel::new(
            Matrix::from_row_slice(2, 2, &[0.6, 0.2, -0.1, 0.5]),
            Matrix::from_row_slice(2, 1, &[1.0, 0.4]),
            Matrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]),
            Matrix::from_row_slice(2, 1, &[0.2, -0.3]),
            1.0,
        )
        .unwrap();
        let steps = 1_000_000;
        let traj = simulate_dt(&model, steps, 42);
        let mut sample_cov = Matrix::zeros(2, 2);
        for k in 0..steps {
            let row = traj.row(k);
            sample_cov += row.transpose() * row;
        }
        sample_cov /= steps as f64;

        let bb = SymMatrix::symmetrize(model.b() * model.b().transpose());
        let p_cov = lyap_dt(model.a(), &bb).unwrap();
        let expected = model.c() * p_cov.as_matrix() * model.c().transpose()
            + model.d() * model.d().transpose();
        let rel = (&sample_cov - &expected).amax() / expected.amax();
        assert!(rel < 0.05, "relative covariance error {rel}");
    }
}

//! Built-in benchmark models used by the test suite and the CLI fixtures.
//!
//! The continuous benchmark is a 4-state companion-form system driven by two
//! strongly correlated noise channels and observed through a 10-row banded
//! Toeplitz output map, so its 10x10 spectral density has rank 2 and hides
//! 8 deterministic relations. The discrete pair reads the same dynamics at
//! step 0.5 and subsamples it 5-fold.

use crate::matfun::{expm, Matrix};
use crate::model::{CtModel, DtModel};
use crate::resample::subsample;

/// Companion-form state matrix with characteristic polynomial
/// `s^4 + 4 s^3 + 6 s^2 + 5 s + 2` (stable) and its noise/output maps.
pub fn companion_ct() -> CtModel {
    let f = Matrix::from_row_slice(
        4,
        4,
        &[
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            -2.0, -5.0, -6.0, -4.0,
        ],
    );
    let g = Matrix::from_row_slice(4, 2, &[1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, 1.0]);
    CtModel::new(f, g, banded_output_map(10, 4)).expect("benchmark model shapes are consistent")
}

/// Toeplitz output map with entries `|row - col| + 1` (both 1-based).
pub fn banded_output_map(rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |i, j| (i as f64 - j as f64).abs() + 1.0)
}

/// Fine-scale discrete benchmark: the companion dynamics advanced by
/// `exp(F * 0.5)` per step, with the continuous noise gain reused directly
/// as the discrete one and no feedthrough.
pub fn companion_fine_dt() -> DtModel {
    let ct = companion_ct();
    let step = 0.5;
    let a = expm(ct.f(), step).expect("benchmark state matrix is well formed");
    let p = ct.p();
    let m = ct.m();
    DtModel::new(a, ct.g().clone(), ct.h().clone(), Matrix::zeros(p, m), step)
        .expect("benchmark model shapes are consistent")
}

/// The fine benchmark read every 5 steps (step length 2.5).
pub fn companion_coarse_dt() -> DtModel {
    subsample(&companion_fine_dt(), 5).expect("subsample factor is positive")
}

/// Logarithmically spaced grid from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let ratio = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|k| lo * (ratio * k as f64).exp()).collect()
}

//! Domain types for continuous- and discrete-time stochastic models and
//! their structural validation.
//!
//! A continuous model is the triple `(F, G, H)` of
//!
//! ```text
//!     dx = F x dt + G dw,      zeta = H x,
//! ```
//!
//! a discrete model the quadruple `(A, B, C, D)` with a step length in time
//! units per index:
//!
//! ```text
//!     x_{k+1} = A x_k + B v_k,   zeta_k = C x_k + D v_k.
//! ```
//!
//! The same [`DtModel`] shape also serves as the fine-scale discrete model
//! `(F, G, H, J)` consumed by [`crate::resample::subsample`]; only the role
//! of the fields changes. Constructors check shapes and finiteness; the
//! structural properties (stability, controllability, observability, rank
//! conditions) are reported as data by [`validate_ct`] / [`validate_dt`] so
//! callers can decide what is fatal.

mod relations;
mod spectrum;

pub use relations::{decompose_relations, kernel_residual, Realization, RelationDecomposition};
pub use spectrum::{spectrum_ct, spectrum_dt, spectrum_dt_at_zero, SpectrumSample};

use num_complex::Complex64;
use thiserror::Error;

use crate::matfun::{self, Matrix};

#[derive(Debug, Clone, Error)]
pub enum ModelError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("model matrices must have finite entries")]
    NonFinite,
    #[error("step length must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("no row subset of H makes H0*G invertible (rank(HG) = {rank}, need {need})")]
    NoInvertiblePartition { rank: usize, need: usize },
    #[error("row order hint is not a permutation of 0..{0}")]
    InvalidHint(usize),
    #[error("state matrix A is singular; the density is undefined at z = 0")]
    SingularAtZero,
    #[error(transparent)]
    Mat(#[from] matfun::MatError),
}

/// Continuous-time model `(F, G, H)`: `n` states, `m` noise channels,
/// `p` outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct CtModel {
    f: Matrix,
    g: Matrix,
    h: Matrix,
}

impl CtModel {
    pub fn new(f: Matrix, g: Matrix, h: Matrix) -> Result<Self, ModelError> {
        let n = f.nrows();
        if f.ncols() != n {
            return Err(ModelError::Shape(format!("F must be square, got {}x{}", f.nrows(), f.ncols())));
        }
        if g.nrows() != n {
            return Err(ModelError::Shape(format!("G must have {n} rows, got {}", g.nrows())));
        }
        if h.ncols() != n {
            return Err(ModelError::Shape(format!("H must have {n} columns, got {}", h.ncols())));
        }
        if g.ncols() == 0 || h.nrows() == 0 {
            return Err(ModelError::Shape("G needs at least one column and H at least one row".into()));
        }
        if [&f, &g, &h].iter().any(|m| m.iter().any(|v| !v.is_finite())) {
            return Err(ModelError::NonFinite);
        }
        Ok(CtModel { f, g, h })
    }

    pub fn f(&self) -> &Matrix {
        &self.f
    }
    pub fn g(&self) -> &Matrix {
        &self.g
    }
    pub fn h(&self) -> &Matrix {
        &self.h
    }
    /// State dimension.
    pub fn n(&self) -> usize {
        self.f.nrows()
    }
    /// Noise dimension.
    pub fn m(&self) -> usize {
        self.g.ncols()
    }
    /// Output dimension.
    pub fn p(&self) -> usize {
        self.h.nrows()
    }
}

/// Discrete-time model `(A, B, C, D)` with step length metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct DtModel {
    a: Matrix,
    b: Matrix,
    c: Matrix,
    d: Matrix,
    step: f64,
}

impl DtModel {
    pub fn new(a: Matrix, b: Matrix, c: Matrix, d: Matrix, step: f64) -> Result<Self, ModelError> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(ModelError::Shape(format!("A must be square, got {}x{}", a.nrows(), a.ncols())));
        }
        if b.nrows() != n {
            return Err(ModelError::Shape(format!("B must have {n} rows, got {}", b.nrows())));
        }
        if c.ncols() != n {
            return Err(ModelError::Shape(format!("C must have {n} columns, got {}", c.ncols())));
        }
        if d.nrows() != c.nrows() || d.ncols() != b.ncols() {
            return Err(ModelError::Shape(format!(
                "D must be {}x{}, got {}x{}",
                c.nrows(),
                b.ncols(),
                d.nrows(),
                d.ncols()
            )));
        }
        if b.ncols() == 0 || c.nrows() == 0 {
            return Err(ModelError::Shape("B needs at least one column and C at least one row".into()));
        }
        if [&a, &b, &c, &d].iter().any(|m| m.iter().any(|v| !v.is_finite())) {
            return Err(ModelError::NonFinite);
        }
        if !(step > 0.0) || !step.is_finite() {
            return Err(ModelError::InvalidStep(step));
        }
        Ok(DtModel { a, b, c, d, step })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }
    pub fn b(&self) -> &Matrix {
        &self.b
    }
    pub fn c(&self) -> &Matrix {
        &self.c
    }
    pub fn d(&self) -> &Matrix {
        &self.d
    }
    /// Time units per index.
    pub fn step(&self) -> f64 {
        self.step
    }
    pub fn n(&self) -> usize {
        self.a.nrows()
    }
    /// Noise dimension (columns of B and D).
    pub fn r(&self) -> usize {
        self.b.ncols()
    }
    pub fn p(&self) -> usize {
        self.c.nrows()
    }

    /// True when the feedthrough is numerically zero relative to the gain
    /// scale, i.e. the model has the sampled form.
    pub fn is_feedthrough_zero(&self) -> bool {
        let scale = self.b.amax().max(self.c.amax()).max(1e-300);
        self.d.amax() <= 1e-12 * scale
    }
}

/// A structural property a model fails to satisfy. Violations are data, not
/// errors: validation reports all of them at once.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// An eigenvalue of F has nonnegative real part.
    Unstable { eigenvalue: Complex64 },
    /// An eigenvalue of A has modulus >= 1.
    NotSchurStable { eigenvalue: Complex64 },
    NotControllable { rank: usize },
    NotObservable { rank: usize },
    /// Noise gain does not have full column rank.
    NoiseGainRankDeficient { rank: usize },
    /// rank(H G) < m: the noise does not reach the outputs independently.
    NoiseToOutputRankDeficient { rank: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Unstable { eigenvalue } => {
                write!(f, "unstable: eigenvalue {eigenvalue} has nonnegative real part")
            }
            Violation::NotSchurStable { eigenvalue } => {
                write!(f, "not Schur-stable: eigenvalue {eigenvalue} has modulus >= 1")
            }
            Violation::NotControllable { rank } => write!(f, "not controllable (reachability rank {rank})"),
            Violation::NotObservable { rank } => write!(f, "not observable (observability rank {rank})"),
            Violation::NoiseGainRankDeficient { rank } => {
                write!(f, "noise gain not of full column rank (rank {rank})")
            }
            Violation::NoiseToOutputRankDeficient { rank } => {
                write!(f, "H*G rank deficient (rank {rank})")
            }
        }
    }
}

/// Checks stability of F, controllability of (F, G), observability of
/// (F, H), full column rank of G and rank(HG) = m. Returns an empty list
/// iff the model satisfies all of them.
pub fn validate_ct(model: &CtModel) -> Vec<Violation> {
    let mut violations = Vec::new();
    if let Ok(eigs) = crate::matfun::eigenvalues_of(model.f()) {
        if let Some(bad) = eigs.iter().max_by(|a, b| a.re.partial_cmp(&b.re).unwrap()) {
            if bad.re >= 0.0 {
                violations.push(Violation::Unstable { eigenvalue: *bad });
            }
        }
    }
    let n = model.n();
    let m = model.m();
    let ctrb_rank = matfun::numerical_rank(&staircase(model.f(), model.g()), matfun::tol::RANK_TOL);
    if ctrb_rank < n {
        violations.push(Violation::NotControllable { rank: ctrb_rank });
    }
    let obsv_rank = matfun::numerical_rank(
        &staircase(&model.f().transpose(), &model.h().transpose()),
        matfun::tol::RANK_TOL,
    );
    if obsv_rank < n {
        violations.push(Violation::NotObservable { rank: obsv_rank });
    }
    let g_rank = matfun::numerical_rank(model.g(), matfun::tol::RANK_TOL);
    if g_rank < m {
        violations.push(Violation::NoiseGainRankDeficient { rank: g_rank });
    }
    let hg_rank = matfun::numerical_rank(&(model.h() * model.g()), matfun::tol::RANK_TOL);
    if hg_rank < m {
        violations.push(Violation::NoiseToOutputRankDeficient { rank: hg_rank });
    }
    violations
}

/// Checks Schur stability of A, controllability of (A, B) and observability
/// of (A, C).
pub fn validate_dt(model: &DtModel) -> Vec<Violation> {
    let mut violations = Vec::new();
    if let Ok(eigs) = crate::matfun::eigenvalues_of(model.a()) {
        if let Some(bad) = eigs.iter().max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap()) {
            if bad.norm() >= 1.0 {
                violations.push(Violation::NotSchurStable { eigenvalue: *bad });
            }
        }
    }
    let n = model.n();
    let ctrb_rank = matfun::numerical_rank(&staircase(model.a(), model.b()), matfun::tol::RANK_TOL);
    if ctrb_rank < n {
        violations.push(Violation::NotControllable { rank: ctrb_rank });
    }
    let obsv_rank = matfun::numerical_rank(
        &staircase(&model.a().transpose(), &model.c().transpose()),
        matfun::tol::RANK_TOL,
    );
    if obsv_rank < n {
        violations.push(Violation::NotObservable { rank: obsv_rank });
    }
    violations
}

/// Reachability matrix `[G, FG, ..., F^{n-1} G]`.
fn staircase(f: &Matrix, g: &Matrix) -> Matrix {
    let n = f.nrows();
    let m = g.ncols();
    let mut out = Matrix::zeros(n, n * m);
    let mut block = g.clone();
    for k in 0..n {
        out.view_mut((0, k * m), (n, m)).copy_from(&block);
        block = f * block;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn benchmark_model_is_valid() {
        let model = presets::companion_ct();
        assert!(validate_ct(&model).is_empty());
    }

    #[test]
    fn scalar_unstable_flagged() {
        let model = CtModel::new(
            Matrix::from_element(1, 1, 1.0),
            Matrix::from_element(1, 1, 1.0),
            Matrix::from_element(1, 1, 1.0),
        )
        .unwrap();
        let v = validate_ct(&model);
        assert!(matches!(v.as_slice(), [Violation::Unstable { .. }]));
    }

    #[test]
    fn zero_noise_column_flagged() {
        let f = Matrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -2.0]);
        let g = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let h = Matrix::identity(2, 2);
        let model = CtModel::new(f, g, h).unwrap();
        let v = validate_ct(&model);
        assert!(v.iter().any(|x| matches!(x, Violation::NotControllable { .. })));
        assert!(v.iter().any(|x| matches!(x, Violation::NoiseGainRankDeficient { .. })));
    }

    #[test]
    fn constructor_rejects_bad_shapes() {
        assert!(CtModel::new(Matrix::zeros(2, 3), Matrix::zeros(2, 1), Matrix::zeros(1, 2)).is_err());
        assert!(DtModel::new(
            Matrix::zeros(2, 2),
            Matrix::zeros(2, 1),
            Matrix::zeros(1, 2),
            Matrix::zeros(2, 2),
            1.0
        )
        .is_err());
        assert!(DtModel::new(
            Matrix::zeros(2, 2),
            Matrix::zeros(2, 1),
            Matrix::zeros(1, 2),
            Matrix::zeros(1, 1),
            0.0
        )
        .is_err());
    }

    #[test]
    fn feedthrough_zero_detection() {
        let model = DtModel::new(
            Matrix::from_element(1, 1, 0.5),
            Matrix::from_element(1, 1, 1.0),
            Matrix::from_element(1, 1, 1.0),
            Matrix::from_element(1, 1, 0.0),
            1.0,
        )
        .unwrap();
        assert!(model.is_feedthrough_zero());
        let model = DtModel::new(
            Matrix::from_element(1, 1, 0.5),
            Matrix::from_element(1, 1, 1.0),
            Matrix::from_element(1, 1, 1.0),
            Matrix::from_element(1, 1, 0.3),
            1.0,
        )
        .unwrap();
        assert!(!model.is_feedthrough_zero());
    }
}

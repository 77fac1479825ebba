//! Time-scale conversion for linear stochastic state-space models.
//!
//! A stationary vector process observed at a coarse sampling rate generally
//! shows a full-rank spectral density even when the underlying dynamics tie
//! its components together deterministically. This crate converts models
//! between time scales so those hidden relations can be counted and
//! extracted:
//!
//! - [`resample::sample_ct`] turns a continuous-time model `(F, G, H)` into
//!   its sampled discrete-time counterpart `(A, B, C)` at period `h`;
//! - [`resample::subsample`] reads a discrete model every `q` steps;
//! - [`resample::lift_to_ct`], [`resample::lift_q`] and
//!   [`resample::lift_general`] invert those maps when a set of matrix-
//!   logarithm/root and positivity certificates holds, reconstructing the
//!   model at a finer scale;
//! - [`analysis`] drives eigenvalue sweeps over the sampling period or the
//!   subsampling factor and searches for the finest feasible time scale;
//! - [`model::decompose_relations`] extracts the deterministic transfer
//!   function relating the components of a rank-deficient process.
//!
//! [`matfun`] holds the dense matrix-function and Lyapunov machinery the
//! transforms are built on. Everything is plain `f64` dense linear algebra,
//! sized for state dimensions up to a few dozen.

pub mod analysis;
pub mod matfun;
pub mod model;
pub mod presets;
pub mod resample;

pub use matfun::{Matrix, SymMatrix};
pub use model::{CtModel, DtModel};
pub use resample::{LiftReport, LiftedModel};

//! Query-complexity lab for MAJORITY in the XOR decision tree model.
//!
//! The deterministic algorithms live in [`algorithms`], built on the block
//! lists of [`blocks`] (or the size-only engines of [`compact`]). Closed
//! forms are in [`analysis`], exhaustive small-`N` oracles in
//! [`bruteforce`], the quantum compilation in [`quantum`], and the Monte
//! Carlo harness in [`experiments`].

pub mod algorithms;
pub mod analysis;
pub mod blocks;
pub mod bruteforce;
pub mod compact;
pub mod experiments;
pub mod oracle;
pub mod quantum;
pub mod verify;

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive};

pub use algorithms::{default_budget, run, Algorithm, Engine, RunResult, Verdict};
pub use oracle::{BitString, CountingOracle, MajorityLabel, MajorityMode, QueryLedger};

/// Floating-point scalar for the approximate numerics (f32 or f64).
/// Exact quantities use big rationals instead.
pub trait Scalar: Float + FromPrimitive + Debug + Send + Sync + 'static {}

impl<T> Scalar for T where T: Float + FromPrimitive + Debug + Send + Sync + 'static {}

pub type QuantumState64 = quantum::QuantumState<f64>;
pub type QuantumState32 = quantum::QuantumState<f32>;
pub type GadgetOutcome64 = quantum::GadgetOutcome<f64>;

/// Exact rational used for expectations and error probabilities.
pub type Rational = num_rational::BigRational;

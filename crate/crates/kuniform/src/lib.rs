//! Verifier and constructor toolkit for k-uniform multiqubit pure states.
//!
//! An `n`-qubit pure state is *k-uniform* when every reduction to `k` qubits
//! is maximally mixed. This crate checks that property along two independent
//! mathematical routes and provides the combinatorial machinery around it:
//!
//! - [`state`]: sparse pure states with an exact `±1/√r` amplitude mode,
//!   basis-index bit conventions and the plain state file format.
//! - [`sdl`]: a small state-description language for factored tensor-block
//!   expressions, and its expansion into a [`state::PureState`].
//! - [`reduce`]: partial trace onto arbitrary qubit subsets and purity,
//!   with an exact integer-count path for uniform-magnitude states.
//! - [`pauli`]: Pauli-string expectation values, the F-invariants (sums of
//!   squared expectations over a fixed support), and purity reconstruction
//!   from them — the second, independent route to the same purities.
//! - [`uniformity`]: subset sweeps producing machine-readable verdicts, with
//!   both routes cross-checked on every subset.
//! - [`oa`]: binary orthogonal arrays (strength, irredundancy) and the
//!   OA ↔ equal-superposition-state correspondence.
//! - [`search`]: exhaustive and greedy-restart search over ±1 sign vectors
//!   minimizing the total invariant mass.
//! - [`catalog`]: embedded SDL documents for the shipped reference states.
//!
//! With the `parallel` feature (default) the subset sweeps and the sign
//! search fan out via rayon; without it the same code paths run
//! sequentially and produce identical results.

pub mod catalog;
pub mod error;
pub mod oa;
mod par;
pub mod pauli;
pub mod reduce;
pub mod sdl;
pub mod search;
pub mod state;
pub mod uniformity;

pub use error::{Error, Result};
pub use state::{Amplitude, BasisIndex, PureState, QubitSubset};

/// Version stamp written into every JSON report.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

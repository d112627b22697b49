//! Spectral solver and verification harness for damped second-order
//! evolution equations
//!
//!   u_tt + L^theta u_t + L^sigma u = f(u)
//!
//! on a Hilbert space where L has a discrete nonnegative spectrum. The
//! solution is diagonal in the eigenbasis of L, so the solver works on
//! coefficient vectors indexed by eigenvalue slots: closed-form mode
//! propagators (`propagator`), linear and semilinear evolution with norm
//! traces (`evolution`), an optional pointwise grid realization for genuine
//! pointwise nonlinearities (`realization`), and decay-rate estimation with
//! checks of the sharp-rate tables (`analysis`). The `cli` module wires
//! these into the `specdecay` binary.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod evolution;
pub mod propagator;
pub mod realization;
pub mod rng;
pub mod spectrum;
pub mod trace;

pub use error::{ConvergenceReport, Error, Result};

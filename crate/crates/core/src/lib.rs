//! Exact L⁰-module machinery over finite atomic probability spaces and a
//! verifier for the random Simons inequality.
//!
//! The crate is organised bottom-up:
//!
//! * [`l0`]: probability spaces, random variables, essential sup/inf,
//!   essential limsup/liminf, concatenation over partitions, balls of random
//!   radius.
//! * [`minimax`]: L⁰-convex combinations and an exact rational simplex solver
//!   for per-atom game values.
//! * [`instance`]: finite problem instances (base points, payoff
//!   tables, random radius, the selection subset `S`).
//! * [`verifier`]: both sides of the inequality and the constructive proof
//!   trace.
//! * [`oracle`]: brute-force ground truth, independent of the solver code.
//! * [`format`], [`generate`], [`report`]: instance files, seeded instance
//!   generation and machine-readable reports used by the CLI.

pub mod cli;
pub mod error;
pub mod format;
pub mod generate;
pub mod instance;
pub mod l0;
pub mod minimax;
pub mod oracle;
pub mod rational;
pub mod report;
pub mod verifier;

pub use error::{Error, ErrorKind, Result};
pub use rational::Q;

//! Exact and numerical toolkit for q-deformed Fock spaces over `C^d`.
//!
//! * [`combinatorics`]: inversion statistics, shuffles and the classes `S^j_n`.
//! * [`qtensor`]: scalar backends, tensors, `P_q^n`, `R*`, conjugations and pairings.
//! * [`fock`]: the truncated q-Fock space, Wick words and second quantisation.
//! * [`cmapkernel`]: the maps `v_{n,k}`, `w^j_{n,k}`, the cancellation operators
//!   `S_p` and the combinatorial identity `Σ_j α_j w^j_{n,k} = Id`.
//! * [`normlab`]: operator norms in q-metrics, Khintchine and tail estimates.
//! * [`cli`]: batch suites and `qwick-report/1` reports.

pub mod cli;
pub mod cmapkernel;
pub mod combinatorics;
pub mod error;
pub mod fock;
pub mod normlab;
pub mod qtensor;
pub mod sampling;

pub use error::{Error, Result};

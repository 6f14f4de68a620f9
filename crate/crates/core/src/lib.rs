//! Sequential prediction with expert advice under logarithmic loss.
//!
//! The crate implements the Soft-Bayes learner (Prod with linearised
//! log-loss) together with its learning-rate schedules and online
//! correction, the baselines it is measured against (Bayes, exponentiated
//! gradient, projected online gradient descent), regret comparators, the
//! closed-form regret bounds, and deterministic stream generators.
//!
//! Everything here is `no_std` + `alloc`: experts are reduced to the
//! probability `p^i_t` they gave the realized symbol, and every operation is a
//! pure function of owned or borrowed data. IO, file formats, and the CLI live
//! in the companion harness crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod comparators;
pub mod error;
pub mod generators;
pub mod learners;
pub mod lemmas;
pub mod loss;
pub mod math;
pub mod rates;
pub mod simplex;
pub mod stream;
pub mod trace;

pub use error::{Error, Result};
pub use loss::{log_loss, Loss, LossLedger};
pub use simplex::{mixture_prob, project_simplex, SimplexVector, SIMPLEX_TOLERANCE};
pub use stream::{ExpertStream, ReducedRound};

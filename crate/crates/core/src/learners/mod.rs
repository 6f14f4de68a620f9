//! Sequential learners over a stream of expert rounds.
//!
//! Every learner is a state machine with exclusive ownership of its weights:
//! each [`Learner::step`] predicts `M_t` from the current weights, charges the
//! log-loss, and updates. A round whose prediction is zero yields
//! [`Loss::Infinite`] and leaves the weights untouched; the caller decides
//! whether to halt.

mod baselines;
mod meta;
mod multirate;
mod soft_bayes;
mod spec;

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

pub use baselines::{bayes_step, eg_step, ogd_step, Bayes, EgState, ExponentiatedGradient, OnlineGradientDescent};
pub use meta::{default_meta_rates, meta_bayes_step, MetaBayes, MetaStep};
pub use multirate::{ml_prediction, ml_rate_next, ml_soft_bayes_step, MlSoftBayes, MlWeightState};
pub use soft_bayes::{soft_bayes_step, SoftBayes};
pub use spec::LearnerSpec;

use crate::error::{Error, Result};
use crate::loss::Loss;
use crate::simplex::SimplexVector;
use crate::stream::ReducedRound;

/// Current weights, prior, and 1-based round index.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightState {
    pub w: SimplexVector,
    pub prior: SimplexVector,
    pub t: usize,
}

impl WeightState {
    /// Starts at the prior.
    pub fn new(prior: SimplexVector) -> Self {
        WeightState { w: prior.clone(), prior, t: 1 }
    }

    pub fn uniform(n: usize) -> Self {
        Self::new(SimplexVector::uniform(n))
    }

    pub fn experts(&self) -> usize {
        self.w.len()
    }

    pub(crate) fn check_round(&self, round: &ReducedRound) -> Result<()> {
        if round.len() != self.experts() {
            return Err(Error::DimensionMismatch { expected: self.experts(), found: round.len() });
        }
        Ok(())
    }
}

/// What one round did.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    /// `M_t`.
    pub prediction: f64,
    pub loss: Loss,
    /// `η_t`, when the learner has a single rate.
    pub rate_used: Option<f64>,
    /// Weights after the update (unchanged on divergence).
    pub new_weights: Vec<f64>,
}

impl StepOutcome {
    pub(crate) fn diverged(rate_used: Option<f64>, weights: &[f64]) -> Self {
        StepOutcome { prediction: 0.0, loss: Loss::Infinite, rate_used, new_weights: weights.to_vec() }
    }
}

/// A sequential predictor over a fixed set of experts.
pub trait Learner: Send {
    fn experts(&self) -> usize;

    /// Predicts, charges the loss, and updates on one round.
    fn step(&mut self, round: &ReducedRound) -> Result<StepOutcome>;

    /// Weights that will be used for the next prediction.
    fn weights(&self) -> Vec<f64>;

    /// Canonical spec string, e.g. `soft-bayes:anytime`.
    fn label(&self) -> String;
}

impl<L: Learner + ?Sized> Learner for Box<L> {
    fn experts(&self) -> usize {
        (**self).experts()
    }

    fn step(&mut self, round: &ReducedRound) -> Result<StepOutcome> {
        (**self).step(round)
    }

    fn weights(&self) -> Vec<f64> {
        (**self).weights()
    }

    fn label(&self) -> String {
        (**self).label()
    }
}

//! Log-loss in nats, with an explicit sentinel for zero-probability events.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Instantaneous loss of one round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Loss {
    /// `-ln M_t` for `M_t > 0`.
    Finite(f64),
    /// The learner assigned probability zero to what happened.
    Infinite,
}

impl Loss {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Loss::Infinite)
    }

    /// The loss as a float, `+inf` for the sentinel. Reporting only.
    pub fn value(&self) -> f64 {
        match *self {
            Loss::Finite(v) => v,
            Loss::Infinite => f64::INFINITY,
        }
    }
}

/// `-ln m`, or [`Loss::Infinite`] when `m = 0`.
pub fn log_loss(m: f64) -> Result<Loss> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::ProbabilityOutOfRange(m));
    }
    if m == 0.0 {
        Ok(Loss::Infinite)
    } else {
        // `-ln 1` is `-0.0`; report a clean zero.
        Ok(Loss::Finite(-math::ln(m) + 0.0))
    }
}

/// Running loss record of one learner.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LossLedger {
    per_round: Vec<Loss>,
    cumulative: f64,
    diverged: bool,
}

impl LossLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, loss: Loss) {
        match loss {
            Loss::Finite(v) => self.cumulative += v,
            Loss::Infinite => self.diverged = true,
        }
        self.per_round.push(loss);
    }

    pub fn per_round(&self) -> &[Loss] {
        &self.per_round
    }

    /// Sum of the finite per-round losses.
    pub fn cumulative(&self) -> f64 {
        self.cumulative
    }

    pub fn diverged(&self) -> bool {
        self.diverged
    }

    /// Cumulative loss, or `+inf` once any round diverged.
    pub fn total(&self) -> f64 {
        if self.diverged {
            f64::INFINITY
        } else {
            self.cumulative
        }
    }

    /// 0-based indices of diverged rounds.
    pub fn diverged_rounds(&self) -> Vec<usize> {
        self.per_round
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_infinite())
            .map(|(i, _)| i)
            .collect()
    }
}

use alloc::string::String;
use alloc::vec::Vec;

use super::{Learner, StepOutcome, WeightState};
use crate::error::{Error, Result};
use crate::loss::log_loss;
use crate::rates::{RateSchedule, ScheduleConfig};
use crate::simplex::{mixture_prob, SimplexVector};
use crate::stream::ReducedRound;

/// One Soft-Bayes round with the online correction.
///
/// The base update is `u^i = w^i (1 - η_t + η_t p^i / M_t)`; the correction
/// blends it with the prior, `w'^i = β u^i + (1 - β) w^i_1` with
/// `β = η_next / η_t`. Passing `eta_next = eta_t` gives the plain update, and
/// `η_t = 1` the Bayesian posterior.
pub fn soft_bayes_step(
    state: &mut WeightState,
    round: &ReducedRound,
    eta_t: f64,
    eta_next: f64,
) -> Result<StepOutcome> {
    state.check_round(round)?;
    if !(eta_t > 0.0 && eta_t <= 1.0) {
        return Err(Error::InvalidParameter("η_t must lie in (0, 1]"));
    }
    if eta_next > eta_t {
        return Err(Error::RateIncrease { current: eta_t, next: eta_next });
    }
    if !(eta_next > 0.0) {
        return Err(Error::InvalidParameter("η_{t+1} must be positive"));
    }

    let m = mixture_prob(state.w.as_slice(), round)?;
    let loss = log_loss(m)?;
    if m == 0.0 {
        state.t += 1;
        return Ok(StepOutcome::diverged(Some(eta_t), state.w.as_slice()));
    }

    let beta = eta_next / eta_t;
    let w: Vec<f64> = state
        .w
        .as_slice()
        .iter()
        .zip(round.as_slice())
        .zip(state.prior.as_slice())
        .map(|((&wi, &pi), &prior)| {
            let base = wi * (1.0 - eta_t + eta_t * pi / m);
            if beta < 1.0 {
                beta * base + (1.0 - beta) * prior
            } else {
                base
            }
        })
        .collect();
    state.w = SimplexVector::new(w)?;
    state.t += 1;
    Ok(StepOutcome { prediction: m, loss, rate_used: Some(eta_t), new_weights: state.w.as_slice().to_vec() })
}

/// Soft-Bayes driven by a rate schedule.
#[derive(Debug, Clone)]
pub struct SoftBayes {
    state: WeightState,
    schedule: RateSchedule,
}

impl SoftBayes {
    pub fn new(config: ScheduleConfig, prior: SimplexVector) -> Result<Self> {
        let schedule = RateSchedule::new(config, prior.len())?;
        Ok(SoftBayes { state: WeightState::new(prior), schedule })
    }

    pub fn uniform(config: ScheduleConfig, n: usize) -> Result<Self> {
        Self::new(config, SimplexVector::uniform(n))
    }

    pub fn state(&self) -> &WeightState {
        &self.state
    }

    pub fn schedule(&self) -> &RateSchedule {
        &self.schedule
    }

    /// `M_t` for `round` under the current weights, without updating.
    pub fn predict(&self, round: &ReducedRound) -> Result<f64> {
        mixture_prob(self.state.w.as_slice(), round)
    }
}

impl Learner for SoftBayes {
    fn experts(&self) -> usize {
        self.state.experts()
    }

    fn step(&mut self, round: &ReducedRound) -> Result<StepOutcome> {
        self.state.check_round(round)?;
        let eta_t = self.schedule.current();
        let m = self.predict(round)?;
        let next = self.schedule.advance(round, (m > 0.0).then_some(m))?;
        let eta_next = if self.schedule.uses_correction() { next } else { eta_t };
        soft_bayes_step(&mut self.state, round, eta_t, eta_next)
    }

    fn weights(&self) -> Vec<f64> {
        self.state.w.as_slice().to_vec()
    }

    fn label(&self) -> String {
        alloc::format!("soft-bayes:{}", self.schedule.label())
    }
}

//! Full Bayes, exponentiated gradient, and projected online gradient descent.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{soft_bayes_step, Learner, StepOutcome, WeightState};
use crate::error::{Error, Result};
use crate::loss::{log_loss, Loss};
use crate::math::{exp, ln, log_sum_exp};
use crate::simplex::{mixture_prob, project_simplex, SimplexVector};
use crate::stream::ReducedRound;

/// Bayesian posterior update `w'^i = w^i p^i / M`.
pub fn bayes_step(state: &mut WeightState, round: &ReducedRound) -> Result<StepOutcome> {
    soft_bayes_step(state, round, 1.0, 1.0)
}

/// Bayesian mixture over the experts.
#[derive(Debug, Clone)]
pub struct Bayes {
    state: WeightState,
}

impl Bayes {
    pub fn new(prior: SimplexVector) -> Self {
        Bayes { state: WeightState::new(prior) }
    }
}

impl Learner for Bayes {
    fn experts(&self) -> usize {
        self.state.experts()
    }

    fn step(&mut self, round: &ReducedRound) -> Result<StepOutcome> {
        bayes_step(&mut self.state, round)
    }

    fn weights(&self) -> Vec<f64> {
        self.state.w.as_slice().to_vec()
    }

    fn label(&self) -> String {
        String::from("bayes")
    }
}

/// Exponentiated-gradient state, held as normalized log-weights.
///
/// The gradient coordinates `p^i / M_t` are unbounded; in the linear domain
/// a single large one overflows `exp` and masks the instability.
#[derive(Debug, Clone, PartialEq)]
pub struct EgState {
    log_w: Vec<f64>,
    pub t: usize,
}

impl EgState {
    pub fn new(prior: &SimplexVector) -> Self {
        EgState { log_w: prior.as_slice().iter().map(|&w| ln(w)).collect(), t: 1 }
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_w
    }

    pub fn weights(&self) -> Vec<f64> {
        self.log_w.iter().map(|&l| exp(l)).collect()
    }
}

/// `w'^i ∝ w^i exp(η p^i / M_t)`, computed in the log domain.
///
/// The loss is `-ln M_t` taken from the log-domain mixture, so it stays finite
/// even when `M_t` underflows. When a gradient coordinate itself overflows,
/// the update saturates onto the experts with infinite exponent.
pub fn eg_step(state: &mut EgState, round: &ReducedRound, eta: f64) -> Result<StepOutcome> {
    if round.len() != state.log_w.len() {
        return Err(Error::DimensionMismatch { expected: state.log_w.len(), found: round.len() });
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidParameter("EG rate must be positive"));
    }
    let log_p: Vec<f64> = round.as_slice().iter().map(|&p| ln(p)).collect();
    let joint: Vec<f64> = state.log_w.iter().zip(&log_p).map(|(lw, lp)| lw + lp).collect();
    let log_m = log_sum_exp(&joint);
    if log_m == f64::NEG_INFINITY {
        state.t += 1;
        return Ok(StepOutcome::diverged(Some(eta), &state.weights()));
    }
    let prediction = exp(log_m).clamp(0.0, round.max());
    let loss = Loss::Finite((-log_m).max(0.0));

    let args: Vec<f64> = log_p.iter().map(|&lp| eta * exp(lp - log_m)).collect();
    let saturated: Vec<usize> = (0..args.len())
        .filter(|&i| args[i] == f64::INFINITY && state.log_w[i].is_finite())
        .collect();
    let mut next: Vec<f64> = if saturated.is_empty() {
        state.log_w.iter().zip(&args).map(|(lw, a)| lw + a).collect()
    } else {
        (0..args.len())
            .map(|i| if saturated.contains(&i) { state.log_w[i] } else { f64::NEG_INFINITY })
            .collect()
    };
    let norm = log_sum_exp(&next);
    next.iter_mut().for_each(|l| *l -= norm);
    state.log_w = next;
    state.t += 1;
    Ok(StepOutcome { prediction, loss, rate_used: Some(eta), new_weights: state.weights() })
}

#[derive(Debug, Clone)]
pub struct ExponentiatedGradient {
    state: EgState,
    eta: f64,
}

impl ExponentiatedGradient {
    pub fn new(eta: f64, prior: &SimplexVector) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidParameter("EG rate must be positive"));
        }
        Ok(ExponentiatedGradient { state: EgState::new(prior), eta })
    }

    pub fn state(&self) -> &EgState {
        &self.state
    }
}

impl Learner for ExponentiatedGradient {
    fn experts(&self) -> usize {
        self.state.log_w.len()
    }

    fn step(&mut self, round: &ReducedRound) -> Result<StepOutcome> {
        eg_step(&mut self.state, round, self.eta)
    }

    fn weights(&self) -> Vec<f64> {
        self.state.weights()
    }

    fn label(&self) -> String {
        format!("eg:fixed={}", self.eta)
    }
}

/// `w' = Π(w + η p / M_t)` with `Π` the Euclidean simplex projection.
pub fn ogd_step(state: &mut WeightState, round: &ReducedRound, eta: f64) -> Result<StepOutcome> {
    state.check_round(round)?;
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidParameter("OGD rate must be positive"));
    }
    let m = mixture_prob(state.w.as_slice(), round)?;
    let loss = log_loss(m)?;
    if m == 0.0 {
        state.t += 1;
        return Ok(StepOutcome::diverged(Some(eta), state.w.as_slice()));
    }
    let moved: Vec<f64> = state
        .w
        .as_slice()
        .iter()
        .zip(round.as_slice())
        .map(|(&w, &p)| w + eta * p / m)
        .collect();
    state.w = project_simplex(&moved)?;
    state.t += 1;
    Ok(StepOutcome { prediction: m, loss, rate_used: Some(eta), new_weights: state.w.as_slice().to_vec() })
}

#[derive(Debug, Clone)]
pub struct OnlineGradientDescent {
    state: WeightState,
    eta: f64,
}

impl OnlineGradientDescent {
    pub fn new(eta: f64, prior: SimplexVector) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidParameter("OGD rate must be positive"));
        }
        Ok(OnlineGradientDescent { state: WeightState::new(prior), eta })
    }
}

impl Learner for OnlineGradientDescent {
    fn experts(&self) -> usize {
        self.state.experts()
    }

    fn step(&mut self, round: &ReducedRound) -> Result<StepOutcome> {
        ogd_step(&mut self.state, round, self.eta)
    }

    fn weights(&self) -> Vec<f64> {
        self.state.w.as_slice().to_vec()
    }

    fn label(&self) -> String {
        format!("ogd:fixed={}", self.eta)
    }
}

//! Soft-Bayes with one learning rate per expert.
//!
//! The prediction weighs each expert by `w^i η^i`, and the online correction
//! uses each expert's own rate ratio. With differing ratios the weights leave
//! the simplex; they are kept raw and never renormalized.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{Learner, StepOutcome};
use crate::error::{Error, Result};
use crate::loss::log_loss;
use crate::math::{ln, sqrt};
use crate::rates::{bar_from_rate, rate_from_bar};
use crate::simplex::SimplexVector;
use crate::stream::ReducedRound;

/// Per-expert rate from the running excess statistic:
/// `η̄ = sqrt((ln N / 2) / (ln N + V))`, `η = η̄ / (1 + η̄)`.
pub fn ml_rate_next(v_prev: f64, n: usize) -> f64 {
    let ln_n = ln(n as f64);
    rate_from_bar(sqrt((ln_n / 2.0) / (ln_n + v_prev)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlWeightState {
    /// Raw weights; strictly positive, not necessarily normalized.
    pub w: Vec<f64>,
    pub prior: SimplexVector,
    /// `η^i_t`.
    pub rates: Vec<f64>,
    /// `V^i_t = Σ_{s<=t} (p^i_s / M_s - 1)²`.
    pub v: Vec<f64>,
    /// `η^i_1`, kept for the weight-growth bound.
    pub initial_rates: Vec<f64>,
    pub t: usize,
}

impl MlWeightState {
    pub fn new(prior: SimplexVector, rates: Vec<f64>) -> Result<Self> {
        if rates.len() != prior.len() {
            return Err(Error::DimensionMismatch { expected: prior.len(), found: rates.len() });
        }
        if rates.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
            return Err(Error::InvalidParameter("per-expert rates must lie in (0, 1)"));
        }
        if prior.as_slice().iter().any(|&w| w <= 0.0) {
            return Err(Error::InvalidParameter("multi-rate prior must be strictly positive"));
        }
        let n = prior.len();
        Ok(MlWeightState {
            w: prior.as_slice().to_vec(),
            prior,
            initial_rates: rates.clone(),
            rates,
            v: vec![0.0; n],
            t: 1,
        })
    }

    pub fn weight_sum(&self) -> f64 {
        self.w.iter().sum()
    }

    /// `Σ_i w^i_1 (1 + ln(η̄^i_1 / η̄^i_t))`, an upper bound on `Σ_i w^i_t`
    /// under nonincreasing rates.
    pub fn growth_bound(&self) -> f64 {
        self.prior
            .as_slice()
            .iter()
            .zip(self.initial_rates.iter().zip(&self.rates))
            .map(|(&w1, (&first, &now))| w1 * (1.0 + ln(bar_from_rate(first) / bar_from_rate(now))))
            .sum()
    }
}

/// `M_t = Σ w^i η^i p^i / Σ w^i η^i`.
pub fn ml_prediction(state: &MlWeightState, round: &ReducedRound) -> Result<f64> {
    if round.len() != state.w.len() {
        return Err(Error::DimensionMismatch { expected: state.w.len(), found: round.len() });
    }
    let (num, den) = state
        .w
        .iter()
        .zip(&state.rates)
        .zip(round.as_slice())
        .fold((0.0, 0.0), |(num, den), ((&w, &eta), &p)| (num + w * eta * p, den + w * eta));
    Ok((num / den).clamp(round.min(), round.max()))
}

pub fn ml_soft_bayes_step(
    state: &mut MlWeightState,
    round: &ReducedRound,
    next_rates: &[f64],
) -> Result<StepOutcome> {
    if next_rates.len() != state.w.len() {
        return Err(Error::DimensionMismatch { expected: state.w.len(), found: next_rates.len() });
    }
    for (&now, &next) in state.rates.iter().zip(next_rates) {
        if next > now {
            return Err(Error::RateIncrease { current: now, next });
        }
        if !(next > 0.0) {
            return Err(Error::InvalidParameter("per-expert rates must lie in (0, 1)"));
        }
    }
    let m = ml_prediction(state, round)?;
    let loss = log_loss(m)?;
    if m == 0.0 {
        state.t += 1;
        return Ok(StepOutcome::diverged(None, &state.w));
    }
    for (i, &next) in next_rates.iter().enumerate() {
        let eta = state.rates[i];
        let ratio = round.as_slice()[i] / m;
        let base = state.w[i] * (1.0 - eta + eta * ratio);
        let beta = next / eta;
        state.w[i] = if beta < 1.0 { beta * base + (1.0 - beta) * state.prior[i] } else { base };
        state.v[i] += (ratio - 1.0) * (ratio - 1.0);
        state.rates[i] = next;
    }
    state.t += 1;
    Ok(StepOutcome { prediction: m, loss, rate_used: None, new_weights: state.w.clone() })
}

/// Multi-rate Soft-Bayes, either with the adaptive per-expert schedule
/// ([`ml_rate_next`]) or with constant rates.
#[derive(Debug, Clone)]
pub struct MlSoftBayes {
    state: MlWeightState,
    adaptive: bool,
}

impl MlSoftBayes {
    pub fn adaptive(prior: SimplexVector) -> Result<Self> {
        let n = prior.len();
        if n < 2 {
            return Err(Error::InvalidParameter("multi-rate schedule needs N >= 2"));
        }
        let rates = vec![ml_rate_next(0.0, n); n];
        Ok(MlSoftBayes { state: MlWeightState::new(prior, rates)?, adaptive: true })
    }

    pub fn constant(prior: SimplexVector, rates: Vec<f64>) -> Result<Self> {
        Ok(MlSoftBayes { state: MlWeightState::new(prior, rates)?, adaptive: false })
    }

    pub fn state(&self) -> &MlWeightState {
        &self.state
    }
}

impl Learner for MlSoftBayes {
    fn experts(&self) -> usize {
        self.state.w.len()
    }

    fn step(&mut self, round: &ReducedRound) -> Result<StepOutcome> {
        let next = if self.adaptive {
            let n = self.state.w.len();
            let m = ml_prediction(&self.state, round)?;
            if m == 0.0 {
                self.state.rates.clone()
            } else {
                self.state
                    .v
                    .iter()
                    .zip(round.as_slice())
                    .map(|(&v, &p)| ml_rate_next(v + (p / m - 1.0) * (p / m - 1.0), n))
                    .collect()
            }
        } else {
            self.state.rates.clone()
        };
        ml_soft_bayes_step(&mut self.state, round, &next)
    }

    fn weights(&self) -> Vec<f64> {
        self.state.w.clone()
    }

    fn label(&self) -> String {
        String::from("ml-soft-bayes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round(p: &[f64]) -> ReducedRound {
        ReducedRound::new(p.to_vec()).unwrap()
    }

    #[test]
    fn rate_examples() {
        for n in [2, 5, 100] {
            let eta = ml_rate_next(0.0, n);
            assert!((bar_from_rate(eta) - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
            assert!((eta - 0.41421).abs() < 5e-6);
            let ln_n = ln(n as f64);
            assert!((ml_rate_next(ln_n, n) - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!(ml_rate_next(1e30, 3) < 1e-14);
        let mut prev = 1.0;
        for k in 0..100 {
            let r = ml_rate_next(k as f64 * 0.7, 4);
            assert!(r <= prev);
            prev = r;
        }
    }

    #[test]
    fn unequal_constant_rates_example() {
        let mut s = MlWeightState::new(SimplexVector::uniform(2), vec![0.5, 0.25]).unwrap();
        let out = ml_soft_bayes_step(&mut s, &round(&[0.0, 1.0]), &[0.5, 0.25]).unwrap();
        assert!((out.prediction - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.w[0] - 0.25).abs() < 1e-15);
        assert!((s.w[1] - 0.75).abs() < 1e-15);
        assert!((s.v[0] - 1.0).abs() < 1e-15);
        assert!((s.v[1] - 4.0).abs() < 1e-14);
    }

    #[test]
    fn equal_likelihoods_leave_weights() {
        let mut s = MlWeightState::new(SimplexVector::uniform(3), vec![0.2, 0.4, 0.6]).unwrap();
        let out = ml_soft_bayes_step(&mut s, &round(&[0.3, 0.3, 0.3]), &[0.2, 0.4, 0.6]).unwrap();
        assert_eq!(out.prediction, 0.3);
        for &w in &s.w {
            assert!((w - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn equal_rates_give_plain_mixture() {
        let prior = SimplexVector::new(vec![0.2, 0.5, 0.3]).unwrap();
        let s = MlWeightState::new(prior, vec![0.3; 3]).unwrap();
        let r = round(&[0.1, 0.8, 0.4]);
        let plain = 0.2 * 0.1 + 0.5 * 0.8 + 0.3 * 0.4;
        assert!((ml_prediction(&s, &r).unwrap() - plain).abs() < 1e-15);
    }

    #[test]
    fn rejects_rate_increase() {
        let mut s = MlWeightState::new(SimplexVector::uniform(2), vec![0.3, 0.3]).unwrap();
        assert!(matches!(
            ml_soft_bayes_step(&mut s, &round(&[0.5, 0.5]), &[0.3, 0.4]),
            Err(Error::RateIncrease { .. })
        ));
    }
}

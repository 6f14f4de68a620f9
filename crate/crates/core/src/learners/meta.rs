//! Bayesian mixture over Soft-Bayes instances with different constant rates.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{Learner, SoftBayes, StepOutcome};
use crate::error::{Error, Result};
use crate::loss::{log_loss, Loss};
use crate::rates::ScheduleConfig;
use crate::simplex::SimplexVector;
use crate::stream::ReducedRound;

/// Result of one meta-level round.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaStep {
    pub prediction: f64,
    pub loss: Loss,
    /// Posterior over sub-learners; `None` on divergence (weights unchanged).
    pub weights: Option<SimplexVector>,
}

/// Meta prediction `Σ_k u^k M^k` and posterior `u'^k ∝ u^k M^k`.
pub fn meta_bayes_step(meta_weights: &SimplexVector, sub_predictions: &[f64]) -> Result<MetaStep> {
    if meta_weights.len() != sub_predictions.len() {
        return Err(Error::DimensionMismatch { expected: meta_weights.len(), found: sub_predictions.len() });
    }
    if sub_predictions.iter().any(|m| !(0.0..=1.0).contains(m)) {
        return Err(Error::InvalidParameter("sub-learner predictions must lie in [0, 1]"));
    }
    let joint: Vec<f64> = meta_weights.as_slice().iter().zip(sub_predictions).map(|(u, m)| u * m).collect();
    let prediction: f64 = joint.iter().sum();
    let prediction = prediction.min(1.0);
    let loss = log_loss(prediction)?;
    if prediction == 0.0 {
        return Ok(MetaStep { prediction, loss, weights: None });
    }
    let posterior = joint.into_iter().map(|j| j / prediction).collect();
    Ok(MetaStep { prediction, loss, weights: Some(SimplexVector::new(posterior)?) })
}

/// Rates `2^{-i}` for `i = 0..=ceil(log2 T)`.
pub fn default_meta_rates(horizon: usize) -> Vec<f64> {
    let k = usize::BITS - horizon.max(1).saturating_sub(1).leading_zeros();
    (0..=k).map(|i| 1.0 / (1u64 << i) as f64).collect()
}

/// Uniform Bayesian mixture over constant-rate Soft-Bayes sub-learners.
///
/// A sub-learner that assigns probability zero to a round is treated as
/// predicting zero for the rest of the stream.
#[derive(Debug, Clone)]
pub struct MetaBayes {
    u: SimplexVector,
    rates: Vec<f64>,
    subs: Vec<SoftBayes>,
    dead: Vec<bool>,
}

impl MetaBayes {
    pub fn new(rates: &[f64], prior: SimplexVector) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::InvalidParameter("meta learner needs at least one rate"));
        }
        let subs = rates
            .iter()
            .map(|&eta| SoftBayes::new(ScheduleConfig::Fixed(eta), prior.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(MetaBayes {
            u: SimplexVector::uniform(rates.len()),
            rates: rates.to_vec(),
            subs,
            dead: vec![false; rates.len()],
        })
    }

    pub fn meta_weights(&self) -> &SimplexVector {
        &self.u
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }
}

impl Learner for MetaBayes {
    fn experts(&self) -> usize {
        self.subs[0].experts()
    }

    fn step(&mut self, round: &ReducedRound) -> Result<StepOutcome> {
        let preds = self
            .subs
            .iter()
            .zip(&self.dead)
            .map(|(sub, &dead)| if dead { Ok(0.0) } else { sub.predict(round) })
            .collect::<Result<Vec<_>>>()?;
        let meta = meta_bayes_step(&self.u, &preds)?;
        for (sub, dead) in self.subs.iter_mut().zip(self.dead.iter_mut()) {
            if !*dead && sub.step(round)?.loss.is_infinite() {
                *dead = true;
            }
        }
        if let Some(u) = meta.weights {
            self.u = u;
        }
        let prediction = meta.prediction;
        Ok(StepOutcome { prediction, loss: meta.loss, rate_used: None, new_weights: self.weights() })
    }

    /// Effective weights over the experts, `Σ_k u^k w^k`.
    fn weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.experts()];
        for (sub, &uk) in self.subs.iter().zip(self.u.as_slice()) {
            for (acc, wi) in w.iter_mut().zip(sub.state().w.as_slice()) {
                *acc += uk * wi;
            }
        }
        w
    }

    fn label(&self) -> String {
        let rates: Vec<String> = self.rates.iter().map(|r| format!("{r}")).collect();
        format!("meta:rates={}", rates.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn meta_examples() {
        let u = SimplexVector::uniform(2);
        let step = meta_bayes_step(&u, &[0.5, 0.25]).unwrap();
        assert_eq!(step.prediction, 0.375);
        let w = step.weights.unwrap();
        assert!((w[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((w[1] - 1.0 / 3.0).abs() < 1e-15);

        let step = meta_bayes_step(&u, &[0.4, 0.4]).unwrap();
        assert_eq!(step.weights.unwrap(), u);

        let dirac = SimplexVector::vertex(2, 0);
        let step = meta_bayes_step(&dirac, &[0.7, 0.1]).unwrap();
        assert_eq!(step.prediction, 0.7);
        assert_eq!(step.weights.unwrap(), dirac);
    }

    #[test]
    fn all_zero_sub_predictions_diverge() {
        let step = meta_bayes_step(&SimplexVector::uniform(3), &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(step.loss, Loss::Infinite);
        assert!(step.weights.is_none());
    }

    #[test]
    fn default_rates_cover_horizon() {
        assert_eq!(default_meta_rates(1), vec![1.0]);
        assert_eq!(default_meta_rates(8), vec![1.0, 0.5, 0.25, 0.125]);
        assert_eq!(default_meta_rates(9).len(), 5);
    }

    #[test]
    fn meta_prediction_matches_effective_weights() {
        let mut meta = MetaBayes::new(&[1.0, 0.5, 0.25], SimplexVector::uniform(3)).unwrap();
        let rounds = [[0.1, 0.5, 0.9], [0.9, 0.2, 0.1], [0.3, 0.3, 0.6]];
        for p in rounds {
            let r = ReducedRound::new(p.to_vec()).unwrap();
            let w = meta.weights();
            let direct = crate::simplex::mixture_prob(&w, &r).unwrap();
            let out = meta.step(&r).unwrap();
            assert!((out.prediction - direct).abs() < 1e-15);
        }
    }
}

//! Driving a learner over a stream and recording what happened.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Result;
use crate::learners::Learner;
use crate::loss::{Loss, LossLedger};
use crate::stream::ExpertStream;

/// What to do after a round with infinite loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DivergencePolicy {
    /// Stop the learner; its regret is infinite.
    #[default]
    Halt,
    /// Keep going with unchanged weights; the round is dropped from regret.
    Continue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: usize,
    pub rate: Option<f64>,
    pub prediction: f64,
    pub loss: Loss,
    /// Sum of finite losses through round `t`.
    pub cumulative: f64,
    /// Weights after the update (used for round `t + 1`), when snapshotted.
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerTrace {
    pub label: String,
    pub rows: Vec<TraceRow>,
    pub ledger: LossLedger,
    /// Stopped early under [`DivergencePolicy::Halt`].
    pub halted: bool,
}

impl LearnerTrace {
    pub fn diverged(&self) -> bool {
        self.ledger.diverged()
    }

    /// Predictions `M_t` in round order.
    pub fn predictions(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(|r| r.prediction)
    }
}

/// Weight snapshots every round for `N <= 16`, otherwise every `⌈T/1000⌉`.
pub fn snapshot_interval(n: usize, horizon: usize) -> usize {
    if n <= 16 {
        1
    } else {
        horizon.div_ceil(1000).max(1)
    }
}

/// Runs `learner` over `stream`, snapshotting weights every `snapshot_every`
/// rounds (and on the first and last).
pub fn run_learner<L: Learner + ?Sized>(
    learner: &mut L,
    stream: &ExpertStream,
    policy: DivergencePolicy,
    snapshot_every: usize,
) -> Result<LearnerTrace> {
    let mut ledger = LossLedger::new();
    let mut rows = Vec::with_capacity(stream.horizon());
    let mut halted = false;
    let horizon = stream.horizon();
    for (k, round) in stream.rounds().iter().enumerate() {
        let t = k + 1;
        let out = learner.step(round)?;
        ledger.record(out.loss);
        let snap = snapshot_every <= 1 || t == 1 || t == horizon || t % snapshot_every == 0;
        rows.push(TraceRow {
            t,
            rate: out.rate_used,
            prediction: out.prediction,
            loss: out.loss,
            cumulative: ledger.cumulative(),
            weights: snap.then_some(out.new_weights),
        });
        if out.loss.is_infinite() && policy == DivergencePolicy::Halt {
            halted = t < horizon;
            break;
        }
    }
    Ok(LearnerTrace { label: learner.label(), rows, ledger, halted })
}

/// Data-dependent quantities the self-confident bounds are stated in, taken
/// along a learner's own predictions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TraceStats {
    /// `C_1 = Σ_t max_i (p^i_t / M_t - 1)`.
    pub c1: f64,
    /// `C_2 = max_{i,t} (p^i_t / M_t - 1)²`.
    pub c2: f64,
    /// `max_i Σ_t (p^i_t / M_t - 1)²`.
    pub max_cumulative_sq: f64,
}

impl TraceStats {
    /// Skips diverged rounds.
    pub fn from_trace(stream: &ExpertStream, trace: &LearnerTrace) -> Self {
        let mut stats = TraceStats::default();
        let mut sums = alloc::vec![0.0; stream.experts()];
        for (round, row) in stream.rounds().iter().zip(&trace.rows) {
            if row.loss.is_infinite() || row.prediction <= 0.0 {
                continue;
            }
            let m = row.prediction;
            stats.c1 += (round.max() / m - 1.0).max(0.0);
            for (acc, &p) in sums.iter_mut().zip(round.as_slice()) {
                let d = (p / m - 1.0) * (p / m - 1.0);
                stats.c2 = stats.c2.max(d);
                *acc += d;
            }
        }
        stats.max_cumulative_sq = sums.into_iter().fold(0.0, f64::max);
        stats
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{OnlineGradientDescent, SoftBayes};
    use crate::rates::ScheduleConfig;
    use crate::simplex::SimplexVector;
    use alloc::vec;

    fn stream(rows: &[[f64; 2]]) -> ExpertStream {
        ExpertStream::from_rows(2, rows.iter().map(|r| r.to_vec())).unwrap()
    }

    #[test]
    fn snapshot_interval_rule() {
        assert_eq!(snapshot_interval(16, 1_000_000), 1);
        assert_eq!(snapshot_interval(17, 10_000), 10);
        assert_eq!(snapshot_interval(17, 999), 1);
    }

    #[test]
    fn halt_and_continue() {
        let s = stream(&[[0.0, 1.0], [1.0, 0.0], [0.0, 1.0]]);
        let mut ogd = OnlineGradientDescent::new(0.5, SimplexVector::uniform(2)).unwrap();
        let trace = run_learner(&mut ogd, &s, DivergencePolicy::Halt, 1).unwrap();
        assert_eq!(trace.rows.len(), 2);
        assert!(trace.halted && trace.diverged());

        let mut ogd = OnlineGradientDescent::new(0.5, SimplexVector::uniform(2)).unwrap();
        let trace = run_learner(&mut ogd, &s, DivergencePolicy::Continue, 1).unwrap();
        assert_eq!(trace.rows.len(), 3);
        assert!(!trace.halted && trace.diverged());
        assert_eq!(trace.ledger.diverged_rounds(), vec![1]);
        assert!(trace.rows.windows(2).all(|w| w[0].cumulative <= w[1].cumulative));
    }

    #[test]
    fn stats_on_equal_rounds_are_zero() {
        let s = stream(&[[0.5, 0.5], [0.2, 0.2]]);
        let mut sb = SoftBayes::uniform(ScheduleConfig::Anytime, 2).unwrap();
        let trace = run_learner(&mut sb, &s, DivergencePolicy::Halt, 1).unwrap();
        assert_eq!(TraceStats::from_trace(&s, &trace), TraceStats::default());
    }
}

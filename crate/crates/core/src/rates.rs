//! Learning-rate schedules.
//!
//! Rates are expressed as the Soft-Bayes `η ∈ (0, 1]`; offline tunings are
//! stated in terms of `η̄ = η / (1 - η)` and converted with [`rate_from_bar`].

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::math::{ln, sqrt};
use crate::stream::ReducedRound;

/// Ceiling on the sparse schedule. Its formula exceeds one for `N >= 8` at
/// `t = 1`, and its regret analysis needs `η/(1-η) <= η + 2η²`.
pub const SPARSE_RATE_CAP: f64 = 0.5;

/// Default ceiling of the self-confident schedule.
pub const SELF_CONFIDENT_ETA_MAX: f64 = 0.5;

/// `η = η̄ / (1 + η̄)`.
pub fn rate_from_bar(eta_bar: f64) -> f64 {
    eta_bar / (1.0 + eta_bar)
}

/// `η̄ = η / (1 - η)`.
pub fn bar_from_rate(eta: f64) -> f64 {
    eta / (1.0 - eta)
}

/// Which offline tuning of the horizon-aware bound to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OfflineVariant {
    /// `η̄ = sqrt(ln N / (T m))`, tuned to the number of sometimes-best experts.
    BestSet,
    /// `η̄ = sqrt(ln N / (T N))`, needing no knowledge of `m`.
    AllExperts,
}

/// Offline rate for a known horizon `T`.
pub fn rate_offline(t: usize, n: usize, m: usize, variant: OfflineVariant) -> Result<f64> {
    if t == 0 {
        return Err(Error::InvalidParameter("horizon must be at least 1"));
    }
    if n < 2 {
        return Err(Error::InvalidParameter("offline rate needs N >= 2"));
    }
    if m == 0 || m > n {
        return Err(Error::InvalidParameter("m must lie in [1, N]"));
    }
    let k = match variant {
        OfflineVariant::BestSet => m,
        OfflineVariant::AllExperts => n,
    };
    let eta_bar = sqrt(ln(n as f64) / (t as f64 * k as f64));
    Ok(rate_from_bar(eta_bar))
}

/// `η_t = sqrt(ln N / (2 N t))`.
pub fn rate_anytime(t: usize, n: usize) -> f64 {
    sqrt(ln(n as f64) / (2.0 * n as f64 * t as f64))
}

/// `η_t = sqrt(ln N / (2 m_t t))`, uncapped.
pub fn rate_sparse(t: usize, n: usize, m_t: usize) -> f64 {
    sqrt(ln(n as f64) / (2.0 * m_t as f64 * t as f64))
}

/// `η_t = sqrt(ln N / (2 N t)) · ln(t + 3)`.
pub fn rate_shifting(t: usize, n: usize) -> f64 {
    rate_anytime(t, n) * ln(t as f64 + 3.0)
}

/// `η_t = 1 / (t + c)`.
pub fn rate_inverse_t(t: usize, c: f64) -> f64 {
    1.0 / (t as f64 + c)
}

/// Running statistics of the self-confident schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfConfidentStats {
    /// `C_1 = Σ_t max_i (p^i_t / M_t - 1)`.
    pub c1: f64,
    /// The rate used in the round just observed.
    pub eta_prev: f64,
}

impl SelfConfidentStats {
    /// Adds one round's increment. Returns the increment.
    pub fn observe(&mut self, round: &ReducedRound, prediction: f64) -> f64 {
        // max_i p^i >= M for any convex combination; clip rounding below zero.
        let inc = (round.max() / prediction - 1.0).max(0.0);
        self.c1 += inc;
        inc
    }
}

/// `min{η_max, sqrt(2 ln N / max(C_1, ln N))}`.
pub fn self_confident_candidate(c1: f64, n: usize, eta_max: f64) -> f64 {
    let ln_n = ln(n as f64);
    sqrt(2.0 * ln_n / c1.max(ln_n)).min(eta_max)
}

/// Caps a next-over-current rate ratio at `sqrt(t / (t + 1))` so weights
/// decay no faster than `O(1/t)`.
pub fn clamp_rate_ratio(raw_ratio: f64, t: usize) -> f64 {
    raw_ratio.min(sqrt(t as f64 / (t as f64 + 1.0)))
}

/// Self-confident rate for round `t + 1` after observing round `t`.
pub fn rate_self_confident(stats: &SelfConfidentStats, n: usize, t: usize, eta_max: f64) -> f64 {
    let candidate = self_confident_candidate(stats.c1, n, eta_max);
    stats.eta_prev * clamp_rate_ratio(candidate / stats.eta_prev, t)
}

/// Records the first round at which each expert was the per-round best.
///
/// `B_t = {i : T*_i < t}` is the set of experts that were best strictly
/// before round `t`, and `m_t = max(1, |B_t|)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestSetTracker {
    first_best: Vec<Option<usize>>,
}

impl BestSetTracker {
    pub fn new(n: usize) -> Self {
        BestSetTracker { first_best: vec![None; n] }
    }

    /// Observes round `t` and returns the expert credited as its best.
    ///
    /// Among tied maxima an already-counted expert wins (lowest index among
    /// those), otherwise the lowest index.
    pub fn update(&mut self, round: &ReducedRound, t: usize) -> Result<usize> {
        if round.len() != self.first_best.len() {
            return Err(Error::DimensionMismatch { expected: self.first_best.len(), found: round.len() });
        }
        let max = round.max();
        let p = round.as_slice();
        let mut tied = (0..p.len()).filter(|&i| p[i] == max);
        let first = tied.next().expect("a round always has a maximum");
        let best = core::iter::once(first)
            .chain(tied)
            .find(|&i| self.first_best[i].is_some())
            .unwrap_or(first);
        if self.first_best[best].is_none() {
            self.first_best[best] = Some(t);
        }
        Ok(best)
    }

    /// `T*_i`, if expert `i` has been best.
    pub fn first_best(&self, i: usize) -> Option<usize> {
        self.first_best[i]
    }

    /// Members of `B_t`.
    pub fn members(&self, t: usize) -> Vec<usize> {
        (0..self.first_best.len())
            .filter(|&i| matches!(self.first_best[i], Some(s) if s < t))
            .collect()
    }

    /// `m_t = max(1, |B_t|)`.
    pub fn m(&self, t: usize) -> usize {
        self.first_best
            .iter()
            .filter(|s| matches!(s, Some(s) if *s < t))
            .count()
            .max(1)
    }

    /// Runs a fresh tracker over a whole stream and returns `m_{T+1}`.
    pub fn final_m(rounds: &[ReducedRound], n: usize) -> Result<usize> {
        let mut tracker = BestSetTracker::new(n);
        for (k, r) in rounds.iter().enumerate() {
            tracker.update(r, k + 1)?;
        }
        Ok(tracker.m(rounds.len() + 1))
    }
}

/// A learning-rate policy, as selected on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleConfig {
    /// Constant `η` in `(0, 1]`; `η = 1` is Bayes.
    Fixed(f64),
    /// `η_t = 1/(t + c)`.
    InverseT(f64),
    Anytime,
    Sparse,
    Shifting,
    SelfConfident { eta_max: f64 },
}

impl ScheduleConfig {
    /// Whether the learner applies the prior-blending online correction.
    ///
    /// Constant and `1/(t+c)` rates run the plain update; the latter is what
    /// makes Soft-Bayes collapse to the Perks/KT/Laplace estimators.
    pub fn uses_correction(&self) -> bool {
        !matches!(self, ScheduleConfig::Fixed(_) | ScheduleConfig::InverseT(_))
    }

    fn validate(self) -> Result<Self> {
        match self {
            ScheduleConfig::Fixed(eta) if !(eta > 0.0 && eta <= 1.0) => {
                Err(Error::InvalidParameter("fixed rate must lie in (0, 1]"))
            }
            ScheduleConfig::InverseT(c) if !(c > 0.0 && c.is_finite()) => {
                Err(Error::InvalidParameter("inverse-t offset must be positive"))
            }
            ScheduleConfig::SelfConfident { eta_max } if !(eta_max > 0.0 && eta_max < 1.0) => {
                Err(Error::InvalidParameter("self-confident eta_max must lie in (0, 1)"))
            }
            ok => Ok(ok),
        }
    }
}

impl fmt::Display for ScheduleConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleConfig::Fixed(eta) => write!(f, "fixed:{eta}"),
            ScheduleConfig::InverseT(c) => write!(f, "inverse-t:{c}"),
            ScheduleConfig::Anytime => f.write_str("anytime"),
            ScheduleConfig::Sparse => f.write_str("sparse"),
            ScheduleConfig::Shifting => f.write_str("shifting"),
            ScheduleConfig::SelfConfident { eta_max } => write!(f, "self-confident:{eta_max}"),
        }
    }
}

fn parse_number(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("invalid {what} `{s}`")))
}

impl FromStr for ScheduleConfig {
    type Err = Error;

    /// Accepts `fixed:<η>`, `inverse-t:<c>`, `anytime`, `sparse`, `shifting`,
    /// and `self-confident[:<η_max>]`; `=` may replace `:`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.find([':', '=']) {
            Some(k) => (&s[..k], Some(&s[k + 1..])),
            None => (s, None),
        };
        let config = match (name, arg) {
            ("fixed", Some(a)) => ScheduleConfig::Fixed(parse_number(a, "rate")?),
            ("inverse-t", Some(a)) => ScheduleConfig::InverseT(parse_number(a, "offset")?),
            ("anytime", None) => ScheduleConfig::Anytime,
            ("sparse", None) => ScheduleConfig::Sparse,
            ("shifting", None) => ScheduleConfig::Shifting,
            ("self-confident", None) => ScheduleConfig::SelfConfident { eta_max: SELF_CONFIDENT_ETA_MAX },
            ("self-confident", Some(a)) => ScheduleConfig::SelfConfident { eta_max: parse_number(a, "eta_max")? },
            _ => return Err(Error::Parse(format!("unknown schedule `{s}`"))),
        };
        config.validate()
    }
}

/// A schedule together with its per-round state.
#[derive(Debug, Clone)]
pub struct RateSchedule {
    config: ScheduleConfig,
    n: usize,
    t: usize,
    eta: f64,
    tracker: BestSetTracker,
    stats: SelfConfidentStats,
}

impl RateSchedule {
    pub fn new(config: ScheduleConfig, n: usize) -> Result<Self> {
        let config = config.validate()?;
        if config.uses_correction() && n < 2 {
            return Err(Error::InvalidParameter("online schedules need N >= 2"));
        }
        let eta = match config {
            ScheduleConfig::Fixed(eta) => eta,
            ScheduleConfig::InverseT(c) => rate_inverse_t(1, c),
            ScheduleConfig::Anytime => rate_anytime(1, n),
            ScheduleConfig::Sparse => rate_sparse(1, n, 1).min(SPARSE_RATE_CAP),
            ScheduleConfig::Shifting => rate_shifting(1, n),
            ScheduleConfig::SelfConfident { eta_max } => self_confident_candidate(0.0, n, eta_max),
        };
        Ok(RateSchedule {
            config,
            n,
            t: 1,
            eta,
            tracker: BestSetTracker::new(n),
            stats: SelfConfidentStats { c1: 0.0, eta_prev: eta },
        })
    }

    pub fn config(&self) -> ScheduleConfig {
        self.config
    }

    /// The round the current rate applies to (1-based).
    pub fn round(&self) -> usize {
        self.t
    }

    /// `η_t`.
    pub fn current(&self) -> f64 {
        self.eta
    }

    pub fn uses_correction(&self) -> bool {
        self.config.uses_correction()
    }

    pub fn best_set(&self) -> &BestSetTracker {
        &self.tracker
    }

    pub fn c1(&self) -> f64 {
        self.stats.c1
    }

    /// Observes round `t` and moves to `t + 1`, returning `η_{t+1}`.
    ///
    /// `prediction` is the learner's `M_t`, or `None` when the round diverged
    /// (the self-confident statistic then skips it).
    pub fn advance(&mut self, round: &ReducedRound, prediction: Option<f64>) -> Result<f64> {
        let t = self.t;
        let n = self.n;
        let next = match self.config {
            ScheduleConfig::Fixed(eta) => eta,
            ScheduleConfig::InverseT(c) => rate_inverse_t(t + 1, c),
            ScheduleConfig::Anytime => rate_anytime(t + 1, n),
            ScheduleConfig::Sparse => {
                self.tracker.update(round, t)?;
                rate_sparse(t + 1, n, self.tracker.m(t + 1)).min(SPARSE_RATE_CAP)
            }
            ScheduleConfig::Shifting => {
                let r = rate_shifting(t + 1, n);
                // Monotone for N >= 2 in exact arithmetic; hold on any violation.
                if r > self.eta {
                    self.eta
                } else {
                    r
                }
            }
            ScheduleConfig::SelfConfident { eta_max } => {
                if let Some(m) = prediction.filter(|&m| m > 0.0) {
                    self.stats.observe(round, m);
                }
                self.stats.eta_prev = self.eta;
                rate_self_confident(&self.stats, n, t, eta_max)
            }
        };
        if self.uses_correction() && next > self.eta {
            return Err(Error::RateIncrease { current: self.eta, next });
        }
        self.t += 1;
        self.eta = next;
        Ok(next)
    }

    /// Short label for reports.
    pub fn label(&self) -> String {
        self.config.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn round(p: &[f64]) -> ReducedRound {
        ReducedRound::new(p.to_vec()).unwrap()
    }

    #[test]
    fn offline_examples() {
        let eta = rate_offline(10_000, 10, 10, OfflineVariant::BestSet).unwrap();
        assert!(close(bar_from_rate(eta), 4.7985e-3, 1e-7));
        assert!(close(eta, 4.7756e-3, 1e-7));
        assert_eq!(
            rate_offline(500, 7, 7, OfflineVariant::BestSet).unwrap(),
            rate_offline(500, 7, 3, OfflineVariant::AllExperts).unwrap()
        );
        assert!(rate_offline(10, 5, 6, OfflineVariant::BestSet).is_err());
        assert!(rate_offline(10, 5, 0, OfflineVariant::BestSet).is_err());
        // η̄ = 1 maps to η = 1/2.
        assert_eq!(rate_from_bar(1.0), 0.5);
    }

    #[test]
    fn anytime_examples() {
        assert!(close(rate_anytime(1, 2), 0.41628, 5e-6));
        assert!(close(rate_anytime(100, 2), 0.041628, 5e-7));
        for t in 1..200 {
            let ratio = rate_anytime(t + 1, 5) / rate_anytime(t, 5);
            assert!(close(ratio, sqrt(t as f64 / (t as f64 + 1.0)), 1e-14));
        }
    }

    #[test]
    fn sparse_examples() {
        // sqrt(ln 10 / 20) = 0.339307...
        assert!(close(rate_sparse(5, 10, 2), 0.339307, 1e-6));
        assert!(close(rate_sparse(1, 2, 1), 0.58871, 5e-6));
        assert_eq!(rate_sparse(17, 6, 6), rate_anytime(17, 6));
    }

    #[test]
    fn shifting_examples() {
        // sqrt(ln 2 / 4) · ln 4 = 0.577083...
        assert!(close(rate_shifting(1, 2), 0.577083, 1e-6));
        assert!(rate_shifting(1, 2) <= 0.6);
        assert!(close(rate_shifting(100, 2), 0.192933, 1e-6));
    }

    #[test]
    fn self_confident_examples() {
        let ln2 = core::f64::consts::LN_2;
        assert!(close(self_confident_candidate(10.0, 2, 0.5), sqrt(2.0 * ln2 / 10.0), 1e-15));
        assert!(close(self_confident_candidate(10.0, 2, 0.5), 0.37233, 5e-6));
        assert_eq!(self_confident_candidate(0.0, 2, 0.5), 0.5);
        let clamped = clamp_rate_ratio(0.999, 400);
        assert!(close(clamped, sqrt(400.0 / 401.0), 1e-15));
        assert!(close(clamped, 0.99875, 5e-6));
        assert_eq!(clamp_rate_ratio(0.9, 400), 0.9);
    }

    #[test]
    fn best_set_tie_breaks() {
        let mut tracker = BestSetTracker::new(3);
        assert_eq!(tracker.m(1), 1);
        let best = tracker.update(&round(&[0.3, 0.7, 0.7]), 1).unwrap();
        assert_eq!(best, 1);
        assert_eq!(tracker.members(2), vec![1]);
        assert_eq!(tracker.m(2), 1);

        let mut tracker = BestSetTracker::new(3);
        tracker.update(&round(&[0.1, 0.2, 0.9]), 2).unwrap();
        let best = tracker.update(&round(&[0.3, 0.7, 0.7]), 5).unwrap();
        assert_eq!(best, 2);
        assert_eq!(tracker.members(6), vec![2]);
    }

    #[test]
    fn best_set_enters_strictly_after_first_best() {
        let mut tracker = BestSetTracker::new(2);
        tracker.update(&round(&[0.9, 0.1]), 3).unwrap();
        assert!(tracker.members(3).is_empty());
        assert_eq!(tracker.members(4), vec![0]);
    }

    #[test]
    fn inverse_t_identity() {
        for c in [1.0, 1.5, 3.0] {
            for t in 2..100 {
                let eta = rate_inverse_t(t, c);
                assert!(close(eta / (1.0 - eta), rate_inverse_t(t - 1, c), 1e-15));
            }
        }
    }

    #[test]
    fn parse_schedules() {
        assert_eq!("fixed:0.5".parse::<ScheduleConfig>().unwrap(), ScheduleConfig::Fixed(0.5));
        assert_eq!("fixed=0.5".parse::<ScheduleConfig>().unwrap(), ScheduleConfig::Fixed(0.5));
        assert_eq!("inverse-t:3".parse::<ScheduleConfig>().unwrap(), ScheduleConfig::InverseT(3.0));
        assert_eq!("anytime".parse::<ScheduleConfig>().unwrap(), ScheduleConfig::Anytime);
        assert_eq!(
            "self-confident".parse::<ScheduleConfig>().unwrap(),
            ScheduleConfig::SelfConfident { eta_max: 0.5 }
        );
        assert_eq!(
            "self-confident:0.25".parse::<ScheduleConfig>().unwrap(),
            ScheduleConfig::SelfConfident { eta_max: 0.25 }
        );
        assert!("fixed:1.5".parse::<ScheduleConfig>().is_err());
        assert!("fixed".parse::<ScheduleConfig>().is_err());
        assert!("doubling".parse::<ScheduleConfig>().is_err());
        let s = ScheduleConfig::InverseT(1.5);
        assert_eq!(s.to_string().parse::<ScheduleConfig>().unwrap(), s);
    }

    #[test]
    fn schedules_emit_monotone_rates_in_unit_interval() {
        let r = round(&[0.2, 0.9, 0.4, 0.1]);
        for config in [
            ScheduleConfig::Anytime,
            ScheduleConfig::Sparse,
            ScheduleConfig::Shifting,
            ScheduleConfig::SelfConfident { eta_max: 0.5 },
        ] {
            for n in [2usize, 4, 20] {
                let r = ReducedRound::new(r.as_slice().iter().cycle().take(n).copied().collect()).unwrap();
                let mut s = RateSchedule::new(config, n).unwrap();
                let mut prev = s.current();
                assert!(prev > 0.0 && prev < 1.0, "{config} at N={n}: {prev}");
                for _ in 0..2000 {
                    let next = s.advance(&r, Some(0.3)).unwrap();
                    assert!(next > 0.0 && next <= prev);
                    prev = next;
                }
            }
        }
    }

    #[test]
    fn shifting_rate_is_strictly_decreasing() {
        let mut prev = rate_shifting(1, 2);
        for t in 2..=1_000_000 {
            let r = rate_shifting(t, 2);
            assert!(r < prev, "not decreasing at t={t}");
            prev = r;
        }
    }

    #[test]
    fn online_schedules_need_two_experts() {
        assert!(RateSchedule::new(ScheduleConfig::Anytime, 1).is_err());
        assert!(RateSchedule::new(ScheduleConfig::Fixed(0.5), 1).is_ok());
    }
}

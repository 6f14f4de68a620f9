//! Seeded numeric checks of the inequalities behind the regret analysis,
//! and of the disjoint-support equivalence.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha20Rng;

use crate::comparators::disjoint_closed_form;
use crate::error::Result;
use crate::generators::{gen_disjoint_dirac, seeded_rng, uniform01, uniform_index};
use crate::learners::{Learner, SoftBayes};
use crate::math::{exp, ln, ln_1p, sqrt};
use crate::rates::ScheduleConfig;

/// Allowed `lhs - rhs` before a sample counts as a violation.
pub const LEMMA_SLACK: f64 = 1e-12;

/// Outcome of checking one inequality `lhs <= rhs` on many samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaCheck {
    pub name: &'static str,
    pub samples: usize,
    pub violations: usize,
    /// Largest observed `lhs - rhs`.
    pub max_excess: f64,
}

impl LemmaCheck {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn run_check<F>(name: &'static str, samples: usize, seed: u64, stream: u64, mut sample: F) -> LemmaCheck
where
    F: FnMut(&mut ChaCha20Rng) -> (f64, f64),
{
    let mut rng = seeded_rng(seed, stream);
    let mut violations = 0;
    let mut max_excess = f64::NEG_INFINITY;
    for _ in 0..samples {
        let (lhs, rhs) = sample(&mut rng);
        let excess = lhs - rhs;
        // NaN counts as a violation.
        if !(excess <= LEMMA_SLACK) && !(lhs == f64::NEG_INFINITY) {
            violations += 1;
        }
        if excess > max_excess || excess.is_nan() {
            max_excess = excess;
        }
    }
    LemmaCheck { name, samples, violations, max_excess }
}

/// Log-uniform draw from `[lo, hi]`.
fn log_uniform(rng: &mut ChaCha20Rng, lo: f64, hi: f64) -> f64 {
    exp(ln(lo) + uniform01(rng) * (ln(hi) - ln(lo)))
}

/// Draw from `(0, hi]`.
fn open_unit(rng: &mut ChaCha20Rng, hi: f64) -> f64 {
    hi * (1.0 - uniform01(rng))
}

/// `-ln(1-x) <= x/(1-x)` for `x < 1`.
pub fn check_neg_log_one_minus(samples: usize, seed: u64) -> LemmaCheck {
    run_check("neg-log-one-minus", samples, seed, 10, |rng| {
        let x = if uniform01(rng) < 0.5 { 1.0 - log_uniform(rng, 1e-9, 1.0) } else { -log_uniform(rng, 1e-9, 1e3) };
        (-ln_1p(-x), x / (1.0 - x))
    })
}

/// `ln(1+x) >= 2x/(2+x)` for `x >= 0`.
pub fn check_log_lower(samples: usize, seed: u64) -> LemmaCheck {
    run_check("log-lower", samples, seed, 11, |rng| {
        let x = log_uniform(rng, 1e-9, 1e6);
        (2.0 * x / (2.0 + x), ln_1p(x))
    })
}

/// `ln(1+x) <= x - (x²/2)/(1+x)` for `x >= 0`.
pub fn check_log_upper(samples: usize, seed: u64) -> LemmaCheck {
    run_check("log-upper", samples, seed, 12, |rng| {
        let x = log_uniform(rng, 1e-9, 1e6);
        (ln_1p(x), x - (x * x / 2.0) / (1.0 + x))
    })
}

/// `(1/x) ln(1/(1-x)) - 1 <= x/2 + x²` for `x` in `(0, 1/2]`.
pub fn check_scaled_neg_log(samples: usize, seed: u64) -> LemmaCheck {
    run_check("scaled-neg-log", samples, seed, 13, |rng| {
        let x = open_unit(rng, 0.5);
        (-ln_1p(-x) / x - 1.0, x / 2.0 + x * x)
    })
}

/// `x - 1 <= (1/η) ln(1-η+ηx) + (η/(1-η))(x-1)²` for `x >= 0`, `η` in `(0, 1)`.
pub fn check_rate_log(samples: usize, seed: u64) -> LemmaCheck {
    run_check("rate-log", samples, seed, 14, |rng| {
        let x = if uniform01(rng) < 0.1 { 0.0 } else { log_uniform(rng, 1e-6, 1e3) };
        let eta = open_unit(rng, 1.0).min(1.0 - 1e-9);
        (x - 1.0, ln_1p(eta * (x - 1.0)) / eta + eta / (1.0 - eta) * (x - 1.0) * (x - 1.0))
    })
}

/// `-ln(1 - (ln(t+3)/ln(t+2)) sqrt((t-1)/t)) <= ln t + 1.6`, exhaustively for `t = 1..=max_t`.
pub fn check_shifting_restart(max_t: usize) -> LemmaCheck {
    let mut t = 0usize;
    run_check("shifting-restart", max_t, 0, 15, |_| {
        t += 1;
        let tf = t as f64;
        let ratio = ln(tf + 3.0) / ln(tf + 2.0) * sqrt((tf - 1.0) / tf);
        (-ln(1.0 - ratio), ln(tf) + 1.6)
    })
}

/// Random `(a, q)` with `a` on the simplex (possibly sparse) and `q >= 0`
/// (possibly zero or large).
fn mixture_sample(rng: &mut ChaCha20Rng) -> (Vec<f64>, Vec<f64>) {
    let n = 1 + uniform_index(rng, 8);
    let mut a: Vec<f64> = (0..n).map(|_| if uniform01(rng) < 0.2 { 0.0 } else { uniform01(rng) }).collect();
    let k = uniform_index(rng, n);
    a[k] += 0.1;
    let sum: f64 = a.iter().sum();
    a.iter_mut().for_each(|x| *x /= sum);
    let q = (0..n)
        .map(|_| match uniform_index(rng, 4) {
            0 => 0.0,
            1 => uniform01(rng),
            2 => log_uniform(rng, 1e-3, 1e3),
            _ => 1.0 + uniform01(rng),
        })
        .collect();
    (a, q)
}

fn soft_log_mixture(a: &[f64], q: &[f64], eta: f64) -> f64 {
    a.iter().zip(q).map(|(ai, qi)| ai * ln_1p(eta * (qi - 1.0))).sum::<f64>() / eta
}

/// `ln Σ a_i q_i <= (1/η) Σ a_i ln(1-η+ηq_i) + max_i ln(1 + (η/(1-η)) q_i)`
/// for `η` in `(0, 1)`.
pub fn check_reverse_jensen(samples: usize, seed: u64) -> LemmaCheck {
    run_check("reverse-jensen", samples, seed, 16, |rng| {
        let (a, q) = mixture_sample(rng);
        let eta = open_unit(rng, 1.0).min(1.0 - 1e-9);
        let bar = eta / (1.0 - eta);
        let lhs = ln(a.iter().zip(&q).map(|(x, y)| x * y).sum());
        let max_term = q.iter().map(|&qi| ln_1p(bar * qi)).fold(f64::NEG_INFINITY, f64::max);
        (lhs, soft_log_mixture(&a, &q, eta) + max_term)
    })
}

/// `ln Σ a_i q_i <= (1/η) Σ a_i ln(1-η+ηq_i) + max_i (η/2)(q_i - 1) + η²`
/// for `η` in `(0, 1/2]`.
pub fn check_reverse_jensen_half(samples: usize, seed: u64) -> LemmaCheck {
    run_check("reverse-jensen-half", samples, seed, 17, |rng| {
        let (a, q) = mixture_sample(rng);
        let eta = open_unit(rng, 0.5);
        let lhs = ln(a.iter().zip(&q).map(|(x, y)| x * y).sum());
        let max_term = q.iter().map(|&qi| eta / 2.0 * (qi - 1.0)).fold(f64::NEG_INFINITY, f64::max);
        (lhs, soft_log_mixture(&a, &q, eta) + max_term + eta * eta)
    })
}

/// Every scalar and reverse-Jensen check at `samples` draws each.
pub fn all_lemma_checks(samples: usize, seed: u64) -> Vec<LemmaCheck> {
    vec![
        check_neg_log_one_minus(samples, seed),
        check_log_lower(samples, seed),
        check_log_upper(samples, seed),
        check_scaled_neg_log(samples, seed),
        check_rate_log(samples, seed),
        check_shifting_restart(samples),
        check_reverse_jensen(samples, seed),
        check_reverse_jensen_half(samples, seed),
    ]
}

/// Largest deviation between Soft-Bayes with `η_t = 1/(t+c)` on a
/// disjoint-support stream and the count-based closed form, over every
/// prediction and every updated weight vector.
pub fn disjoint_equivalence_gap(symbols: &[usize], n: usize, c: f64) -> Result<f64> {
    let stream = gen_disjoint_dirac(symbols, n)?;
    let mut learner = SoftBayes::uniform(ScheduleConfig::InverseT(c), n)?;
    let mut counts = vec![0usize; n];
    let mut gap: f64 = 0.0;
    for (t, (round, &symbol)) in stream.rounds().iter().zip(symbols).enumerate() {
        let before = disjoint_closed_form(&counts, t, c, n)?;
        let outcome = learner.step(round)?;
        gap = gap.max((outcome.prediction - before[symbol - 1]).abs());
        counts[symbol - 1] += 1;
        let after = disjoint_closed_form(&counts, t + 1, c, n)?;
        for (w, v) in outcome.new_weights.iter().zip(&after) {
            gap = gap.max((w - v).abs());
        }
    }
    Ok(gap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_lemmas_hold() {
        for check in all_lemma_checks(20_000, 7) {
            assert!(check.passed(), "{check:?}");
            assert_eq!(check.samples, 20_000);
        }
    }

    #[test]
    fn detects_a_false_inequality() {
        // ln(1+x) <= x/2 fails for small x.
        let check = run_check("false", 100, 1, 99, |rng| {
            let x = open_unit(rng, 0.1);
            (ln_1p(x), x / 2.0)
        });
        assert_eq!(check.violations, 100);
        assert!(check.max_excess > 0.0);
    }

    #[test]
    fn restart_lemma_small_t() {
        // t = 1 makes the ratio zero.
        let check = check_shifting_restart(1);
        assert!(check.passed());
        assert_eq!(check.max_excess, -1.6);
    }

    #[test]
    fn disjoint_equivalence_small_cases() {
        assert!(disjoint_equivalence_gap(&[1, 1], 3, 3.0).unwrap() < 1e-15);
        assert!(disjoint_equivalence_gap(&[1, 2, 1, 3, 3], 3, 1.5).unwrap() < 1e-15);
        assert!(disjoint_equivalence_gap(&[2, 2, 1], 2, 1.0).unwrap() < 1e-15);
    }
}

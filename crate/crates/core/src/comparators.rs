//! Regret accounting: hindsight comparators, regret reports, closed-form
//! regret bounds, and the disjoint-support estimator.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::loss::LossLedger;
use crate::math::{ln, powi, sqrt};
use crate::simplex::SimplexVector;
use crate::stream::ExpertStream;

/// Default relative tolerance of [`best_fixed_mixture`].
pub const SOLVER_TOLERANCE: f64 = 1e-10;
/// Default iteration cap of [`best_fixed_mixture`].
pub const SOLVER_MAX_ITER: usize = 100_000;
/// Additive slack when checking a regret against a bound.
pub const BOUND_SLACK: f64 = 1e-6;

/// Best constant mixture of the experts on a stream.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureSolution {
    pub a: SimplexVector,
    /// `-Σ_t ln Σ_i a^i p^i_t`, in nats.
    pub loss: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Certified upper bound on `loss - optimal loss`.
    pub gap_bound: f64,
}

impl MixtureSolution {
    /// A lower bound on the optimal comparator loss.
    pub fn certified_loss(&self) -> f64 {
        (self.loss - self.gap_bound).max(0.0)
    }
}

/// `-Σ_t ln Σ_i a^i p^i_t`; `+inf` if some round gets probability zero.
pub fn mixture_loss(stream: &ExpertStream, a: &[f64]) -> f64 {
    stream
        .rounds()
        .iter()
        .map(|r| {
            let m: f64 = a.iter().zip(r.as_slice()).map(|(x, p)| x * p).sum();
            -ln(m)
        })
        .sum()
}

/// Best single expert in hindsight: `(index, loss)`, lowest index on ties.
pub fn best_single_expert(stream: &ExpertStream) -> (usize, f64) {
    let mut losses = vec![0.0; stream.experts()];
    for r in stream.rounds() {
        for (acc, &p) in losses.iter_mut().zip(r.as_slice()) {
            *acc -= ln(p);
        }
    }
    losses
        .into_iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, l)| if l < best.1 { (i, l) } else { best })
}

/// Multiplier `g_i = (1/T) Σ_t p^i_t / A_t` and objective `Σ_t ln A_t`.
fn fixed_point_terms(stream: &ExpertStream, a: &[f64], g: &mut [f64]) -> f64 {
    g.iter_mut().for_each(|x| *x = 0.0);
    let mut objective = 0.0;
    for r in stream.rounds() {
        let p = r.as_slice();
        let m: f64 = a.iter().zip(p).map(|(x, q)| x * q).sum();
        objective += ln(m);
        for (gi, &q) in g.iter_mut().zip(p) {
            *gi += q / m;
        }
    }
    let t = stream.horizon() as f64;
    g.iter_mut().for_each(|x| *x /= t);
    objective
}

/// Maximizes `Σ_t ln Σ_i a^i p^i_t` over the simplex.
///
/// Runs the multiplicative fixed-point iteration `a^i ← a^i g_i` from the
/// uniform point, which never decreases the objective, and stops once the
/// relative change falls below `tol`. The returned point is the better of the
/// final iterate and the best vertex, so its loss never exceeds the best
/// single expert's. Concavity gives the certificate
/// `optimum - objective <= T (max_i g_i - 1)`.
pub fn best_fixed_mixture(stream: &ExpertStream, tol: f64, max_iter: usize) -> Result<MixtureSolution> {
    if stream.is_empty() {
        return Err(Error::EmptyStream);
    }
    let n = stream.experts();
    let horizon = stream.horizon() as f64;
    let mut a = vec![1.0 / n as f64; n];
    let mut g = vec![0.0; n];
    let mut objective = fixed_point_terms(stream, &a, &mut g);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        let mut next: Vec<f64> = a.iter().zip(&g).map(|(x, gi)| x * gi).collect();
        let sum: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= sum);
        let mut next_g = vec![0.0; n];
        let next_objective = fixed_point_terms(stream, &next, &mut next_g);
        iterations += 1;
        let scale = objective.abs().max(1.0);
        if next_objective < objective - 1e-12 * scale {
            return Err(Error::NonMonotoneSolver { before: objective, after: next_objective });
        }
        let change = (next_objective - objective).abs();
        a = next;
        g = next_g;
        objective = next_objective;
        if change <= tol * scale {
            converged = true;
            break;
        }
    }

    let gap_bound = (horizon * (g.iter().copied().fold(f64::NEG_INFINITY, f64::max) - 1.0)).max(0.0);
    let mut solution = MixtureSolution { a: SimplexVector::new(a)?, loss: -objective, iterations, converged, gap_bound };

    let (vertex, vertex_loss) = best_single_expert(stream);
    if vertex_loss <= solution.loss {
        let e = SimplexVector::vertex(n, vertex);
        fixed_point_terms(stream, e.as_slice(), &mut g);
        // At a vertex only max_i g_i over experts with finite multiplier is meaningful.
        let gmax = g.iter().copied().filter(|x| x.is_finite()).fold(f64::NEG_INFINITY, f64::max);
        let vertex_gap = if gmax.is_finite() { (horizon * (gmax - 1.0)).max(0.0) } else { f64::INFINITY };
        solution = MixtureSolution {
            a: e,
            loss: vertex_loss,
            iterations,
            converged,
            gap_bound: vertex_gap.min(solution.gap_bound + (solution.loss - vertex_loss)),
        };
    }
    Ok(solution)
}

/// Boundaries `1 = t_1 < t_2 < ... < t_K <= T` of a piecewise-constant comparator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentSpec {
    boundaries: Vec<usize>,
    horizon: usize,
}

impl SegmentSpec {
    pub fn new(boundaries: Vec<usize>, horizon: usize) -> Result<Self> {
        let valid = boundaries.first() == Some(&1)
            && boundaries.windows(2).all(|w| w[0] < w[1])
            && boundaries.last().is_some_and(|&b| b <= horizon);
        if !valid {
            return Err(Error::InvalidSegments);
        }
        Ok(SegmentSpec { boundaries, horizon })
    }

    /// Builds from the interior split points `t_2, t_3, ...`.
    pub fn from_splits(splits: &[usize], horizon: usize) -> Result<Self> {
        let mut boundaries = vec![1];
        boundaries.extend_from_slice(splits);
        Self::new(boundaries, horizon)
    }

    /// `K`.
    pub fn count(&self) -> usize {
        self.boundaries.len()
    }

    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    /// Inclusive 1-based `(start, end)` of each segment.
    pub fn ranges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.boundaries.iter().enumerate().map(move |(k, &start)| {
            let end = self.boundaries.get(k + 1).map_or(self.horizon, |&next| next - 1);
            (start, end)
        })
    }
}

/// Best piecewise-constant mixture: one [`best_fixed_mixture`] per segment.
pub fn shifting_best(
    stream: &ExpertStream,
    segments: &SegmentSpec,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<MixtureSolution>, f64)> {
    if segments.horizon != stream.horizon() {
        return Err(Error::InvalidSegments);
    }
    let per_segment = segments
        .ranges()
        .map(|(start, end)| best_fixed_mixture(&stream.segment(start, end), tol, max_iter))
        .collect::<Result<Vec<_>>>()?;
    let total = per_segment.iter().map(|s| s.loss).sum();
    Ok((per_segment, total))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegretReport {
    pub learner_loss: f64,
    pub comparator_loss: f64,
    /// `+inf` when the learner diverged against a finite comparator.
    pub regret: f64,
    pub bound: Option<f64>,
    pub bound_satisfied: Option<bool>,
}

/// Regret of a learner's loss record against a comparator, checked against
/// `bound` with [`BOUND_SLACK`].
pub fn regret_report(ledger: &LossLedger, comparator_loss: f64, bound: Option<f64>) -> RegretReport {
    let learner_loss = ledger.total();
    let regret = if learner_loss.is_infinite() && comparator_loss.is_finite() {
        f64::INFINITY
    } else {
        learner_loss - comparator_loss
    };
    RegretReport {
        learner_loss,
        comparator_loss,
        regret,
        bound,
        bound_satisfied: bound.map(|b| regret <= b + BOUND_SLACK),
    }
}

/// Closed-form regret upper bounds for Soft-Bayes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// Fixed `η̄`: `(1/η̄) ln N + η̄ m T + m ln(N/m) + ln N`.
    Offline,
    /// `η̄` tuned to `(T, m)`: `2 sqrt(T m ln N) + m ln(N/m) + ln N`.
    OfflineTuned,
    /// `η̄` tuned to `(T, N)`: `2 sqrt(T N ln N) + ln N`.
    OfflineTunedAll,
    /// `(1/η̄) ln N + η̄ max_i Σ_t (p^i_t/M_t - 1)² + ln N`.
    SecondOrderCumulative,
    /// `(1/η̄) ln N + η̄ T C_2 + ln N`.
    SecondOrder,
    /// `2 sqrt(T C_2 ln N) + ln N`.
    SecondOrderTuned,
    /// `min{C_1, (1/η) ln N + (η/2) C_1 + η² T}`.
    SelfConfident,
    /// `min{C_1, sqrt(2 C_1 ln N) + 2 T ln N / C_1}`.
    SelfConfidentTuned,
    /// Anytime rate with online correction.
    Anytime,
    /// Best-set tracking rate with online correction.
    Sparse,
    /// `K`-shifting regret with the shifting rate.
    Shifting,
    /// Against expert `i`: `(1/η) ln(1 / w^i_1)`.
    SingleExpert,
}

impl Bound {
    pub const ALL: [Bound; 12] = [
        Bound::Offline,
        Bound::OfflineTuned,
        Bound::OfflineTunedAll,
        Bound::SecondOrderCumulative,
        Bound::SecondOrder,
        Bound::SecondOrderTuned,
        Bound::SelfConfident,
        Bound::SelfConfidentTuned,
        Bound::Anytime,
        Bound::Sparse,
        Bound::Shifting,
        Bound::SingleExpert,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Bound::Offline => "offline",
            Bound::OfflineTuned => "offline-tuned",
            Bound::OfflineTunedAll => "offline-tuned-all",
            Bound::SecondOrderCumulative => "second-order-cumulative",
            Bound::SecondOrder => "second-order",
            Bound::SecondOrderTuned => "second-order-tuned",
            Bound::SelfConfident => "self-confident",
            Bound::SelfConfidentTuned => "self-confident-tuned",
            Bound::Anytime => "anytime",
            Bound::Sparse => "sparse",
            Bound::Shifting => "shifting",
            Bound::SingleExpert => "single-expert",
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Bound {
    type Err = Error;

    /// Descriptive names, plus the short `thm2`..`thm7` aliases used by the CLI.
    fn from_str(s: &str) -> Result<Self> {
        let alias = match s {
            "thm2" => Some(Bound::Offline),
            "thm2-tuned" => Some(Bound::OfflineTuned),
            "thm2-tuned-n" => Some(Bound::OfflineTunedAll),
            "thm3" => Some(Bound::SecondOrder),
            "thm3-cumulative" => Some(Bound::SecondOrderCumulative),
            "thm3-tuned" => Some(Bound::SecondOrderTuned),
            "thm4" => Some(Bound::SelfConfident),
            "thm4-tuned" => Some(Bound::SelfConfidentTuned),
            "thm5" => Some(Bound::Anytime),
            "thm6" => Some(Bound::Sparse),
            "thm7" => Some(Bound::Shifting),
            _ => None,
        };
        alias
            .or_else(|| Bound::ALL.into_iter().find(|b| b.name() == s))
            .ok_or_else(|| Error::Parse(format!("unknown bound `{s}`")))
    }
}

/// Symbols a bound may depend on. Unset symbols are errors only if the
/// chosen bound needs them.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundParams {
    /// `T`.
    pub horizon: Option<usize>,
    /// `N`.
    pub experts: Option<usize>,
    /// `m`, the number of sometimes-best experts.
    pub best_set: Option<usize>,
    /// `K`, the number of comparator segments.
    pub segments: Option<usize>,
    /// `η`; `η̄` is derived from it when not given.
    pub eta: Option<f64>,
    pub eta_bar: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    /// `max_i Σ_t (p^i_t/M_t - 1)²`.
    pub max_cumulative_sq: Option<f64>,
    /// `w^i_1` of the reference expert; `1/N` when unset.
    pub prior_weight: Option<f64>,
}

impl BoundParams {
    fn t(&self) -> Result<f64> {
        match self.horizon {
            Some(t) if t >= 1 => Ok(t as f64),
            Some(_) => Err(Error::InvalidParameter("T must be at least 1")),
            None => Err(Error::MissingParameter("T")),
        }
    }

    fn n(&self) -> Result<f64> {
        match self.experts {
            Some(n) if n >= 2 => Ok(n as f64),
            Some(_) => Err(Error::InvalidParameter("N must be at least 2")),
            None => Err(Error::MissingParameter("N")),
        }
    }

    fn m(&self) -> Result<f64> {
        let n = self.n()?;
        let m = self.best_set.ok_or(Error::MissingParameter("m"))? as f64;
        if m < 1.0 || m > n {
            return Err(Error::InvalidParameter("m must lie in [1, N]"));
        }
        Ok(m)
    }

    fn eta(&self) -> Result<f64> {
        let eta = match (self.eta, self.eta_bar) {
            (Some(eta), _) => eta,
            (None, Some(bar)) => bar / (1.0 + bar),
            (None, None) => return Err(Error::MissingParameter("η")),
        };
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidParameter("η must lie in (0, 1]"));
        }
        Ok(eta)
    }

    fn eta_bar(&self) -> Result<f64> {
        let bar = match (self.eta_bar, self.eta) {
            (Some(bar), _) => bar,
            (None, Some(eta)) => eta / (1.0 - eta),
            (None, None) => return Err(Error::MissingParameter("η̄")),
        };
        if !(bar > 0.0 && bar.is_finite()) {
            return Err(Error::InvalidParameter("η̄ must be positive and finite"));
        }
        Ok(bar)
    }

    fn nonneg(value: Option<f64>, name: &'static str) -> Result<f64> {
        let v = value.ok_or(Error::MissingParameter(name))?;
        if !(v >= 0.0) {
            return Err(Error::InvalidParameter("statistics must be nonnegative"));
        }
        Ok(v)
    }
}

/// Evaluates the right-hand side of `bound` at `params`.
pub fn theoretical_bound(bound: Bound, params: &BoundParams) -> Result<f64> {
    let p = params;
    Ok(match bound {
        Bound::Offline => {
            let (t, n, m, bar) = (p.t()?, p.n()?, p.m()?, p.eta_bar()?);
            ln(n) / bar + bar * m * t + m * ln(n / m) + ln(n)
        }
        Bound::OfflineTuned => {
            let (t, n, m) = (p.t()?, p.n()?, p.m()?);
            2.0 * sqrt(t * m * ln(n)) + m * ln(n / m) + ln(n)
        }
        Bound::OfflineTunedAll => {
            let (t, n) = (p.t()?, p.n()?);
            2.0 * sqrt(t * n * ln(n)) + ln(n)
        }
        Bound::SecondOrderCumulative => {
            let (n, bar) = (p.n()?, p.eta_bar()?);
            let v = BoundParams::nonneg(p.max_cumulative_sq, "max_i Σ_t (p/M - 1)²")?;
            ln(n) / bar + bar * v + ln(n)
        }
        Bound::SecondOrder => {
            let (t, n, bar) = (p.t()?, p.n()?, p.eta_bar()?);
            let c2 = BoundParams::nonneg(p.c2, "C2")?;
            ln(n) / bar + bar * t * c2 + ln(n)
        }
        Bound::SecondOrderTuned => {
            let (t, n) = (p.t()?, p.n()?);
            let c2 = BoundParams::nonneg(p.c2, "C2")?;
            2.0 * sqrt(t * c2 * ln(n)) + ln(n)
        }
        Bound::SelfConfident => {
            let (t, n, eta) = (p.t()?, p.n()?, p.eta()?);
            let c1 = BoundParams::nonneg(p.c1, "C1")?;
            c1.min(ln(n) / eta + eta / 2.0 * c1 + eta * eta * t)
        }
        Bound::SelfConfidentTuned => {
            let (t, n) = (p.t()?, p.n()?);
            let c1 = BoundParams::nonneg(p.c1, "C1")?;
            if c1 == 0.0 {
                0.0
            } else {
                c1.min(sqrt(2.0 * c1 * ln(n)) + 2.0 * t * ln(n) / c1)
            }
        }
        Bound::Anytime => {
            let (t, n) = (p.t()?, p.n()?);
            2.0 * sqrt(2.0 * (t + 1.0) * n * ln(n)) + (n / 2.0 + ln(n)) * ln(t + 1.0) + ln(n)
        }
        Bound::Sparse => {
            let (t, n, m) = (p.t()?, p.n()?, p.m()?);
            2.0 * sqrt(2.0 * m * (t + 1.0) * ln(n))
                + (m + ln(n)) * ln(t)
                + m * ln(n / m)
                + 1.2 * m
                + sqrt(0.5 * ln(n)) * (1.0 + ln(m))
                + 3.5 * ln(n)
        }
        Bound::Shifting => {
            let (t, n) = (p.t()?, p.n()?);
            if t < 2.0 {
                return Err(Error::InvalidParameter("shifting bound needs T >= 2"));
            }
            let k = p.segments.ok_or(Error::MissingParameter("K"))? as f64;
            if k < 1.0 {
                return Err(Error::InvalidParameter("K must be at least 1"));
            }
            sqrt(2.0 * (t + 1.0) * n * ln(n)) * (ln(t + 3.0) + k * (2.0 / ln(n) + 1.0 / ln(t)))
                + 1.25 * ln(n) / n * powi(1.0 + ln(t), 3)
                + n / 2.0 * ln(t + 1.0)
        }
        Bound::SingleExpert => {
            let eta = p.eta()?;
            let w1 = match p.prior_weight {
                Some(w) if w > 0.0 && w <= 1.0 => w,
                Some(_) => return Err(Error::InvalidParameter("prior weight must lie in (0, 1]")),
                None => 1.0 / p.n()?,
            };
            ln(1.0 / w1) / eta
        }
    })
}

/// Predictive distribution `((n^i + c/N) / (t + c))_i` after `t` symbols.
///
/// `c = 1`, `N/2`, `N` give Perks', the KT, and Laplace's estimators.
pub fn disjoint_closed_form(counts: &[usize], t: usize, c: f64, n: usize) -> Result<Vec<f64>> {
    if counts.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: counts.len() });
    }
    if counts.iter().sum::<usize>() != t {
        return Err(Error::InvalidParameter("counts must sum to t"));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter("c must be positive"));
    }
    let denom = t as f64 + c;
    let prior = c / n as f64;
    Ok(counts.iter().map(|&k| (k as f64 + prior) / denom).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss::Loss;

    fn stream(n: usize, rows: &[&[f64]]) -> ExpertStream {
        ExpertStream::from_rows(n, rows.iter().map(|r| r.to_vec())).unwrap()
    }

    /// Grid search over the 2-simplex at step 0.01.
    fn grid_oracle_2(s: &ExpertStream) -> (f64, f64) {
        (0..=100)
            .map(|k| {
                let a = k as f64 / 100.0;
                (a, mixture_loss(s, &[a, 1.0 - a]))
            })
            .fold((0.0, f64::INFINITY), |b, x| if x.1 < b.1 { x } else { b })
    }

    #[test]
    fn alternating_dirac_mixture() {
        let s = stream(2, &[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let (a_grid, loss_grid) = grid_oracle_2(&s);
        assert_eq!(a_grid, 0.5);
        assert!((loss_grid - 4.0 * core::f64::consts::LN_2).abs() < 1e-12);
        let sol = best_fixed_mixture(&s, SOLVER_TOLERANCE, SOLVER_MAX_ITER).unwrap();
        assert!((sol.a[0] - 0.5).abs() < 1e-12);
        assert!((sol.loss - 2.77259).abs() < 1e-5);
        assert!(sol.converged);
    }

    #[test]
    fn dominant_expert_is_selected() {
        let s = stream(3, &[&[0.9, 0.5, 0.1], &[0.6, 0.6, 0.3], &[0.7, 0.2, 0.7]]);
        let sol = best_fixed_mixture(&s, SOLVER_TOLERANCE, SOLVER_MAX_ITER).unwrap();
        assert_eq!(sol.a.as_slice(), &[1.0, 0.0, 0.0]);

        let s = stream(2, &[&[0.2, 0.6]]);
        let sol = best_fixed_mixture(&s, SOLVER_TOLERANCE, SOLVER_MAX_ITER).unwrap();
        assert_eq!(sol.a.as_slice(), &[0.0, 1.0]);
        assert!((sol.loss + ln(0.6)).abs() < 1e-15);
    }

    #[test]
    fn solver_rejects_empty_stream() {
        let s = ExpertStream::new(2).unwrap();
        assert_eq!(best_fixed_mixture(&s, 1e-10, 10), Err(Error::EmptyStream));
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let s = stream(2, &[&[0.9, 0.2], &[0.1, 0.7], &[0.5, 0.6]]);
        let sol = best_fixed_mixture(&s, 0.0, 3).unwrap();
        assert!(!sol.converged);
        assert_eq!(sol.iterations, 3);
    }

    #[test]
    fn shifting_examples() {
        let mut rows: Vec<&[f64]> = vec![&[1.0, 0.0]; 50];
        rows.extend(vec![&[0.0, 1.0][..]; 50]);
        let s = stream(2, &rows);

        let split = SegmentSpec::from_splits(&[51], 100).unwrap();
        let (parts, total) = shifting_best(&s, &split, SOLVER_TOLERANCE, SOLVER_MAX_ITER).unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(total, 0.0);

        let whole = SegmentSpec::new(vec![1], 100).unwrap();
        let (parts, total) = shifting_best(&s, &whole, SOLVER_TOLERANCE, SOLVER_MAX_ITER).unwrap();
        let direct = best_fixed_mixture(&s, SOLVER_TOLERANCE, SOLVER_MAX_ITER).unwrap();
        assert_eq!(parts[0], direct);
        let (a_grid, loss_grid) = grid_oracle_2(&s);
        assert_eq!(a_grid, 0.5);
        assert!((total - loss_grid).abs() < 1e-9);
        assert!((total - 100.0 * core::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn segment_validation() {
        assert!(SegmentSpec::new(vec![2, 5], 10).is_err());
        assert!(SegmentSpec::new(vec![1, 5, 5], 10).is_err());
        assert!(SegmentSpec::new(vec![1, 11], 10).is_err());
        let s = SegmentSpec::new(vec![1, 4, 8], 10).unwrap();
        assert_eq!(s.ranges().collect::<Vec<_>>(), vec![(1, 3), (4, 7), (8, 10)]);
        assert_eq!(s.count(), 3);
    }

    #[test]
    fn regret_report_examples() {
        let mut ledger = LossLedger::new();
        ledger.record(Loss::Finite(3.0));
        let r = regret_report(&ledger, 2.5, None);
        assert_eq!(r.regret, 0.5);
        assert_eq!(r.bound_satisfied, None);

        let mut ledger = LossLedger::new();
        ledger.record(Loss::Finite(12.0));
        let r = regret_report(&ledger, 2.0, Some(12.0));
        assert_eq!(r.regret, 10.0);
        assert_eq!(r.bound_satisfied, Some(true));

        let mut ledger = LossLedger::new();
        ledger.record(Loss::Infinite);
        let r = regret_report(&ledger, 2.0, Some(1e9));
        assert_eq!(r.regret, f64::INFINITY);
        assert_eq!(r.bound_satisfied, Some(false));
    }

    #[test]
    fn bound_examples() {
        let params = BoundParams { horizon: Some(10_000), experts: Some(2), ..Default::default() };
        let v = theoretical_bound(Bound::Anytime, &params).unwrap();
        // 2 sqrt(2·10001·2 ln 2) + (1 + ln 2) ln 10001 + ln 2
        let ln2 = core::f64::consts::LN_2;
        let direct = 2.0 * (2.0f64 * 10001.0 * 2.0 * ln2).sqrt() + (1.0 + ln2) * 10001f64.ln() + ln2;
        assert!((v - direct).abs() < 1e-9);
        assert!((v - 349.3).abs() < 0.05);

        let params = BoundParams { eta: Some(1.0), experts: Some(8), ..Default::default() };
        let v = theoretical_bound(Bound::SingleExpert, &params).unwrap();
        assert!((v - 2.0794).abs() < 1e-4);

        let params = BoundParams { horizon: Some(10_000), experts: Some(10), best_set: Some(10), ..Default::default() };
        let tuned_m = theoretical_bound(Bound::OfflineTuned, &params).unwrap();
        let tuned_n = theoretical_bound(Bound::OfflineTunedAll, &params).unwrap();
        assert!((tuned_m - 962.0).abs() < 0.05);
        assert!((tuned_m - tuned_n).abs() < 1e-9);
    }

    #[test]
    fn offline_bound_is_minimized_by_tuned_rate() {
        let params = BoundParams { horizon: Some(500), experts: Some(6), best_set: Some(3), ..Default::default() };
        let tuned = theoretical_bound(Bound::OfflineTuned, &params).unwrap();
        let bar = (6f64.ln() / (500.0 * 3.0)).sqrt();
        let at_tuned = theoretical_bound(Bound::Offline, &BoundParams { eta_bar: Some(bar), ..params }).unwrap();
        assert!((tuned - at_tuned).abs() < 1e-9);
        for scale in [0.5, 0.9, 1.1, 2.0] {
            let other = theoretical_bound(Bound::Offline, &BoundParams { eta_bar: Some(bar * scale), ..params }).unwrap();
            assert!(other > at_tuned);
        }
    }

    #[test]
    fn missing_parameters_are_errors() {
        let params = BoundParams { horizon: Some(10), ..Default::default() };
        assert_eq!(theoretical_bound(Bound::Anytime, &params), Err(Error::MissingParameter("N")));
        let params = BoundParams { horizon: Some(10), experts: Some(3), ..Default::default() };
        assert_eq!(theoretical_bound(Bound::Shifting, &params), Err(Error::MissingParameter("K")));
        assert_eq!(theoretical_bound(Bound::Sparse, &params), Err(Error::MissingParameter("m")));
        assert!(matches!(theoretical_bound(Bound::SelfConfident, &params), Err(Error::MissingParameter(_))));
    }

    #[test]
    fn self_confident_tuned_branches() {
        let base = BoundParams { horizon: Some(100), experts: Some(4), ..Default::default() };
        assert_eq!(theoretical_bound(Bound::SelfConfidentTuned, &BoundParams { c1: Some(0.0), ..base }).unwrap(), 0.0);
        let small = theoretical_bound(Bound::SelfConfidentTuned, &BoundParams { c1: Some(3.0), ..base }).unwrap();
        assert_eq!(small, 3.0);
        let c1 = 1e4;
        let big = theoretical_bound(Bound::SelfConfidentTuned, &BoundParams { c1: Some(c1), ..base }).unwrap();
        let ln4 = 4f64.ln();
        assert!((big - ((2.0 * c1 * ln4).sqrt() + 200.0 * ln4 / c1)).abs() < 1e-9);
    }

    #[test]
    fn bound_names_parse() {
        for b in Bound::ALL {
            assert_eq!(b.name().parse::<Bound>().unwrap(), b);
        }
        assert_eq!("thm5".parse::<Bound>().unwrap(), Bound::Anytime);
        assert_eq!("thm7".parse::<Bound>().unwrap(), Bound::Shifting);
        assert!("thm9".parse::<Bound>().is_err());
    }

    #[test]
    fn closed_form_examples() {
        let laplace = disjoint_closed_form(&[2, 0, 0], 2, 3.0, 3).unwrap();
        assert!((laplace[0] - 0.6).abs() < 1e-15 && (laplace[1] - 0.2).abs() < 1e-15);
        let kt = disjoint_closed_form(&[2, 0, 0], 2, 1.5, 3).unwrap();
        assert!((kt[0] - 2.5 / 3.5).abs() < 1e-15);
        assert!((kt[0] - 0.71429).abs() < 5e-6 && (kt[1] - 0.14286).abs() < 5e-6);
        let uniform = disjoint_closed_form(&[0, 0, 0, 0], 0, 2.7, 4).unwrap();
        assert!(uniform.iter().all(|&x| (x - 0.25).abs() < 1e-15));
        assert!(disjoint_closed_form(&[1, 0], 2, 1.0, 2).is_err());
    }
}

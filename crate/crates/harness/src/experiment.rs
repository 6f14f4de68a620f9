//! Running an experiment: learners over a stream, comparator, regret, bounds.

use std::thread;

use softbayes_core::comparators::{
    best_fixed_mixture, best_single_expert, regret_report, shifting_best, theoretical_bound, Bound, BoundParams,
    MixtureSolution, RegretReport, SegmentSpec, BOUND_SLACK, SOLVER_MAX_ITER, SOLVER_TOLERANCE,
};
use softbayes_core::learners::LearnerSpec;
use softbayes_core::rates::{bar_from_rate, rate_offline, BestSetTracker, OfflineVariant, ScheduleConfig};
use softbayes_core::trace::{run_learner, snapshot_interval, DivergencePolicy, LearnerTrace, TraceStats};
use softbayes_core::{ExpertStream, SimplexVector};

use crate::config::{ComparatorSpec, Experiment, ExperimentConfig, StreamSource};
use crate::error::{HarnessError, Result};
use crate::io::read_stream;

/// Relative tolerance for recognising a learner rate as a tuned rate.
const TUNED_RATE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSolution {
    pub start: usize,
    pub end: usize,
    pub solution: MixtureSolution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparatorOutcome {
    pub spec: ComparatorSpec,
    pub loss: f64,
    /// Upper bound on how far `loss` may sit above the true optimum.
    pub gap_bound: f64,
    /// One entry per segment for mixture comparators.
    pub segments: Vec<SegmentSolution>,
    /// 0-based index, for the single-best comparator.
    pub best_expert: Option<usize>,
}

/// One bound evaluated for one learner.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub bound: Bound,
    pub value: Option<f64>,
    pub satisfied: Option<bool>,
    /// Why the bound was not evaluated.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerResult {
    pub spec: LearnerSpec,
    pub trace: LearnerTrace,
    pub report: RegretReport,
    /// Certificate slack of this learner's comparator.
    pub comparator_gap: f64,
    /// Rounds dropped from regret under the continue policy.
    pub excluded_rounds: usize,
    pub stats: TraceStats,
    pub bounds: Vec<BoundCheck>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifact {
    pub experts: usize,
    pub horizon: usize,
    pub seed: u64,
    pub bits: bool,
    pub policy: DivergencePolicy,
    /// Experts ever best, `m`.
    pub best_set: usize,
    pub snapshot_every: usize,
    pub comparator: ComparatorOutcome,
    pub learners: Vec<LearnerResult>,
}

impl RunArtifact {
    /// False iff some evaluated bound check failed.
    pub fn bounds_hold(&self) -> bool {
        self.learners.iter().flat_map(|l| &l.bounds).all(|b| b.satisfied != Some(false))
    }
}

/// Loads the stream an experiment names.
pub fn load_stream(source: &StreamSource) -> Result<ExpertStream> {
    match source {
        StreamSource::File(path) => read_stream(path),
        StreamSource::Generator(spec) => Ok(spec.generate()?),
    }
}

/// Validates `config`, then runs it.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunArtifact> {
    let experiment = config.validate()?;
    let stream = load_stream(&experiment.source)?;
    run_on_stream(&experiment, &stream)
}

fn comparator_for(stream: &ExpertStream, spec: &ComparatorSpec) -> Result<ComparatorOutcome> {
    if stream.is_empty() {
        return Err(HarnessError::Core(softbayes_core::Error::EmptyStream));
    }
    let horizon = stream.horizon();
    Ok(match spec {
        ComparatorSpec::FixedMixture => {
            let solution = best_fixed_mixture(stream, SOLVER_TOLERANCE, SOLVER_MAX_ITER)?;
            ComparatorOutcome {
                spec: spec.clone(),
                loss: solution.loss,
                gap_bound: solution.gap_bound,
                segments: vec![SegmentSolution { start: 1, end: horizon, solution }],
                best_expert: None,
            }
        }
        ComparatorSpec::SingleBest => {
            let (i, loss) = best_single_expert(stream);
            ComparatorOutcome { spec: spec.clone(), loss, gap_bound: 0.0, segments: Vec::new(), best_expert: Some(i) }
        }
        ComparatorSpec::Shifting(splits) => {
            let segments = SegmentSpec::from_splits(splits, horizon)?;
            let (parts, loss) = shifting_best(stream, &segments, SOLVER_TOLERANCE, SOLVER_MAX_ITER)?;
            let gap_bound = parts.iter().map(|p| p.gap_bound).sum();
            let segments = segments
                .ranges()
                .zip(parts)
                .map(|((start, end), solution)| SegmentSolution { start, end, solution })
                .collect();
            ComparatorOutcome { spec: spec.clone(), loss, gap_bound, segments, best_expert: None }
        }
    })
}

/// Segment starts after removing the 0-based `skip` rounds; segments left
/// empty disappear.
fn remap_splits(splits: &[usize], skip: &[usize], horizon: usize) -> Vec<usize> {
    let mut out: Vec<usize> = splits
        .iter()
        .map(|&b| b - skip.iter().filter(|&&s| s + 1 < b).count())
        .filter(|&b| b > 1 && b <= horizon)
        .collect();
    out.dedup();
    out
}

/// Runs every learner over `stream` concurrently and assembles the artifact.
pub fn run_on_stream(experiment: &Experiment, stream: &ExpertStream) -> Result<RunArtifact> {
    let n = stream.experts();
    let horizon = stream.horizon();
    if horizon == 0 {
        return Err(HarnessError::Core(softbayes_core::Error::EmptyStream));
    }
    let priors = experiment.learners.iter().map(|l| l.prior(n)).collect::<Result<Vec<_>>>()?;
    let snapshot_every = snapshot_interval(n, horizon);
    let policy = experiment.policy;

    let traces: Vec<Result<LearnerTrace>> = thread::scope(|scope| {
        let handles: Vec<_> = experiment
            .learners
            .iter()
            .zip(&priors)
            .map(|(entry, prior)| {
                scope.spawn(move || -> Result<LearnerTrace> {
                    let mut learner = entry.spec.build(prior.clone(), horizon)?;
                    Ok(run_learner(&mut learner, stream, policy, snapshot_every)?)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("learner thread panicked")).collect()
    });

    let comparator = comparator_for(stream, &experiment.comparator)?;
    let best_set = BestSetTracker::final_m(stream.rounds(), n)?;

    let mut learners = Vec::with_capacity(traces.len());
    for ((entry, prior), trace) in experiment.learners.iter().zip(&priors).zip(traces) {
        let trace = trace?;
        let skip = trace.ledger.diverged_rounds();
        let continued = policy == DivergencePolicy::Continue && !skip.is_empty();
        let (report, own_comparator) = if continued {
            let kept = stream.without_rounds(&skip);
            let spec = match &experiment.comparator {
                ComparatorSpec::Shifting(splits) => ComparatorSpec::Shifting(remap_splits(splits, &skip, kept.horizon())),
                other => other.clone(),
            };
            let cmp = if kept.is_empty() {
                ComparatorOutcome { spec, loss: 0.0, gap_bound: 0.0, segments: Vec::new(), best_expert: None }
            } else {
                comparator_for(&kept, &spec)?
            };
            let learner_loss = trace.ledger.cumulative();
            let report = RegretReport {
                learner_loss,
                comparator_loss: cmp.loss,
                regret: learner_loss - cmp.loss,
                bound: None,
                bound_satisfied: None,
            };
            (report, Some(cmp))
        } else {
            (regret_report(&trace.ledger, comparator.loss, None), None)
        };
        let cmp = own_comparator.as_ref().unwrap_or(&comparator);
        let stats = TraceStats::from_trace(stream, &trace);
        let context = BoundContext {
            spec: &entry.spec,
            prior,
            comparator: cmp,
            experts: n,
            horizon: horizon - if continued { skip.len() } else { 0 },
            best_set,
            stats,
        };
        let bounds: Vec<BoundCheck> = experiment
            .bounds
            .iter()
            .map(|&b| check_bound(b, &context, report.regret + cmp.gap_bound))
            .collect();
        let tightest = bounds.iter().filter_map(|b| b.value).fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))));
        let report = RegretReport {
            bound: tightest,
            bound_satisfied: tightest.map(|_| bounds.iter().all(|b| b.satisfied != Some(false))),
            ..report
        };
        learners.push(LearnerResult {
            spec: entry.spec.clone(),
            trace,
            report,
            comparator_gap: cmp.gap_bound,
            excluded_rounds: if continued { skip.len() } else { 0 },
            stats,
            bounds,
        });
    }

    Ok(RunArtifact {
        experts: n,
        horizon,
        seed: experiment.seed,
        bits: experiment.bits,
        policy,
        best_set,
        snapshot_every,
        comparator,
        learners,
    })
}

struct BoundContext<'a> {
    spec: &'a LearnerSpec,
    prior: &'a SimplexVector,
    comparator: &'a ComparatorOutcome,
    experts: usize,
    horizon: usize,
    best_set: usize,
    stats: TraceStats,
}

fn not_applicable(bound: Bound, why: &str) -> BoundCheck {
    BoundCheck { bound, value: None, satisfied: None, note: Some(why.to_string()) }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TUNED_RATE_TOLERANCE * b.abs()
}

/// Evaluates `bound` for one learner if its hypotheses match the learner and
/// comparator. `worst_regret` already includes the comparator certificate.
fn check_bound(bound: Bound, ctx: &BoundContext<'_>, worst_regret: f64) -> BoundCheck {
    let fixed_eta = match ctx.spec {
        LearnerSpec::SoftBayes(ScheduleConfig::Fixed(eta)) => Some(*eta),
        LearnerSpec::Bayes => Some(1.0),
        _ => None,
    };
    let schedule = ctx.spec.schedule();
    let mixture = matches!(ctx.comparator.spec, ComparatorSpec::FixedMixture);
    let (t, n) = (ctx.horizon, ctx.experts);
    let mut params = BoundParams {
        horizon: Some(t),
        experts: Some(n),
        best_set: Some(ctx.best_set),
        c1: Some(ctx.stats.c1),
        c2: Some(ctx.stats.c2),
        max_cumulative_sq: Some(ctx.stats.max_cumulative_sq),
        ..Default::default()
    };

    let applicable: std::result::Result<(), &str> = match bound {
        Bound::Offline | Bound::SecondOrder | Bound::SecondOrderCumulative
        | Bound::OfflineTuned | Bound::OfflineTunedAll | Bound::SecondOrderTuned
        | Bound::SelfConfident | Bound::SelfConfidentTuned => match fixed_eta {
            _ if !mixture => Err("needs the fixed-mixture comparator"),
            Some(eta) if eta < 1.0 => {
                params.eta = Some(eta);
                let bar = bar_from_rate(eta);
                let ln_n = (n as f64).ln();
                match bound {
                    Bound::OfflineTuned => rate_offline(t, n, ctx.best_set, OfflineVariant::BestSet)
                        .ok()
                        .filter(|&tuned| close(eta, tuned))
                        .map(|_| ())
                        .ok_or("learner rate is not the tuned rate"),
                    Bound::OfflineTunedAll => rate_offline(t, n, ctx.best_set, OfflineVariant::AllExperts)
                        .ok()
                        .filter(|&tuned| close(eta, tuned))
                        .map(|_| ())
                        .ok_or("learner rate is not the tuned rate"),
                    Bound::SecondOrderTuned if !close(bar, (ln_n / (t as f64 * ctx.stats.c2)).sqrt()) => {
                        Err("learner rate is not the tuned rate")
                    }
                    Bound::SelfConfident if eta > 0.5 => Err("needs a fixed rate of at most 1/2"),
                    Bound::SelfConfidentTuned if !close(eta, (2.0 * ln_n / ctx.stats.c1).sqrt()) => {
                        Err("learner rate is not the tuned rate")
                    }
                    _ => Ok(()),
                }
            }
            _ => Err("needs a fixed rate below 1"),
        },
        Bound::Anytime => match schedule {
            Some(ScheduleConfig::Anytime) if mixture => Ok(()),
            Some(ScheduleConfig::Anytime) => Err("needs the fixed-mixture comparator"),
            _ => Err("needs the anytime schedule"),
        },
        Bound::Sparse => match schedule {
            Some(ScheduleConfig::Sparse) if mixture => Ok(()),
            Some(ScheduleConfig::Sparse) => Err("needs the fixed-mixture comparator"),
            _ => Err("needs the sparse schedule"),
        },
        Bound::Shifting => match (schedule, &ctx.comparator.spec) {
            (Some(ScheduleConfig::Shifting), ComparatorSpec::Shifting(_)) => {
                params.segments = Some(ctx.comparator.segments.len().max(1));
                Ok(())
            }
            (Some(ScheduleConfig::Shifting), ComparatorSpec::FixedMixture) => {
                params.segments = Some(1);
                Ok(())
            }
            (Some(ScheduleConfig::Shifting), _) => Err("needs a mixture comparator"),
            _ => Err("needs the shifting schedule"),
        },
        Bound::SingleExpert => match (fixed_eta, ctx.comparator.best_expert) {
            (Some(eta), Some(i)) => {
                params.eta = Some(eta);
                params.prior_weight = Some(ctx.prior[i]);
                Ok(())
            }
            (Some(_), None) => Err("needs the single-best comparator"),
            (None, _) => Err("needs a fixed rate"),
        },
    };

    if let Err(why) = applicable {
        return not_applicable(bound, why);
    }
    match theoretical_bound(bound, &params) {
        Ok(value) => BoundCheck {
            bound,
            value: Some(value),
            satisfied: Some(worst_regret <= value + BOUND_SLACK),
            note: None,
        },
        Err(e) => not_applicable(bound, &e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn remapping_segment_starts() {
        // Rounds 2 and 5 (0-based 1 and 4) removed from a stream split at 4 and 7.
        assert_eq!(remap_splits(&[4, 7], &[1, 4], 8), vec![3, 5]);
        assert_eq!(remap_splits(&[2], &[0], 9), Vec::<usize>::new());
        assert_eq!(remap_splits(&[10], &[9], 9), Vec::<usize>::new());
    }
}

//! CSV and JSON artifacts.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Serialize, Serializer};
use softbayes_core::generators::RNG_NAME;
use softbayes_core::trace::DivergencePolicy;

use crate::error::{HarnessError, Result};
use crate::experiment::{BoundCheck, LearnerResult, RunArtifact};

/// A float that serializes non-finite values as `"inf"`, `"-inf"`, `"nan"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str(&fmt_num(self.0))
        }
    }
}

/// Shortest round-trip decimal, or `inf`/`-inf`/`nan`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        x.to_string()
    }
}

struct Units {
    scale: f64,
}

impl Units {
    fn new(bits: bool) -> Self {
        Units { scale: if bits { 1.0 / std::f64::consts::LN_2 } else { 1.0 } }
    }

    fn loss(&self, x: f64) -> f64 {
        x * self.scale
    }
}

/// Writes one row per executed round per learner.
pub fn write_csv<W: Write>(artifact: &RunArtifact, writer: W) -> Result<()> {
    let units = Units::new(artifact.bits);
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["learner".to_string(), "t".into(), "eta".into(), "prediction".into(), "loss".into(), "cum_loss".into()];
    header.extend((1..=artifact.experts).map(|i| format!("w_{i}")));
    wtr.write_record(&header)?;
    for learner in &artifact.learners {
        let label = &learner.trace.label;
        for row in &learner.trace.rows {
            let mut record = vec![
                label.clone(),
                row.t.to_string(),
                row.rate.map(fmt_num).unwrap_or_default(),
                fmt_num(row.prediction),
                fmt_num(units.loss(row.loss.value())),
                fmt_num(units.loss(row.cumulative)),
            ];
            match &row.weights {
                Some(w) => record.extend(w.iter().map(|&x| fmt_num(x))),
                None => record.extend(std::iter::repeat_n(String::new(), artifact.experts)),
            }
            wtr.write_record(&record)?;
        }
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct RngJson {
    name: &'static str,
    seed: u64,
}

#[derive(Serialize)]
struct SegmentJson {
    start: usize,
    end: usize,
    a: Vec<Num>,
    loss: Num,
    iterations: usize,
    converged: bool,
    gap_bound: Num,
}

#[derive(Serialize)]
struct ComparatorJson {
    kind: String,
    loss: Num,
    gap_bound: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    best_expert: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    segments: Vec<SegmentJson>,
}

#[derive(Serialize)]
struct RegretJson {
    learner_loss: Num,
    comparator_loss: Num,
    regret: Num,
    bound: Option<Num>,
    bound_satisfied: Option<bool>,
}

#[derive(Serialize)]
struct BoundJson {
    bound: String,
    value: Option<Num>,
    satisfied: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

#[derive(Serialize)]
struct StatsJson {
    c1: Num,
    c2: Num,
    max_cumulative_sq: Num,
}

#[derive(Serialize)]
struct LearnerJson {
    label: String,
    rounds: usize,
    diverged: bool,
    halted: bool,
    excluded_rounds: usize,
    comparator_gap: Num,
    report: RegretJson,
    stats: StatsJson,
    bounds: Vec<BoundJson>,
}

#[derive(Serialize)]
struct SummaryJson {
    experts: usize,
    horizon: usize,
    unit: &'static str,
    rng: RngJson,
    on_divergence: &'static str,
    best_set: usize,
    snapshot_every: usize,
    comparator: ComparatorJson,
    learners: Vec<LearnerJson>,
    bounds_hold: bool,
}

fn bound_json(b: &BoundCheck, units: &Units) -> BoundJson {
    BoundJson {
        bound: b.bound.name().to_string(),
        value: b.value.map(|v| Num(units.loss(v))),
        satisfied: b.satisfied,
        note: b.note.clone(),
    }
}

fn learner_json(l: &LearnerResult, units: &Units) -> LearnerJson {
    let r = &l.report;
    LearnerJson {
        label: l.trace.label.clone(),
        rounds: l.trace.rows.len(),
        diverged: l.trace.diverged(),
        halted: l.trace.halted,
        excluded_rounds: l.excluded_rounds,
        comparator_gap: Num(units.loss(l.comparator_gap)),
        report: RegretJson {
            learner_loss: Num(units.loss(r.learner_loss)),
            comparator_loss: Num(units.loss(r.comparator_loss)),
            regret: Num(units.loss(r.regret)),
            bound: r.bound.map(|b| Num(units.loss(b))),
            bound_satisfied: r.bound_satisfied,
        },
        stats: StatsJson { c1: Num(l.stats.c1), c2: Num(l.stats.c2), max_cumulative_sq: Num(l.stats.max_cumulative_sq) },
        bounds: l.bounds.iter().map(|b| bound_json(b, units)).collect(),
    }
}

/// Pretty-printed JSON summary. Contains nothing about where the stream came
/// from, so a replayed stream file yields the same bytes.
pub fn summary_json(artifact: &RunArtifact) -> Result<String> {
    let units = Units::new(artifact.bits);
    let c = &artifact.comparator;
    let summary = SummaryJson {
        experts: artifact.experts,
        horizon: artifact.horizon,
        unit: if artifact.bits { "bits" } else { "nats" },
        rng: RngJson { name: RNG_NAME, seed: artifact.seed },
        on_divergence: match artifact.policy {
            DivergencePolicy::Halt => "halt",
            DivergencePolicy::Continue => "continue",
        },
        best_set: artifact.best_set,
        snapshot_every: artifact.snapshot_every,
        comparator: ComparatorJson {
            kind: c.spec.to_string(),
            loss: Num(units.loss(c.loss)),
            gap_bound: Num(units.loss(c.gap_bound)),
            best_expert: c.best_expert.map(|i| i + 1),
            segments: c
                .segments
                .iter()
                .map(|s| SegmentJson {
                    start: s.start,
                    end: s.end,
                    a: s.solution.a.as_slice().iter().map(|&x| Num(x)).collect(),
                    loss: Num(units.loss(s.solution.loss)),
                    iterations: s.solution.iterations,
                    converged: s.solution.converged,
                    gap_bound: Num(units.loss(s.solution.gap_bound)),
                })
                .collect(),
        },
        learners: artifact.learners.iter().map(|l| learner_json(l, &units)).collect(),
        bounds_hold: artifact.bounds_hold(),
    };
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    Ok(text)
}

/// Fixed-width comparison table, one line per learner.
pub fn comparison_table(artifact: &RunArtifact) -> String {
    let units = Units::new(artifact.bits);
    let unit = if artifact.bits { "bits" } else { "nats" };
    let width = artifact.learners.iter().map(|l| l.trace.label.len()).max().unwrap_or(0).max(7);
    let mut out = format!(
        "{:<width$}  {:>14}  {:>14}  {:>14}  bounds\n",
        "learner",
        format!("loss ({unit})"),
        "comparator",
        "regret"
    );
    for l in &artifact.learners {
        let r = &l.report;
        let bounds: Vec<String> = l
            .bounds
            .iter()
            .filter_map(|b| {
                let v = b.value?;
                let mark = if b.satisfied == Some(true) { "ok" } else { "FAIL" };
                Some(format!("{}={:.4} {mark}", b.bound, units.loss(v)))
            })
            .collect();
        out.push_str(&format!(
            "{:<width$}  {:>14.6}  {:>14.6}  {:>14.6}  {}\n",
            l.trace.label,
            units.loss(r.learner_loss),
            units.loss(r.comparator_loss),
            units.loss(r.regret),
            bounds.join(", ")
        ));
    }
    out
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| HarnessError::io(path, e))
}

/// Writes whichever artifacts have a path.
pub fn write_artifacts(artifact: &RunArtifact, csv_path: Option<&Path>, json_path: Option<&Path>) -> Result<()> {
    if let Some(path) = csv_path {
        write_csv(artifact, create(path)?)?;
    }
    if let Some(path) = json_path {
        let mut out = create(path)?;
        out.write_all(summary_json(artifact)?.as_bytes()).map_err(|e| HarnessError::io(path, e))?;
        out.flush().map_err(|e| HarnessError::io(path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_num(0.1), "0.1");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(serde_json::to_string(&Num(f64::INFINITY)).unwrap(), "\"inf\"");
        assert_eq!(serde_json::to_string(&Num(2.5)).unwrap(), "2.5");
    }
}

//! Experiment configuration, as read from JSON or assembled from CLI flags.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use softbayes_core::comparators::Bound;
use softbayes_core::generators::GeneratorSpec;
use softbayes_core::learners::LearnerSpec;
use softbayes_core::trace::DivergencePolicy;
use softbayes_core::SimplexVector;

use crate::error::{HarnessError, Result};

/// Where the rounds come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeneratorConfig {
    /// Short syntax, e.g. `theorem2:100` or `random-mixture:5:1000:4`.
    Named(String),
    /// Explicit mixture of categorical experts.
    Mixture { iid_mixture: MixtureConfig },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureConfig {
    pub a: Vec<f64>,
    pub dists: Vec<Vec<f64>>,
    pub horizon: usize,
}

impl GeneratorConfig {
    pub fn to_spec(&self, seed: u64) -> Result<GeneratorSpec> {
        let spec = match self {
            GeneratorConfig::Named(s) => s.parse()?,
            GeneratorConfig::Mixture { iid_mixture: m } => {
                GeneratorSpec::IidMixture { a: m.a.clone(), dists: m.dists.clone(), horizon: m.horizon, seed }
            }
        };
        Ok(spec.with_seed(seed))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LearnerConfig {
    Spec(String),
    WithPrior { spec: String, prior: Option<Vec<f64>> },
}

impl LearnerConfig {
    fn spec_str(&self) -> &str {
        match self {
            LearnerConfig::Spec(s) | LearnerConfig::WithPrior { spec: s, .. } => s,
        }
    }

    fn prior(&self) -> Option<&[f64]> {
        match self {
            LearnerConfig::WithPrior { prior: Some(p), .. } => Some(p),
            _ => None,
        }
    }
}

/// Hindsight comparator for regret.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ComparatorSpec {
    #[default]
    FixedMixture,
    SingleBest,
    /// Interior segment starts `t_2 < t_3 < ...`.
    Shifting(Vec<usize>),
}

impl FromStr for ComparatorSpec {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "fixed-mixture" => Ok(ComparatorSpec::FixedMixture),
            "single-best" => Ok(ComparatorSpec::SingleBest),
            other => {
                let list = other
                    .strip_prefix("shifting=")
                    .or_else(|| other.strip_prefix("shifting:"))
                    .ok_or_else(|| HarnessError::Config(format!("unknown comparator `{other}`")))?;
                let splits = list
                    .split(',')
                    .map(|x| x.trim().parse::<usize>().map_err(|_| HarnessError::Config(format!("invalid boundary `{x}`"))))
                    .collect::<Result<Vec<_>>>()?;
                Ok(ComparatorSpec::Shifting(splits))
            }
        }
    }
}

impl fmt::Display for ComparatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComparatorSpec::FixedMixture => f.write_str("fixed-mixture"),
            ComparatorSpec::SingleBest => f.write_str("single-best"),
            ComparatorSpec::Shifting(splits) => {
                let list: Vec<String> = splits.iter().map(|t| t.to_string()).collect();
                write!(f, "shifting={}", list.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DivergenceMode {
    #[default]
    Halt,
    Continue,
}

impl From<DivergenceMode> for DivergencePolicy {
    fn from(mode: DivergenceMode) -> Self {
        match mode {
            DivergenceMode::Halt => DivergencePolicy::Halt,
            DivergenceMode::Continue => DivergencePolicy::Continue,
        }
    }
}

impl FromStr for DivergenceMode {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "halt" => Ok(DivergenceMode::Halt),
            "continue" => Ok(DivergenceMode::Continue),
            other => Err(HarnessError::Config(format!("unknown divergence policy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Stream file; exclusive with `generator`.
    #[serde(default)]
    pub stream: Option<PathBuf>,
    #[serde(default)]
    pub generator: Option<GeneratorConfig>,
    pub learners: Vec<LearnerConfig>,
    /// `fixed-mixture`, `single-best`, or `shifting=t2,t3,...`.
    #[serde(default)]
    pub comparator: Option<String>,
    #[serde(default)]
    pub bounds: Vec<String>,
    #[serde(default)]
    pub on_divergence: DivergenceMode,
    #[serde(default)]
    pub seed: u64,
    /// Report losses in bits instead of nats.
    #[serde(default)]
    pub bits: bool,
    #[serde(default)]
    pub out_csv: Option<PathBuf>,
    #[serde(default)]
    pub out_json: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StreamSource {
    File(PathBuf),
    Generator(GeneratorSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerEntry {
    pub spec: LearnerSpec,
    pub prior: Option<Vec<f64>>,
}

impl LearnerEntry {
    pub fn prior(&self, n: usize) -> Result<SimplexVector> {
        match &self.prior {
            None => Ok(SimplexVector::uniform(n)),
            Some(p) if p.len() != n => Err(HarnessError::Config(format!(
                "prior for `{}` has {} entries but the stream has {n} experts",
                self.spec,
                p.len()
            ))),
            Some(p) => Ok(SimplexVector::new(p.clone())?),
        }
    }
}

/// A configuration with every string parsed.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub source: StreamSource,
    pub learners: Vec<LearnerEntry>,
    pub comparator: ComparatorSpec,
    pub bounds: Vec<Bound>,
    pub policy: DivergencePolicy,
    pub seed: u64,
    pub bits: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Parses and checks everything; nothing runs before this succeeds.
    pub fn validate(&self) -> Result<Experiment> {
        if self.learners.is_empty() {
            return Err(HarnessError::Config("at least one learner is required".into()));
        }
        let source = match (&self.stream, &self.generator) {
            (Some(path), None) => StreamSource::File(path.clone()),
            (None, Some(generator)) => StreamSource::Generator(generator.to_spec(self.seed)?),
            _ => return Err(HarnessError::Config("exactly one of `stream` and `generator` is required".into())),
        };
        let learners = self
            .learners
            .iter()
            .map(|l| {
                let spec = l.spec_str().parse::<LearnerSpec>()?;
                Ok(LearnerEntry { spec, prior: l.prior().map(<[f64]>::to_vec) })
            })
            .collect::<Result<Vec<_>>>()?;
        let comparator = match &self.comparator {
            Some(c) => c.parse()?,
            None => ComparatorSpec::default(),
        };
        let bounds = self.bounds.iter().map(|b| b.parse::<Bound>()).collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Experiment {
            source,
            learners,
            comparator,
            bounds,
            policy: self.on_divergence.into(),
            seed: self.seed,
            bits: self.bits,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_json_config() {
        let text = r#"{
            "generator": "theorem2:8",
            "learners": ["soft-bayes:anytime", {"spec": "eg:fixed=0.5", "prior": [0.5, 0.5]}],
            "comparator": "shifting=3,5",
            "bounds": ["thm5"],
            "on_divergence": "continue",
            "seed": 4
        }"#;
        let exp = ExperimentConfig::from_json(text).unwrap().validate().unwrap();
        assert_eq!(exp.learners.len(), 2);
        assert_eq!(exp.learners[1].prior.as_deref(), Some(&[0.5, 0.5][..]));
        assert_eq!(exp.comparator, ComparatorSpec::Shifting(vec![3, 5]));
        assert_eq!(exp.bounds, vec![Bound::Anytime]);
        assert_eq!(exp.policy, DivergencePolicy::Continue);
    }

    #[test]
    fn rejects_bad_configs() {
        let empty = ExperimentConfig { generator: Some(GeneratorConfig::Named("theorem2:8".into())), ..Default::default() };
        assert!(matches!(empty.validate(), Err(HarnessError::Config(_))));

        let both = ExperimentConfig {
            stream: Some("x.jsonl".into()),
            generator: Some(GeneratorConfig::Named("theorem2:8".into())),
            learners: vec![LearnerConfig::Spec("bayes".into())],
            ..Default::default()
        };
        assert!(both.validate().is_err());

        let unknown = ExperimentConfig {
            generator: Some(GeneratorConfig::Named("theorem2:8".into())),
            learners: vec![LearnerConfig::Spec("soft-bayes:sometimes".into())],
            ..Default::default()
        };
        assert!(unknown.validate().is_err());
        assert!(ExperimentConfig::from_json(r#"{"learners": [], "colour": 1}"#).is_err());
    }

    #[test]
    fn explicit_mixture_generator() {
        let text = r#"{
            "generator": {"iid_mixture": {"a": [1, 0], "dists": [[1, 0], [0, 1]], "horizon": 5}},
            "learners": ["bayes"],
            "seed": 8
        }"#;
        let exp = ExperimentConfig::from_json(text).unwrap().validate().unwrap();
        match exp.source {
            StreamSource::Generator(g) => assert_eq!(g.seed(), Some(8)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn comparator_strings() {
        for s in ["fixed-mixture", "single-best", "shifting=10,20"] {
            assert_eq!(s.parse::<ComparatorSpec>().unwrap().to_string(), s);
        }
        assert!("shifting=a".parse::<ComparatorSpec>().is_err());
        assert!("best".parse::<ComparatorSpec>().is_err());
    }
}

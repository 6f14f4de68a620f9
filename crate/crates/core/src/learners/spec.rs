use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::{default_meta_rates, Bayes, ExponentiatedGradient, Learner, MetaBayes, MlSoftBayes, OnlineGradientDescent, SoftBayes};
use crate::error::{Error, Result};
use crate::rates::ScheduleConfig;
use crate::simplex::SimplexVector;

/// A learner selected by name, e.g. `soft-bayes:anytime`, `eg:fixed=0.5`,
/// `ogd:fixed=0.1`, `bayes`, `ml-soft-bayes`, `meta:rates=1,0.5,0.25`.
#[derive(Debug, Clone, PartialEq)]
pub enum LearnerSpec {
    SoftBayes(ScheduleConfig),
    Bayes,
    Eg(f64),
    Ogd(f64),
    MlSoftBayes,
    /// Explicit rates, or `2^{-i}` up to the horizon when `None`.
    Meta(Option<Vec<f64>>),
}

impl LearnerSpec {
    /// Instantiates the learner. `horizon` sizes the default meta rate grid.
    pub fn build(&self, prior: SimplexVector, horizon: usize) -> Result<Box<dyn Learner>> {
        Ok(match self {
            LearnerSpec::SoftBayes(config) => Box::new(SoftBayes::new(*config, prior)?),
            LearnerSpec::Bayes => Box::new(Bayes::new(prior)),
            LearnerSpec::Eg(eta) => Box::new(ExponentiatedGradient::new(*eta, &prior)?),
            LearnerSpec::Ogd(eta) => Box::new(OnlineGradientDescent::new(*eta, prior)?),
            LearnerSpec::MlSoftBayes => Box::new(MlSoftBayes::adaptive(prior)?),
            LearnerSpec::Meta(rates) => {
                let rates = rates.clone().unwrap_or_else(|| default_meta_rates(horizon));
                Box::new(MetaBayes::new(&rates, prior)?)
            }
        })
    }

    /// The schedule, for Soft-Bayes learners.
    pub fn schedule(&self) -> Option<ScheduleConfig> {
        match self {
            LearnerSpec::SoftBayes(s) => Some(*s),
            LearnerSpec::Bayes => Some(ScheduleConfig::Fixed(1.0)),
            _ => None,
        }
    }
}

fn fixed_rate(arg: Option<&str>, name: &str) -> Result<f64> {
    let arg = arg.ok_or_else(|| Error::Parse(format!("`{name}` needs a rate, e.g. {name}:fixed=0.5")))?;
    let value = arg.strip_prefix("fixed").map(|r| r.trim_start_matches([':', '='])).unwrap_or(arg);
    let eta: f64 = value
        .parse()
        .map_err(|_| Error::Parse(format!("invalid rate `{arg}` for `{name}`")))?;
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidParameter("learning rate must be positive"));
    }
    Ok(eta)
}

impl FromStr for LearnerSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        match (name, arg) {
            ("soft-bayes", None) => Ok(LearnerSpec::SoftBayes(ScheduleConfig::Anytime)),
            ("soft-bayes", Some(a)) => Ok(LearnerSpec::SoftBayes(a.parse()?)),
            ("bayes", None) => Ok(LearnerSpec::Bayes),
            ("eg", a) => Ok(LearnerSpec::Eg(fixed_rate(a, "eg")?)),
            ("ogd", a) => Ok(LearnerSpec::Ogd(fixed_rate(a, "ogd")?)),
            ("ml-soft-bayes", None) => Ok(LearnerSpec::MlSoftBayes),
            ("meta", None) => Ok(LearnerSpec::Meta(None)),
            ("meta", Some(a)) => {
                let list = a
                    .strip_prefix("rates")
                    .map(|r| r.trim_start_matches([':', '=']))
                    .ok_or_else(|| Error::Parse(format!("expected meta:rates=..., got `{s}`")))?;
                let rates = list
                    .split(',')
                    .map(|r| r.trim().parse::<f64>().map_err(|_| Error::Parse(format!("invalid meta rate `{r}`"))))
                    .collect::<Result<Vec<_>>>()?;
                if rates.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
                    return Err(Error::InvalidParameter("meta rates must lie in (0, 1]"));
                }
                Ok(LearnerSpec::Meta(Some(rates)))
            }
            _ => Err(Error::Parse(format!("unknown learner `{s}`"))),
        }
    }
}

impl fmt::Display for LearnerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LearnerSpec::SoftBayes(s) => write!(f, "soft-bayes:{s}"),
            LearnerSpec::Bayes => f.write_str("bayes"),
            LearnerSpec::Eg(eta) => write!(f, "eg:fixed={eta}"),
            LearnerSpec::Ogd(eta) => write!(f, "ogd:fixed={eta}"),
            LearnerSpec::MlSoftBayes => f.write_str("ml-soft-bayes"),
            LearnerSpec::Meta(None) => f.write_str("meta"),
            LearnerSpec::Meta(Some(rates)) => {
                let rates: Vec<String> = rates.iter().map(|r| format!("{r}")).collect();
                write!(f, "meta:rates={}", rates.join(","))
            }
        }
    }
}

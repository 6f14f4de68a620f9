//! Expert streams in reduced form.
//!
//! Only the probability each expert gave the realized symbol enters the
//! learners' predictions and losses, so a round is just that vector.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Probabilities `p^i_t` the experts assigned to the realized symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedRound {
    p: Vec<f64>,
    min: f64,
    max: f64,
}

impl ReducedRound {
    /// Rejects entries outside `[0, 1]` and rounds where every entry is zero.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidParameter("round must have at least one expert"));
        }
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &x in &p {
            if !x.is_finite() {
                return Err(Error::NonFinite);
            }
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::ProbabilityOutOfRange(x));
            }
            min = min.min(x);
            max = max.max(x);
        }
        if max <= 0.0 {
            return Err(Error::AllZeroRound);
        }
        Ok(ReducedRound { p, min, max })
    }

    /// Reduces a full-distribution round by selecting the realized symbol's column.
    pub fn from_distributions(dists: &[Vec<f64>], symbol: usize) -> Result<Self> {
        let p = dists
            .iter()
            .map(|d| d.get(symbol).copied().ok_or(Error::InvalidParameter("symbol outside alphabet")))
            .collect::<Result<Vec<_>>>()?;
        ReducedRound::new(p)
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }
}

/// An ordered sequence of rounds sharing one expert count.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpertStream {
    n: usize,
    rounds: Vec<ReducedRound>,
}

impl ExpertStream {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("expert count must be at least 1"));
        }
        Ok(ExpertStream { n, rounds: Vec::new() })
    }

    pub fn from_rounds(n: usize, rounds: Vec<ReducedRound>) -> Result<Self> {
        let mut stream = ExpertStream::new(n)?;
        stream.rounds.reserve(rounds.len());
        for r in rounds {
            stream.push(r)?;
        }
        Ok(stream)
    }

    /// Builds a stream from raw probability rows, validating each.
    pub fn from_rows<I, R>(n: usize, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = R>,
        R: Into<Vec<f64>>,
    {
        let mut stream = ExpertStream::new(n)?;
        for row in rows {
            stream.push(ReducedRound::new(row.into())?)?;
        }
        Ok(stream)
    }

    pub fn push(&mut self, round: ReducedRound) -> Result<()> {
        if round.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: round.len() });
        }
        self.rounds.push(round);
        Ok(())
    }

    /// Appends `other`'s rounds.
    pub fn extend_from(&mut self, other: &ExpertStream) -> Result<()> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        self.rounds.extend(other.rounds.iter().cloned());
        Ok(())
    }

    pub fn experts(&self) -> usize {
        self.n
    }

    pub fn horizon(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn rounds(&self) -> &[ReducedRound] {
        &self.rounds
    }

    /// Rounds `start..=end`, 1-based and inclusive.
    pub fn segment(&self, start: usize, end: usize) -> ExpertStream {
        ExpertStream { n: self.n, rounds: self.rounds[start - 1..end].to_vec() }
    }

    /// The stream with the listed 0-based rounds removed.
    pub fn without_rounds(&self, skip: &[usize]) -> ExpertStream {
        let rounds = self
            .rounds
            .iter()
            .enumerate()
            .filter(|(i, _)| !skip.contains(i))
            .map(|(_, r)| r.clone())
            .collect();
        ExpertStream { n: self.n, rounds }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn round_validation() {
        assert!(ReducedRound::new(vec![0.0, 1.0]).is_ok());
        assert_eq!(ReducedRound::new(vec![0.0, 0.0]), Err(Error::AllZeroRound));
        assert_eq!(ReducedRound::new(vec![1.5, 0.0]), Err(Error::ProbabilityOutOfRange(1.5)));
        assert_eq!(ReducedRound::new(vec![f64::NAN]), Err(Error::NonFinite));
    }

    #[test]
    fn full_mode_reduction() {
        let dists = vec![vec![0.1, 0.9], vec![0.7, 0.3]];
        let r = ReducedRound::from_distributions(&dists, 1).unwrap();
        assert_eq!(r.as_slice(), &[0.9, 0.3]);
        assert!(ReducedRound::from_distributions(&dists, 2).is_err());
    }

    #[test]
    fn stream_dimension_is_fixed() {
        let mut s = ExpertStream::new(2).unwrap();
        s.push(ReducedRound::new(vec![0.5, 0.5]).unwrap()).unwrap();
        let err = s.push(ReducedRound::new(vec![1.0]).unwrap()).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 1 });
        assert_eq!(s.horizon(), 1);
        assert!(ExpertStream::new(0).is_err());
    }
}

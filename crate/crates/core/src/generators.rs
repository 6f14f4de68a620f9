//! Deterministic and seeded stream generators.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::simplex::SimplexVector;
use crate::stream::{ExpertStream, ReducedRound};

/// Name of the generator recorded next to seeds in reports.
pub const RNG_NAME: &str = "chacha20";

/// Independent ChaCha20 stream `stream` under `seed`.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw from `[0, 1)` with 53 bits of precision.
pub fn uniform01<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw from `{0, ..., n-1}`.
pub fn uniform_index<R: RngCore>(rng: &mut R, n: usize) -> usize {
    ((uniform01(rng) * n as f64) as usize).min(n - 1)
}

/// Index drawn from a categorical distribution.
pub fn sample_categorical<R: RngCore>(rng: &mut R, probs: &[f64]) -> usize {
    let u = uniform01(rng);
    let mut acc = 0.0;
    for (k, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    // Rounding left `u` past the total mass; fall back to the last supported symbol.
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// A random point of the simplex with every entry at least `floor / len`.
pub fn random_distribution<R: RngCore>(rng: &mut R, len: usize, floor: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..len).map(|_| uniform01(rng) + 1e-3).collect();
    let sum: f64 = raw.iter().sum();
    let base = floor / len as f64;
    raw.iter().map(|x| base + (1.0 - floor) * x / sum).collect()
}

/// `N = 2` stream on which the experts are alternately right after a long
/// run of the second expert being right. `T` must be even.
pub fn gen_theorem2(horizon: usize) -> Result<ExpertStream> {
    if horizon < 2 || !horizon.is_multiple_of(2) {
        return Err(Error::InvalidParameter("horizon must be even and at least 2"));
    }
    let half = horizon / 2;
    ExpertStream::from_rows(
        2,
        (1..=horizon).map(|t| if t > half && t % 2 == 0 { vec![1.0, 0.0] } else { vec![0.0, 1.0] }),
    )
}

/// `N = 2` stream on which the second expert is always right.
pub fn gen_theorem2_constant(horizon: usize) -> Result<ExpertStream> {
    if horizon < 1 {
        return Err(Error::InvalidParameter("horizon must be at least 1"));
    }
    ExpertStream::from_rows(2, (0..horizon).map(|_| vec![0.0, 1.0]))
}

/// [`gen_theorem2_constant`] followed by one round on which only the first
/// expert is right.
pub fn gen_ogd_flip(horizon: usize) -> Result<ExpertStream> {
    let mut stream = gen_theorem2_constant(horizon)?;
    stream.push(ReducedRound::new(vec![1.0, 0.0])?)?;
    Ok(stream)
}

/// Experts with disjoint supports: round `t` has `p^i = 1{i = symbols[t]}`
/// with 1-based symbols.
pub fn gen_disjoint_dirac(symbols: &[usize], n: usize) -> Result<ExpertStream> {
    if n < 1 {
        return Err(Error::InvalidParameter("need at least one expert"));
    }
    let mut stream = ExpertStream::new(n)?;
    for &s in symbols {
        if s < 1 || s > n {
            return Err(Error::InvalidParameter("symbol out of range [1, N]"));
        }
        let mut p = vec![0.0; n];
        p[s - 1] = 1.0;
        stream.push(ReducedRound::new(p)?)?;
    }
    Ok(stream)
}

/// `T` uniform 1-based symbols in `[1, N]`.
pub fn random_symbols(n: usize, horizon: usize, seed: u64) -> Vec<usize> {
    let mut rng = seeded_rng(seed, 0);
    (0..horizon).map(|_| uniform_index(&mut rng, n) + 1).collect()
}

/// Symbols drawn from the `a`-mixture of `dists`; round `t` holds each
/// expert's probability of the drawn symbol.
pub fn gen_iid_mixture(a: &SimplexVector, dists: &[Vec<f64>], horizon: usize, seed: u64) -> Result<ExpertStream> {
    if dists.len() != a.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: dists.len() });
    }
    if horizon < 1 {
        return Err(Error::InvalidParameter("horizon must be at least 1"));
    }
    let alphabet = dists[0].len();
    for d in dists {
        if d.len() != alphabet {
            return Err(Error::DimensionMismatch { expected: alphabet, found: d.len() });
        }
        SimplexVector::new(d.clone())?;
    }
    let source: Vec<f64> = (0..alphabet).map(|k| a.as_slice().iter().zip(dists).map(|(ai, d)| ai * d[k]).sum()).collect();
    let mut rng = seeded_rng(seed, 0);
    let mut stream = ExpertStream::new(a.len())?;
    for _ in 0..horizon {
        let symbol = sample_categorical(&mut rng, &source);
        stream.push(ReducedRound::from_distributions(dists, symbol)?)?;
    }
    Ok(stream)
}

/// Mixture stream with random mixture weights and random expert
/// distributions over `alphabet` symbols, all derived from `seed`.
pub fn gen_random_mixture(n: usize, horizon: usize, alphabet: usize, seed: u64) -> Result<ExpertStream> {
    if n < 1 || alphabet < 2 {
        return Err(Error::InvalidParameter("need N >= 1 and an alphabet of at least 2 symbols"));
    }
    let mut rng = seeded_rng(seed, 1);
    let a = SimplexVector::new(random_distribution(&mut rng, n, 0.0))?;
    let dists: Vec<Vec<f64>> = (0..n).map(|_| random_distribution(&mut rng, alphabet, 0.05)).collect();
    gen_iid_mixture(&a, &dists, horizon, seed)
}

/// Rounds with every `p^i_t` drawn uniformly from `[floor, 1]`.
pub fn gen_uniform_rows(n: usize, horizon: usize, floor: f64, seed: u64) -> Result<ExpertStream> {
    if !(floor > 0.0 && floor <= 1.0) {
        return Err(Error::InvalidParameter("floor must lie in (0, 1]"));
    }
    let mut rng = seeded_rng(seed, 2);
    ExpertStream::from_rows(
        n,
        (0..horizon).map(|_| (0..n).map(|_| floor + (1.0 - floor) * uniform01(&mut rng)).collect::<Vec<_>>()),
    )
}

/// A generator together with its parameters and seed.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    Theorem2 { horizon: usize },
    Theorem2Constant { horizon: usize },
    OgdFlip { horizon: usize },
    DisjointDirac { experts: usize, symbols: Vec<usize> },
    RandomDirac { experts: usize, horizon: usize, seed: u64 },
    IidMixture { a: Vec<f64>, dists: Vec<Vec<f64>>, horizon: usize, seed: u64 },
    RandomMixture { experts: usize, horizon: usize, alphabet: usize, seed: u64 },
    UniformRows { experts: usize, horizon: usize, floor: f64, seed: u64 },
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<ExpertStream> {
        match self {
            GeneratorSpec::Theorem2 { horizon } => gen_theorem2(*horizon),
            GeneratorSpec::Theorem2Constant { horizon } => gen_theorem2_constant(*horizon),
            GeneratorSpec::OgdFlip { horizon } => gen_ogd_flip(*horizon),
            GeneratorSpec::DisjointDirac { experts, symbols } => gen_disjoint_dirac(symbols, *experts),
            GeneratorSpec::RandomDirac { experts, horizon, seed } => {
                gen_disjoint_dirac(&random_symbols(*experts, *horizon, *seed), *experts)
            }
            GeneratorSpec::IidMixture { a, dists, horizon, seed } => {
                gen_iid_mixture(&SimplexVector::new(a.clone())?, dists, *horizon, *seed)
            }
            GeneratorSpec::RandomMixture { experts, horizon, alphabet, seed } => {
                gen_random_mixture(*experts, *horizon, *alphabet, *seed)
            }
            GeneratorSpec::UniformRows { experts, horizon, floor, seed } => {
                gen_uniform_rows(*experts, *horizon, *floor, *seed)
            }
        }
    }

    /// Seed of a stochastic generator.
    pub fn seed(&self) -> Option<u64> {
        match self {
            GeneratorSpec::RandomDirac { seed, .. }
            | GeneratorSpec::IidMixture { seed, .. }
            | GeneratorSpec::RandomMixture { seed, .. }
            | GeneratorSpec::UniformRows { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    /// Replaces the seed of a stochastic generator; no-op otherwise.
    pub fn with_seed(mut self, new_seed: u64) -> Self {
        match &mut self {
            GeneratorSpec::RandomDirac { seed, .. }
            | GeneratorSpec::IidMixture { seed, .. }
            | GeneratorSpec::RandomMixture { seed, .. }
            | GeneratorSpec::UniformRows { seed, .. } => *seed = new_seed,
            _ => {}
        }
        self
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",")
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Theorem2 { horizon } => write!(f, "theorem2:{horizon}"),
            GeneratorSpec::Theorem2Constant { horizon } => write!(f, "theorem2-constant:{horizon}"),
            GeneratorSpec::OgdFlip { horizon } => write!(f, "ogd-flip:{horizon}"),
            GeneratorSpec::DisjointDirac { experts, symbols } => write!(f, "disjoint-dirac:{experts}:{}", join(symbols)),
            GeneratorSpec::RandomDirac { experts, horizon, .. } => write!(f, "random-dirac:{experts}:{horizon}"),
            GeneratorSpec::IidMixture { a, horizon, .. } => write!(f, "iid-mixture:{horizon}:a={}", join(a)),
            GeneratorSpec::RandomMixture { experts, horizon, alphabet, .. } => {
                write!(f, "random-mixture:{experts}:{horizon}:{alphabet}")
            }
            GeneratorSpec::UniformRows { experts, horizon, floor, .. } => {
                write!(f, "uniform-rows:{experts}:{horizon}:{floor}")
            }
        }
    }
}

fn parse_num<T: FromStr>(field: Option<&str>, what: &str) -> Result<T> {
    let field = field.ok_or_else(|| Error::Parse(format!("missing {what}")))?;
    field.trim().parse().map_err(|_| Error::Parse(format!("invalid {what} `{field}`")))
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    /// Parses `kind:args`, e.g. `theorem2:100`, `disjoint-dirac:3:1,2,1`,
    /// `random-mixture:5:1000:4`. Stochastic kinds start with seed 0; use
    /// [`GeneratorSpec::with_seed`]. Explicit mixtures are not expressible.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let kind = parts.next().unwrap_or_default();
        let spec = match kind {
            "theorem2" => GeneratorSpec::Theorem2 { horizon: parse_num(parts.next(), "horizon")? },
            "theorem2-constant" => GeneratorSpec::Theorem2Constant { horizon: parse_num(parts.next(), "horizon")? },
            "ogd-flip" => GeneratorSpec::OgdFlip { horizon: parse_num(parts.next(), "horizon")? },
            "disjoint-dirac" => {
                let experts = parse_num(parts.next(), "expert count")?;
                let list = parts.next().ok_or_else(|| Error::Parse(String::from("missing symbol list")))?;
                let symbols = list
                    .split(',')
                    .filter(|x| !x.trim().is_empty())
                    .map(|x| parse_num(Some(x), "symbol"))
                    .collect::<Result<Vec<usize>>>()?;
                GeneratorSpec::DisjointDirac { experts, symbols }
            }
            "random-dirac" => GeneratorSpec::RandomDirac {
                experts: parse_num(parts.next(), "expert count")?,
                horizon: parse_num(parts.next(), "horizon")?,
                seed: 0,
            },
            "random-mixture" => {
                let experts = parse_num(parts.next(), "expert count")?;
                let horizon = parse_num(parts.next(), "horizon")?;
                let alphabet = match parts.next() {
                    Some(field) => parse_num(Some(field), "alphabet size")?,
                    None => 2,
                };
                GeneratorSpec::RandomMixture { experts, horizon, alphabet, seed: 0 }
            }
            "uniform-rows" => {
                let experts = parse_num(parts.next(), "expert count")?;
                let horizon = parse_num(parts.next(), "horizon")?;
                let floor = match parts.next() {
                    Some(field) => parse_num(Some(field), "floor")?,
                    None => 0.01,
                };
                GeneratorSpec::UniformRows { experts, horizon, floor, seed: 0 }
            }
            other => return Err(Error::Parse(format!("unknown generator `{other}`"))),
        };
        if parts.next().is_some() {
            return Err(Error::Parse(format!("trailing fields in generator `{s}`")));
        }
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn rows(s: &ExpertStream) -> Vec<Vec<f64>> {
        s.rounds().iter().map(|r| r.as_slice().to_vec()).collect()
    }

    #[test]
    fn theorem2_layout() {
        let s = gen_theorem2(8).unwrap();
        let b = vec![0.0, 1.0];
        let a = vec![1.0, 0.0];
        assert_eq!(rows(&s), vec![b.clone(), b.clone(), b.clone(), b.clone(), b.clone(), a.clone(), b, a]);
        assert_eq!(rows(&gen_theorem2(2).unwrap()), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(gen_theorem2(7).is_err());
        assert!(gen_theorem2(0).is_err());
        let s = gen_theorem2(100).unwrap();
        assert!(s.rounds().iter().all(|r| r.as_slice().iter().filter(|&&p| p > 0.0).count() == 1));
    }

    #[test]
    fn constant_and_flip() {
        assert_eq!(rows(&gen_theorem2_constant(3).unwrap()), vec![vec![0.0, 1.0]; 3]);
        let s = gen_ogd_flip(3).unwrap();
        assert_eq!(s.horizon(), 4);
        assert_eq!(s.rounds()[3].as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn disjoint_dirac_examples() {
        assert_eq!(rows(&gen_disjoint_dirac(&[1, 1], 3).unwrap()), vec![vec![1.0, 0.0, 0.0]; 2]);
        assert_eq!(
            rows(&gen_disjoint_dirac(&[1, 2, 1], 2).unwrap()),
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]]
        );
        assert!(gen_disjoint_dirac(&[0], 2).is_err());
        assert!(gen_disjoint_dirac(&[3], 2).is_err());
    }

    #[test]
    fn iid_mixture_examples() {
        let dirac = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let s = gen_iid_mixture(&SimplexVector::vertex(2, 0), &dirac, 50, 3).unwrap();
        assert!(s.rounds().iter().all(|r| r.as_slice()[0] == 1.0));

        let half = SimplexVector::uniform(2);
        let s = gen_iid_mixture(&half, &dirac, 1000, 42).unwrap();
        let freq = s.rounds().iter().filter(|r| r.as_slice()[0] == 1.0).count() as f64 / 1000.0;
        assert!((freq - 0.5).abs() < 0.05, "frequency {freq}");
        assert_eq!(s, gen_iid_mixture(&half, &dirac, 1000, 42).unwrap());
        assert_ne!(s, gen_iid_mixture(&half, &dirac, 1000, 43).unwrap());
    }

    #[test]
    fn random_generators_are_deterministic() {
        for (spec, canonical) in [
            ("random-mixture:4:200:3", "random-mixture:4:200:3"),
            ("random-dirac:3:50", "random-dirac:3:50"),
            ("uniform-rows:5:20", "uniform-rows:5:20:0.01"),
        ] {
            let g = spec.parse::<GeneratorSpec>().unwrap().with_seed(9);
            assert_eq!(g.seed(), Some(9));
            assert_eq!(g.generate().unwrap(), g.generate().unwrap());
            assert_eq!(g.to_string(), canonical);
        }
        let s = gen_uniform_rows(5, 100, 0.01, 1).unwrap();
        assert!(s.rounds().iter().all(|r| r.min() >= 0.01));
    }

    #[test]
    fn streams_from_distinct_rng_streams_differ() {
        let mut a = seeded_rng(5, 0);
        let mut b = seeded_rng(5, 1);
        assert_ne!(a.next_u64(), b.next_u64());
        let mut c = seeded_rng(5, 0);
        let mut d = seeded_rng(5, 0);
        assert_eq!(c.next_u64(), d.next_u64());
    }

    #[test]
    fn spec_parsing() {
        assert_eq!("theorem2:8".parse::<GeneratorSpec>().unwrap(), GeneratorSpec::Theorem2 { horizon: 8 });
        let d: GeneratorSpec = "disjoint-dirac:3:1,2,1".parse().unwrap();
        assert_eq!(d, GeneratorSpec::DisjointDirac { experts: 3, symbols: vec![1, 2, 1] });
        assert_eq!(d.to_string(), "disjoint-dirac:3:1,2,1");
        assert!("theorem2".parse::<GeneratorSpec>().is_err());
        assert!("theorem2:8:9".parse::<GeneratorSpec>().is_err());
        assert!("walk:3".parse::<GeneratorSpec>().is_err());
    }
}

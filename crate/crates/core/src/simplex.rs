//! Probability-simplex vectors, mixture prediction, and Euclidean projection.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Index;

use crate::error::{Error, Result};
use crate::stream::ReducedRound;

/// Absolute tolerance on `Σ w_i = 1`. Inputs within it are renormalized.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

/// A point of the `(N-1)`-dimensional probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexVector(Vec<f64>);

impl SimplexVector {
    /// Validates `entries` and renormalizes away rounding drift.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParameter("simplex vector must be non-empty"));
        }
        let mut sum = 0.0;
        for &x in &entries {
            if !x.is_finite() {
                return Err(Error::NonFinite);
            }
            if x < 0.0 {
                return Err(Error::NotOnSimplex { sum: f64::NAN });
            }
            sum += x;
        }
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(Error::NotOnSimplex { sum });
        }
        let mut entries = entries;
        if sum != 1.0 {
            entries.iter_mut().for_each(|x| *x /= sum);
        }
        Ok(SimplexVector(entries))
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform simplex vector needs n >= 1");
        SimplexVector(vec![1.0 / n as f64; n])
    }

    /// The vertex `e_i`.
    pub fn vertex(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        SimplexVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Index<usize> for SimplexVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl AsRef<[f64]> for SimplexVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Mixture prediction `M = Σ_i w^i p^i`.
///
/// The result is clamped into `[min_i p^i, max_i p^i]`, which holds exactly
/// for any convex combination but can be missed by one ulp in floating point.
pub fn mixture_prob(w: &[f64], round: &ReducedRound) -> Result<f64> {
    let p = round.as_slice();
    if w.len() != p.len() {
        return Err(Error::DimensionMismatch { expected: w.len(), found: p.len() });
    }
    let m: f64 = w.iter().zip(p).map(|(wi, pi)| wi * pi).sum();
    Ok(m.clamp(round.min(), round.max()))
}

/// Euclidean projection onto the simplex (sort-based, `O(N log N)`).
///
/// Finds the threshold `τ` such that `Σ_i max(v_i - τ, 0) = 1` by scanning
/// the coordinates in decreasing order.
pub fn project_simplex(v: &[f64]) -> Result<SimplexVector> {
    if v.is_empty() {
        return Err(Error::InvalidParameter("cannot project an empty vector"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));

    let mut cumulative = 0.0;
    let mut tau = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (j + 1) as f64;
        if u - candidate > 0.0 {
            tau = candidate;
        } else {
            break;
        }
    }
    let mut w: Vec<f64> = v.iter().map(|&x| (x - tau).max(0.0)).collect();
    let sum: f64 = w.iter().sum();
    // The threshold makes the sum one up to rounding; fold the residue back in.
    w.iter_mut().for_each(|x| *x /= sum);
    Ok(SimplexVector(w))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round(p: &[f64]) -> ReducedRound {
        ReducedRound::new(p.to_vec()).unwrap()
    }

    /// Brute-force minimizer of `|w - v|` over a grid on the 2-simplex.
    fn grid_projection_2(v: &[f64], step: f64) -> [f64; 2] {
        let steps = (1.0 / step).round() as usize;
        let mut best = [0.0, 1.0];
        let mut best_d = f64::INFINITY;
        for k in 0..=steps {
            let a = k as f64 * step;
            let d = (a - v[0]).powi(2) + (1.0 - a - v[1]).powi(2);
            if d < best_d {
                best_d = d;
                best = [a, 1.0 - a];
            }
        }
        best
    }

    #[test]
    fn simplex_vector_validation() {
        assert!(SimplexVector::new(vec![0.5, 0.5]).is_ok());
        assert!(matches!(SimplexVector::new(vec![0.6, 0.6]), Err(Error::NotOnSimplex { .. })));
        assert!(matches!(SimplexVector::new(vec![-0.1, 1.1]), Err(Error::NotOnSimplex { .. })));
        assert_eq!(SimplexVector::new(vec![f64::NAN, 1.0]), Err(Error::NonFinite));
        let w = SimplexVector::new(vec![0.5 + 4e-10, 0.5]).unwrap();
        assert!((w.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mixture_examples() {
        let m = mixture_prob(&[0.5, 0.5], &round(&[0.2, 0.6])).unwrap();
        assert!((m - 0.4).abs() < 1e-15);
        for (q, r) in [(0.3, 0.9), (0.0, 1.0), (1.0, 0.25)] {
            assert_eq!(mixture_prob(&[1.0, 0.0], &round(&[q, r])).unwrap(), q);
        }
        for q in [0.1, 0.37, 1.0] {
            assert_eq!(mixture_prob(&[0.5, 0.5], &round(&[q, q])).unwrap(), q);
        }
    }

    #[test]
    fn mixture_dimension_mismatch() {
        let err = mixture_prob(&[0.5, 0.5], &round(&[0.2, 0.3, 0.5])).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 3 });
    }

    #[test]
    fn projection_examples() {
        assert_eq!(project_simplex(&[0.6, 0.6]).unwrap().as_slice(), &[0.5, 0.5]);
        assert_eq!(project_simplex(&[0.5, 0.5]).unwrap().as_slice(), &[0.5, 0.5]);
        let oracle = grid_projection_2(&[1.5, 0.5], 1e-4);
        assert!((oracle[0] - 1.0).abs() < 1e-12 && oracle[1].abs() < 1e-12);
        assert_eq!(project_simplex(&[1.5, 0.5]).unwrap().as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn projection_rejects_non_finite() {
        assert_eq!(project_simplex(&[f64::INFINITY, 0.0]), Err(Error::NonFinite));
    }
}

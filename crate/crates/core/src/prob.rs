//! Validated probability vectors, discrete entropy, Bayes-rule posteriors and
//! the exact MAP conditional error.
//!
//! Zero entries are allowed everywhere. Formulas use the conventions
//! `0 * log2(0) = 0` and `0^0 = 1`. All entropies are in bits.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;
use thiserror::Error;

/// Entries at or above this (negative) value are clamped to zero on construction.
pub const NEGATIVE_CLAMP: f64 = -1e-12;
/// Sums within this distance of one are renormalized; anything further is rejected.
pub const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbError {
    #[error("probability vector is empty")]
    Empty,
    #[error("weight {index} is negative or not finite ({value})")]
    NegativeWeight { index: usize, value: f64 },
    #[error("weights sum to {sum}, which is not within {SUM_TOLERANCE:e} of 1")]
    SumOutOfTolerance { sum: f64 },
    #[error("likelihood vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("likelihood {index} is negative or not finite ({value})")]
    InvalidLikelihood { index: usize, value: f64 },
    #[error("all prior-weighted likelihoods are zero")]
    ZeroEvidence,
}

/// A finite probability vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Pmf(Vec<f64>);

impl Pmf {
    pub fn new(weights: Vec<f64>) -> Result<Self, ProbError> {
        if weights.is_empty() {
            return Err(ProbError::Empty);
        }
        let mut weights = weights;
        for (index, w) in weights.iter_mut().enumerate() {
            if !w.is_finite() || *w < NEGATIVE_CLAMP {
                return Err(ProbError::NegativeWeight { index, value: *w });
            }
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(ProbError::SumOutOfTolerance { sum });
        }
        for w in weights.iter_mut() {
            *w /= sum;
        }
        Ok(Pmf(weights))
    }

    /// Uniform distribution over `len` outcomes.
    ///
    /// # Panics
    /// If `len` is zero.
    pub fn uniform(len: usize) -> Self {
        assert!(len > 0, "uniform pmf needs at least one outcome");
        Pmf(vec![1.0 / len as f64; len])
    }

    /// Builds a pmf by dividing nonnegative masses by their total.
    pub fn from_masses(masses: &[f64]) -> Result<Self, ProbError> {
        if masses.is_empty() {
            return Err(ProbError::Empty);
        }
        for (index, &m) in masses.iter().enumerate() {
            if !m.is_finite() || m < 0.0 {
                return Err(ProbError::NegativeWeight { index, value: m });
            }
        }
        let total: f64 = masses.iter().sum();
        if total <= 0.0 {
            return Err(ProbError::ZeroEvidence);
        }
        Ok(Pmf(masses.iter().map(|m| m / total).collect()))
    }

    /// A draw from the flat (Dirichlet(1, ..., 1)) distribution on the simplex.
    pub fn random_flat<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        assert!(len > 0, "pmf needs at least one outcome");
        let draws: Vec<f64> = (0..len).map(|_| Exp1.sample(rng)).collect();
        let total: f64 = draws.iter().sum();
        Pmf(draws.into_iter().map(|d| d / total).collect())
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

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    /// Sum of squared weights (the Bayesian distance when the pmf is a posterior).
    pub fn sum_of_squares(&self) -> f64 {
        self.0.iter().map(|p| p * p).sum()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for Pmf {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// A posterior distribution over hypotheses given one observation.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Posterior(Pmf);

impl Posterior {
    pub fn new(weights: Vec<f64>) -> Result<Self, ProbError> {
        Pmf::new(weights).map(Posterior)
    }

    pub fn pmf(&self) -> &Pmf {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }
}

impl From<Pmf> for Posterior {
    fn from(p: Pmf) -> Self {
        Posterior(p)
    }
}

impl std::ops::Deref for Posterior {
    type Target = Pmf;

    fn deref(&self) -> &Pmf {
        &self.0
    }
}

pub fn make_pmf(weights: &[f64]) -> Result<Pmf, ProbError> {
    Pmf::new(weights.to_vec())
}

/// `-sum p log2 p` in bits, skipping zero entries.
pub fn entropy(p: &Pmf) -> f64 {
    entropy_of(p.as_slice())
}

pub(crate) fn entropy_of(weights: &[f64]) -> f64 {
    let h: f64 = weights
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| -w * w.log2())
        .sum();
    h.max(0.0)
}

/// Binary entropy function in bits.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_of(&[p, 1.0 - p])
}

/// Bayes rule: posterior proportional to `prior_i * likelihood_i`.
pub fn posterior_from_likelihoods(
    priors: &Pmf,
    likelihoods: &[f64],
) -> Result<Posterior, ProbError> {
    if likelihoods.len() != priors.len() {
        return Err(ProbError::LengthMismatch {
            expected: priors.len(),
            got: likelihoods.len(),
        });
    }
    for (index, &l) in likelihoods.iter().enumerate() {
        if !l.is_finite() || l < 0.0 {
            return Err(ProbError::InvalidLikelihood { index, value: l });
        }
    }
    let joint: Vec<f64> = priors.iter().zip(likelihoods).map(|(p, l)| p * l).collect();
    let evidence: f64 = joint.iter().sum();
    if evidence <= 0.0 {
        return Err(ProbError::ZeroEvidence);
    }
    Ok(Posterior(Pmf(joint
        .into_iter()
        .map(|j| j / evidence)
        .collect())))
}

/// Conditional error of the MAP decision: `1 - max_i p_i`.
pub fn map_conditional_error(p: &Posterior) -> f64 {
    (1.0 - p.max()).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn make_pmf_accepts_and_rejects() {
        assert_eq!(make_pmf(&[1.0]).unwrap().as_slice(), &[1.0]);
        assert_eq!(make_pmf(&[0.5, 0.5]).unwrap().as_slice(), &[0.5, 0.5]);
        assert!(matches!(
            make_pmf(&[0.3, 0.3, 0.3]),
            Err(ProbError::SumOutOfTolerance { .. })
        ));
        assert_eq!(make_pmf(&[]), Err(ProbError::Empty));
        assert!(matches!(
            make_pmf(&[1.1, -0.1]),
            Err(ProbError::NegativeWeight { index: 1, .. })
        ));
        assert!(matches!(
            make_pmf(&[f64::NAN, 1.0]),
            Err(ProbError::NegativeWeight { index: 0, .. })
        ));
    }

    #[test]
    fn make_pmf_clamps_tiny_negatives_and_renormalizes() {
        let p = make_pmf(&[1.0 + 5e-13, -5e-13]).unwrap();
        assert_eq!(p[1], 0.0);
        assert_eq!(p.iter().sum::<f64>(), 1.0);

        let p = make_pmf(&[0.5 + 4e-10, 0.5]).unwrap();
        assert!(close(p.iter().sum::<f64>(), 1.0, 1e-15));
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&make_pmf(&[1.0]).unwrap()), 0.0);
        assert!(close(entropy(&make_pmf(&[0.5, 0.5]).unwrap()), 1.0, 1e-15));
        assert!(close(
            entropy(&make_pmf(&[0.5, 0.25, 0.25]).unwrap()),
            1.5,
            1e-15
        ));
        assert_eq!(entropy(&make_pmf(&[0.0, 1.0]).unwrap()), 0.0);
    }

    #[test]
    fn posterior_examples() {
        let half = make_pmf(&[0.5, 0.5]).unwrap();
        let p = posterior_from_likelihoods(&half, &[1.0, 1.0]).unwrap();
        assert_eq!(p.as_slice(), &[0.5, 0.5]);
        let p = posterior_from_likelihoods(&half, &[0.9, 0.1]).unwrap();
        assert!(close(p[0], 0.9, 1e-15) && close(p[1], 0.1, 1e-15));
        // 0.25*0.8 = 0.2, 0.75*0.4 = 0.3
        let pri = make_pmf(&[0.25, 0.75]).unwrap();
        let p = posterior_from_likelihoods(&pri, &[0.8, 0.4]).unwrap();
        assert!(close(p[0], 0.4, 1e-15) && close(p[1], 0.6, 1e-15));
    }

    #[test]
    fn posterior_errors() {
        let pri = make_pmf(&[1.0, 0.0]).unwrap();
        assert_eq!(
            posterior_from_likelihoods(&pri, &[0.0, 3.0]),
            Err(ProbError::ZeroEvidence)
        );
        assert!(matches!(
            posterior_from_likelihoods(&pri, &[1.0]),
            Err(ProbError::LengthMismatch {
                expected: 2,
                got: 1
            })
        ));
        assert!(matches!(
            posterior_from_likelihoods(&pri, &[1.0, -1.0]),
            Err(ProbError::InvalidLikelihood { index: 1, .. })
        ));
    }

    #[test]
    fn map_error_examples() {
        assert_eq!(
            map_conditional_error(&Posterior::new(vec![1.0, 0.0]).unwrap()),
            0.0
        );
        assert_eq!(
            map_conditional_error(&Posterior::new(vec![0.25; 4]).unwrap()),
            0.75
        );
        assert!(close(
            map_conditional_error(&Posterior::new(vec![0.5, 0.3, 0.2]).unwrap()),
            0.5,
            1e-15
        ));
    }

    #[test]
    fn binary_entropy_endpoints() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert!(close(binary_entropy(0.5), 1.0, 1e-15));
    }
}

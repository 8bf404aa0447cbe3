//! Per-observation bounds on the MAP conditional error `1 - max_i p_i`.
//!
//! With `S = sum_i p_i^2` (the Bayesian distance) and `H` the posterior
//! entropy in bits, the bounds are:
//!
//! | name | lower | upper |
//! |------|-------|-------|
//! | Bayesian distance | `1 - sqrt(S)` | `2 - 2 sqrt(S)` |
//! | quadratic | `(1 - S) / 2` | `1 - S` |
//! | harmonic (binary) | `p1 p2` | `2 p1 p2` |
//! | Rényi | | `H` |
//! | Hellman–Raviv | | `H / 2` |
//! | improved equivocation | | `1 - 2^-H` |
//!
//! The Rényi and Hellman–Raviv values are reported unclamped and can exceed
//! one. Fano's inequality is deliberately not provided.

use serde::Serialize;
use thiserror::Error;

use crate::prob::{entropy, map_conditional_error, Posterior};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("power-mean exponent must be negative, got {0}")]
    BetaNonNegative(f64),
    #[error("bound needs exactly two hypotheses, got {0}")]
    NotBinary(usize),
    #[error("equivocation must be nonnegative, got {0}")]
    NegativeEquivocation(f64),
}

/// A lower/upper pair. `raw_*` keep the formula value; the plain fields are
/// clamped to `[0, 1]` for display.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundPair {
    pub lower: f64,
    pub upper: f64,
    pub raw_lower: f64,
    pub raw_upper: f64,
}

impl BoundPair {
    fn new(raw_lower: f64, raw_upper: f64) -> Self {
        BoundPair {
            lower: raw_lower.clamp(0.0, 1.0),
            upper: raw_upper.clamp(0.0, 1.0),
            raw_lower,
            raw_upper,
        }
    }
}

/// Bounds from the Bayesian distance: `(1 - sqrt(S), 2 - 2 sqrt(S))`.
pub fn bd_bounds(p: &Posterior) -> BoundPair {
    let root = p.sum_of_squares().sqrt();
    BoundPair::new(1.0 - root, 2.0 - 2.0 * root)
}

/// Quadratic-entropy bounds: `((1 - S) / 2, 1 - S)`.
pub fn quadratic_bounds(p: &Posterior) -> BoundPair {
    let gap = 1.0 - p.sum_of_squares();
    BoundPair::new(0.5 * gap, gap)
}

pub fn renyi_bound(p: &Posterior) -> f64 {
    entropy(p)
}

pub fn hellman_raviv_bound(p: &Posterior) -> f64 {
    0.5 * entropy(p)
}

/// `1 - 2^-H(p)`; never reaches one.
pub fn improved_equivocation_bound(p: &Posterior) -> f64 {
    1.0 - (-entropy(p)).exp2()
}

/// Averaged form: `P_e <= 1 - 2^-H(X|Y)`.
pub fn improved_equivocation_bound_avg(equivocation: f64) -> Result<f64, BoundsError> {
    if !(equivocation >= 0.0) {
        return Err(BoundsError::NegativeEquivocation(equivocation));
    }
    Ok(1.0 - (-equivocation).exp2())
}

/// Power mean of order `beta < 0` of the posterior entries.
///
/// `(M^-1 sum_i p_i^beta)^(1/beta)` is an upper bound on `min_i p_i` that
/// tightens monotonically as `beta -> -inf`. For two hypotheses this is an
/// upper bound on the MAP conditional error; `beta = -1` gives the harmonic
/// mean `2 p1 p2`. For more than two hypotheses it bounds the smallest
/// posterior only (an extension of the binary statement), not the MAP error.
///
/// A zero entry makes the mean zero, which is its limiting value.
pub fn power_mean_upper(p: &Posterior, beta: f64) -> Result<f64, BoundsError> {
    if !(beta < 0.0) || !beta.is_finite() {
        return Err(BoundsError::BetaNonNegative(beta));
    }
    if p.iter().any(|&x| x == 0.0) {
        return Ok(0.0);
    }
    // Factor out the minimum so that large |beta| does not overflow.
    let min = p.iter().copied().fold(f64::INFINITY, f64::min);
    let m = p.len() as f64;
    let scaled: f64 = p.iter().map(|&x| (x / min).powf(beta)).sum::<f64>() / m;
    Ok(min * scaled.powf(1.0 / beta))
}

/// The binary harmonic pair `(p1 p2, 2 p1 p2)`.
pub fn harmonic_pair(p: &Posterior) -> Result<BoundPair, BoundsError> {
    if p.len() != 2 {
        return Err(BoundsError::NotBinary(p.len()));
    }
    let prod = p[0] * p[1];
    Ok(BoundPair::new(prod, 2.0 * prod))
}

/// Per-observation Chernoff bound `min_alpha p1^alpha p2^(1-alpha)`.
///
/// The minimum over `[0, 1]` sits at an endpoint, so this equals
/// `min(p1, p2)` exactly; it is included for completeness of the report.
fn chernoff_pointwise(p: &Posterior) -> f64 {
    p[0].min(p[1])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerMeanEntry {
    pub beta: f64,
    pub value: f64,
}

/// Every bound evaluated on one posterior.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub hypotheses: usize,
    pub exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chernoff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bhattacharyya: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub power_mean_upper: Vec<PowerMeanEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub harmonic_lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub harmonic_upper: Option<f64>,
    pub bd_lower: f64,
    pub bd_upper: f64,
    pub quad_lower: f64,
    pub quad_upper: f64,
    pub renyi: f64,
    pub hellman_raviv: f64,
    pub improved_equivocation: f64,
}

impl BoundReport {
    /// Values that must not exceed the exact error.
    pub fn lower_bounds(&self) -> Vec<(&'static str, f64)> {
        let mut v = vec![("bd_lower", self.bd_lower), ("quad_lower", self.quad_lower)];
        if let Some(h) = self.harmonic_lower {
            v.push(("harmonic_lower", h));
        }
        v
    }

    /// Values that must not fall below the exact error.
    pub fn upper_bounds(&self) -> Vec<(&'static str, f64)> {
        let mut v = vec![
            ("bd_upper", self.bd_upper),
            ("quad_upper", self.quad_upper),
            ("renyi", self.renyi),
            ("hellman_raviv", self.hellman_raviv),
            ("improved_equivocation", self.improved_equivocation),
        ];
        v.extend(self.harmonic_upper.map(|h| ("harmonic_upper", h)));
        v.extend(self.chernoff.map(|c| ("chernoff", c)));
        v.extend(self.bhattacharyya.map(|b| ("bhattacharyya", b)));
        v.extend(
            self.power_mean_upper
                .iter()
                .map(|e| ("power_mean_upper", e.value)),
        );
        v
    }

    /// Names of bounds that fail to sandwich the exact error by more than `tol`.
    pub fn violations(&self, tol: f64) -> Vec<&'static str> {
        let Some(exact) = self.exact else {
            return Vec::new();
        };
        let lows = self
            .lower_bounds()
            .into_iter()
            .filter(|(_, v)| *v > exact + tol);
        let highs = self
            .upper_bounds()
            .into_iter()
            .filter(|(_, v)| *v < exact - tol);
        lows.chain(highs).map(|(n, _)| n).collect()
    }
}

/// Evaluates every applicable bound. Binary-only entries (harmonic pair,
/// Chernoff, Bhattacharyya, power means) are omitted when `M != 2`; invalid
/// exponents in `betas` are skipped.
pub fn full_report(p: &Posterior, betas: &[f64]) -> BoundReport {
    let bd = bd_bounds(p);
    let quad = quadratic_bounds(p);
    let binary = p.len() == 2;
    let harmonic = harmonic_pair(p).ok();
    let power_mean_upper = if binary {
        betas
            .iter()
            .filter_map(|&beta| {
                power_mean_upper(p, beta)
                    .ok()
                    .map(|value| PowerMeanEntry { beta, value })
            })
            .collect()
    } else {
        Vec::new()
    };
    BoundReport {
        hypotheses: p.len(),
        exact: Some(map_conditional_error(p)),
        chernoff: binary.then(|| chernoff_pointwise(p)),
        bhattacharyya: binary.then(|| (p[0] * p[1]).sqrt()),
        power_mean_upper,
        harmonic_lower: harmonic.map(|h| h.raw_lower),
        harmonic_upper: harmonic.map(|h| h.raw_upper),
        bd_lower: bd.raw_lower,
        bd_upper: bd.raw_upper,
        quad_lower: quad.raw_lower,
        quad_upper: quad.raw_upper,
        renyi: renyi_bound(p),
        hellman_raviv: hellman_raviv_bound(p),
        improved_equivocation: improved_equivocation_bound(p),
    }
}

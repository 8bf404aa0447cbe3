//! Binary hypothesis tests with a scalar continuous observation.
//!
//! A [`BinaryContinuousProblem`] carries two priors and two likelihood
//! densities. Its Bayes risk `P_e = ∫ min(π1 f1, π2 f2) dy` is computed by
//! quadrature and compared with the harmonic pair, the Chernoff bound and the
//! Bhattacharyya bound.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Normal};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::numerics::{
    find_roots, integrate_real_line_with_breakpoints, minimize_scalar, NumericsError,
    QuadratureSpec,
};

/// Scan step used when locating decision boundaries.
pub const BOUNDARY_SCAN_STEP: f64 = 0.01;
/// Window used for plotting decision boundaries of the shipped example.
pub const BOUNDARY_WINDOW: (f64, f64) = (-20.0, 20.0);
/// Tolerance on the mass (and, for the example, variance) of each density.
pub const DENSITY_CHECK_TOLERANCE: f64 = 1e-6;

const CHERNOFF_ALPHA_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HypothesisError {
    #[error("prior {0} is not a probability")]
    InvalidPrior(f64),
    #[error("density {which} integrates to {mass}, not 1")]
    DensityNotNormalized { which: usize, mass: f64 },
    #[error("density {which} has variance {variance}, expected {expected}")]
    VarianceMismatch {
        which: usize,
        variance: f64,
        expected: f64,
    },
    #[error("gamma must be positive and finite, got {0}")]
    InvalidGamma(f64),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Density = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct BinaryContinuousProblem {
    priors: [f64; 2],
    densities: [Density; 2],
    spec: QuadratureSpec,
    features: Vec<f64>,
}

impl fmt::Debug for BinaryContinuousProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BinaryContinuousProblem")
            .field("priors", &self.priors)
            .field("spec", &self.spec)
            .field("features", &self.features)
            .finish_non_exhaustive()
    }
}

impl BinaryContinuousProblem {
    /// Builds a problem and checks that both densities integrate to one.
    ///
    /// `features` are abscissae where a density has a kink or a narrow peak;
    /// they are passed to the quadrature as breakpoints.
    pub fn new(
        prior1: f64,
        density1: Density,
        density2: Density,
        spec: QuadratureSpec,
        features: Vec<f64>,
    ) -> Result<Self, HypothesisError> {
        if !(0.0..=1.0).contains(&prior1) {
            return Err(HypothesisError::InvalidPrior(prior1));
        }
        spec.validate()?;
        let problem = BinaryContinuousProblem {
            priors: [prior1, 1.0 - prior1],
            densities: [density1, density2],
            spec,
            features,
        };
        for which in 0..2 {
            let mass = problem.integrate(|y| problem.densities[which](y))?;
            if (mass - 1.0).abs() > DENSITY_CHECK_TOLERANCE {
                return Err(HypothesisError::DensityNotNormalized {
                    which: which + 1,
                    mass,
                });
            }
        }
        Ok(problem)
    }

    pub fn priors(&self) -> [f64; 2] {
        self.priors
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }

    pub fn density(&self, which: usize, y: f64) -> f64 {
        self.densities[which](y)
    }

    /// Prior-weighted likelihoods `(π1 f1(y), π2 f2(y))`.
    pub fn joint(&self, y: f64) -> (f64, f64) {
        (
            self.priors[0] * self.densities[0](y),
            self.priors[1] * self.densities[1](y),
        )
    }

    /// Posterior probabilities at `y`; `(π1, π2)` where both densities vanish.
    pub fn posterior(&self, y: f64) -> (f64, f64) {
        let (a, b) = self.joint(y);
        let total = a + b;
        if total > 0.0 {
            (a / total, b / total)
        } else {
            (self.priors[0], self.priors[1])
        }
    }

    /// MAP decision at `y` (0 or 1), ties going to the first hypothesis.
    pub fn decide(&self, y: f64) -> usize {
        let (a, b) = self.joint(y);
        usize::from(b > a)
    }

    fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64, NumericsError> {
        self.integrate_with(f, &[])
    }

    fn integrate_with<F: Fn(f64) -> f64>(&self, f: F, extra: &[f64]) -> Result<f64, NumericsError> {
        let mut breaks = self.features.clone();
        breaks.extend_from_slice(extra);
        integrate_real_line_with_breakpoints(f, &breaks, &self.spec).map(|i| i.value)
    }

    fn boundaries_over_domain(&self) -> Vec<f64> {
        let t = self.spec.half_width;
        decision_boundaries(self, (-t, t))
    }
}

/// `∫ min(π1 f1, π2 f2) dy`.
pub fn exact_bayes_risk(prob: &BinaryContinuousProblem) -> Result<f64, HypothesisError> {
    let kinks = prob.boundaries_over_domain();
    let v = prob.integrate_with(
        |y| {
            let (a, b) = prob.joint(y);
            a.min(b)
        },
        &kinks,
    )?;
    Ok(v.max(0.0))
}

/// The harmonic pair `(P_LB, 2 P_LB)` with
/// `P_LB = ∫ π1 π2 f1 f2 / (π1 f1 + π2 f2) dy`.
pub fn harmonic_risk_bounds(prob: &BinaryContinuousProblem) -> Result<(f64, f64), HypothesisError> {
    let lower = prob.integrate(|y| {
        let (a, b) = prob.joint(y);
        let total = a + b;
        if total > 0.0 {
            a * b / total
        } else {
            0.0
        }
    })?;
    Ok((lower, 2.0 * lower))
}

fn chernoff_integral(prob: &BinaryContinuousProblem, alpha: f64) -> Result<f64, NumericsError> {
    prob.integrate(|y| {
        let (a, b) = prob.joint(y);
        a.powf(alpha) * b.powf(1.0 - alpha)
    })
}

/// `min_{α∈[0,1]} ∫ (π1 f1)^α (π2 f2)^(1-α) dy`, returned as `(α*, value)`.
pub fn chernoff_risk_bound(prob: &BinaryContinuousProblem) -> Result<(f64, f64), HypothesisError> {
    // Quadrature failures inside the search are surfaced after the fact.
    let failure = std::sync::Mutex::new(None);
    let objective = |alpha: f64| match chernoff_integral(prob, alpha) {
        Ok(v) => v,
        Err(e) => {
            failure.lock().unwrap().get_or_insert(e);
            f64::INFINITY
        }
    };
    let (mut alpha, mut value) = minimize_scalar(objective, 0.0, 1.0, CHERNOFF_ALPHA_TOL);
    let half = objective(0.5);
    if half < value {
        (alpha, value) = (0.5, half);
    }
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e.into());
    }
    Ok((alpha, value))
}

/// Chernoff integrand at `α = 1/2`: `sqrt(π1 π2) ∫ sqrt(f1 f2) dy`.
pub fn bhattacharyya_risk_bound(prob: &BinaryContinuousProblem) -> Result<f64, HypothesisError> {
    Ok(chernoff_integral(prob, 0.5)?)
}

/// Zeros of `π1 f1 - π2 f2` inside `window`, scanned at step 0.01.
///
/// Where the two weighted densities coincide on an interval there is no sign
/// change and nothing is reported; identical densities give an empty list.
pub fn decision_boundaries(prob: &BinaryContinuousProblem, window: (f64, f64)) -> Vec<f64> {
    find_roots(
        |y| {
            let (a, b) = prob.joint(y);
            a - b
        },
        window.0,
        window.1,
        BOUNDARY_SCAN_STEP,
    )
}

/// The example pair of densities: a raised-cosine Laplacian of unit variance,
/// `f1(t) = (2/3) cos²(t/2) e^{-|t|}`, against a Gaussian
/// `f2(t) = sqrt(γ/π) e^{-γ t²}` of variance `1/(2γ)`, with equal priors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Appendix1Instance {
    gamma: f64,
}

pub fn raised_cosine_density(t: f64) -> f64 {
    let c = (0.5 * t).cos();
    (2.0 / 3.0) * c * c * (-t.abs()).exp()
}

pub fn gaussian_density(gamma: f64, t: f64) -> f64 {
    (gamma / PI).sqrt() * (-gamma * t * t).exp()
}

impl Appendix1Instance {
    pub fn new(gamma: f64) -> Result<Self, HypothesisError> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(HypothesisError::InvalidGamma(gamma));
        }
        Ok(Appendix1Instance { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Truncation half-width covering both densities: the Gaussian tail at
    /// `12 / sqrt(γ)` is below `e^-144`.
    pub fn half_width(&self) -> f64 {
        60f64.max(12.0 / self.gamma.sqrt())
    }

    pub fn problem(&self) -> Result<BinaryContinuousProblem, HypothesisError> {
        appendix1_problem(self.gamma)
    }

    /// Monte Carlo estimate of the MAP error with its standard error.
    ///
    /// Samples are drawn in fixed-size chunks, each from its own ChaCha stream
    /// keyed by `(seed, chunk index)`, so the result does not depend on the
    /// number of worker threads.
    pub fn monte_carlo_map_error(
        &self,
        samples: u64,
        seed: u64,
    ) -> Result<(f64, f64), HypothesisError> {
        const CHUNK: u64 = 1 << 16;
        let prob = self.problem()?;
        let normal = Normal::new(0.0, (0.5 / self.gamma).sqrt()).expect("positive sd");
        let chunks = samples.div_ceil(CHUNK);
        let errors: u64 = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(c);
                let n = CHUNK.min(samples - c * CHUNK);
                let mut wrong = 0u64;
                for _ in 0..n {
                    let truth = usize::from(rng.gen::<bool>());
                    let y = if truth == 0 {
                        sample_raised_cosine(&mut rng)
                    } else {
                        normal.sample(&mut rng)
                    };
                    if prob.decide(y) != truth {
                        wrong += 1;
                    }
                }
                wrong
            })
            .collect::<Vec<_>>()
            .into_iter()
            .sum();
        let p = errors as f64 / samples as f64;
        Ok((p, (p * (1.0 - p) / samples as f64).sqrt()))
    }
}

/// Rejection sampler for [`raised_cosine_density`]: propose from the
/// Laplace density `e^{-|t|}/2` and accept with probability `cos²(t/2)`.
pub fn sample_raised_cosine<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let magnitude: f64 = Exp1.sample(rng);
        let t = if rng.gen::<bool>() {
            magnitude
        } else {
            -magnitude
        };
        let c = (0.5 * t).cos();
        if rng.gen::<f64>() < c * c {
            return t;
        }
    }
}

/// Builds the example problem for shape parameter `γ` and validates that
/// `f1` has unit mass and unit variance.
pub fn appendix1_problem(gamma: f64) -> Result<BinaryContinuousProblem, HypothesisError> {
    let inst = Appendix1Instance::new(gamma)?;
    let spec = QuadratureSpec::default().with_half_width(inst.half_width());
    let scale = 1.0 / gamma.sqrt();
    let mut features = vec![0.0];
    for k in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
        features.push(k * scale);
        features.push(-k * scale);
    }
    let variance = integrate_real_line_with_breakpoints(
        |t| t * t * raised_cosine_density(t),
        &features,
        &spec,
    )?
    .value;
    if (variance - 1.0).abs() > DENSITY_CHECK_TOLERANCE {
        return Err(HypothesisError::VarianceMismatch {
            which: 1,
            variance,
            expected: 1.0,
        });
    }
    BinaryContinuousProblem::new(
        0.5,
        Arc::new(raised_cosine_density),
        Arc::new(move |t| gaussian_density(gamma, t)),
        spec,
        features,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub harmonic_lower: f64,
    pub harmonic_upper: f64,
    pub chernoff: f64,
    pub chernoff_alpha: f64,
    pub bhattacharyya: f64,
    pub exact: f64,
}

pub fn sweep_row(gamma: f64) -> Result<SweepRow, HypothesisError> {
    let prob = appendix1_problem(gamma)?;
    let (harmonic_lower, harmonic_upper) = harmonic_risk_bounds(&prob)?;
    let (chernoff_alpha, chernoff) = chernoff_risk_bound(&prob)?;
    Ok(SweepRow {
        gamma,
        harmonic_lower,
        harmonic_upper,
        chernoff,
        chernoff_alpha,
        bhattacharyya: bhattacharyya_risk_bound(&prob)?,
        exact: exact_bayes_risk(&prob)?,
    })
}

/// One row per `γ`, in input order.
pub fn gamma_sweep(gammas: &[f64]) -> Result<Vec<SweepRow>, HypothesisError> {
    gammas.par_iter().map(|&g| sweep_row(g)).collect()
}

/// `count` values of `γ` spaced logarithmically over `[lo, hi]`.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            (0..count)
                .map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64))
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_at(mean: f64) -> Density {
        Arc::new(move |y: f64| (-0.5 * (y - mean).powi(2)).exp() / (2.0 * PI).sqrt())
    }

    fn uniform_on(a: f64, b: f64) -> Density {
        Arc::new(move |y: f64| if y >= a && y <= b { 1.0 / (b - a) } else { 0.0 })
    }

    fn identical() -> BinaryContinuousProblem {
        BinaryContinuousProblem::new(
            0.5,
            gaussian_at(0.0),
            gaussian_at(0.0),
            QuadratureSpec::default(),
            vec![0.0],
        )
        .unwrap()
    }

    fn disjoint() -> BinaryContinuousProblem {
        BinaryContinuousProblem::new(
            0.5,
            uniform_on(-2.0, -1.0),
            uniform_on(1.0, 2.0),
            QuadratureSpec::default(),
            vec![-2.0, -1.0, 1.0, 2.0],
        )
        .unwrap()
    }

    #[test]
    fn identical_densities() {
        let p = identical();
        assert!((exact_bayes_risk(&p).unwrap() - 0.5).abs() < 1e-10);
        let (lo, hi) = harmonic_risk_bounds(&p).unwrap();
        assert!((lo - 0.25).abs() < 1e-10 && (hi - 0.5).abs() < 1e-10);
        for alpha in [0.0, 0.2, 0.5, 0.9] {
            assert!((chernoff_integral(&p, alpha).unwrap() - 0.5).abs() < 1e-10);
        }
        assert!((chernoff_risk_bound(&p).unwrap().1 - 0.5).abs() < 1e-10);
        assert!((bhattacharyya_risk_bound(&p).unwrap() - 0.5).abs() < 1e-10);
        assert!(decision_boundaries(&p, (-20.0, 20.0)).is_empty());
    }

    #[test]
    fn disjoint_supports() {
        let p = disjoint();
        assert_eq!(exact_bayes_risk(&p).unwrap(), 0.0);
        assert_eq!(harmonic_risk_bounds(&p).unwrap(), (0.0, 0.0));
        assert_eq!(bhattacharyya_risk_bound(&p).unwrap(), 0.0);
    }

    #[test]
    fn shifted_gaussians() {
        let p = BinaryContinuousProblem::new(
            0.5,
            gaussian_at(-1.0),
            gaussian_at(1.0),
            QuadratureSpec::default(),
            vec![-1.0, 0.0, 1.0],
        )
        .unwrap();
        let b = decision_boundaries(&p, (-20.0, 20.0));
        assert_eq!(b.len(), 1);
        assert!(b[0].abs() < 1e-9);
        let (alpha, _) = chernoff_risk_bound(&p).unwrap();
        assert!((alpha - 0.5).abs() < 1e-5, "{alpha}");
        // exact risk is Q(1)
        let q1 = 0.158_655_253_931_457_05;
        assert!((exact_bayes_risk(&p).unwrap() - q1).abs() < 1e-10);
    }

    #[test]
    fn rejects_unnormalized_density() {
        let half: Density = Arc::new(|y: f64| 0.5 * (-0.5 * y * y).exp() / (2.0 * PI).sqrt());
        let err = BinaryContinuousProblem::new(
            0.5,
            half,
            gaussian_at(0.0),
            QuadratureSpec::default(),
            vec![],
        )
        .unwrap_err();
        assert!(matches!(
            err,
            HypothesisError::DensityNotNormalized { which: 1, .. }
        ));
        assert!(matches!(
            BinaryContinuousProblem::new(
                1.5,
                gaussian_at(0.0),
                gaussian_at(0.0),
                QuadratureSpec::default(),
                vec![]
            ),
            Err(HypothesisError::InvalidPrior(_))
        ));
        assert!(matches!(
            appendix1_problem(0.0),
            Err(HypothesisError::InvalidGamma(_))
        ));
        assert!(matches!(
            appendix1_problem(f64::NAN),
            Err(HypothesisError::InvalidGamma(_))
        ));
    }

    #[test]
    fn example_densities_are_normalized() {
        let spec = QuadratureSpec::default();
        let mass = integrate_real_line_with_breakpoints(raised_cosine_density, &[0.0], &spec)
            .unwrap()
            .value;
        assert!((mass - 1.0).abs() < 1e-10);
        let var = integrate_real_line_with_breakpoints(
            |t| t * t * raised_cosine_density(t),
            &[0.0],
            &spec,
        )
        .unwrap()
        .value;
        assert!((var - 1.0).abs() < 1e-10);
        let g = 0.125;
        let var2 =
            integrate_real_line_with_breakpoints(|t| t * t * gaussian_density(g, t), &[0.0], &spec)
                .unwrap()
                .value;
        assert!((var2 - 4.0).abs() < 1e-9);
    }

    #[test]
    fn rejection_sampler_matches_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let t = sample_raised_cosine(&mut rng);
            s1 += t;
            s2 += t * t;
        }
        let mean = s1 / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!(mean.abs() < 0.01, "{mean}");
        assert!((var - 1.0).abs() < 0.02, "{var}");
    }

    #[test]
    fn symmetric_problem_has_symmetric_boundaries() {
        let p = BinaryContinuousProblem::new(
            0.5,
            gaussian_at(-2.0),
            gaussian_at(2.0),
            QuadratureSpec::default(),
            vec![],
        )
        .unwrap();
        let b = decision_boundaries(&p, (-20.0, 20.0));
        for (x, y) in b.iter().zip(b.iter().rev()) {
            assert!((x + y).abs() < 1e-9);
        }
    }

    #[test]
    fn log_spacing() {
        let g = log_spaced(1e-3, 1e3, 7);
        assert_eq!(g.len(), 7);
        for (i, v) in g.iter().enumerate() {
            assert!((v.log10() - (i as f64 - 3.0)).abs() < 1e-12);
        }
        assert!(log_spaced(1.0, 2.0, 0).is_empty());
    }
}

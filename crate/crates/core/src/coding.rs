//! Random-coding lower bounds on MAP decoding error and equivocation, and an
//! exact simulator for small random code ensembles.
//!
//! Codebooks hold `M` equiprobable codewords of length `N`, each symbol drawn
//! i.i.d. from `px`. With rate `R = log2(M) / N` the ensemble-average MAP
//! error satisfies
//!
//! ```text
//! P̄e >= 1 - M^{-1/2} (Σ_j sqrt(Σ_k px(k) p(j|k)²))^N = 1 - 2^{-(N/2)(R - ρ)}
//! ```
//!
//! and, combined with `P̄e <= 1 - 2^{-H̄(X|Y)}`, the equivocation satisfies
//! `H̄(X|Y) >= (N/2)(R - ρ)`.

use rand::distributions::WeightedIndex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::channels::{rho_biawgn, rho_discrete, ChannelError, Dmc};
use crate::prob::Pmf;

/// Default cap on `|J|^N * M * trials` elementary operations.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// Slack allowed when checking a statistical lower bound: three standard errors.
pub const SE_MULTIPLIER: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodingError {
    #[error("block length must be at least 1")]
    ZeroBlockLength,
    #[error("codebook must hold at least 2 codewords, got {0}")]
    CodebookTooSmall(usize),
    #[error("at least one trial is required")]
    NoTrials,
    #[error("input distribution has {got} entries but the channel has {expected} inputs")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("codeword {index} is malformed")]
    BadCodeword { index: usize },
    #[error("enumeration needs {required:.3e} operations, budget is {budget}")]
    BudgetExceeded { required: f64, budget: u64 },
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleParams {
    pub block_length: usize,
    pub codebook_size: usize,
    pub channel: Dmc,
    pub px: Pmf,
    pub trials: usize,
    pub seed: u64,
    pub budget: u64,
}

impl EnsembleParams {
    pub fn new(
        block_length: usize,
        codebook_size: usize,
        channel: Dmc,
        px: Pmf,
        trials: usize,
        seed: u64,
    ) -> Result<Self, CodingError> {
        let params = EnsembleParams {
            block_length,
            codebook_size,
            channel,
            px,
            trials,
            seed,
            budget: DEFAULT_BUDGET,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn validate(&self) -> Result<(), CodingError> {
        if self.block_length == 0 {
            return Err(CodingError::ZeroBlockLength);
        }
        if self.codebook_size < 2 {
            return Err(CodingError::CodebookTooSmall(self.codebook_size));
        }
        if self.trials == 0 {
            return Err(CodingError::NoTrials);
        }
        if self.px.len() != self.channel.inputs() {
            return Err(CodingError::DimensionMismatch {
                expected: self.channel.inputs(),
                got: self.px.len(),
            });
        }
        Ok(())
    }

    /// Bits per channel use, `log2(M) / N`.
    pub fn rate(&self) -> f64 {
        (self.codebook_size as f64).log2() / self.block_length as f64
    }

    pub fn rho(&self) -> Result<f64, CodingError> {
        Ok(rho_discrete(&self.channel, &self.px)?)
    }

    /// `|J|^N * M * trials`, the cost of exact simulation.
    pub fn simulation_cost(&self) -> f64 {
        (self.channel.outputs() as f64).powi(self.block_length as i32)
            * self.codebook_size as f64
            * self.trials as f64
    }

    fn check_budget(&self, required: f64) -> Result<(), CodingError> {
        if required > self.budget as f64 {
            return Err(CodingError::BudgetExceeded {
                required,
                budget: self.budget,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorLowerBound {
    pub rho: f64,
    pub rate: f64,
    /// `max(0, 1 - 2^{-(N/2)(R - ρ)})`.
    pub bound: f64,
    /// `1 - 2^{-(N/2)(R - ρ)}` before clamping.
    pub exponent_form: f64,
    /// `1 - M^{-1/2} F^N` with `F` the per-symbol factor, before clamping.
    pub factorized_form: f64,
}

pub fn ensemble_error_lower_bound(params: &EnsembleParams) -> Result<ErrorLowerBound, CodingError> {
    params.validate()?;
    let rho = params.rho()?;
    let rate = params.rate();
    let n = params.block_length as f64;
    let exponent_form = 1.0 - (-(n / 2.0) * (rate - rho)).exp2();
    let factor = params.channel.rho_factor(&params.px)?;
    let factorized_form =
        1.0 - factor.powi(params.block_length as i32) / (params.codebook_size as f64).sqrt();
    Ok(ErrorLowerBound {
        rho,
        rate,
        bound: exponent_form.max(0.0),
        exponent_form,
        factorized_form,
    })
}

/// `max(0, (N/2)(R - ρ))` in bits.
pub fn equivocation_lower_bound(params: &EnsembleParams) -> Result<f64, CodingError> {
    params.validate()?;
    let rho = params.rho()?;
    Ok((params.block_length as f64 / 2.0 * (params.rate() - rho)).max(0.0))
}

/// The same lower bound for the binary-input Gaussian channel, through its `ρ`.
pub fn biawgn_error_lower_bound(
    sigma2: f64,
    block_length: usize,
    codebook_size: usize,
) -> Result<f64, CodingError> {
    if block_length == 0 {
        return Err(CodingError::ZeroBlockLength);
    }
    if codebook_size < 2 {
        return Err(CodingError::CodebookTooSmall(codebook_size));
    }
    let rho = rho_biawgn(sigma2)?;
    let n = block_length as f64;
    let rate = (codebook_size as f64).log2() / n;
    Ok((1.0 - (-(n / 2.0) * (rate - rho)).exp2()).max(0.0))
}

/// Calls `visit` with every sequence in `alphabet^len`, in lexicographic order.
fn for_each_sequence(alphabet: usize, len: usize, mut visit: impl FnMut(&[usize])) {
    let mut seq = vec![0usize; len];
    loop {
        visit(&seq);
        let mut pos = len;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            seq[pos] += 1;
            if seq[pos] < alphabet {
                break;
            }
            seq[pos] = 0;
        }
    }
}

/// `1 - M^{-1/2} Σ_{y∈J^N} sqrt(Σ_{x∈K^N} P(x) P(y|x)²)`, enumerated over
/// every input and output block without using the product structure.
pub fn ensemble_average_error_exact(params: &EnsembleParams) -> Result<f64, CodingError> {
    params.validate()?;
    let n = params.block_length;
    let (k, j) = (params.channel.inputs(), params.channel.outputs());
    let required = (j as f64).powi(n as i32) * (k as f64).powi(n as i32);
    params.check_budget(required)?;

    let ch = &params.channel;
    let px = params.px.as_slice();
    let mut outer = 0.0;
    for_each_sequence(j, n, |y| {
        let mut inner = 0.0;
        for_each_sequence(k, n, |x| {
            let mut prob_x = 1.0;
            let mut like = 1.0;
            for (&xs, &ys) in x.iter().zip(y) {
                prob_x *= px[xs];
                like *= ch.transition(xs, ys);
            }
            inner += prob_x * like * like;
        });
        outer += inner.sqrt();
    });
    Ok(1.0 - outer / (params.codebook_size as f64).sqrt())
}

/// Exact MAP error and equivocation of one code with equiprobable codewords.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CodeOutcome {
    pub error: f64,
    pub equivocation: f64,
}

impl CodeOutcome {
    /// Whether `P_e <= 1 - 2^{-H(X|Y)}` holds for this code.
    pub fn satisfies_equivocation_bound(&self, tol: f64) -> bool {
        self.error <= 1.0 - (-self.equivocation).exp2() + tol
    }
}

/// Enumerates every output block and returns the exact MAP error
/// `1 - Σ_y max_i P(y|x_i)/M` and equivocation `Σ_y P(y) H(X | y)`.
pub fn evaluate_code(channel: &Dmc, codewords: &[Vec<usize>]) -> Result<CodeOutcome, CodingError> {
    let m = codewords.len();
    if m < 2 {
        return Err(CodingError::CodebookTooSmall(m));
    }
    let n = codewords[0].len();
    if n == 0 {
        return Err(CodingError::ZeroBlockLength);
    }
    for (index, cw) in codewords.iter().enumerate() {
        if cw.len() != n || cw.iter().any(|&s| s >= channel.inputs()) {
            return Err(CodingError::BadCodeword { index });
        }
    }
    let weight = 1.0 / m as f64;
    let mut correct = 0.0;
    let mut equivocation = 0.0;
    let mut joint = vec![0.0; m];
    for_each_sequence(channel.outputs(), n, |y| {
        for (q, cw) in joint.iter_mut().zip(codewords) {
            *q = weight
                * cw.iter()
                    .zip(y)
                    .map(|(&x, &ys)| channel.transition(x, ys))
                    .product::<f64>();
        }
        let py: f64 = joint.iter().sum();
        if py == 0.0 {
            return;
        }
        correct += joint.iter().copied().fold(0.0, f64::max);
        equivocation += joint
            .iter()
            .filter(|&&q| q > 0.0)
            .map(|&q| q * (py / q).log2())
            .sum::<f64>();
    });
    Ok(CodeOutcome {
        error: (1.0 - correct).clamp(0.0, 1.0),
        equivocation: equivocation.clamp(0.0, (m as f64).log2()),
    })
}

/// Draws the codebook for one trial.
///
/// Each trial uses its own ChaCha stream keyed by `(seed, trial)`; within it,
/// symbols are drawn codeword by codeword, so every `(trial, codeword,
/// symbol)` maps to a fixed position of a fixed stream.
pub fn sample_codebook(params: &EnsembleParams, trial: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(trial);
    let symbols = WeightedIndex::new(params.px.as_slice()).expect("pmf has positive mass");
    (0..params.codebook_size)
        .map(|_| {
            (0..params.block_length)
                .map(|_| symbols.sample(&mut rng))
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleResult {
    pub block_length: usize,
    pub codebook_size: usize,
    pub trials: usize,
    pub seed: u64,
    pub rate: f64,
    pub rho: f64,
    pub mean_error: f64,
    pub error_standard_error: f64,
    pub mean_equivocation: f64,
    pub equivocation_standard_error: f64,
    pub error_lower_bound: f64,
    pub equivocation_lower_bound: f64,
    /// `mean_error >= error_lower_bound - 3 SE`.
    pub error_bound_holds: bool,
    /// `mean_equivocation >= equivocation_lower_bound - 3 SE`.
    pub equivocation_bound_holds: bool,
    /// Every sampled code satisfies `P_e <= 1 - 2^{-H(X|Y)}`.
    pub per_code_consistent: bool,
    /// Fraction of sampled codes whose own equivocation falls below the bound.
    pub per_code_violation_rate: f64,
    #[serde(skip)]
    pub per_code: Vec<CodeOutcome>,
}

fn mean_and_standard_error(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Samples `trials` random codes and evaluates each exactly.
///
/// Trials run in parallel; results are aggregated in trial order, so the
/// output is identical for any thread count.
pub fn simulate_ensemble(params: &EnsembleParams) -> Result<EnsembleResult, CodingError> {
    params.validate()?;
    params.check_budget(params.simulation_cost())?;
    let bound = ensemble_error_lower_bound(params)?;
    let h_bound = equivocation_lower_bound(params)?;

    let per_code = (0..params.trials as u64)
        .into_par_iter()
        .map(|t| evaluate_code(&params.channel, &sample_codebook(params, t)))
        .collect::<Result<Vec<_>, _>>()?;

    let (mean_error, error_se) = mean_and_standard_error(per_code.iter().map(|o| o.error));
    let (mean_equivocation, equivocation_se) =
        mean_and_standard_error(per_code.iter().map(|o| o.equivocation));
    let violations = per_code.iter().filter(|o| o.equivocation < h_bound).count();

    Ok(EnsembleResult {
        block_length: params.block_length,
        codebook_size: params.codebook_size,
        trials: params.trials,
        seed: params.seed,
        rate: bound.rate,
        rho: bound.rho,
        mean_error,
        error_standard_error: error_se,
        mean_equivocation,
        equivocation_standard_error: equivocation_se,
        error_lower_bound: bound.bound,
        equivocation_lower_bound: h_bound,
        error_bound_holds: mean_error >= bound.bound - SE_MULTIPLIER * error_se,
        equivocation_bound_holds: mean_equivocation >= h_bound - SE_MULTIPLIER * equivocation_se,
        per_code_consistent: per_code
            .iter()
            .all(|o| o.satisfies_equivocation_bound(1e-12)),
        per_code_violation_rate: violations as f64 / per_code.len() as f64,
        per_code,
    })
}

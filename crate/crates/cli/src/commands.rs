//! Subcommand implementations. Each returns a serializable payload; the
//! caller decides where and in which format it is written.

use std::path::Path;

use bayesrisk::bounds::{full_report, BoundReport};
use bayesrisk::channels::{
    capacity_biawgn, capacity_upper_bound, mutual_information, rho_biawgn, rho_discrete, Channel,
    ChannelError, ChannelSpec,
};
use bayesrisk::coding::{
    ensemble_average_error_exact, ensemble_error_lower_bound, simulate_ensemble, EnsembleParams,
    EnsembleResult, ErrorLowerBound, DEFAULT_BUDGET,
};
use bayesrisk::hypothesis::{
    decision_boundaries, raised_cosine_density, sweep_row, Appendix1Instance, SweepRow,
    BOUNDARY_WINDOW,
};
use bayesrisk::numerics::{integrate_with_breakpoints, QuadratureSpec};
use bayesrisk::prob::{Pmf, Posterior};
use serde::Serialize;

use crate::error::CliError;

/// Environment variable overriding the enumeration budget.
pub const BUDGET_ENV: &str = "BB_BUDGET";

pub fn posterior_report(weights: &[f64], betas: &[f64]) -> Result<BoundReport, CliError> {
    if let Some(&b) = betas.iter().find(|&&b| b >= 0.0 || b.is_nan()) {
        return Err(CliError::Usage(format!(
            "power-mean exponent must be negative, got {b}"
        )));
    }
    let post = Posterior::new(weights.to_vec())?;
    Ok(full_report(&post, betas))
}

/// Reads a channel spec from a file (`-` for stdin) or an inline JSON string.
pub fn load_channel_spec(
    file: Option<&Path>,
    inline: Option<&str>,
) -> Result<ChannelSpec, CliError> {
    let text = match (file, inline) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "give either a spec file or --json, not both".into(),
            ))
        }
        (None, None) => return Err(CliError::Usage("a channel spec is required".into())),
        (None, Some(s)) => s.to_owned(),
        (Some(p), None) if p == Path::new("-") => std::io::read_to_string(std::io::stdin())?,
        (Some(p), None) => std::fs::read_to_string(p).map_err(|e| {
            CliError::Usage(format!("cannot read channel spec {}: {e}", p.display()))
        })?,
    };
    Ok(serde_json::from_str(&text)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelSummary {
    /// Mutual information at the chosen input distribution.
    #[serde(rename = "I")]
    pub mutual_information: Option<f64>,
    pub rho: f64,
    #[serde(rename = "C_closed_form", skip_serializing_if = "Option::is_none")]
    pub closed_form_capacity: Option<f64>,
    pub rho_max: f64,
    pub px_star: Pmf,
    pub px: Pmf,
    /// Set when the capacity integral of a continuous channel was not trustworthy.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub unstable: bool,
}

pub fn channel_summary(spec: &ChannelSpec, px: Option<&[f64]>) -> Result<ChannelSummary, CliError> {
    match spec.build()? {
        Channel::Discrete(ch) => {
            let px = match px {
                Some(w) => Pmf::new(w.to_vec())?,
                None => Pmf::uniform(ch.inputs()),
            };
            let (px_star, rho_max) = capacity_upper_bound(&ch)?;
            Ok(ChannelSummary {
                mutual_information: Some(mutual_information(&ch, &px)?),
                rho: rho_discrete(&ch, &px)?,
                closed_form_capacity: spec.closed_form_capacity()?,
                rho_max,
                px_star,
                px,
                unstable: false,
            })
        }
        Channel::BiAwgn(ch) => {
            let uniform = Pmf::uniform(2);
            if let Some(w) = px {
                if Pmf::new(w.to_vec())? != uniform {
                    return Err(CliError::Usage(
                        "the binary-input Gaussian channel is evaluated at the uniform input only"
                            .into(),
                    ));
                }
            }
            let (mutual_information, unstable) = match capacity_biawgn(ch.sigma2()) {
                Ok(c) => (Some(c), false),
                Err(ChannelError::NumericallyUnstable { .. }) => (None, true),
                Err(e) => return Err(e.into()),
            };
            let rho = rho_biawgn(ch.sigma2())?;
            Ok(ChannelSummary {
                mutual_information,
                rho,
                closed_form_capacity: None,
                rho_max: rho,
                px_star: uniform.clone(),
                px: uniform,
                unstable,
            })
        }
    }
}

/// Budget from the environment, falling back to the library default.
/// Accepts integers or floats such as `1e9`.
pub fn budget_from_env() -> Result<u64, CliError> {
    match std::env::var(BUDGET_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_BUDGET),
        Err(e) => Err(CliError::Usage(format!("{BUDGET_ENV}: {e}"))),
        Ok(s) => parse_budget(&s).ok_or_else(|| {
            CliError::Usage(format!(
                "{BUDGET_ENV} must be a nonnegative number, got {s:?}"
            ))
        }),
    }
}

fn parse_budget(s: &str) -> Option<u64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u64>() {
        return Some(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Some(v.min(u64::MAX as f64) as u64),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EnsembleArgs<'a> {
    pub block_length: usize,
    pub codebook_size: usize,
    pub trials: usize,
    pub seed: u64,
    pub px: Option<&'a [f64]>,
    pub budget: u64,
    /// Also evaluate the ensemble bound by brute-force enumeration.
    pub enumerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleReport {
    #[serde(flatten)]
    pub result: EnsembleResult,
    pub bound_detail: ErrorLowerBound,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enumerated_bound: Option<f64>,
}

pub fn ensemble(spec: &ChannelSpec, args: &EnsembleArgs) -> Result<EnsembleReport, CliError> {
    let ch = match spec.build()? {
        Channel::Discrete(ch) => ch,
        Channel::BiAwgn(_) => {
            return Err(CliError::Usage(
                "ensemble simulation needs a discrete channel".into(),
            ))
        }
    };
    let px = match args.px {
        Some(w) => Pmf::new(w.to_vec())?,
        None => Pmf::uniform(ch.inputs()),
    };
    let params = EnsembleParams::new(
        args.block_length,
        args.codebook_size,
        ch,
        px,
        args.trials,
        args.seed,
    )?
    .with_budget(args.budget);
    let result = simulate_ensemble(&params)?;
    let bound_detail = ensemble_error_lower_bound(&params)?;
    let enumerated_bound = if args.enumerate {
        Some(ensemble_average_error_exact(&params)?)
    } else {
        None
    };
    Ok(EnsembleReport {
        result,
        bound_detail,
        enumerated_bound,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarlo {
    pub samples: u64,
    pub seed: u64,
    pub map_error: f64,
    pub standard_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Appendix1Report {
    #[serde(flatten)]
    pub risks: SweepRow,
    pub half_width: f64,
    /// Mass and variance of the raised-cosine density.
    pub density_mass: f64,
    pub density_variance: f64,
    pub boundaries: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<MonteCarlo>,
}

/// `∫ f1` and `∫ t² f1` over the truncated line, split at the kink at zero.
pub fn raised_cosine_moments() -> Result<(f64, f64), CliError> {
    let spec = QuadratureSpec::default();
    let t = spec.half_width;
    let mass = integrate_with_breakpoints(raised_cosine_density, -t, t, &[0.0], &spec)?.value;
    let second =
        integrate_with_breakpoints(|x| x * x * raised_cosine_density(x), -t, t, &[0.0], &spec)?
            .value;
    Ok((mass, second))
}

pub fn appendix1(gamma: f64, mc_samples: u64, seed: u64) -> Result<Appendix1Report, CliError> {
    let inst = Appendix1Instance::new(gamma)?;
    let prob = inst.problem()?;
    let (density_mass, density_variance) = raised_cosine_moments()?;
    let monte_carlo = if mc_samples > 0 {
        let (map_error, standard_error) = inst.monte_carlo_map_error(mc_samples, seed)?;
        Some(MonteCarlo {
            samples: mc_samples,
            seed,
            map_error,
            standard_error,
        })
    } else {
        None
    };
    Ok(Appendix1Report {
        risks: sweep_row(gamma)?,
        half_width: inst.half_width(),
        density_mass,
        density_variance,
        boundaries: decision_boundaries(&prob, BOUNDARY_WINDOW),
        monte_carlo,
    })
}

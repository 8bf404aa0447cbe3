//! Memoryless channels, mutual information and the `ρ` parameter
//!
//! `ρ_px = 2 log2 Σ_j sqrt(Σ_k px(k) p(j|k)^2)` upper-bounds `I(X;Y)` at the
//! same input distribution, so its maximum over `px` upper-bounds capacity.

use std::f64::consts::{E, LN_2, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{
    integrate_real_line_with_breakpoints, maximize_over_simplex, Integral, NumericsError,
    QuadratureSpec,
};
use crate::prob::{binary_entropy, Pmf};

/// Rows must sum to one within this tolerance.
pub const ROW_TOLERANCE: f64 = 1e-12;
/// Error estimate above which the BiAWGN capacity integral is declared unstable.
pub const CAPACITY_INSTABILITY_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("transition matrix has no rows or no columns")]
    EmptyMatrix,
    #[error("row {row} has {got} entries, expected {expected}")]
    RaggedMatrix {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("entry ({row}, {col}) is negative or not finite")]
    InvalidEntry { row: usize, col: usize },
    #[error("row {row} sums to {sum}")]
    RowNotNormalized { row: usize, sum: f64 },
    #[error("input distribution has {got} entries but the channel has {expected} inputs")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{name} = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("noise variance must be positive and finite, got {0}")]
    InvalidVariance(f64),
    #[error("capacity integral is numerically unstable: estimate {estimate}, error bound {error_bound:e}")]
    NumericallyUnstable { estimate: f64, error_bound: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Discrete memoryless channel with row-stochastic transition matrix
/// `p(j|k)`, rows indexed by input.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dmc {
    rows: Vec<Vec<f64>>,
}

impl Dmc {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, ChannelError> {
        let outputs = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || outputs == 0 {
            return Err(ChannelError::EmptyMatrix);
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != outputs {
                return Err(ChannelError::RaggedMatrix {
                    row,
                    expected: outputs,
                    got: r.len(),
                });
            }
            if let Some(col) = r.iter().position(|x| !x.is_finite() || *x < 0.0) {
                return Err(ChannelError::InvalidEntry { row, col });
            }
            let sum: f64 = r.iter().sum();
            if (sum - 1.0).abs() > ROW_TOLERANCE {
                return Err(ChannelError::RowNotNormalized { row, sum });
            }
        }
        Ok(Dmc { rows })
    }

    pub fn bsc(p: f64) -> Result<Self, ChannelError> {
        check_unit("p", p)?;
        Dmc::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    /// Outputs are ordered `(0, erasure, 1)`.
    pub fn bec(eps: f64) -> Result<Self, ChannelError> {
        check_unit("eps", eps)?;
        Dmc::new(vec![vec![1.0 - eps, eps, 0.0], vec![0.0, eps, 1.0 - eps]])
    }

    pub fn noiseless(size: usize) -> Self {
        let rows = (0..size)
            .map(|k| (0..size).map(|j| if j == k { 1.0 } else { 0.0 }).collect())
            .collect();
        Dmc { rows }
    }

    /// Each row drawn independently from the flat distribution on the simplex.
    pub fn random<R: Rng + ?Sized>(inputs: usize, outputs: usize, rng: &mut R) -> Self {
        let rows = (0..inputs)
            .map(|_| Pmf::random_flat(outputs, rng).into_vec())
            .collect();
        Dmc { rows }
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn transition(&self, input: usize, output: usize) -> f64 {
        self.rows[input][output]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    fn check_input(&self, px: &Pmf) -> Result<(), ChannelError> {
        if px.len() != self.inputs() {
            return Err(ChannelError::DimensionMismatch {
                expected: self.inputs(),
                got: px.len(),
            });
        }
        Ok(())
    }

    /// Output distribution induced by `px`.
    pub fn output_distribution(&self, px: &Pmf) -> Result<Vec<f64>, ChannelError> {
        self.check_input(px)?;
        Ok((0..self.outputs())
            .map(|j| px.iter().zip(&self.rows).map(|(p, r)| p * r[j]).sum())
            .collect())
    }

    /// `Σ_j sqrt(Σ_k px(k) p(j|k)^2)`, the per-symbol factor behind `ρ`.
    pub fn rho_factor(&self, px: &Pmf) -> Result<f64, ChannelError> {
        self.check_input(px)?;
        Ok((0..self.outputs())
            .map(|j| {
                px.iter()
                    .zip(&self.rows)
                    .map(|(p, r)| p * r[j] * r[j])
                    .sum::<f64>()
                    .sqrt()
            })
            .sum())
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<(), ChannelError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(ChannelError::OutOfRange { name, value })
    }
}

/// `I(X;Y)` in bits, dropping zero-probability terms.
pub fn mutual_information(ch: &Dmc, px: &Pmf) -> Result<f64, ChannelError> {
    let py = ch.output_distribution(px)?;
    let mut info = 0.0;
    for (p, row) in px.iter().zip(ch.rows()) {
        if *p == 0.0 {
            continue;
        }
        for (t, q) in row.iter().zip(&py) {
            if *t > 0.0 {
                info += p * t * (t / q).log2();
            }
        }
    }
    Ok(info.max(0.0))
}

pub fn rho_discrete(ch: &Dmc, px: &Pmf) -> Result<f64, ChannelError> {
    Ok(2.0 * ch.rho_factor(px)?.log2())
}

/// `ρ = 1 + log2(p^2 + (1-p)^2)` at uniform input.
pub fn rho_bsc(p: f64) -> Result<f64, ChannelError> {
    check_unit("p", p)?;
    Ok(1.0 + (p * p + (1.0 - p) * (1.0 - p)).log2())
}

/// `ρ = 2 log2(sqrt(2) - (sqrt(2) - 1) ε)` at uniform input.
pub fn rho_bec(eps: f64) -> Result<f64, ChannelError> {
    check_unit("eps", eps)?;
    let r2 = std::f64::consts::SQRT_2;
    Ok(2.0 * (r2 - (r2 - 1.0) * eps).log2())
}

pub fn capacity_bsc(p: f64) -> Result<f64, ChannelError> {
    check_unit("p", p)?;
    Ok(1.0 - binary_entropy(p))
}

pub fn capacity_bec(eps: f64) -> Result<f64, ChannelError> {
    check_unit("eps", eps)?;
    Ok(1.0 - eps)
}

/// Maximizes `ρ` over input distributions: `C <= max_px ρ_px`.
pub fn capacity_upper_bound(ch: &Dmc) -> Result<(Pmf, f64), ChannelError> {
    if ch.inputs() == 1 {
        let px = Pmf::uniform(1);
        let rho = rho_discrete(ch, &px)?;
        return Ok((px, rho));
    }
    let objective = |px: &Pmf| rho_discrete(ch, px).unwrap_or(f64::NEG_INFINITY);
    Ok(maximize_over_simplex(objective, ch.inputs(), 1e-10)?)
}

/// Binary-input (±1) additive Gaussian noise channel with noise variance
/// `σ² = N0/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BiAwgnChannel {
    sigma2: f64,
}

impl BiAwgnChannel {
    pub fn new(sigma2: f64) -> Result<Self, ChannelError> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(ChannelError::InvalidVariance(sigma2));
        }
        Ok(BiAwgnChannel { sigma2 })
    }

    /// Rate-1 signalling with unit symbol energy: `Eb/N0 = 1 / (2σ²)`.
    pub fn from_ebn0_db(ebn0_db: f64) -> Result<Self, ChannelError> {
        BiAwgnChannel::new(ebn0_to_sigma2(ebn0_db))
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn ebn0_db(&self) -> f64 {
        10.0 * (0.5 / self.sigma2).log10()
    }

    /// Half-width large enough that every integrand tail is below `e^-72`.
    pub fn quadrature_spec(&self) -> QuadratureSpec {
        let sigma = self.sigma2.sqrt();
        QuadratureSpec::default().with_half_width(60f64.max(1.0 + 12.0 * sigma))
    }

    /// Breakpoints at the two signal points and a few noise widths around them.
    fn breakpoints(&self) -> Vec<f64> {
        let sigma = self.sigma2.sqrt();
        let mut pts = vec![0.0];
        for mean in [-1.0, 1.0] {
            pts.push(mean);
            for k in [0.5, 1.0, 2.0, 4.0, 8.0] {
                pts.push(mean - k * sigma);
                pts.push(mean + k * sigma);
            }
        }
        pts
    }

    /// Natural log of the Gaussian likelihood `p(y | x)`.
    pub fn log_likelihood(&self, y: f64, x: f64) -> f64 {
        -(y - x).powi(2) / (2.0 * self.sigma2) - 0.5 * (2.0 * PI * self.sigma2).ln()
    }
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

pub fn ebn0_to_sigma2(ebn0_db: f64) -> f64 {
    0.5 / 10f64.powf(ebn0_db / 10.0)
}

/// `ρ` of the BiAWGN channel at uniform input, from
/// `-log2(4πσ²) + 2 log2 ∫ sqrt(e^{-(y-1)²/σ²} + e^{-(y+1)²/σ²}) dy`.
pub fn rho_biawgn(sigma2: f64) -> Result<f64, ChannelError> {
    let ch = BiAwgnChannel::new(sigma2)?;
    rho_biawgn_with(&ch, &ch.quadrature_spec())
}

pub fn rho_biawgn_with(ch: &BiAwgnChannel, spec: &QuadratureSpec) -> Result<f64, ChannelError> {
    let s2 = ch.sigma2;
    let integrand = |y: f64| {
        let a = -(y - 1.0).powi(2) / s2;
        let b = -(y + 1.0).powi(2) / s2;
        (0.5 * log_sum_exp(a, b)).exp()
    };
    let integral = integrate_real_line_with_breakpoints(integrand, &ch.breakpoints(), spec)?;
    Ok(-(4.0 * PI * s2).log2() + 2.0 * integral.value.log2())
}

/// `ρ` of the BiAWGN channel from the generic continuous-output definition
/// `2 log2 ∫ sqrt(Σ_k px(k) p(y|k)²) dy` with `px = (1/2, 1/2)`.
pub fn rho_biawgn_generic(sigma2: f64) -> Result<f64, ChannelError> {
    let ch = BiAwgnChannel::new(sigma2)?;
    let integrand = |y: f64| {
        let lp = log_sum_exp(
            2.0 * ch.log_likelihood(y, 1.0),
            2.0 * ch.log_likelihood(y, -1.0),
        );
        (0.5 * (lp + 0.5f64.ln())).exp()
    };
    let integral =
        integrate_real_line_with_breakpoints(integrand, &ch.breakpoints(), &ch.quadrature_spec())?;
    Ok(2.0 * integral.value.log2())
}

/// Capacity of the BiAWGN channel, `h(Y) - ½ log2(2πeσ²)`, with `h(Y)`
/// computed by quadrature of the mixture density in log space.
///
/// Returns [`ChannelError::NumericallyUnstable`] with the partial estimate
/// when the quadrature error estimate exceeds
/// [`CAPACITY_INSTABILITY_THRESHOLD`].
pub fn capacity_biawgn(sigma2: f64) -> Result<f64, ChannelError> {
    let ch = BiAwgnChannel::new(sigma2)?;
    capacity_biawgn_with(&ch, &ch.quadrature_spec())
}

pub fn capacity_biawgn_with(
    ch: &BiAwgnChannel,
    spec: &QuadratureSpec,
) -> Result<f64, ChannelError> {
    let log_mix =
        |y: f64| log_sum_exp(ch.log_likelihood(y, 1.0), ch.log_likelihood(y, -1.0)) + 0.5f64.ln();
    let integrand = |y: f64| {
        let lp = log_mix(y);
        if lp == f64::NEG_INFINITY {
            0.0
        } else {
            -lp.exp() * lp / LN_2
        }
    };
    let (integral, mut error_bound) =
        match integrate_real_line_with_breakpoints(integrand, &ch.breakpoints(), spec) {
            Ok(Integral { value, error }) => (value, error),
            Err(NumericsError::MaxDepthExceeded {
                estimate,
                error_bound,
            }) => (estimate, error_bound),
            Err(e) => return Err(e.into()),
        };
    // Mass (and entropy) left outside the truncated domain.
    let t = spec.half_width;
    let tail_mass =
        gaussian_tail((t - 1.0) / ch.sigma2.sqrt()) + gaussian_tail((t + 1.0) / ch.sigma2.sqrt());
    error_bound += tail_mass * (1.0 - log_mix(t) / LN_2);

    let estimate = integral - 0.5 * (2.0 * PI * E * ch.sigma2).log2();
    if !(error_bound <= CAPACITY_INSTABILITY_THRESHOLD) || !estimate.is_finite() {
        return Err(ChannelError::NumericallyUnstable {
            estimate,
            error_bound,
        });
    }
    Ok(estimate.clamp(0.0, 1.0))
}

/// `P(Z > z)` for a standard normal.
fn gaussian_tail(z: f64) -> f64 {
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}

/// Channel description as read from JSON, e.g. `{"type":"bsc","p":0.1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ChannelSpec {
    Dmc { matrix: Vec<Vec<f64>> },
    Bsc { p: f64 },
    Bec { eps: f64 },
    Biawgn { sigma2: f64 },
}

/// A validated channel built from a [`ChannelSpec`].
#[derive(Debug, Clone, PartialEq)]
pub enum Channel {
    Discrete(Dmc),
    BiAwgn(BiAwgnChannel),
}

impl ChannelSpec {
    pub fn build(&self) -> Result<Channel, ChannelError> {
        Ok(match *self {
            ChannelSpec::Dmc { ref matrix } => Channel::Discrete(Dmc::new(matrix.clone())?),
            ChannelSpec::Bsc { p } => Channel::Discrete(Dmc::bsc(p)?),
            ChannelSpec::Bec { eps } => Channel::Discrete(Dmc::bec(eps)?),
            ChannelSpec::Biawgn { sigma2 } => Channel::BiAwgn(BiAwgnChannel::new(sigma2)?),
        })
    }

    /// Closed-form capacity, when the spec is one of the parametric families.
    pub fn closed_form_capacity(&self) -> Result<Option<f64>, ChannelError> {
        match *self {
            ChannelSpec::Bsc { p } => capacity_bsc(p).map(Some),
            ChannelSpec::Bec { eps } => capacity_bec(eps).map(Some),
            _ => Ok(None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn uniform2() -> Pmf {
        Pmf::uniform(2)
    }

    fn z_channel() -> Dmc {
        Dmc::new(vec![vec![1.0, 0.0], vec![0.3, 0.7]]).unwrap()
    }

    #[test]
    fn matrix_validation() {
        assert_eq!(Dmc::new(vec![]), Err(ChannelError::EmptyMatrix));
        assert!(matches!(
            Dmc::new(vec![vec![1.0], vec![0.5, 0.5]]),
            Err(ChannelError::RaggedMatrix { row: 1, .. })
        ));
        assert!(matches!(
            Dmc::new(vec![vec![1.5, -0.5]]),
            Err(ChannelError::InvalidEntry { row: 0, col: 1 })
        ));
        assert!(matches!(
            Dmc::new(vec![vec![0.5, 0.4]]),
            Err(ChannelError::RowNotNormalized { row: 0, .. })
        ));
        assert!(matches!(
            Dmc::bsc(1.2),
            Err(ChannelError::OutOfRange { .. })
        ));
    }

    #[test]
    fn mutual_information_examples() {
        assert!(close(
            mutual_information(&Dmc::noiseless(2), &uniform2()).unwrap(),
            1.0,
            1e-15
        ));
        let useless = Dmc::new(vec![vec![0.2, 0.8], vec![0.2, 0.8]]).unwrap();
        assert_eq!(mutual_information(&useless, &uniform2()).unwrap(), 0.0);
        let i = mutual_information(&Dmc::bsc(0.1).unwrap(), &uniform2()).unwrap();
        assert!(close(i, 1.0 - binary_entropy(0.1), 1e-14));
        assert!(close(i, 0.53101, 1e-5));
        assert!(matches!(
            mutual_information(&Dmc::bsc(0.1).unwrap(), &Pmf::uniform(3)),
            Err(ChannelError::DimensionMismatch {
                expected: 2,
                got: 3
            })
        ));
    }

    #[test]
    fn rho_examples() {
        assert!(close(
            rho_discrete(&Dmc::noiseless(2), &uniform2()).unwrap(),
            1.0,
            1e-15
        ));
        let r = rho_discrete(&Dmc::bsc(0.1).unwrap(), &uniform2()).unwrap();
        assert!(close(r, 1.0 + 0.82f64.log2(), 1e-14));
        assert!(close(r, 0.713_696, 1e-6));
        assert!(close(
            rho_discrete(&Dmc::bsc(0.5).unwrap(), &uniform2()).unwrap(),
            0.0,
            1e-15
        ));
    }

    #[test]
    fn closed_forms() {
        assert_eq!(rho_bsc(0.0).unwrap(), 1.0);
        assert!(close(rho_bsc(0.5).unwrap(), 0.0, 1e-15));
        assert!(close(rho_bec(0.0).unwrap(), 1.0, 1e-15));
        assert!(close(rho_bec(1.0).unwrap(), 0.0, 1e-15));
        assert!(close(rho_bec(0.5).unwrap(), 0.54311, 1e-5));
        assert_eq!(capacity_bsc(0.0).unwrap(), 1.0);
        assert_eq!(capacity_bec(0.25).unwrap(), 0.75);
        assert!(close(capacity_bsc(0.25).unwrap(), 0.18872, 1e-5));
        assert!(rho_bec(-0.1).is_err() && capacity_bsc(2.0).is_err());
        for i in 0..=10 {
            let x = i as f64 / 10.0;
            let bsc = rho_discrete(&Dmc::bsc(x).unwrap(), &uniform2()).unwrap();
            let bec = rho_discrete(&Dmc::bec(x).unwrap(), &uniform2()).unwrap();
            assert!(close(bsc, rho_bsc(x).unwrap(), 1e-12));
            assert!(close(bec, rho_bec(x).unwrap(), 1e-12));
        }
    }

    #[test]
    fn z_channel_hand_values() {
        let z = z_channel();
        let px = uniform2();
        // output 0: 0.5*1 + 0.5*0.09 = 0.545; output 1: 0.5*0.49 = 0.245
        let rho = rho_discrete(&z, &px).unwrap();
        assert!(close(
            rho,
            2.0 * (0.545f64.sqrt() + 0.245f64.sqrt()).log2(),
            1e-14
        ));
        assert!(close(rho, 0.605, 1e-3));
        // I = H(Y) - H(Y|X) with p(y=1) = 0.35
        let i = mutual_information(&z, &px).unwrap();
        assert!(close(
            i,
            binary_entropy(0.35) - 0.5 * binary_entropy(0.3),
            1e-14
        ));
        assert!(close(i, 0.4935, 1e-4));
        let (_, rho_star) = capacity_upper_bound(&z).unwrap();
        assert!(rho_star >= rho);
        // brute-force grid over px
        let grid_best = (0..=10_000)
            .map(|i| {
                let q = i as f64 / 10_000.0;
                rho_discrete(&z, &Pmf::new(vec![q, 1.0 - q]).unwrap()).unwrap()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(close(rho_star, grid_best, 1e-7));
    }

    #[test]
    fn upper_bound_on_symmetric_channels() {
        let (px, rho) = capacity_upper_bound(&Dmc::bsc(0.1).unwrap()).unwrap();
        assert!(close(px[0], 0.5, 1e-4));
        assert!(close(rho, rho_bsc(0.1).unwrap(), 1e-10));
        let (_, rho) = capacity_upper_bound(&Dmc::noiseless(2)).unwrap();
        assert!(close(rho, 1.0, 1e-12));
        let (px, rho) = capacity_upper_bound(&Dmc::noiseless(3)).unwrap();
        assert!(close(rho, 3f64.log2(), 1e-7), "{rho}");
        assert!(px.iter().all(|&p| close(p, 1.0 / 3.0, 1e-4)));
        let single = Dmc::new(vec![vec![0.3, 0.7]]).unwrap();
        assert_eq!(capacity_upper_bound(&single).unwrap().1, 0.0);
        assert!(matches!(
            capacity_upper_bound(&Dmc::noiseless(7)),
            Err(ChannelError::Numerics(NumericsError::DimensionTooLarge(7)))
        ));
    }

    #[test]
    fn mutual_information_is_nonnegative_and_below_rho() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let k = rng.gen_range(1..=4);
            let j = rng.gen_range(1..=4);
            let ch = Dmc::random(k, j, &mut rng);
            let px = Pmf::random_flat(k, &mut rng);
            let i = mutual_information(&ch, &px).unwrap();
            let rho = rho_discrete(&ch, &px).unwrap();
            assert!(i >= 0.0);
            assert!(i <= rho + 1e-9, "I = {i}, rho = {rho}");
        }
    }

    #[test]
    fn biawgn_rho_forms_agree() {
        for s2 in [0.25, 1.0, 4.0] {
            let a = rho_biawgn(s2).unwrap();
            let b = rho_biawgn_generic(s2).unwrap();
            assert!(close(a, b, 1e-8), "{s2}: {a} vs {b}");
        }
    }

    #[test]
    fn biawgn_limits() {
        assert!(close(rho_biawgn(1e-4).unwrap(), 1.0, 1e-3));
        let r = rho_biawgn(1e3).unwrap();
        assert!(r > 0.0 && r < 1e-2, "{r}");
        assert!(close(capacity_biawgn(1e-3).unwrap(), 1.0, 1e-6));
        assert!(capacity_biawgn(1e3).unwrap() < 1e-2);
        let c = capacity_biawgn(1.0).unwrap();
        assert!(c > 0.0 && c < 1.0 && c <= rho_biawgn(1.0).unwrap());
        assert!(BiAwgnChannel::new(0.0).is_err());
    }

    #[test]
    fn biawgn_capacity_matches_reference() {
        // Independent reference: I(X;Y) = 1 - E[log2(1 + exp(-2Y/σ²))] for X = +1,
        // evaluated with a fine midpoint rule.
        let s2 = 1.0f64;
        let n = 400_000;
        let (a, b) = (-15.0, 17.0);
        let h = (b - a) / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let y = a + (i as f64 + 0.5) * h;
            let pdf = (-(y - 1.0).powi(2) / (2.0 * s2)).exp() / (2.0 * PI * s2).sqrt();
            acc += pdf * (1.0 + (-2.0 * y / s2).exp()).log2() * h;
        }
        let reference = 1.0 - acc;
        assert!(close(capacity_biawgn(s2).unwrap(), reference, 1e-8));
    }

    #[test]
    fn truncated_domain_flags_instability() {
        let ch = BiAwgnChannel::new(1e4).unwrap();
        let coarse = QuadratureSpec::default();
        match capacity_biawgn_with(&ch, &coarse) {
            Err(ChannelError::NumericallyUnstable { error_bound, .. }) => {
                assert!(error_bound > 1e-6)
            }
            other => panic!("expected instability, got {other:?}"),
        }
        // rho stays finite under the same truncation
        assert!(rho_biawgn_with(&ch, &coarse).unwrap().is_finite());
    }

    #[test]
    fn rho_biawgn_is_monotone() {
        let mut prev = f64::INFINITY;
        for i in 0..25 {
            let s2 = 10f64.powf(-3.0 + 6.0 * i as f64 / 24.0);
            let r = rho_biawgn(s2).unwrap();
            assert!(r <= prev + 1e-12, "{s2}");
            prev = r;
        }
    }

    #[test]
    fn ebn0_conversion() {
        assert!(close(ebn0_to_sigma2(0.0), 0.5, 1e-15));
        let ch = BiAwgnChannel::from_ebn0_db(3.0).unwrap();
        assert!(close(ch.ebn0_db(), 3.0, 1e-12));
    }

    #[test]
    fn spec_parsing_shapes() {
        let spec = ChannelSpec::Bsc { p: 0.1 };
        assert!(matches!(spec.build().unwrap(), Channel::Discrete(_)));
        assert!(close(
            spec.closed_form_capacity().unwrap().unwrap(),
            0.53101,
            1e-5
        ));
        assert!(ChannelSpec::Bec { eps: 2.0 }.build().is_err());
        assert_eq!(
            ChannelSpec::Biawgn { sigma2: 1.0 }
                .closed_form_capacity()
                .unwrap(),
            None
        );
    }
}

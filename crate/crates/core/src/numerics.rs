//! One-dimensional numerical support: adaptive Gauss–Kronrod quadrature,
//! bracketing root search, golden-section minimization and a small simplex
//! maximizer.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::prob::Pmf;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("quadrature did not converge: estimate {estimate}, error bound {error_bound:e}")]
    MaxDepthExceeded { estimate: f64, error_bound: f64 },
    #[error("integrand is not finite at {at}")]
    NonFinite { at: f64 },
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(&'static str),
    #[error("simplex dimension {0} is not supported (expected 2..=6)")]
    DimensionTooLarge(usize),
    #[error("simplex dimension {0} is too small (expected at least 2)")]
    DimensionTooSmall(usize),
}

/// Controls for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Absolute tolerance on the total integral.
    pub tolerance: f64,
    /// Truncation point `T` used for integrals over the whole real line.
    pub half_width: f64,
    /// Maximum number of bisections applied to any initial panel.
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            tolerance: 1e-10,
            half_width: 60.0,
            max_depth: 48,
        }
    }
}

impl QuadratureSpec {
    pub fn new(tolerance: f64, half_width: f64, max_depth: u32) -> Result<Self, NumericsError> {
        let spec = QuadratureSpec {
            tolerance,
            half_width,
            max_depth,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), NumericsError> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(NumericsError::InvalidSpec("tolerance must be positive"));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(NumericsError::InvalidSpec("half width must be positive"));
        }
        if self.max_depth < 1 {
            return Err(NumericsError::InvalidSpec("depth must be at least 1"));
        }
        Ok(())
    }

    pub fn with_half_width(self, half_width: f64) -> Self {
        QuadratureSpec { half_width, ..self }
    }

    pub fn with_tolerance(self, tolerance: f64) -> Self {
        QuadratureSpec { tolerance, ..self }
    }
}

/// Value of a definite integral together with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1],
// tabulated to full published precision.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

// Hard cap on live panels so a pathological integrand cannot exhaust memory.
const MAX_PANELS: usize = 1 << 18;

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    magnitude: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, depth: u32) -> Result<Panel, NumericsError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64, NumericsError> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(NumericsError::NonFinite { at: x })
        }
    };
    let fc = eval(center)?;
    let mut kronrod_sum = WGK[7] * fc;
    let mut gauss_sum = WG[3] * fc;
    let mut magnitude = WGK[7] * fc.abs();
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let lo = eval(center - dx)?;
        let hi = eval(center + dx)?;
        kronrod_sum += w * (lo + hi);
        magnitude += w * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss_sum += WG[j / 2] * (lo + hi);
        }
    }
    let value = kronrod_sum * half;
    Ok(Panel {
        a,
        b,
        value,
        error: ((kronrod_sum - gauss_sum) * half).abs(),
        magnitude: magnitude * half.abs(),
        depth,
    })
}

/// Adaptive integral of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Integral, NumericsError> {
    integrate_with_breakpoints(f, a, b, &[], spec)
}

/// Adaptive integral with the domain pre-split at `breakpoints`.
///
/// Breakpoints outside `(a, b)` are ignored. Supplying the locations of kinks
/// or narrow peaks lets the rule see features the initial panel would miss.
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<Integral, NumericsError> {
    spec.validate()?;
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
        });
    }
    if b < a {
        return integrate_with_breakpoints(f, b, a, breakpoints, spec).map(|i| Integral {
            value: -i.value,
            error: i.error,
        });
    }

    let mut edges: Vec<f64> = std::iter::once(a)
        .chain(
            breakpoints
                .iter()
                .copied()
                .filter(|x| x.is_finite() && *x > a && *x < b),
        )
        .chain(std::iter::once(b))
        .collect();
    edges.sort_by(f64::total_cmp);
    edges.dedup();

    let mut heap = BinaryHeap::new();
    for w in edges.windows(2) {
        heap.push(kronrod(&f, w[0], w[1], 0)?);
    }
    let mut settled: Vec<Panel> = Vec::new();

    loop {
        let (err, mag) = heap
            .iter()
            .chain(settled.iter())
            .fold((0.0, 0.0), |(e, m), p| (e + p.error, m + p.magnitude));
        let target = spec.tolerance.max(50.0 * f64::EPSILON * mag);
        if err <= target {
            break;
        }
        // Bisect the worst panels until the running error drops below target.
        let mut running = err;
        while running > target {
            let Some(worst) = heap.pop() else { break };
            let mid = 0.5 * (worst.a + worst.b);
            if worst.depth >= spec.max_depth || !(mid > worst.a && mid < worst.b) {
                settled.push(worst);
                continue;
            }
            let left = kronrod(&f, worst.a, mid, worst.depth + 1)?;
            let right = kronrod(&f, mid, worst.b, worst.depth + 1)?;
            running += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
            if heap.len() + settled.len() > MAX_PANELS {
                break;
            }
        }
        if heap.is_empty() || heap.len() + settled.len() > MAX_PANELS {
            let (estimate, error_bound) = sum_panels(heap.into_vec(), settled);
            return Err(NumericsError::MaxDepthExceeded {
                estimate,
                error_bound,
            });
        }
    }

    let (value, error) = sum_panels(heap.into_vec(), settled);
    Ok(Integral { value, error })
}

// Sum in left-to-right order so the result does not depend on heap layout.
fn sum_panels(mut panels: Vec<Panel>, settled: Vec<Panel>) -> (f64, f64) {
    panels.extend(settled);
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    panels
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
}

/// Integral over `[-T, T]` with `T = spec.half_width`.
///
/// The caller is responsible for the integrand decaying fast enough that the
/// truncated tails are negligible.
pub fn integrate_real_line<F: Fn(f64) -> f64>(
    f: F,
    spec: &QuadratureSpec,
) -> Result<Integral, NumericsError> {
    integrate(f, -spec.half_width, spec.half_width, spec)
}

pub fn integrate_real_line_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<Integral, NumericsError> {
    integrate_with_breakpoints(f, -spec.half_width, spec.half_width, breakpoints, spec)
}

const ROOT_TOLERANCE: f64 = 1e-10;

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    let mut s_lo = sign(f(lo));
    while hi - lo > ROOT_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        let s_mid = sign(f(mid));
        if s_mid == 0 {
            return mid;
        }
        if s_mid == s_lo {
            lo = mid;
            s_lo = s_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sorted roots of `f` on `[a, b]`.
///
/// The interval is scanned on a uniform grid of spacing at most `scan_step`.
/// Every strict sign change is refined by bisection to `1e-10`. In addition,
/// each grid point that is a local minimum of `|f|` without a sign change is
/// probed with a golden-section search on its two neighbouring cells; if the
/// local extremum crosses zero, the resulting pair of roots is refined too.
/// Roots that are tangential (no sign change) are not reported, and more than
/// two roots inside two adjacent cells may be missed.
pub fn find_roots<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, scan_step: f64) -> Vec<f64> {
    assert!(scan_step > 0.0, "scan step must be positive");
    if !(b > a) {
        return Vec::new();
    }
    let n = ((b - a) / scan_step).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    let grid: Vec<f64> = (0..=n)
        .map(|i| if i == n { b } else { a + i as f64 * h })
        .collect();
    let values: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
    let signs: Vec<i8> = values.iter().map(|&v| sign(v)).collect();

    let mut roots = Vec::new();
    for i in 0..n {
        let (s0, s1) = (signs[i], signs[i + 1]);
        if s0 * s1 < 0 {
            roots.push(bisect(&f, grid[i], grid[i + 1]));
        } else if s0 == 0 {
            let before = if i > 0 { signs[i - 1] } else { 0 };
            if before * s1 < 0 {
                roots.push(grid[i]);
            }
        }
    }

    for i in 1..n {
        let s = signs[i];
        if s == 0 || signs[i - 1] != s || signs[i + 1] != s {
            continue;
        }
        let (prev, here, next) = (values[i - 1].abs(), values[i].abs(), values[i + 1].abs());
        if here > prev || here > next {
            continue;
        }
        let oriented = |t: f64| f(t) * f64::from(s);
        let (t_min, v_min) = minimize_scalar(oriented, grid[i - 1], grid[i + 1], 1e-13);
        if v_min < 0.0 {
            roots.push(bisect(&f, grid[i - 1], t_min));
            roots.push(bisect(&f, t_min, grid[i + 1]));
        }
    }

    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|x, y| (*x - *y).abs() < 1e-9);
    roots
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a minimum of `f` on `[a, b]`.
///
/// Exact for unimodal `f`; otherwise returns some local minimum. The interior
/// result is compared against both endpoints, so monotone functions yield the
/// boundary.
pub fn minimize_scalar<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let tol = tol.max(f64::EPSILON * (lo.abs() + hi.abs()).max(1e-300));
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    let mut best = (mid, f(mid));
    for x in [a, b] {
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    best
}

const GRID_STEP: f64 = 0.05;
const REFINE_FACTOR: f64 = 5.0;
const REFINE_ROUNDS: usize = 4;

/// Maximizes `f` over the probability simplex of dimension `dim`.
///
/// For `dim == 2` a golden-section search on the first coordinate is used.
/// For `3 <= dim <= 6` the simplex is searched on a grid of spacing 0.05,
/// then refined four times by a factor of five around the incumbent. The
/// result is the best point found, not a certified global optimum.
pub fn maximize_over_simplex<F: Fn(&Pmf) -> f64>(
    f: F,
    dim: usize,
    tol: f64,
) -> Result<(Pmf, f64), NumericsError> {
    if dim < 2 {
        return Err(NumericsError::DimensionTooSmall(dim));
    }
    if dim > 6 {
        return Err(NumericsError::DimensionTooLarge(dim));
    }
    let point = |coords: &[f64]| -> Option<Pmf> {
        let mut w = coords.to_vec();
        let head: f64 = w.iter().sum();
        let last = 1.0 - head;
        if w.iter().any(|&x| x < -1e-12) || last < -1e-12 {
            return None;
        }
        w.push(last.max(0.0));
        w.iter_mut().for_each(|x| *x = x.max(0.0));
        Pmf::from_masses(&w).ok()
    };

    if dim == 2 {
        let (q, neg) = minimize_scalar(
            |q| point(&[q]).map_or(f64::INFINITY, |p| -f(&p)),
            0.0,
            1.0,
            tol,
        );
        let p = point(&[q]).expect("golden section stays inside [0, 1]");
        return Ok((p, -neg));
    }

    let free = dim - 1;
    let mut best: Option<(Vec<f64>, f64)> = None;
    let consider = |coords: &[f64], best: &mut Option<(Vec<f64>, f64)>| {
        if let Some(p) = point(coords) {
            let v = f(&p);
            if v.is_finite() && best.as_ref().is_none_or(|(_, b)| v > *b) {
                *best = Some((coords.to_vec(), v));
            }
        }
    };

    // Initial lattice: all compositions of 1/GRID_STEP units.
    let units = (1.0 / GRID_STEP).round() as usize;
    let mut counts = vec![0usize; free];
    loop {
        let used: usize = counts.iter().sum();
        if used <= units {
            let coords: Vec<f64> = counts.iter().map(|&c| c as f64 * GRID_STEP).collect();
            consider(&coords, &mut best);
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == free {
                break;
            }
            counts[k] += 1;
            if counts.iter().sum::<usize>() <= units {
                break;
            }
            counts[k] = 0;
            k += 1;
        }
        if k == free {
            break;
        }
    }

    let mut step = GRID_STEP;
    for _ in 0..REFINE_ROUNDS {
        let center = best.as_ref().expect("lattice contains a vertex").0.clone();
        let span = REFINE_FACTOR as i64;
        step /= REFINE_FACTOR;
        let mut offsets = vec![-span; free];
        loop {
            let coords: Vec<f64> = center
                .iter()
                .zip(&offsets)
                .map(|(c, &o)| c + o as f64 * step)
                .collect();
            consider(&coords, &mut best);
            let mut k = 0;
            while k < free {
                offsets[k] += 1;
                if offsets[k] <= span {
                    break;
                }
                offsets[k] = -span;
                k += 1;
            }
            if k == free {
                break;
            }
        }
    }

    let (coords, value) = best.expect("lattice contains a vertex");
    Ok((point(&coords).expect("incumbent is feasible"), value))
}

//! Data behind each figure, as tables ready for CSV/JSON emission.

use bayesrisk::bounds::{
    bd_bounds, harmonic_pair, hellman_raviv_bound, improved_equivocation_bound, quadratic_bounds,
    renyi_bound,
};
use bayesrisk::channels::{
    capacity_bec, capacity_biawgn, capacity_bsc, ebn0_to_sigma2, rho_bec, rho_biawgn, rho_bsc,
    ChannelError,
};
use bayesrisk::hypothesis::{
    appendix1_problem, decision_boundaries, gamma_sweep, log_spaced, BOUNDARY_WINDOW,
};
use bayesrisk::prob::{map_conditional_error, Posterior};
use rayon::prelude::*;

use crate::error::CliError;
use crate::output::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FigureName {
    Fig1,
    Fig2,
    Fig3,
    Fig4a,
    Fig4b,
    Fig4c,
}

impl FigureName {
    pub const ALL: [FigureName; 6] = [
        FigureName::Fig1,
        FigureName::Fig2,
        FigureName::Fig3,
        FigureName::Fig4a,
        FigureName::Fig4b,
        FigureName::Fig4c,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureName::Fig1 => "fig1",
            FigureName::Fig2 => "fig2",
            FigureName::Fig3 => "fig3",
            FigureName::Fig4a => "fig4a",
            FigureName::Fig4b => "fig4b",
            FigureName::Fig4c => "fig4c",
        }
    }
}

/// Tunable grid sizes. The defaults reproduce the published figures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureOptions {
    /// Number of `γ` values in the fig3 sweep.
    pub sweep_points: usize,
    /// `γ` used for fig2.
    pub fig2_gamma: f64,
}

impl Default for FigureOptions {
    fn default() -> Self {
        FigureOptions {
            sweep_points: 61,
            fig2_gamma: 0.125,
        }
    }
}

/// A figure's main table plus an optional sidecar (fig2's boundary list).
#[derive(Debug, Clone, PartialEq)]
pub struct FigureData {
    pub table: Table,
    pub sidecar: Option<Table>,
}

pub fn figure(name: FigureName, opts: &FigureOptions) -> Result<FigureData, CliError> {
    let (table, sidecar) = match name {
        FigureName::Fig1 => (fig1()?, None),
        FigureName::Fig2 => {
            let (t, b) = fig2(opts.fig2_gamma)?;
            (t, Some(b))
        }
        FigureName::Fig3 => (fig3(opts.sweep_points)?, None),
        FigureName::Fig4a => (fig4a()?, None),
        FigureName::Fig4b => (fig4b()?, None),
        FigureName::Fig4c => (fig4c()?, None),
    };
    Ok(FigureData { table, sidecar })
}

const FIG1_STEPS: usize = 200;
const ORDER_TOL: f64 = 1e-12;

pub const FIG1_COLUMNS: [&str; 11] = [
    "p",
    "exact",
    "harmonic_lo",
    "harmonic_hi",
    "bd_lo",
    "bd_hi",
    "quad_lo",
    "quad_hi",
    "renyi",
    "hr",
    "improved",
];

/// Every bound for the binary posterior `(p, 1 - p)`, `p` in steps of 0.005.
pub fn fig1() -> Result<Table, CliError> {
    let mut table = Table::new(&FIG1_COLUMNS);
    for i in 0..=FIG1_STEPS {
        let p = i as f64 / FIG1_STEPS as f64;
        let post = Posterior::new(vec![p, 1.0 - p])?;
        let exact = map_conditional_error(&post);
        let h = harmonic_pair(&post)?;
        let bd = bd_bounds(&post);
        let quad = quadratic_bounds(&post);
        let row = [
            p,
            exact,
            h.raw_lower,
            h.raw_upper,
            bd.raw_lower,
            bd.raw_upper,
            quad.raw_lower,
            quad.raw_upper,
            renyi_bound(&post),
            hellman_raviv_bound(&post),
            improved_equivocation_bound(&post),
        ];
        check_fig1_row(&row)?;
        table.push(row.iter().map(|&x| x.into()).collect());
    }
    Ok(table)
}

/// Sandwich orderings a fig1 row must satisfy; see [`FIG1_COLUMNS`].
pub fn fig1_row_violations(row: &[f64]) -> Vec<&'static str> {
    let [_, exact, h_lo, h_hi, bd_lo, bd_hi, q_lo, q_hi, renyi, hr, improved] = row else {
        return vec!["row width"];
    };
    let le = |a: f64, b: f64| a <= b + ORDER_TOL;
    let checks = [
        ("harmonic_lo <= exact", le(*h_lo, *exact)),
        ("exact <= harmonic_hi", le(*exact, *h_hi)),
        ("harmonic_hi = 2 harmonic_lo", *h_hi == 2.0 * h_lo),
        ("bd_lo <= exact", le(*bd_lo, *exact)),
        ("exact <= bd_hi", le(*exact, *bd_hi)),
        ("quad_lo <= exact", le(*q_lo, *exact)),
        ("exact <= quad_hi", le(*exact, *q_hi)),
        ("quad_lo <= bd_lo", le(*q_lo, *bd_lo)),
        ("quad_hi <= improved", le(*q_hi, *improved)),
        ("exact <= hr", le(*exact, *hr)),
        ("improved <= renyi", le(*improved, *renyi)),
        ("improved <= ln4 hr", le(*improved, 4f64.ln() * hr)),
    ];
    checks
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(n, _)| *n)
        .collect()
}

fn check_fig1_row(row: &[f64]) -> Result<(), CliError> {
    let bad = fig1_row_violations(row);
    if bad.is_empty() {
        Ok(())
    } else {
        Err(CliError::Internal(format!(
            "fig1 at p = {}: {}",
            row[0],
            bad.join(", ")
        )))
    }
}

const FIG2_STEPS_PER_UNIT: i64 = 100;

/// Posteriors of the two-density problem on `[-20, 20]`, plus its decision boundaries.
pub fn fig2(gamma: f64) -> Result<(Table, Table), CliError> {
    let prob = appendix1_problem(gamma)?;
    let (a, b) = BOUNDARY_WINDOW;
    let (lo, hi) = (
        (a * FIG2_STEPS_PER_UNIT as f64).round() as i64,
        (b * FIG2_STEPS_PER_UNIT as f64).round() as i64,
    );
    let mut table = Table::new(&["y", "posterior1", "posterior2"]);
    for k in lo..=hi {
        let y = k as f64 / FIG2_STEPS_PER_UNIT as f64;
        let (p1, p2) = prob.posterior(y);
        table.push(vec![y.into(), p1.into(), p2.into()]);
    }
    let mut boundaries = Table::new(&["boundary"]);
    for y in decision_boundaries(&prob, BOUNDARY_WINDOW) {
        boundaries.push(vec![y.into()]);
    }
    Ok((table, boundaries))
}

/// Risk bounds across `γ`, log-spaced over `[1e-3, 1e3]`.
pub fn fig3(points: usize) -> Result<Table, CliError> {
    if points == 0 {
        return Err(CliError::Usage(
            "fig3 needs at least one sweep point".into(),
        ));
    }
    let rows = gamma_sweep(&log_spaced(1e-3, 1e3, points))?;
    let mut table = Table::new(&[
        "gamma",
        "harmonic_lo",
        "harmonic_hi",
        "chernoff",
        "chernoff_alpha",
        "bhattacharyya",
        "exact",
    ]);
    for r in rows {
        table.push(
            [
                r.gamma,
                r.harmonic_lower,
                r.harmonic_upper,
                r.chernoff,
                r.chernoff_alpha,
                r.bhattacharyya,
                r.exact,
            ]
            .iter()
            .map(|&x| x.into())
            .collect(),
        );
    }
    Ok(table)
}

const FIG4_POINTS: usize = 101;

fn unit_grid() -> impl Iterator<Item = f64> {
    (0..FIG4_POINTS).map(|i| i as f64 / (FIG4_POINTS - 1) as f64)
}

type ClosedForm = fn(f64) -> Result<f64, ChannelError>;

fn closed_form_table(
    param: &str,
    capacity: ClosedForm,
    rho: ClosedForm,
) -> Result<Table, CliError> {
    let mut table = Table::new(&[param, "capacity", "rho"]);
    for x in unit_grid() {
        table.push(vec![x.into(), capacity(x)?.into(), rho(x)?.into()]);
    }
    Ok(table)
}

/// BSC capacity and `ρ` against the crossover probability.
pub fn fig4a() -> Result<Table, CliError> {
    closed_form_table("p", capacity_bsc, rho_bsc)
}

/// BEC capacity and `ρ` against the erasure probability.
pub fn fig4b() -> Result<Table, CliError> {
    closed_form_table("eps", capacity_bec, rho_bec)
}

pub const FIG4C_DB_RANGE: (f64, f64) = (-10.0, 10.0);
const FIG4C_STEPS_PER_DB: i64 = 4;

/// Marker written in the capacity column when the entropy integral cannot
/// be trusted to the required accuracy.
pub const UNSTABLE: &str = "unstable";

/// BiAWGN capacity and `ρ` against `Eb/N0` in dB.
pub fn fig4c() -> Result<Table, CliError> {
    let (a, b) = FIG4C_DB_RANGE;
    let steps: Vec<i64> =
        ((a as i64 * FIG4C_STEPS_PER_DB)..=(b as i64 * FIG4C_STEPS_PER_DB)).collect();
    let rows = steps
        .par_iter()
        .map(|&k| -> Result<Vec<Cell>, CliError> {
            let db = k as f64 / FIG4C_STEPS_PER_DB as f64;
            let sigma2 = ebn0_to_sigma2(db);
            let capacity = match capacity_biawgn(sigma2) {
                Ok(c) => c.into(),
                Err(ChannelError::NumericallyUnstable { .. }) => UNSTABLE.into(),
                Err(e) => return Err(e.into()),
            };
            Ok(vec![
                db.into(),
                sigma2.into(),
                capacity,
                rho_biawgn(sigma2)?.into(),
            ])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["ebn0_db", "sigma2", "capacity", "rho"]);
    for r in rows {
        table.push(r);
    }
    Ok(table)
}

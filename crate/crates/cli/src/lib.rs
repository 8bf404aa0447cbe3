//! Library side of the `bbounds` command: argument parsing, subcommand
//! dispatch, figure data and output handling.

pub mod commands;
pub mod error;
pub mod figures;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use error::{exit, CliError};
use figures::{FigureName, FigureOptions};
use output::{emit, render_json_value, Format};

#[derive(Debug, Parser)]
#[command(
    name = "bbounds",
    version,
    about = "Bounds on Bayes risk, channel rates and random-coding error"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output file; stdout when omitted. For `figure all`, a directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format. Defaults to csv for figures and json otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Every bound on the MAP error of one posterior.
    Report {
        /// Comma-separated posterior probabilities.
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_hyphen_values = true
        )]
        posterior: Vec<f64>,
        /// Comma-separated negative power-mean exponents.
        #[arg(long = "beta", value_delimiter = ',', allow_hyphen_values = true)]
        betas: Vec<f64>,
    },
    /// Data for one figure (fig1, fig2, fig3, fig4a, fig4b, fig4c) or `all`.
    Figure {
        name: String,
        /// Number of γ values in the fig3 sweep.
        #[arg(long, default_value_t = 61)]
        sweep_points: usize,
    },
    /// Mutual information, ρ and capacity figures of a channel.
    Channel {
        #[command(flatten)]
        source: SpecSource,
        /// Comma-separated input distribution; uniform by default.
        #[arg(long, value_delimiter = ',')]
        px: Option<Vec<f64>>,
    },
    /// Random-coding simulation against the analytic lower bounds.
    Ensemble {
        #[command(flatten)]
        source: SpecSource,
        /// Block length N.
        #[arg(short = 'n', long)]
        block_length: usize,
        /// Number of codewords M.
        #[arg(short = 'm', long)]
        codebook_size: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, value_delimiter = ',')]
        px: Option<Vec<f64>>,
        /// Also evaluate the ensemble bound by full enumeration.
        #[arg(long)]
        enumerate: bool,
    },
    /// The raised-cosine versus Gaussian detection problem.
    Appendix1 {
        #[arg(long, default_value_t = 0.125)]
        gamma: f64,
        /// Monte Carlo samples of the MAP rule; 0 skips the simulation.
        #[arg(long, default_value_t = 0)]
        mc_samples: u64,
    },
}

#[derive(Debug, Args)]
pub struct SpecSource {
    /// Channel spec file (`-` reads stdin).
    pub spec: Option<PathBuf>,
    /// Inline channel spec, e.g. '{"type":"bsc","p":0.1}'.
    #[arg(long)]
    pub json: Option<String>,
}

impl SpecSource {
    fn load(&self) -> Result<bayesrisk::ChannelSpec, CliError> {
        commands::load_channel_spec(self.spec.as_deref(), self.json.as_deref())
    }
}

fn emit_json<T: Serialize>(value: &T, common: &Common) -> Result<(), CliError> {
    let v = serde_json::to_value(value)?;
    emit(
        common.out.as_deref(),
        &render_json_value(&v, common.format.unwrap_or(Format::Json)),
    )
}

/// Where fig2's boundary list goes, next to the main file.
pub fn sidecar_path(main: &Path) -> PathBuf {
    let stem = main
        .file_stem()
        .map_or_else(|| "fig2".into(), |s| s.to_string_lossy().into_owned());
    let ext = main
        .extension()
        .map_or_else(|| "csv".into(), |s| s.to_string_lossy().into_owned());
    main.with_file_name(format!("{stem}_boundaries.{ext}"))
}

fn parse_figure_name(name: &str) -> Result<Option<FigureName>, CliError> {
    if name.eq_ignore_ascii_case("all") {
        return Ok(None);
    }
    FigureName::from_str(name, true).map(Some).map_err(|_| {
        CliError::Usage(format!(
            "unknown figure {name:?}; expected one of fig1, fig2, fig3, fig4a, fig4b, fig4c, all"
        ))
    })
}

/// Writes one figure (and its sidecar) to `out`, or to stdout when `out` is `None`.
pub fn write_figure(
    name: FigureName,
    opts: &FigureOptions,
    format: Format,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let data = figures::figure(name, opts)?;
    emit(out, &data.table.render(format))?;
    if let Some(side) = data.sidecar {
        match out {
            Some(path) => emit(Some(&sidecar_path(path)), &side.render(format))?,
            None => emit(None, &format!("\n{}", side.render(format)))?,
        }
    }
    Ok(())
}

/// Writes every figure into `dir` as `<name>.<ext>`.
pub fn write_all_figures(dir: &Path, opts: &FigureOptions, format: Format) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    for name in FigureName::ALL {
        write_figure(
            name,
            opts,
            format,
            Some(&dir.join(format!("{}.{ext}", name.as_str()))),
        )?;
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let common = &cli.common;
    match &cli.command {
        Command::Report { posterior, betas } => {
            emit_json(&commands::posterior_report(posterior, betas)?, common)
        }
        Command::Figure { name, sweep_points } => {
            let opts = FigureOptions {
                sweep_points: *sweep_points,
                ..FigureOptions::default()
            };
            let format = common.format.unwrap_or(Format::Csv);
            match parse_figure_name(name)? {
                Some(fig) => write_figure(fig, &opts, format, common.out.as_deref()),
                None => {
                    let dir = common.out.as_deref().ok_or_else(|| {
                        CliError::Usage("`figure all` needs --out <directory>".into())
                    })?;
                    write_all_figures(dir, &opts, format)
                }
            }
        }
        Command::Channel { source, px } => {
            let spec = source.load()?;
            emit_json(&commands::channel_summary(&spec, px.as_deref())?, common)
        }
        Command::Ensemble {
            source,
            block_length,
            codebook_size,
            trials,
            px,
            enumerate,
        } => {
            let spec = source.load()?;
            let args = commands::EnsembleArgs {
                block_length: *block_length,
                codebook_size: *codebook_size,
                trials: *trials,
                seed: common.seed,
                px: px.as_deref(),
                budget: commands::budget_from_env()?,
                enumerate: *enumerate,
            };
            emit_json(&commands::ensemble(&spec, &args)?, common)
        }
        Command::Appendix1 { gamma, mc_samples } => emit_json(
            &commands::appendix1(*gamma, *mc_samples, common.seed)?,
            common,
        ),
    }
}

/// Parses `args`, runs the command and returns the process exit code,
/// reporting failures on stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                exit::USAGE
            } else {
                exit::SUCCESS
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => exit::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn sidecar_sits_next_to_main_file() {
        assert_eq!(
            sidecar_path(Path::new("out/fig2.csv")),
            PathBuf::from("out/fig2_boundaries.csv")
        );
        assert_eq!(
            sidecar_path(Path::new("f.json")),
            PathBuf::from("f_boundaries.json")
        );
    }

    #[test]
    fn figure_names() {
        assert_eq!(parse_figure_name("fig4c").unwrap(), Some(FigureName::Fig4c));
        assert_eq!(parse_figure_name("ALL").unwrap(), None);
        assert!(matches!(parse_figure_name("fig5"), Err(CliError::Usage(_))));
    }
}

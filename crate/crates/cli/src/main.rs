//! `geowave`: multiscale decomposition of manifold-valued sequences from the
//! command line.
//!
//! Failures print one JSON record `{stage, level, index, message}` to stderr
//! and exit with status 1 (2 for command-line usage errors).

mod commands;
mod config;
mod error;
mod format;
mod synth;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use geowave::Manifold;

use commands::{Analysis, Context, Format, Source};
use config::RunConfig;
use error::{CliError, CliResult};
use synth::{CurveKind, SynthKind};

#[derive(Debug, Parser)]
#[command(name = "geowave", version, about = "Multiscale pyramids for manifold-valued sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

/// Overrides for the run configuration.
#[derive(Debug, Args)]
struct Options {
    /// JSON run configuration; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// `euclidean:N`, `sphere2` or `so3`. Checked against input data.
    #[arg(long, global = true)]
    manifold: Option<String>,
    /// `haar`, `four-point`, `interpolating` or `midpoint`.
    #[arg(long, global = true)]
    scheme: Option<String>,
    /// Upscaling mask, JSON `{"offset": i, "coeffs": [...]}`.
    #[arg(long, global = true, value_name = "FILE")]
    mask: Option<PathBuf>,
    #[arg(long, global = true, value_name = "J")]
    levels: Option<usize>,
    #[arg(long, global = true)]
    eps: Option<f64>,
    #[arg(long, global = true)]
    mu: Option<f64>,
    /// Smoothing radius; a comma-separated list for `analyze smoothing`.
    #[arg(long, global = true, value_delimiter = ',')]
    rho: Vec<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Report format; defaults to JSON for `.json` outputs, else CSV.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write synthetic data.
    Synth {
        #[arg(value_enum)]
        kind: SynthKind,
        #[arg(long)]
        count: usize,
        /// Parameter spacing; `2π/count` by default.
        #[arg(long)]
        step: Option<f64>,
        /// Noise radius of the noisy kinds (default 0.01).
        #[arg(long)]
        noise: Option<f64>,
    },
    /// Data file to pyramid file.
    Decompose { input: PathBuf },
    /// Pyramid file to data file.
    Reconstruct { input: PathBuf },
    /// Decompose, threshold (and optionally quantize), reconstruct.
    Compress {
        input: PathBuf,
        /// Quantization step for the kept details.
        #[arg(long)]
        quantize: Option<f64>,
        /// Where to write the JSON error report; standard output when absent.
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
    /// Kernel-smooth the closed curve through the data.
    Smooth { input: PathBuf },
    /// Numerical experiments.
    Analyze {
        #[arg(value_enum)]
        what: Analysis,
        /// Data file (a closed geodesic polygon for curve-based analyses).
        #[arg(long = "in", value_name = "FILE")]
        input: Option<PathBuf>,
        /// Built-in closed curve used when no data file is given.
        #[arg(long, value_enum)]
        curve: Option<CurveKind>,
        /// Samples of the built-in curve (64), base length for proximity (8),
        /// evaluation points for smoothing (8).
        #[arg(long)]
        count: Option<usize>,
        /// Rank of the generic averaging pair instead of the scheme.
        #[arg(long)]
        generic: bool,
        /// Chain length for rank.
        #[arg(long)]
        n: Option<usize>,
    },
}

fn context(cli: &Cli) -> CliResult<Context> {
    let o = &cli.opts;
    let mut cfg = match &o.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(s) = &o.scheme {
        cfg.scheme = s.clone();
    }
    if let Some(m) = &o.mask {
        cfg.mask = Some(m.clone());
    }
    if let Some(j) = o.levels {
        cfg.levels = j;
    }
    if let Some(eps) = o.eps {
        cfg.eps = eps;
    }
    if let Some(mu) = o.mu {
        cfg.mu = Some(mu);
    }
    if let Some(seed) = o.seed {
        cfg.seed = seed;
    }
    match (&cli.command, o.rho.as_slice()) {
        (_, []) => {}
        (Command::Analyze { what: Analysis::Smoothing, .. }, rhos) => cfg.rhos = rhos.to_vec(),
        (_, [rho]) => cfg.rho = *rho,
        _ => return Err(CliError::new("config", "--rho takes a single value here")),
    }
    match &cli.command {
        Command::Compress { quantize: Some(q), .. } => cfg.quantize = Some(*q),
        Command::Analyze { n: Some(n), .. } => cfg.n = *n,
        _ => {}
    }
    cfg.validate()?;
    let manifold =
        o.manifold.as_deref().map(str::parse::<Manifold>).transpose().map_err(|e| CliError::core("config", e))?;
    Ok(Context { cfg, manifold, out: o.out.clone(), format: o.format })
}

fn run(cli: &Cli) -> CliResult<()> {
    let ctx = context(cli)?;
    match &cli.command {
        Command::Synth { kind, count, step, noise } => commands::run_synth(&ctx, *kind, *count, *step, *noise),
        Command::Decompose { input } => commands::run_decompose(&ctx, input),
        Command::Reconstruct { input } => commands::run_reconstruct(&ctx, input),
        Command::Compress { input, report, .. } => commands::run_compress(&ctx, input, report.as_deref()),
        Command::Smooth { input } => commands::run_smooth(&ctx, input),
        Command::Analyze { what, input, curve, count, generic, .. } => {
            let source = Source { input: input.clone(), curve: *curve, count: *count };
            commands::run_analyze(&ctx, *what, &source, *generic)
        }
    }
}

fn report(e: &CliError) {
    eprintln!("{}", serde_json::to_string(e).expect("error record serializes"));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report(&CliError::new("usage", e.to_string().trim_end()));
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(&e);
            ExitCode::FAILURE
        }
    }
}

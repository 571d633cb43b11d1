//! Command-line front end: argument and config handling, subcommand
//! dispatch and report emission.

pub mod commands;
pub mod compare;
pub mod config;
pub mod emit;
pub mod error;

use clap::{Parser, Subcommand};
use config::*;
use emit::Report;
use error::CliResult;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "semiquant", version, about = "Second-order Bohr-Sommerfeld spectra and checks")]
pub struct Cli {
    /// TOML config file with one table per subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Bohr-Sommerfeld and Gram roots in an energy interval.
    Spectrum {
        #[command(flatten)]
        symbol: SymbolArgs,
        #[command(flatten)]
        args: SpectrumSection,
    },
    /// Action terms S0, S1, S2 at one energy.
    Actions {
        #[command(flatten)]
        symbol: SymbolArgs,
        #[command(flatten)]
        args: ActionsSection,
    },
    /// Samples of the closed orbit at one energy.
    Orbit {
        #[command(flatten)]
        symbol: SymbolArgs,
        #[command(flatten)]
        args: OrbitSection,
    },
    /// Second-order WKB solution between the focal points.
    Wkb {
        #[command(flatten)]
        symbol: SymbolArgs,
        #[command(flatten)]
        args: WkbSection,
    },
    /// Gram determinant scan and its zeros.
    Gram {
        #[command(flatten)]
        symbol: SymbolArgs,
        #[command(flatten)]
        args: GramSection,
    },
    /// Eigenvalues of the grid operator.
    Reference {
        #[command(flatten)]
        symbol: SymbolArgs,
        #[command(flatten)]
        args: ReferenceSection,
    },
    /// Bohr-Sommerfeld error against the grid operator over several h.
    Convergence {
        #[command(flatten)]
        symbol: SymbolArgs,
        #[command(flatten)]
        args: ConvergenceSection,
    },
    /// Airy normal-form checks at a simple turning point.
    #[command(name = "airy-check")]
    AiryCheck {
        #[command(flatten)]
        args: AirySection,
    },
}

/// Settings resolved from the command line and the config file.
pub struct Resolved {
    pub format: Format,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

pub fn resolve(cli: &Cli) -> CliResult<(RunConfig, Resolved)> {
    let file = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let resolved = Resolved {
        format: cli.format.or(file.output.format).unwrap_or_default(),
        out: cli.out.clone().or(file.output.out.clone()),
        threads: cli.threads.or(file.output.threads),
    };
    Ok((file, resolved))
}

/// Runs the subcommand with config-file values filling unset flags.
pub fn execute(command: &Command, file: &RunConfig) -> CliResult<Report> {
    let sym = |s: &SymbolArgs| {
        let mut s = s.clone();
        s.merge(&file.symbol);
        s
    };
    macro_rules! merged {
        ($args:expr, $section:expr) => {{
            let mut a = $args.clone();
            a.merge(&$section);
            a
        }};
    }
    match command {
        Command::Spectrum { symbol, args } => commands::spectrum(&sym(symbol), &merged!(args, file.spectrum)),
        Command::Actions { symbol, args } => commands::actions(&sym(symbol), &merged!(args, file.actions)),
        Command::Orbit { symbol, args } => commands::orbit(&sym(symbol), &merged!(args, file.orbit)),
        Command::Wkb { symbol, args } => commands::wkb(&sym(symbol), &merged!(args, file.wkb)),
        Command::Gram { symbol, args } => commands::gram(&sym(symbol), &merged!(args, file.gram)),
        Command::Reference { symbol, args } => commands::reference(&sym(symbol), &merged!(args, file.reference)),
        Command::Convergence { symbol, args } => {
            commands::convergence(&sym(symbol), &merged!(args, file.convergence))
        }
        Command::AiryCheck { args } => commands::airy(&merged!(args, file.airy)),
    }
}

/// Full run: resolve settings, execute, write the report. Warnings go to
/// standard error.
pub fn run(cli: &Cli) -> CliResult<()> {
    let (file, settings) = resolve(cli)?;
    if let Some(n) = settings.threads {
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let report = execute(&cli.command, &file)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    emit::emit(&report, settings.format, settings.out.as_deref())
}

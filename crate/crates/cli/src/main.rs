use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gqsd_cli::commands::{self, Outcome};
use gqsd_cli::config::RunConfig;
use gqsd_cli::output::{emit, Format};

/// Simulate and design generalized eight-port quantum scissors.
#[derive(Parser, Debug)]
#[command(name = "gqsd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (`key = value` lines).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Write structured output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Structured output format; plain text tables when omitted.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    /// Overrides the search seed.
    #[arg(long, global = true, value_name = "INT")]
    seed: Option<u64>,

    /// Compare amplitudes modulo a global phase.
    #[arg(long, global = true, value_name = "BOOL")]
    quotient_phase: Option<bool>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Print the 4x4 scattering matrix and its unitarity residual.
    Matrix,
    /// Conditional amplitudes, defects, output qudit and success probability.
    Truncate,
    /// Check every catalog solution (and the configured one, if any).
    Verify,
    /// Multi-start search for truncating settings.
    Optimize,
    /// Fidelity and probability with imperfect detectors of each kind.
    Fidelity,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum FormatArg {
    Csv,
    Json,
}

fn load(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            RunConfig::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = Some(seed);
    }
    if let Some(q) = cli.quotient_phase {
        cfg.quotient_phase = Some(q);
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<Outcome, String> {
    let cfg = load(cli)?;
    let result = match cli.command {
        Command::Matrix => commands::matrix(&cfg),
        Command::Truncate => commands::truncate_cmd(&cfg),
        Command::Verify => commands::verify(&cfg),
        Command::Optimize => commands::optimize_cmd(&cfg),
        Command::Fidelity => commands::fidelity_cmd(&cfg),
    };
    result.map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    // A path without a format picks one from its extension.
    let format = cli.format.map(|f| match f {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    });
    let format = format.or_else(|| {
        cli.out.as_ref().map(|p| match p.extension().and_then(|e| e.to_str()) {
            Some("csv") => Format::Csv,
            _ => Format::Json,
        })
    });
    let written = match format {
        Some(f) => {
            if cli.out.is_some() {
                print!("{}", outcome.report.human());
            }
            emit(&outcome.report.structured(f), cli.out.as_deref())
        }
        None => emit(&outcome.report.human(), None),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

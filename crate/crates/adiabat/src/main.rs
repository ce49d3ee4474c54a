//! `adiabat`: multi-monopole counts on genus-1 mapping tori and their numerical realization.

mod commands;
mod config;
mod error;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Common, Format, Output};
use config::ScenarioConfig;
use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "adiabat", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Spin^c classes of one degree.
    Spinc,
    /// Fixed points of the Jacobian monodromy with their classes.
    Fix,
    /// Large-degree count table.
    Count,
    /// Permutation and fixed-strand classes of a braid file.
    BraidCensus,
    /// Braid realizing the fixed-strand targets of the config.
    BraidMake,
    /// One framed vortex solve.
    Vortex,
    /// Parallel transport traces and numeric monodromy.
    Transport,
    /// Adiabatic assembly and Newton refinement over the ε list.
    Newton,
    /// Operator identity residuals at the adiabatic solution.
    CheckIdentities,
}

fn threads() -> Result<()> {
    let Ok(v) = std::env::var("ADIABAT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("ADIABAT_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn dispatch(cmd: Command, c: &Common) -> Result<Output> {
    let cfg = ScenarioConfig::load(c.config.as_deref())?;
    match cmd {
        Command::Spinc => commands::spinc(c),
        Command::Fix => commands::fix(c),
        Command::Count => commands::count(c),
        Command::BraidCensus => commands::braid_census_cmd(c),
        Command::BraidMake => commands::braid_make(c, &cfg),
        Command::Vortex => commands::vortex(c, &cfg),
        Command::Transport => commands::transport_cmd(c, &cfg),
        Command::Newton => commands::newton(c, &cfg),
        Command::CheckIdentities => commands::check_identities(c, &cfg),
    }
}

fn emit(out: &Output, c: &Common) -> Result<()> {
    let text = match c.format {
        Format::Json => serde_json::to_string_pretty(&out.json).expect("output serializes") + "\n",
        Format::Csv => out.csv.clone(),
    };
    match &c.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Usage(e.to_string().trim_end().to_string())),
    };
    if let Err(e) = threads() {
        return fail(&e);
    }
    let out = match dispatch(cli.command, &cli.common) {
        Ok(out) => out,
        Err(e) => return fail(&e),
    };
    if let Err(e) = emit(&out, &cli.common) {
        return fail(&e);
    }
    match &out.deferred {
        Some(e) => fail(e),
        None => ExitCode::SUCCESS,
    }
}

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use vortex_core::Error;

mod args;
mod commands;

use args::{Cli, Format};
use commands::CliError;

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERIC: u8 = 2;
const EXIT_VERIFY: u8 = 3;

fn exit_code(e: &CliError) -> u8 {
    match e {
        CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
        CliError::Numeric(_) => EXIT_NUMERIC,
        CliError::Core(e) => match e {
            Error::Parse(_)
            | Error::UnknownField(_)
            | Error::ParameterCount { .. }
            | Error::NoPressure
            | Error::InvalidArgument(_) => EXIT_USAGE,
            Error::Domain { .. } | Error::StagnationPoint { .. } | Error::StepUnderflow { .. } | Error::Internal(_) => {
                EXIT_NUMERIC
            }
        },
    }
}

fn describe(e: &CliError, cli: &Cli) -> String {
    match e {
        CliError::Core(Error::Parse(p)) => {
            // point at the offending character when the source is inline
            let src = match &cli.command {
                args::Command::Eval { field, .. }
                | args::Command::Streamline { field, .. }
                | args::Command::Classify { field, .. }
                | args::Command::Compare { field, .. }
                | args::Command::Probe { probe: args::Probe::Disk { field, .. } }
                | args::Command::Probe { probe: args::Probe::Cauchy { field, .. } }
                | args::Command::Field { action: args::FieldAction::Check { field, .. } } => field.expr.clone(),
                args::Command::Verify { .. } => None,
            };
            match src {
                Some(s) if p.pos() <= s.len() => format!("{p}\n  {s}\n  {}^", " ".repeat(p.pos())),
                _ => p.to_string(),
            }
        }
        CliError::Core(e) => e.to_string(),
        CliError::Usage(m) | CliError::Io(m) | CliError::Numeric(m) => m.clone(),
    }
}

fn emit(cli: &Cli, out: &commands::Output) -> std::io::Result<()> {
    let mut text = String::new();
    if cli.format == Format::Csv && !cli.no_header {
        text.push_str(&format!("# vortex-criterion {} {}\n", env!("CARGO_PKG_VERSION"), out.context));
    }
    text.push_str(&out.body);
    match &cli.out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse_from(std::env::args_os()) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(&cli.command, cli.format) {
        Ok(out) => {
            if let Err(e) = emit(&cli, &out) {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
            for n in &out.notes {
                eprintln!("{n}");
            }
            if out.failed {
                ExitCode::from(EXIT_VERIFY)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {}", describe(&e, &cli));
            ExitCode::from(exit_code(&e))
        }
    }
}

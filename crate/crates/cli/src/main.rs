mod commands;
mod config;
mod format;

use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use commands::{Failure, Outcome, EXIT_CONFIG, EXIT_VERIFY};
use config::{Cli, Command};

fn emit(out: Option<&Path>, o: &Outcome) -> std::io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, &o.body),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(o.body.as_bytes())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let (result, out) = match &cli.command {
        Command::Spectrum(c) => (commands::spectrum(c), c.out.as_deref()),
        Command::Crossings(c) => (commands::crossings(c), c.out.as_deref()),
        Command::ExactState(c) => (commands::exact_state(c), c.out.as_deref()),
        Command::Verify(c) => (commands::verify(c), c.out.as_deref()),
    };
    match result {
        Ok(o) => {
            for m in &o.messages {
                eprintln!("twophoton: {m}");
            }
            if let Err(e) = emit(out, &o) {
                eprintln!("twophoton: cannot write output: {e}");
                return ExitCode::from(EXIT_CONFIG as u8);
            }
            ExitCode::from(o.code as u8)
        }
        Err(Failure::Config(m)) => {
            eprintln!("twophoton: configuration error: {m}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("twophoton: {m}");
            ExitCode::from(EXIT_VERIFY as u8)
        }
    }
}

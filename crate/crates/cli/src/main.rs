use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use optomech_cli::{run, Cli, CliError};

fn write_out(cli: &Cli, body: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(p) => std::fs::write(p, body)?,
        None => std::io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(emitted) => {
            for line in &emitted.log {
                eprintln!("{line}");
            }
            match write_out(&cli, &emitted.body) {
                Ok(()) => {
                    if let Some(f) = &emitted.failure {
                        eprintln!("error: {f}");
                    }
                    emitted.exit_code()
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

use std::io::Write;
use std::process::ExitCode;

use anyhow::Context;
use cantor_convergents::cli::{execute, Cli, CliError};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<CliError>().map_or(1, CliError::exit_code);
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<u8> {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let code = execute(&cli.command, &mut out, &mut stderr.lock())?;
    out.flush().context("flushing stdout")?;
    Ok(code)
}

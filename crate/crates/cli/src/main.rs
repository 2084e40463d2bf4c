mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Common};
use commands::CliError;

fn emit(panels: &[output::Panel], common: &Common) -> Result<(), CliError> {
    for path in output::write_panels(panels, common.out.as_deref(), common.format)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Interface(a) => emit(&commands::interface(a)?, &a.common),
        Command::OrderParam(a) => emit(&commands::order_param(a)?, &a.common),
        Command::Renyi(a) => emit(&commands::renyi(a)?, &a.common),
        Command::Otoc(a) => emit(&commands::otoc(a)?, &a.common),
        Command::OracleCheck(a) => {
            let (panels, passed) = commands::oracle_check(a)?;
            emit(&panels, &a.common)?;
            if passed {
                Ok(())
            } else {
                Err(CliError::OracleFailure("oracle check failed: some |z| exceeds the threshold".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::process::ExitCode;

use clap::Parser;

use kstar_cli::{run, Cli, CliError, EXIT_INPUT, EXIT_OK};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_OK as u8);
        }
        Err(e) => {
            let err = CliError::Input(e.to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    let mut stdout = std::io::stdout().lock();
    match run(&cli, &mut stdout) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}

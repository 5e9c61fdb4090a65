use std::process::ExitCode;

use clap::Parser;
use graphnorm_cli::{run, Cli, INPUT_ERROR_CODE};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match run(cli, &mut stdout) {
        Ok(status) => status.into(),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(INPUT_ERROR_CODE)
        }
    }
}

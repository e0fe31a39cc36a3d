use std::process::ExitCode;

use clap::Parser;
use linkequiv::cli::{run, Cli, Status};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(&cli, &mut out) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::TooManyInvalid) => {
            eprintln!("error: too many invalid replicates (see --max-invalid-frac)");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

use std::process::ExitCode;

use clap::Parser;
use mtcherry_cli::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match mtcherry_cli::init_threads().and_then(|()| mtcherry_cli::run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}

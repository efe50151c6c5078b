use std::process::ExitCode;

use bdqw_cli::{run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bdqw: {e}");
            e.exit_code()
        }
    }
}

use std::process::ExitCode;

use clap::Parser;
use toda_cli::app::{execute, Cli};

fn main() -> ExitCode {
    let code = execute(Cli::parse());
    ExitCode::from(u8::try_from(code).unwrap_or(1))
}

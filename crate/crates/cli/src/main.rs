use std::io;
use std::process::ExitCode;

use clap::Parser;
use contribkit_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(run(cli, &mut io::stdout().lock(), &mut io::stderr().lock()))
}

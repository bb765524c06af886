mod args;
mod commands;
mod error;
mod output;
mod perm_spec;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use error::CliError;
use output::Sink;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return CliError::Input(e.to_string()).exit_code();
        }
    }
    let sink = Sink::new(cli.out, cli.format);
    match commands::run(cli.command, &sink) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{expand_config, Cli, Command};
use commands::Failure;

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.command.common().threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    match &cli.command {
        Command::Extend(a) => commands::extend(a),
        Command::Converge(a) => commands::converge(a),
        Command::Evolve(a) => commands::evolve(a),
        Command::Project(a) => commands::project(a),
        Command::Mc(a) => commands::mc(a),
        Command::Means(a) => commands::means(a),
        Command::Mirror(a) => commands::mirror(a),
    }
}

fn main() -> ExitCode {
    let argv = match expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Assert(msg)) => {
            eprintln!("assertion failed: {msg}");
            ExitCode::from(2)
        }
    }
}

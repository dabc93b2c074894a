mod args;
mod commands;
mod error;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use commands::Context;
use error::CliError;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("NCVEM_LOG", "error"))
        .format_timestamp(None)
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };

    if let Some(n) = cli.threads {
        let pool = match n {
            0 => Err(CliError::Usage("--threads must be positive".into())),
            n => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}"))),
        };
        if let Err(e) = pool {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }

    let ctx = Context {
        json: cli.json,
        seed: cli.seed,
        timing: !cli.no_timing,
        allow_high_order: cli.allow_high_order,
    };
    match commands::run(&ctx, cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

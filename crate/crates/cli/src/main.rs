use std::io;
use std::process::ExitCode;

use bucketwheel_cli::commands::{execute, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors count as invalid input
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli, &mut io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bucketwheel: {e}");
            if let bucketwheel_cli::CliError::Model(bucketwheel::Error::AllRolloutsFailed { log }) =
                &e
            {
                for line in log {
                    eprintln!("  {line}");
                }
            }
            ExitCode::from(e.exit_code())
        }
    }
}

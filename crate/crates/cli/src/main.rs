use std::process::ExitCode;

use clap::Parser;
use entroprod_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            eprintln!(
                "entroprod: {}",
                msg.lines().next().unwrap_or("invalid arguments")
            );
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("entroprod: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

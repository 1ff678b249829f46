use std::process::ExitCode;

use clap::Parser;
use monopole::config::{Cli, RunConfig};
use monopole::{error_record, exit, run};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::CONFIG } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let cfg = match RunConfig::from_cli(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}", error_record("config", &e.0, None));
            return ExitCode::from(exit::CONFIG as u8);
        }
    };
    ExitCode::from(run(&cfg) as u8)
}

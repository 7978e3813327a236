use std::process::ExitCode;

use clap::Parser;
use treeemb_cli::{emit, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|report| emit(&cli, &report)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("treeemb: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::io::Write;

use clap::Parser;
use rlcm_cli::{render, run, Cli, Outcome};

fn main() {
    let cli = Cli::parse();
    let outcome = run(&cli).unwrap_or_else(|e| {
        eprintln!("rlcm: {e}");
        Outcome::error(&e)
    });
    let _ = writeln!(std::io::stdout().lock(), "{}", render(&outcome));
    std::process::exit(outcome.exit_code);
}

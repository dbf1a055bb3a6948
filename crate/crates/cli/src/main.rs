use std::process::ExitCode;

use catfrac_cli::commands::{run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = run(&cli);
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &out.text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{}", out.text),
    }
    ExitCode::from(out.exit as u8)
}

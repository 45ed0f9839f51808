use clap::Parser;

use decoherence_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(diagnostics) => {
            if !cli.quiet {
                diagnostics.iter().for_each(|d| eprintln!("{d}"));
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

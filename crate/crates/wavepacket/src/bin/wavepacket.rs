use clap::Parser;

use wavepacket::cli::{self, CliArgs};

fn main() {
    let args = CliArgs::parse();
    let config = match cli::parse_config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(cli::exit_code(&e));
        }
    };
    match cli::run(&config).and_then(|envelope| cli::emit(&envelope)) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(cli::exit_code(&e));
        }
    }
}

mod args;
mod commands;
mod error;
mod output;

use clap::Parser;

fn main() {
    let cli = args::Cli::parse();
    if let Err(e) = commands::run(cli) {
        eprintln!("bellsym: {e}");
        std::process::exit(e.exit_code());
    }
}

use clap::Parser;

use tropsec_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    let invocation = std::iter::once("tropsec".to_string())
        .chain(std::env::args().skip(1))
        .collect::<Vec<_>>()
        .join(" ");
    if let Err(e) = tropsec_cli::run(&cli, &invocation) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

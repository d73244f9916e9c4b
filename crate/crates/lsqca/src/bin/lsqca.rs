use clap::Parser;

fn main() {
    std::process::exit(lsqca::cli::run_cli(lsqca::cli::Cli::parse()));
}

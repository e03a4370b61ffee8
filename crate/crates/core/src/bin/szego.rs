use clap::Parser;

fn main() {
    std::process::exit(szego::cli::run(szego::cli::Cli::parse()));
}

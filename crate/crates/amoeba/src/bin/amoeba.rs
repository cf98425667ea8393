use clap::Parser;

fn main() {
    std::process::exit(amoeba::cli::run(amoeba::cli::Cli::parse()));
}

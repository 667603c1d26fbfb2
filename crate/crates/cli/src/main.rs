use clap::Parser;

fn main() {
    let cli = ptfsense_cli::Cli::parse();
    std::process::exit(ptfsense_cli::run(&cli));
}

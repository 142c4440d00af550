use clap::Parser;

fn main() {
    let cli = isodrast_cli::Cli::parse();
    std::process::exit(isodrast_cli::run(cli));
}

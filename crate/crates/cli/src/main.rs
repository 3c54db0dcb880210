use clap::Parser;

fn main() {
    let cli = qfm_cli::Cli::parse();
    if let Err(f) = qfm_cli::run(cli) {
        eprintln!("error: {:#}", f.error());
        std::process::exit(f.exit_code());
    }
}

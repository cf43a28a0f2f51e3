use clap::Parser;

fn main() {
    let cli = hetcoop_cli::Cli::parse();
    if let Err(e) = hetcoop_cli::run(&cli) {
        eprintln!("hetcoop: {e}");
        std::process::exit(e.exit_code());
    }
}

use clap::Parser;

fn main() {
    let cli = dmnls_cli::Cli::parse();
    if let Err(e) = dmnls_cli::cli::run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(dmnls_cli::exit_code(&e));
    }
}

use clap::Parser;
use tracing_subscriber::EnvFilter;

use qstance_cli::{error_summary, exit_code, run, Cli};

fn main() {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_env("QS_LOG").unwrap_or_else(|_| EnvFilter::new("info")))
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let result = cli
        .config(std::env::vars())
        .map_err(anyhow::Error::from)
        .and_then(|cfg| run(&cli, &cfg));
    match result {
        Ok(summary) => println!("{summary}"),
        Err(err) => {
            eprintln!("{}", error_summary(&err));
            std::process::exit(exit_code(&err));
        }
    }
}

use clap::Parser;

use kcca_screen::cli::{run_command, Cli, RunConfig};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = RunConfig::from_cli(cli).and_then(|config| run_command(&config));
    if let Err(e) = outcome {
        eprintln!("error[{}]: {e}", e.category());
        std::process::exit(e.exit_code());
    }
}

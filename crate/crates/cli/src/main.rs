use clap::Parser;
use spinwigner_cli::{run, Cli};

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("spinwigner: {e}");
        std::process::exit(e.exit_code());
    }
}

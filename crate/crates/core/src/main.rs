use clap::Parser;

use curverad::cli::{run, Cli};

fn main() {
    let argv = std::env::args().collect::<Vec<_>>().join(" ");
    let cli = Cli::parse();
    std::process::exit(run(cli, argv));
}

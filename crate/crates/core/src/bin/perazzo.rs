use clap::Parser;
use perazzo::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let (out, code) = run(&cli);
    println!("{out}");
    std::process::exit(code);
}

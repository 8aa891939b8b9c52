mod args;
mod batch;
mod compare;
mod encode;
mod error;
mod fuse_cmd;
mod segment;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::CliResult;

fn run(cli: &Cli) -> CliResult<i32> {
    match &cli.command {
        Command::Encode(args) => encode::cmd_encode(args).map(|()| 0),
        Command::Batch(args) => batch::cmd_batch(args),
        Command::Segment(args) => segment::cmd_segment(args).map(|()| 0),
        Command::Compare(args) => compare::cmd_compare(args).map(|()| 0),
        Command::Fuse(args) => fuse_cmd::cmd_fuse(args).map(|()| 0),
    }
}

fn main() {
    env_logger::Builder::from_env(
        env_logger::Env::new().filter_or("STAR_LOG", "error"),
    )
    .format_timestamp(None)
    .init();

    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}

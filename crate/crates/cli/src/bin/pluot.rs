use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use pluot_cli::{exit_code, run, RenderArgs, EXIT_INVALID};

/// Render a plot spec to PNG or SVG.
#[derive(Debug, Parser)]
#[command(name = "pluot", version)]
struct Args {
    /// Plot spec JSON file.
    #[arg(long)]
    spec: PathBuf,
    /// Output file; the extension (.png or .svg) picks the format.
    #[arg(long)]
    out: PathBuf,
    /// Override the spec's width in pixels.
    #[arg(long)]
    width: Option<u32>,
    /// Override the spec's height in pixels.
    #[arg(long)]
    height: Option<u32>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INVALID } else { 0 });
        }
    };
    let args = RenderArgs {
        spec: args.spec,
        out: args.out,
        width: args.width,
        height: args.height,
    };
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

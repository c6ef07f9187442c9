//! `lts netspec`: print layer shapes and parameter counts for a network
//! spec file, including totals for the standard and as-flagged variants.

use crate::error::{CliResult, UserInput};
use clap::Args;
use lts_core::netspec::{derive_shapes, load_spec_file, parse_input_dims};
use std::path::PathBuf;

#[derive(Args)]
pub struct NetspecArgs {
    /// Network spec file (one layer per line)
    #[arg(long)]
    pub spec: PathBuf,
    /// Input dimensions as HxWxC
    #[arg(long, default_value = "64x512x5")]
    pub input: String,
}

pub fn run(args: NetspecArgs) -> CliResult {
    let specs = load_spec_file(&args.spec).user_input()?;
    let input = parse_input_dims(&args.input).user_input()?;
    let report = derive_shapes(&specs, input).user_input()?;
    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }
    println!("{report}");
    Ok(())
}

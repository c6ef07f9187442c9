//! `lts project`: one RIMG range-image file per input scan.

use crate::error::{CliResult, UserInput};
use crate::manifest::{ensure_out_dir, list_files, stem};
use anyhow::Context;
use clap::Args;
use lts_core::formats;
use lts_core::projection::{project, ProjectionConfig};
use std::path::PathBuf;

#[derive(Args)]
pub struct ProjectArgs {
    /// Directory of .bin scan files
    #[arg(long)]
    pub scans: PathBuf,
    /// Output directory for .rimg files
    #[arg(long)]
    pub out: PathBuf,
    /// Range-image width in pixels
    #[arg(long, default_value_t = 512)]
    pub width: usize,
    /// Range-image height in pixels
    #[arg(long, default_value_t = 64)]
    pub height: usize,
}

pub fn run(args: ProjectArgs) -> CliResult {
    let cfg = ProjectionConfig::with_size(args.height, args.width);
    cfg.validate().user_input()?;
    let scans = list_files(&args.scans, "bin")?;
    ensure_out_dir(&args.out)?;

    for (t, scan_path) in scans.iter().enumerate() {
        let mut cloud = formats::read_velodyne_bin(scan_path)
            .with_context(|| format!("reading {}", scan_path.display()))
            .user_input()?;
        cloud.scan_id = t as u64;
        let image = project(&cloud, &cfg).user_input()?;
        log::debug!(
            "{}: {} points, {} out of view, {} occluded",
            scan_path.display(),
            cloud.len(),
            image.stats.out_of_fov,
            image.stats.occluded
        );
        let out_path = args.out.join(format!("{}.rimg", stem(scan_path)));
        formats::write_range_image(&image.to_record(), &out_path)
            .with_context(|| format!("writing {}", out_path.display()))
            .user_input()?;
    }
    println!(
        "projected {} scans to {}x{} range images in {}",
        scans.len(),
        args.height,
        args.width,
        args.out.display()
    );
    Ok(())
}

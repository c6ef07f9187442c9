//! `lts simulate`: expand a scene config into an on-disk dataset of scans,
//! poses, ground-truth labels and noisy score files.

use crate::error::{CliResult, UserInput};
use crate::manifest::ensure_out_dir;
use anyhow::Context;
use clap::Args;
use lts_core::formats;
use lts_core::simulate::{generate, load_scene_config};
use std::path::PathBuf;

#[derive(Args)]
pub struct SimulateArgs {
    /// Scene configuration file (TOML)
    #[arg(long)]
    pub config: PathBuf,
    /// Output dataset directory
    #[arg(long)]
    pub out: PathBuf,
    /// Override the seed from the config file
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn run(args: SimulateArgs) -> CliResult {
    let (scene, mut noise) = load_scene_config(&args.config)
        .with_context(|| format!("loading {}", args.config.display()))
        .user_input()?;
    if let Some(seed) = args.seed {
        noise.seed = seed;
    }
    let frames = generate(&scene, &noise).user_input()?;

    let scans_dir = args.out.join("scans");
    let labels_dir = args.out.join("labels");
    let scores_dir = args.out.join("scores");
    for dir in [&scans_dir, &labels_dir, &scores_dir] {
        ensure_out_dir(dir)?;
    }

    let mut poses = Vec::with_capacity(frames.len());
    for (t, frame) in frames.iter().enumerate() {
        formats::write_velodyne_bin(&frame.cloud, &scans_dir.join(format!("{t:06}.bin")))
            .user_input()?;
        formats::write_labels(&frame.labels, &labels_dir.join(format!("{t:06}.plbl")))
            .user_input()?;
        formats::write_scores(&frame.scores, &scores_dir.join(format!("{t:06}.pscr")))
            .user_input()?;
        poses.push(frame.pose.clone());
    }
    formats::write_pose_file(&poses, &args.out.join("poses.txt")).user_input()?;

    let points = frames.first().map_or(0, |f| f.cloud.len());
    println!(
        "wrote {} scans of {} points (seed {}) to {}",
        frames.len(),
        points,
        noise.seed,
        args.out.display()
    );
    Ok(())
}

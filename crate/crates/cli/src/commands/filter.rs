//! `lts filter`: run the recursive log-odds fusion over a scan sequence
//! and write one PLBL label file per scan.

use crate::error::{user_error, CliResult, UserInput};
use crate::manifest::{ensure_out_dir, stem, RunManifest};
use anyhow::{anyhow, Context};
use clap::Args;
use lts_core::association::{
    associate, Correspondence, IdentityMotion, MotionProvider, PoseSequenceMotion,
};
use lts_core::filter::{infer, update, FilterConfig, FilterState};
use lts_core::formats;
use std::path::PathBuf;

#[derive(Args)]
pub struct FilterArgs {
    /// Directory of .bin scan files
    #[arg(long)]
    pub scans: PathBuf,
    /// Directory of .pscr score files, one per scan
    #[arg(long)]
    pub scores: PathBuf,
    /// Pose file (12 values per line); omit to disable ego-motion
    #[arg(long)]
    pub poses: Option<PathBuf>,
    /// Output directory for .plbl label files
    #[arg(long)]
    pub out: PathBuf,
    /// Association distance threshold in meters; 0 disables temporal
    /// fusion entirely (every scan falls back to per-scan evidence)
    #[arg(long, default_value_t = 0.5)]
    pub assoc_max_dist: f64,
    /// Prior log-odds: one value for all classes, or a comma-separated
    /// per-class list
    #[arg(long, default_value = "0")]
    pub prior: String,
    /// Clamp applied to scores before the logit
    #[arg(long, default_value_t = lts_core::filter::DEFAULT_SCORE_EPSILON)]
    pub score_eps: f64,
    /// Saturation bound on accumulated log-odds
    #[arg(long, default_value_t = lts_core::filter::DEFAULT_LOGODDS_CLAMP)]
    pub logodds_clamp: f64,
}

fn parse_priors(spec: &str, num_classes: usize) -> Result<Vec<f64>, anyhow::Error> {
    let values: Vec<f64> = spec
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("prior value {tok:?} is not a number"))
        })
        .collect::<Result<_, _>>()?;
    match values.len() {
        1 => Ok(vec![values[0]; num_classes]),
        n if n == num_classes => Ok(values),
        n => Err(anyhow!("{n} priors given for {num_classes} classes")),
    }
}

pub fn run(args: FilterArgs) -> CliResult {
    if args.assoc_max_dist < 0.0 {
        return Err(user_error(anyhow!(
            "association threshold must be non-negative"
        )));
    }
    let manifest = RunManifest::for_filter(&args.scans, &args.scores, args.poses.as_deref())?;
    ensure_out_dir(&args.out)?;

    // Class count comes from the first score file.
    let first_scores = formats::read_scores(&manifest.scores[0])
        .with_context(|| format!("reading {}", manifest.scores[0].display()))
        .user_input()?;
    let num_classes = first_scores.num_classes();
    let priors = parse_priors(&args.prior, num_classes).user_input()?;
    let cfg = FilterConfig::build(num_classes, priors, args.score_eps, args.logodds_clamp)
        .user_input()?;

    let motion: Box<dyn MotionProvider> = match manifest.poses {
        Some(poses) => Box::new(PoseSequenceMotion::new(poses)),
        None => Box::new(IdentityMotion),
    };

    let mut state = FilterState::empty(num_classes);
    let mut prev_cloud: Option<lts_core::PointCloud> = None;
    for (t, (scan_path, score_path)) in manifest.scans.iter().zip(&manifest.scores).enumerate() {
        let mut cloud = formats::read_velodyne_bin(scan_path)
            .with_context(|| format!("reading {}", scan_path.display()))
            .user_input()?;
        cloud.scan_id = t as u64;
        let scores = formats::read_scores(score_path)
            .with_context(|| format!("reading {}", score_path.display()))
            .user_input()?;
        if scores.num_points() != cloud.len() {
            return Err(user_error(anyhow!(
                "{}: {} score rows for {} scan points",
                score_path.display(),
                scores.num_points(),
                cloud.len()
            )));
        }
        if scores.num_classes() != num_classes {
            return Err(user_error(anyhow!(
                "{}: {} classes, sequence started with {}",
                score_path.display(),
                scores.num_classes(),
                num_classes
            )));
        }

        let corr = match &prev_cloud {
            Some(prev) if args.assoc_max_dist > 0.0 => {
                associate(prev, &cloud, motion.as_ref(), args.assoc_max_dist).user_input()?
            }
            // Scan 0, or fusion disabled via a zero threshold.
            _ => Correspondence::all_unmatched(cloud.len()),
        };
        log::debug!(
            "scan {t}: {} of {} points matched",
            corr.matched_count(),
            cloud.len()
        );

        // The correspondence is built against the state we hold, so a
        // failure here is a bug, not bad input.
        state = update(state, &scores, &corr, &cfg).internal()?;
        let labels = infer(&state);
        let out_path = args.out.join(format!("{}.plbl", stem(scan_path)));
        formats::write_labels(&labels, &out_path)
            .with_context(|| format!("writing {}", out_path.display()))
            .user_input()?;
        prev_cloud = Some(cloud);
    }
    println!(
        "filtered {} scans into {}",
        manifest.scans.len(),
        args.out.display()
    );
    Ok(())
}

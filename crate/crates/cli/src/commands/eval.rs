//! `lts eval`: accumulate confusion matrices over a sequence and report
//! class-wise IoU for raw argmax scores and/or filtered label files, plus
//! the per-class deltas when both are given.

use crate::error::{user_error, CliResult, UserInput};
use crate::manifest::{ensure_out_dir, list_files};
use anyhow::{anyhow, Context};
use clap::Args;
use lts_core::formats;
use lts_core::metrics::{compare_reports, iou_report, write_report, ConfusionMatrix, IoUReport};
use lts_core::types::{ClassScores, LabelVector};
use std::path::{Path, PathBuf};

#[derive(Args)]
pub struct EvalArgs {
    /// Directory of ground-truth .plbl files
    #[arg(long)]
    pub labels: PathBuf,
    /// Directory of .pscr score files; evaluated as per-scan argmax ("raw")
    #[arg(long)]
    pub scores: Option<PathBuf>,
    /// Directory of predicted .plbl files ("filtered")
    #[arg(long)]
    pub pred: Option<PathBuf>,
    /// Output directory for report files
    #[arg(long)]
    pub out: PathBuf,
    /// Include background (class 0) in the mean IoU
    #[arg(long, default_value_t = false)]
    pub include_background: bool,
}

fn read_label_dir(dir: &Path) -> Result<Vec<LabelVector>, crate::error::CliError> {
    list_files(dir, "plbl")?
        .iter()
        .map(|p| {
            formats::read_labels(p)
                .with_context(|| format!("reading {}", p.display()))
                .user_input()
        })
        .collect()
}

fn max_label(vectors: Option<&Vec<LabelVector>>) -> usize {
    vectors
        .into_iter()
        .flatten()
        .flat_map(|l| l.as_slice().iter())
        .map(|&l| l as usize)
        .max()
        .unwrap_or(0)
}

fn accumulate_sequence(
    gt: &[LabelVector],
    pred: &[LabelVector],
    num_classes: usize,
) -> Result<ConfusionMatrix, crate::error::CliError> {
    let mut cm = ConfusionMatrix::new(num_classes);
    for (g, p) in gt.iter().zip(pred) {
        cm.accumulate(g, p).user_input()?;
    }
    Ok(cm)
}

pub fn run(args: EvalArgs) -> CliResult {
    if args.scores.is_none() && args.pred.is_none() {
        return Err(user_error(anyhow!(
            "nothing to evaluate: give --scores and/or --pred"
        )));
    }
    let gt = read_label_dir(&args.labels)?;
    ensure_out_dir(&args.out)?;

    // Raw predictions are the per-scan argmax of the score files.
    let mut raw_pred: Option<Vec<LabelVector>> = None;
    let mut score_classes: Option<usize> = None;
    if let Some(dir) = &args.scores {
        let files = list_files(dir, "pscr")?;
        if files.len() != gt.len() {
            return Err(user_error(anyhow!(
                "{} score files for {} label files",
                files.len(),
                gt.len()
            )));
        }
        let mut labels = Vec::with_capacity(files.len());
        for path in &files {
            let scores = formats::read_scores(path)
                .with_context(|| format!("reading {}", path.display()))
                .user_input()?;
            match score_classes {
                Some(expected) if expected != scores.num_classes() => {
                    return Err(user_error(anyhow!(
                        "{}: {} classes, sequence started with {expected}",
                        path.display(),
                        scores.num_classes()
                    )));
                }
                _ => score_classes = Some(scores.num_classes()),
            }
            labels.push(scores.argmax_labels());
        }
        raw_pred = Some(labels);
    }

    let mut fused_pred: Option<Vec<LabelVector>> = None;
    if let Some(dir) = &args.pred {
        let pred = read_label_dir(dir)?;
        if pred.len() != gt.len() {
            return Err(user_error(anyhow!(
                "{} prediction files for {} label files",
                pred.len(),
                gt.len()
            )));
        }
        fused_pred = Some(pred);
    }

    for (name, pred) in [("raw", &raw_pred), ("filtered", &fused_pred)] {
        if let Some(pred) = pred {
            for (i, (g, p)) in gt.iter().zip(pred.iter()).enumerate() {
                if g.len() != p.len() {
                    return Err(user_error(anyhow!(
                        "scan {i}: ground truth has {} points, {name} prediction has {}",
                        g.len(),
                        p.len()
                    )));
                }
            }
        }
    }

    let observed = [
        max_label(Some(&gt)),
        max_label(raw_pred.as_ref()),
        max_label(fused_pred.as_ref()),
    ]
    .into_iter()
    .max()
    .unwrap()
        + 1;
    let num_classes = observed.max(score_classes.unwrap_or(0)).max(4);
    let names = ClassScores::default_names(num_classes);

    let mut reports: Vec<(&str, IoUReport)> = Vec::new();
    if let Some(pred) = &raw_pred {
        let cm = accumulate_sequence(&gt, pred, num_classes)?;
        let report = iou_report(&cm, &names, args.include_background).user_input()?;
        write_report(&report, &args.out.join("raw_report.csv")).user_input()?;
        println!("raw (per-scan argmax):\n{report}\n");
        reports.push(("raw", report));
    }
    if let Some(pred) = &fused_pred {
        let cm = accumulate_sequence(&gt, pred, num_classes)?;
        let report = iou_report(&cm, &names, args.include_background).user_input()?;
        write_report(&report, &args.out.join("filtered_report.csv")).user_input()?;
        println!("filtered:\n{report}\n");
        reports.push(("filtered", report));
    }
    if reports.len() == 2 {
        let delta = compare_reports(&reports[0].1, &reports[1].1).internal()?;
        println!("filtered minus raw:\n{delta}");
    }
    Ok(())
}

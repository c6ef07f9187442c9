//! Input discovery and validation shared by the directory-driven commands.

use crate::error::{user_error, CliError, UserInput};
use anyhow::{anyhow, Context};
use lts_core::types::Pose;
use std::path::{Path, PathBuf};

/// Files with the given extension, sorted by name. Scan order comes from
/// zero-padded file names, so lexicographic order is scan order.
pub fn list_files(dir: &Path, extension: &str) -> Result<Vec<PathBuf>, CliError> {
    let entries = std::fs::read_dir(dir)
        .with_context(|| format!("cannot read directory {}", dir.display()))
        .user_input()?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().and_then(|e| e.to_str()) == Some(extension))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(user_error(anyhow!(
            "no .{extension} files in {}",
            dir.display()
        )));
    }
    Ok(files)
}

pub fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string())
}

pub fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))
        .user_input()
}

/// Validated inputs for a filter run: scan and score files in scan order,
/// with matching counts, plus poses when ego-motion is available.
pub struct RunManifest {
    pub scans: Vec<PathBuf>,
    pub scores: Vec<PathBuf>,
    pub poses: Option<Vec<Pose>>,
}

impl RunManifest {
    pub fn for_filter(
        scans_dir: &Path,
        scores_dir: &Path,
        poses_path: Option<&Path>,
    ) -> Result<Self, CliError> {
        let scans = list_files(scans_dir, "bin")?;
        let scores = list_files(scores_dir, "pscr")?;
        if scans.len() != scores.len() {
            return Err(user_error(anyhow!(
                "{} scan files but {} score files; counts must agree",
                scans.len(),
                scores.len()
            )));
        }
        let poses = match poses_path {
            Some(path) => {
                let poses = lts_core::formats::read_pose_file(path)
                    .with_context(|| format!("reading poses from {}", path.display()))
                    .user_input()?;
                if poses.len() < scans.len() {
                    return Err(user_error(anyhow!(
                        "{} poses for {} scans; need one pose per scan",
                        poses.len(),
                        scans.len()
                    )));
                }
                Some(poses)
            }
            None => None,
        };
        Ok(Self {
            scans,
            scores,
            poses,
        })
    }
}

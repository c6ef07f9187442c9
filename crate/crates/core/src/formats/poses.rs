//! Pose text files: one pose per line as 12 whitespace-separated values,
//! the row-major 3×4 matrix [R|t].

use super::{read_file, write_file, FormatError};
use crate::types::Pose;
use nalgebra::{Matrix3, Vector3};
use std::fmt::Write as _;
use std::path::Path;

const TOKENS_PER_POSE: usize = 12;

pub fn read_pose_file(path: &Path) -> Result<Vec<Pose>, FormatError> {
    let bytes = read_file(path)?;
    let text = String::from_utf8_lossy(&bytes);
    parse_poses(&text)
}

/// Parse pose lines; blank lines are skipped, line numbers are 1-based.
pub fn parse_poses(text: &str) -> Result<Vec<Pose>, FormatError> {
    let mut poses = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let mut values = [0.0f64; TOKENS_PER_POSE];
        let mut found = 0usize;
        for token in raw.split_whitespace() {
            if found < TOKENS_PER_POSE {
                values[found] = token.parse().map_err(|_| FormatError::PoseNumber {
                    line,
                    token: token.to_string(),
                })?;
            }
            found += 1;
        }
        if found != TOKENS_PER_POSE {
            return Err(FormatError::PoseTokenCount {
                line,
                expected: TOKENS_PER_POSE,
                found,
            });
        }
        let rotation = Matrix3::new(
            values[0], values[1], values[2], values[4], values[5], values[6], values[8], values[9],
            values[10],
        );
        let translation = Vector3::new(values[3], values[7], values[11]);
        let pose = Pose::validated(rotation, translation, Pose::FILE_TOL)
            .map_err(|source| FormatError::PoseValidation { line, source })?;
        poses.push(pose);
    }
    Ok(poses)
}

pub fn write_pose_file(poses: &[Pose], path: &Path) -> Result<(), FormatError> {
    let mut text = String::new();
    for pose in poses {
        let r = &pose.rotation;
        let t = &pose.translation;
        for row in 0..3 {
            // Shortest round-trip float formatting keeps read∘write exact.
            let _ = write!(
                text,
                "{} {} {} {}",
                r[(row, 0)],
                r[(row, 1)],
                r[(row, 2)],
                t[row]
            );
            text.push(if row < 2 { ' ' } else { '\n' });
        }
    }
    write_file(path, text.as_bytes())
}

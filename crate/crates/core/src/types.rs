//! Shared domain types: point clouds, rigid poses, classifier scores and
//! per-point label vectors.

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

/// Class layout used when a data source carries no class names of its own.
/// Class 0 is treated as background throughout the toolkit.
pub const DEFAULT_CLASS_NAMES: [&str; 4] = ["background", "car", "pedestrian", "bicyclist"];

/// Largest class count representable by the u8 label encoding.
pub const MAX_CLASSES: usize = 256;

#[derive(Debug, Error, PartialEq)]
pub enum DomainError {
    #[error("scores length {len} is not a multiple of {classes} classes")]
    ScoresShape { len: usize, classes: usize },
    #[error("{names} class names given for {classes} classes")]
    ClassNameCount { names: usize, classes: usize },
    #[error("score row {row} sums to {sum}, expected 1 within {tol}")]
    ScoreRowSum { row: usize, sum: f64, tol: f64 },
    #[error("score entry ({row}, {col}) = {value} outside [0, 1]")]
    ScoreRange { row: usize, col: usize, value: f32 },
    #[error("rotation is not orthonormal (error {error:.3e} exceeds {tol:.1e})")]
    NotOrthonormal { error: f64, tol: f64 },
    #[error("rotation determinant {det} is not +1")]
    NotProperRotation { det: f64 },
}

/// One LiDAR return: sensor-frame coordinates in meters plus normalized
/// reflectance intensity in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f32,
    pub y: f32,
    pub z: f32,
    pub intensity: f32,
}

impl Point {
    pub fn new(x: f32, y: f32, z: f32, intensity: f32) -> Self {
        Self { x, y, z, intensity }
    }

    /// Position as a double-precision vector for downstream geometry.
    pub fn position(&self) -> Vector3<f64> {
        Vector3::new(self.x as f64, self.y as f64, self.z as f64)
    }

    /// Range from the sensor origin, computed in f64.
    pub fn range(&self) -> f64 {
        self.position().norm()
    }
}

/// One LiDAR scan. Point order is preserved from the source file; `scan_id`
/// is the position of the scan in its sequence.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    pub points: Vec<Point>,
    pub scan_id: u64,
}

impl PointCloud {
    pub fn new(points: Vec<Point>, scan_id: u64) -> Self {
        Self { points, scan_id }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Rigid transform: orthonormal rotation plus translation in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct Pose {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

/// Max-abs entry of R·Rᵀ − I; zero for a perfectly orthonormal R.
pub fn orthonormality_error(rotation: &Matrix3<f64>) -> f64 {
    let residual = rotation * rotation.transpose() - Matrix3::identity();
    residual.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

impl Pose {
    /// Tolerance for poses constructed programmatically.
    pub const STRICT_TOL: f64 = 1e-6;
    /// Tolerance for poses parsed from text files, where printed precision
    /// dominates the orthonormality residual.
    pub const FILE_TOL: f64 = 1e-3;

    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn from_translation(translation: Vector3<f64>) -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation,
        }
    }

    /// Build a pose, rejecting rotations that are not proper and orthonormal
    /// within `tol`.
    pub fn validated(
        rotation: Matrix3<f64>,
        translation: Vector3<f64>,
        tol: f64,
    ) -> Result<Self, DomainError> {
        let error = orthonormality_error(&rotation);
        if error > tol {
            return Err(DomainError::NotOrthonormal { error, tol });
        }
        let det = rotation.determinant();
        if (det - 1.0).abs() > tol.max(Self::STRICT_TOL) {
            return Err(DomainError::NotProperRotation { det });
        }
        Ok(Self {
            rotation,
            translation,
        })
    }

    pub fn apply(&self, p: Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    pub fn inverse(&self) -> Self {
        let rotation = self.rotation.transpose();
        Self {
            translation: -(rotation * self.translation),
            rotation,
        }
    }

    /// Composition: `a.compose(&b)` applies `b` first, then `a`.
    pub fn compose(&self, other: &Pose) -> Self {
        Self {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }
}

/// Per-point class probability rows, row-major N×C. Rows sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassScores {
    scores: Vec<f32>,
    num_classes: usize,
    pub class_names: Vec<String>,
}

/// Row-sum tolerance for already-normalized scores.
pub const SCORE_ROW_SUM_TOL: f64 = 1e-4;

impl ClassScores {
    /// Build from row-major data, validating entry range and row sums.
    pub fn new(
        scores: Vec<f32>,
        num_classes: usize,
        class_names: Vec<String>,
    ) -> Result<Self, DomainError> {
        // The u8 label encoding bounds the class count everywhere.
        if num_classes == 0
            || num_classes > MAX_CLASSES
            || !scores.len().is_multiple_of(num_classes)
        {
            return Err(DomainError::ScoresShape {
                len: scores.len(),
                classes: num_classes,
            });
        }
        if class_names.len() != num_classes {
            return Err(DomainError::ClassNameCount {
                names: class_names.len(),
                classes: num_classes,
            });
        }
        for (row, chunk) in scores.chunks_exact(num_classes).enumerate() {
            let mut sum = 0.0f64;
            for (col, &value) in chunk.iter().enumerate() {
                if !(0.0..=1.0).contains(&value) {
                    return Err(DomainError::ScoreRange { row, col, value });
                }
                sum += value as f64;
            }
            if (sum - 1.0).abs() > SCORE_ROW_SUM_TOL {
                return Err(DomainError::ScoreRowSum {
                    row,
                    sum,
                    tol: SCORE_ROW_SUM_TOL,
                });
            }
        }
        Ok(Self {
            scores,
            num_classes,
            class_names,
        })
    }

    /// Default class names for `num_classes` classes: the standard four,
    /// then `class_4`, `class_5`, ...
    pub fn default_names(num_classes: usize) -> Vec<String> {
        (0..num_classes)
            .map(|c| match DEFAULT_CLASS_NAMES.get(c) {
                Some(name) => (*name).to_string(),
                None => format!("class_{c}"),
            })
            .collect()
    }

    pub fn num_points(&self) -> usize {
        self.scores.len() / self.num_classes
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn row(&self, point: usize) -> &[f32] {
        let c = self.num_classes;
        &self.scores[point * c..(point + 1) * c]
    }

    pub fn raw(&self) -> &[f32] {
        &self.scores
    }

    /// Per-point argmax labels; ties go to the lowest class index.
    pub fn argmax_labels(&self) -> LabelVector {
        let labels = (0..self.num_points())
            .map(|i| argmax(self.row(i)) as u8)
            .collect();
        LabelVector(labels)
    }
}

/// Index of the largest value; ties resolve to the lowest index.
pub(crate) fn argmax<T: PartialOrd + Copy>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Per-point class indices, one u8 per point.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabelVector(pub Vec<u8>);

impl LabelVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pose_inverse_roundtrips() {
        let rot = nalgebra::Rotation3::from_euler_angles(0.1, -0.4, 2.0);
        let pose = Pose::validated(
            rot.into_inner(),
            Vector3::new(1.0, -2.0, 0.5),
            Pose::STRICT_TOL,
        )
        .unwrap();
        let p = Vector3::new(3.0, 4.0, -1.0);
        let back = pose.inverse().apply(pose.apply(p));
        assert!((back - p).norm() < 1e-12);
    }

    #[test]
    fn pose_rejects_skewed_rotation() {
        let mut r = Matrix3::identity();
        r[(0, 1)] = 0.2;
        assert!(matches!(
            Pose::validated(r, Vector3::zeros(), Pose::STRICT_TOL),
            Err(DomainError::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn pose_rejects_reflection() {
        let mut r = Matrix3::identity();
        r[(2, 2)] = -1.0;
        assert!(matches!(
            Pose::validated(r, Vector3::zeros(), Pose::STRICT_TOL),
            Err(DomainError::NotProperRotation { .. })
        ));
    }

    #[test]
    fn scores_reject_bad_row_sum() {
        let err = ClassScores::new(vec![0.9, 0.9, 0.1, 0.1], 4, ClassScores::default_names(4));
        assert!(matches!(err, Err(DomainError::ScoreRowSum { row: 0, .. })));
    }

    #[test]
    fn argmax_ties_resolve_to_lowest_index() {
        assert_eq!(argmax(&[0.25f32, 0.25, 0.25, 0.25]), 0);
        assert_eq!(argmax(&[0.1f32, 0.4, 0.4, 0.1]), 1);
    }
}

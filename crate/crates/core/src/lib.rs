//! Temporally consistent semantic segmentation of LiDAR scans.
//!
//! Per-point classifier scores arrive scan by scan; a per-point, per-class
//! static-state binary Bayes filter in log-odds form fuses them over time,
//! using nearest-neighbor data association between motion-aligned
//! consecutive scans. The crate also covers the spherical range-image
//! front-end and its exact back-projection, IoU evaluation, a deterministic
//! synthetic-scene generator that stands in for a trained classifier, and
//! an analytical shape/parameter calculator for dense-block networks.
//!
//! Modules follow the pipeline:
//!
//! - [`formats`]: scan, pose, score, label and range-image files
//! - [`projection`]: scan → range image → per-point labels
//! - [`association`]: point correspondences between consecutive scans
//! - [`filter`]: the recursive log-odds fusion itself
//! - [`metrics`]: confusion matrices and class-wise / mean IoU
//! - [`simulate`]: synthetic scenes with ground truth and noisy scores
//! - [`netspec`]: closed-form network shapes and parameter counts
//!
//! The fusion loop over a scan sequence:
//!
//! ```
//! use lts_core::association::{associate, Correspondence, IdentityMotion};
//! use lts_core::filter::{infer, update, FilterConfig, FilterState};
//! use lts_core::simulate::{generate, NoiseMode, NoiseSpec, SceneSpec};
//! use lts_core::types::ClassScores;
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let scene = SceneSpec {
//!     objects: vec![],
//!     ground_extent: 20.0,
//!     points_per_object: 1,
//!     ground_points: 200,
//!     num_scans: 3,
//!     sensor_start: [0.0, 0.0, 1.7],
//!     sensor_velocity: [0.0; 3],
//!     resample_each_scan: false,
//!     class_names: ClassScores::default_names(4),
//! };
//! let noise = NoiseSpec { mode: NoiseMode::SymmetricFlip { p: 0.1 }, seed: 7 };
//! let frames = generate(&scene, &noise)?;
//!
//! let cfg = FilterConfig::new(4)?;
//! let mut state = FilterState::empty(4);
//! for (t, frame) in frames.iter().enumerate() {
//!     let corr = if t == 0 {
//!         Correspondence::all_unmatched(frame.cloud.len())
//!     } else {
//!         associate(&frames[t - 1].cloud, &frame.cloud, &IdentityMotion, 0.5)?
//!     };
//!     state = update(state, &frame.scores, &corr, &cfg)?;
//! }
//! let labels = infer(&state);
//! assert_eq!(labels.len(), 200);
//! # Ok(())
//! # }
//! ```

pub mod association;
pub mod filter;
pub mod formats;
pub mod metrics;
pub mod netspec;
pub mod projection;
pub mod simulate;
pub mod types;

pub use types::{ClassScores, LabelVector, Point, PointCloud, Pose};

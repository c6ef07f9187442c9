//! Deterministic synthetic scenes: box-shaped objects over a ground plane,
//! sampled into scan sequences with ground-truth labels, sensor poses and
//! noise-corrupted score streams. Stands in for a real classifier when
//! exercising the filter at desk scale.
//!
//! All randomness is counter-based: every draw is keyed by (seed, purpose,
//! entity, point, scan), so outputs are reproducible regardless of
//! generation order.

use crate::types::{ClassScores, LabelVector, Point, PointCloud, Pose};
use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Dirichlet, Distribution};
use serde::Deserialize;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimulateError {
    #[error("invalid scene spec: {reason}")]
    InvalidSpec { reason: String },
    #[error("object class {class:?} is not in the class list")]
    UnknownClass { class: String },
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {reason}")]
    ConfigParse { reason: String },
}

/// One box-shaped object: axis-aligned, surface-sampled, moving at a
/// constant world-frame velocity per scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectSpec {
    pub class: String,
    pub center: [f64; 3],
    pub extents: [f64; 3],
    pub velocity: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub objects: Vec<ObjectSpec>,
    /// Side length of the square ground patch at z = 0, centered at origin.
    pub ground_extent: f64,
    pub points_per_object: usize,
    pub ground_points: usize,
    pub num_scans: usize,
    pub sensor_start: [f64; 3],
    pub sensor_velocity: [f64; 3],
    /// Redraw surface samples every scan instead of keeping persistent
    /// point identities.
    pub resample_each_scan: bool,
    pub class_names: Vec<String>,
}

impl SceneSpec {
    pub fn validate(&self) -> Result<(), SimulateError> {
        let fail = |reason: String| Err(SimulateError::InvalidSpec { reason });
        if self.num_scans == 0 {
            return fail("num_scans must be at least 1".to_string());
        }
        if self.points_per_object == 0 || self.ground_points == 0 {
            return fail("point densities must be positive".to_string());
        }
        if self.ground_extent <= 0.0 || !self.ground_extent.is_finite() {
            return fail(format!(
                "ground extent {} must be positive",
                self.ground_extent
            ));
        }
        if self.class_names.len() < 2 || self.class_names.len() > crate::types::MAX_CLASSES {
            return fail(format!(
                "{} classes outside 2..={}",
                self.class_names.len(),
                crate::types::MAX_CLASSES
            ));
        }
        for obj in &self.objects {
            if obj.extents.iter().any(|&e| e <= 0.0 || !e.is_finite()) {
                return fail(format!("object {:?} has non-positive extent", obj.class));
            }
            if !self.class_names.contains(&obj.class) {
                return Err(SimulateError::UnknownClass {
                    class: obj.class.clone(),
                });
            }
        }
        Ok(())
    }

    fn class_index(&self, class: &str) -> u8 {
        self.class_names.iter().position(|n| n == class).unwrap() as u8
    }
}

/// How one-hot ground-truth scores get corrupted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseMode {
    /// With probability `p`, move the full probability mass to a uniformly
    /// chosen wrong class.
    SymmetricFlip { p: f64 },
    /// Dirichlet sample with concentration `kappa` on the true class and 1
    /// elsewhere; larger kappa means cleaner scores.
    Dirichlet { kappa: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub mode: NoiseMode,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<(), SimulateError> {
        match self.mode {
            NoiseMode::SymmetricFlip { p } if !(0.0..1.0).contains(&p) => {
                Err(SimulateError::InvalidSpec {
                    reason: format!("flip probability {p} outside [0, 1)"),
                })
            }
            NoiseMode::Dirichlet { kappa } if kappa <= 0.0 || !kappa.is_finite() => {
                Err(SimulateError::InvalidSpec {
                    reason: format!("dirichlet concentration {kappa} must be positive"),
                })
            }
            _ => Ok(()),
        }
    }
}

/// One generated scan with its ground truth and simulated classifier output.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanFrame {
    pub cloud: PointCloud,
    pub labels: LabelVector,
    pub pose: Pose,
    pub scores: ClassScores,
}

// Draw purposes; part of the counter-key so streams never collide.
const STREAM_SURFACE: u64 = 1;
const STREAM_INTENSITY: u64 = 2;
const STREAM_NOISE: u64 = 3;

/// splitmix64 finalizer; standard mixer for deriving stream keys.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn rng_for(seed: u64, parts: [u64; 3]) -> ChaCha8Rng {
    let key = parts.iter().fold(mix(seed), |acc, &p| mix(acc ^ p));
    ChaCha8Rng::seed_from_u64(key)
}

/// Generate the scan sequence for a scene. Identical specs and seed give
/// identical output, element for element.
pub fn generate(scene: &SceneSpec, noise: &NoiseSpec) -> Result<Vec<ScanFrame>, SimulateError> {
    scene.validate()?;
    noise.validate()?;

    let num_classes = scene.class_names.len();
    let total_points = scene.objects.len() * scene.points_per_object + scene.ground_points;
    let sensor_start = Vector3::from(scene.sensor_start);
    let sensor_velocity = Vector3::from(scene.sensor_velocity);

    let mut frames = Vec::with_capacity(scene.num_scans);
    for t in 0..scene.num_scans {
        let draw_epoch = if scene.resample_each_scan {
            t as u64
        } else {
            0
        };
        let origin = sensor_start + sensor_velocity * t as f64;
        let pose = Pose::from_translation(origin);

        let mut points = Vec::with_capacity(total_points);
        let mut labels = Vec::with_capacity(total_points);
        let mut scores = Vec::with_capacity(total_points * num_classes);

        let mut global = 0u64;
        for (obj_idx, obj) in scene.objects.iter().enumerate() {
            let class = scene.class_index(&obj.class);
            let center = Vector3::from(obj.center) + Vector3::from(obj.velocity) * t as f64;
            for k in 0..scene.points_per_object {
                let entity = (obj_idx as u64) << 32 | k as u64;
                let mut rng = rng_for(noise.seed, [STREAM_SURFACE, entity, draw_epoch]);
                let offset = sample_box_surface(&mut rng, obj.extents);
                let world = center + offset;
                points.push(make_point(world - origin, noise.seed, entity, draw_epoch));
                labels.push(class);
                push_noisy_scores(&mut scores, class, num_classes, noise, t as u64, global)?;
                global += 1;
            }
        }
        for k in 0..scene.ground_points {
            let entity = u64::MAX << 32 | k as u64;
            let mut rng = rng_for(noise.seed, [STREAM_SURFACE, entity, draw_epoch]);
            let half = scene.ground_extent / 2.0;
            let world = Vector3::new(rng.gen_range(-half..half), rng.gen_range(-half..half), 0.0);
            points.push(make_point(world - origin, noise.seed, entity, draw_epoch));
            labels.push(0);
            push_noisy_scores(&mut scores, 0, num_classes, noise, t as u64, global)?;
            global += 1;
        }

        frames.push(ScanFrame {
            cloud: PointCloud::new(points, t as u64),
            labels: LabelVector(labels),
            pose,
            scores: ClassScores::new(scores, num_classes, scene.class_names.clone())
                .expect("generated rows are valid distributions"),
        });
    }
    Ok(frames)
}

fn make_point(sensor_frame: Vector3<f64>, seed: u64, entity: u64, epoch: u64) -> Point {
    let mut rng = rng_for(seed, [STREAM_INTENSITY, entity, epoch]);
    Point::new(
        sensor_frame.x as f32,
        sensor_frame.y as f32,
        sensor_frame.z as f32,
        rng.gen_range(0.0..1.0),
    )
}

/// Uniform sample on the surface of an axis-aligned box: pick a face with
/// probability proportional to its area, then a uniform point on it.
fn sample_box_surface(rng: &mut ChaCha8Rng, extents: [f64; 3]) -> Vector3<f64> {
    let [ex, ey, ez] = extents;
    let areas = [ey * ez, ey * ez, ex * ez, ex * ez, ex * ey, ex * ey];
    let total: f64 = areas.iter().sum();
    let mut pick = rng.gen_range(0.0..total);
    let mut face = 0;
    for (i, &a) in areas.iter().enumerate() {
        if pick < a {
            face = i;
            break;
        }
        pick -= a;
        face = i;
    }
    let u = rng.gen_range(-0.5..0.5);
    let v = rng.gen_range(-0.5..0.5);
    match face {
        0 => Vector3::new(ex / 2.0, u * ey, v * ez),
        1 => Vector3::new(-ex / 2.0, u * ey, v * ez),
        2 => Vector3::new(u * ex, ey / 2.0, v * ez),
        3 => Vector3::new(u * ex, -ey / 2.0, v * ez),
        4 => Vector3::new(u * ex, v * ey, ez / 2.0),
        _ => Vector3::new(u * ex, v * ey, -ez / 2.0),
    }
}

fn push_noisy_scores(
    out: &mut Vec<f32>,
    true_class: u8,
    num_classes: usize,
    noise: &NoiseSpec,
    scan: u64,
    point: u64,
) -> Result<(), SimulateError> {
    let mut rng = rng_for(noise.seed, [STREAM_NOISE, scan << 40 | point, 0]);
    match noise.mode {
        NoiseMode::SymmetricFlip { p } => {
            let mut hot = true_class as usize;
            if p > 0.0 && rng.gen_range(0.0..1.0) < p {
                let wrong = rng.gen_range(0..num_classes - 1);
                hot = if wrong >= hot { wrong + 1 } else { wrong };
            }
            for c in 0..num_classes {
                out.push(if c == hot { 1.0 } else { 0.0 });
            }
        }
        NoiseMode::Dirichlet { kappa } => {
            let mut alpha = vec![1.0f64; num_classes];
            alpha[true_class as usize] = kappa;
            let dirichlet = Dirichlet::new(&alpha).map_err(|e| SimulateError::InvalidSpec {
                reason: format!("dirichlet parameters rejected: {e}"),
            })?;
            let sample = dirichlet.sample(&mut rng);
            out.extend(sample.iter().map(|&v| v as f32));
        }
    }
    Ok(())
}

/// Independent closed-form posterior for one point observed over a score
/// sequence: per class, the sum of measurement log-odds minus (T−1) times
/// the prior. No epsilon clamp and no saturation; the reference the
/// recursive filter is checked against.
pub fn oracle_posterior(score_rows: &[Vec<f64>], prior_logodds: &[f64]) -> Vec<f64> {
    let steps = score_rows.len();
    prior_logodds
        .iter()
        .enumerate()
        .map(|(class, &prior)| {
            let measurement_sum: f64 = score_rows
                .iter()
                .map(|row| (row[class] / (1.0 - row[class])).ln())
                .sum();
            measurement_sum - (steps as f64 - 1.0) * prior
        })
        .collect()
}

// ---------------------------------------------------------------------
// TOML scene configuration
// ---------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    num_scans: usize,
    #[serde(default)]
    seed: u64,
    points_per_object: usize,
    ground_points: usize,
    ground_extent: f64,
    #[serde(default)]
    resample: bool,
    classes: Option<Vec<String>>,
    sensor_start: Option<[f64; 3]>,
    sensor_velocity: Option<[f64; 3]>,
    noise: RawNoise,
    #[serde(default)]
    object: Vec<RawObject>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoise {
    mode: String,
    p: Option<f64>,
    kappa: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObject {
    class: String,
    center: [f64; 3],
    extents: [f64; 3],
    velocity: Option<[f64; 3]>,
}

/// Load a scene configuration file (TOML). See the repository README for
/// the schema.
pub fn load_scene_config(path: &Path) -> Result<(SceneSpec, NoiseSpec), SimulateError> {
    let text = std::fs::read_to_string(path).map_err(|source| SimulateError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scene_config(&text)
}

pub fn parse_scene_config(text: &str) -> Result<(SceneSpec, NoiseSpec), SimulateError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| SimulateError::ConfigParse {
        reason: e.to_string(),
    })?;
    let mode = match raw.noise.mode.as_str() {
        "flip" => NoiseMode::SymmetricFlip {
            p: raw.noise.p.ok_or_else(|| SimulateError::ConfigParse {
                reason: "noise mode \"flip\" needs a `p` value".to_string(),
            })?,
        },
        "dirichlet" => NoiseMode::Dirichlet {
            kappa: raw.noise.kappa.ok_or_else(|| SimulateError::ConfigParse {
                reason: "noise mode \"dirichlet\" needs a `kappa` value".to_string(),
            })?,
        },
        other => {
            return Err(SimulateError::ConfigParse {
                reason: format!("unknown noise mode {other:?}"),
            })
        }
    };
    let noise = NoiseSpec {
        mode,
        seed: raw.seed,
    };
    let scene = SceneSpec {
        objects: raw
            .object
            .into_iter()
            .map(|o| ObjectSpec {
                class: o.class,
                center: o.center,
                extents: o.extents,
                velocity: o.velocity.unwrap_or([0.0; 3]),
            })
            .collect(),
        ground_extent: raw.ground_extent,
        points_per_object: raw.points_per_object,
        ground_points: raw.ground_points,
        num_scans: raw.num_scans,
        sensor_start: raw.sensor_start.unwrap_or([0.0, 0.0, 1.7]),
        sensor_velocity: raw.sensor_velocity.unwrap_or([0.0; 3]),
        resample_each_scan: raw.resample,
        class_names: raw.classes.unwrap_or_else(|| ClassScores::default_names(4)),
    };
    scene.validate()?;
    noise.validate()?;
    Ok((scene, noise))
}

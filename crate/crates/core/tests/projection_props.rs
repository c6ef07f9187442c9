//! Projection properties on random clouds: channel consistency, the
//! nearest-wins collision rule against an exhaustive per-pixel oracle,
//! label back-projection, and determinism.

use lts_core::projection::{project, unproject_labels, Channel, PointProjection, ProjectionConfig};
use lts_core::types::{Point, PointCloud};
use proptest::prelude::*;
use std::collections::HashMap;

fn small_cfg() -> ProjectionConfig {
    ProjectionConfig::with_size(16, 48)
}

fn cloud_strategy() -> impl Strategy<Value = PointCloud> {
    // Coordinates within ±40 m keep f32 depth rounding under the 1e-5
    // channel-consistency tolerance.
    prop::collection::vec(
        (0.5f32..40.0, -40.0f32..40.0, -8.0f32..8.0, 0.0f32..=1.0)
            .prop_map(|(x, y, z, i)| Point::new(x, y, z, i)),
        1..250,
    )
    .prop_map(|points| PointCloud::new(points, 0))
}

/// Independent re-derivation of each point's pixel, for the oracle.
fn oracle_bin(p: &Point, cfg: &ProjectionConfig) -> Option<(usize, usize, f64)> {
    let (x, y, z) = (p.x as f64, p.y as f64, p.z as f64);
    let r = (x * x + y * y + z * z).sqrt();
    if r == 0.0 {
        return None;
    }
    let az = y.atan2(x);
    let el = (z / r).asin();
    let (az_min, az_max) = cfg.azimuth_fov;
    let (el_min, el_max) = cfg.elevation_fov;
    if az < az_min || az > az_max || el < el_min || el > el_max {
        return None;
    }
    let col = (((az - az_min) / (az_max - az_min) * cfg.width as f64) as usize).min(cfg.width - 1);
    let row =
        (((el_max - el) / (el_max - el_min) * cfg.height as f64) as usize).min(cfg.height - 1);
    Some((row, col, r))
}

proptest! {
    #[test]
    fn depth_channel_matches_norm_of_xyz_channels(cloud in cloud_strategy()) {
        let cfg = small_cfg();
        let img = project(&cloud, &cfg).unwrap();
        for row in 0..cfg.height {
            for col in 0..cfg.width {
                if !img.is_valid(row, col) {
                    continue;
                }
                let x = img.channel(Channel::X, row, col) as f64;
                let y = img.channel(Channel::Y, row, col) as f64;
                let z = img.channel(Channel::Z, row, col) as f64;
                let depth = img.channel(Channel::Depth, row, col) as f64;
                prop_assert!(depth > 0.0);
                prop_assert!((depth - (x * x + y * y + z * z).sqrt()).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn collision_winners_match_exhaustive_per_pixel_minimum(cloud in cloud_strategy()) {
        let cfg = small_cfg();
        let img = project(&cloud, &cfg).unwrap();

        // Oracle: group points per pixel, take min range, ties to lowest index.
        let mut best: HashMap<(usize, usize), (f64, usize)> = HashMap::new();
        for (idx, p) in cloud.points.iter().enumerate() {
            if let Some((row, col, r)) = oracle_bin(p, &cfg) {
                let entry = best.entry((row, col)).or_insert((f64::INFINITY, usize::MAX));
                if r < entry.0 || (r == entry.0 && idx < entry.1) {
                    *entry = (r, idx);
                }
            }
        }

        let mut winners = 0usize;
        for row in 0..cfg.height {
            for col in 0..cfg.width {
                match best.get(&(row, col)) {
                    Some(&(r, idx)) => {
                        prop_assert_eq!(img.point_at(row, col), Some(idx));
                        prop_assert!((img.channel(Channel::Depth, row, col) as f64 - r).abs() < 1e-5);
                        winners += 1;
                    }
                    None => prop_assert_eq!(img.point_at(row, col), None),
                }
            }
        }

        // Every point is exactly one of: winner, occluded, out of view.
        let occluded = img
            .point_to_pixel
            .iter()
            .filter(|p| matches!(p, PointProjection::Occluded))
            .count();
        let out = img
            .point_to_pixel
            .iter()
            .filter(|p| matches!(p, PointProjection::OutOfFov))
            .count();
        prop_assert_eq!(winners + occluded + out, cloud.len());
    }

    #[test]
    fn winning_points_recover_their_labels(cloud in cloud_strategy()) {
        let cfg = small_cfg();
        let img = project(&cloud, &cfg).unwrap();
        // Ground truth: label = point index modulo a small class count.
        let gt: Vec<u8> = (0..cloud.len()).map(|i| (i % 5) as u8).collect();
        let mut image_labels = vec![0u8; cfg.height * cfg.width];
        for (px, &winner) in img.pixel_to_point.iter().enumerate() {
            if winner >= 0 {
                image_labels[px] = gt[winner as usize];
            }
        }
        let unprojected = unproject_labels(&image_labels, &img, 0).unwrap();
        for (i, proj) in img.point_to_pixel.iter().enumerate() {
            if matches!(proj, PointProjection::Pixel { .. }) {
                prop_assert_eq!(unprojected.as_slice()[i], gt[i]);
            }
        }
    }

    #[test]
    fn projection_is_deterministic(cloud in cloud_strategy()) {
        let cfg = small_cfg();
        prop_assert_eq!(project(&cloud, &cfg).unwrap(), project(&cloud, &cfg).unwrap());
    }
}

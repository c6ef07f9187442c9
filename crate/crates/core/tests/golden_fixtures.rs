//! Golden-file checks: the fixtures under `tests/fixtures/` are
//! byte-for-byte commitments to the on-disk formats. Each test documents
//! the exact value set its fixture must decode to.

use lts_core::formats;
use lts_core::types::Point;
use std::path::PathBuf;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

#[test]
fn golden_scan_decodes_two_points() {
    let cloud = formats::read_velodyne_bin(&fixture("golden.bin")).unwrap();
    assert_eq!(
        cloud.points,
        vec![
            Point::new(1.5, -2.25, 3.0, 0.5),
            Point::new(0.125, 4.0, -8.5, 1.0),
        ]
    );
}

#[test]
fn golden_scores_decode_and_keep_exact_rows() {
    let scores = formats::read_scores(&fixture("golden.pscr")).unwrap();
    assert_eq!(scores.num_points(), 2);
    assert_eq!(scores.num_classes(), 4);
    assert_eq!(scores.row(0), &[0.7, 0.1, 0.1, 0.1]);
    assert_eq!(scores.row(1), &[0.25, 0.25, 0.25, 0.25]);
    assert_eq!(
        scores.class_names,
        vec!["background", "car", "pedestrian", "bicyclist"]
    );
}

#[test]
fn golden_labels_decode_including_max_class() {
    let labels = formats::read_labels(&fixture("golden.plbl")).unwrap();
    assert_eq!(labels.as_slice(), &[0, 1, 2, 3, 255]);
}

#[test]
fn golden_range_image_decodes_one_filled_pixel() {
    let record = formats::read_range_image(&fixture("golden.rimg")).unwrap();
    assert_eq!((record.height, record.width), (1, 2));
    // Planes: depth, intensity, x, y, z; point 7 fills pixel 0 at range 5.
    assert_eq!(
        record.channels,
        vec![5.0, 0.0, 0.5, 0.0, 3.0, 0.0, 4.0, 0.0, 0.0, 0.0]
    );
    assert_eq!(record.pixel_to_point, vec![7, -1]);
}

#[test]
fn golden_poses_decode_identity_and_yawed_translation() {
    let poses = formats::read_pose_file(&fixture("golden_poses.txt")).unwrap();
    assert_eq!(poses.len(), 2);
    assert_eq!(poses[0], lts_core::Pose::identity());
    let p = &poses[1];
    assert_eq!(p.translation, nalgebra::Vector3::new(2.5, -1.25, 0.5));
    // Rotation row-major (0 -1 0 / 1 0 0 / 0 0 1): a 90° yaw.
    assert_eq!(p.rotation[(0, 1)], -1.0);
    assert_eq!(p.rotation[(1, 0)], 1.0);
    assert_eq!(p.rotation[(2, 2)], 1.0);
}

//! Write∘read identity for every format pair, over random payloads.

use lts_core::formats::{self, RangeImageRecord};
use lts_core::types::{ClassScores, LabelVector, Point, PointCloud, Pose};
use nalgebra::{Rotation3, Vector3};
use proptest::prelude::*;

fn finite_coord() -> impl Strategy<Value = f32> {
    -120.0f32..120.0
}

fn point_strategy() -> impl Strategy<Value = Point> {
    (finite_coord(), finite_coord(), finite_coord(), 0.0f32..=1.0)
        .prop_map(|(x, y, z, intensity)| Point::new(x, y, z, intensity))
}

fn cloud_strategy() -> impl Strategy<Value = PointCloud> {
    prop::collection::vec(point_strategy(), 0..200).prop_map(|points| PointCloud::new(points, 0))
}

fn pose_strategy() -> impl Strategy<Value = Pose> {
    (
        -3.1f64..3.1,
        -1.5f64..1.5,
        -3.1f64..3.1,
        prop::array::uniform3(-100.0f64..100.0),
    )
        .prop_map(|(roll, pitch, yaw, t)| {
            let rotation = Rotation3::from_euler_angles(roll, pitch, yaw);
            Pose::validated(rotation.into_inner(), Vector3::from(t), Pose::STRICT_TOL).unwrap()
        })
}

fn scores_strategy() -> impl Strategy<Value = ClassScores> {
    (2usize..8, 0usize..60).prop_flat_map(|(classes, points)| {
        prop::collection::vec(prop::collection::vec(1e-4f64..1.0, classes), points).prop_map(
            move |rows| {
                let mut flat = Vec::with_capacity(rows.len() * classes);
                for row in rows {
                    let sum: f64 = row.iter().sum();
                    flat.extend(row.iter().map(|w| (w / sum) as f32));
                }
                ClassScores::new(flat, classes, ClassScores::default_names(classes)).unwrap()
            },
        )
    })
}

fn record_strategy() -> impl Strategy<Value = RangeImageRecord> {
    (1u32..6, 1u32..9).prop_flat_map(|(h, w)| {
        let pixels = (h * w) as usize;
        (
            prop::collection::vec(-1000.0f32..1000.0, pixels * 5),
            prop::collection::vec(-1i32..40, pixels),
        )
            .prop_map(move |(channels, pixel_to_point)| RangeImageRecord {
                height: h,
                width: w,
                channels,
                pixel_to_point,
            })
    })
}

proptest! {
    #[test]
    fn velodyne_roundtrips(cloud in cloud_strategy()) {
        let bytes = formats::encode_velodyne(&cloud);
        let (decoded, clamped) = formats::decode_velodyne(&bytes).unwrap();
        prop_assert_eq!(decoded.points, cloud.points);
        prop_assert_eq!(clamped, 0);
    }

    #[test]
    fn poses_roundtrip_through_text(poses in prop::collection::vec(pose_strategy(), 0..12)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("poses.txt");
        formats::write_pose_file(&poses, &path).unwrap();
        let read = formats::read_pose_file(&path).unwrap();
        prop_assert_eq!(read, poses);
    }

    #[test]
    fn scores_roundtrip(scores in scores_strategy()) {
        let bytes = formats::encode_scores(&scores);
        let decoded = formats::decode_scores(&bytes).unwrap();
        prop_assert_eq!(decoded.raw(), scores.raw());
        prop_assert_eq!(decoded.num_classes(), scores.num_classes());
    }

    #[test]
    fn labels_roundtrip(labels in prop::collection::vec(any::<u8>(), 0..300)) {
        let labels = LabelVector(labels);
        let bytes = formats::encode_labels(&labels);
        prop_assert_eq!(formats::decode_labels(&bytes).unwrap(), labels);
    }

    #[test]
    fn range_images_roundtrip(record in record_strategy()) {
        let bytes = formats::encode_range_image(&record);
        prop_assert_eq!(formats::decode_range_image(&bytes).unwrap(), record);
    }
}

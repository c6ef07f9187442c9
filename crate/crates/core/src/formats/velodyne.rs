//! KITTI Velodyne `.bin` scans: packed little-endian `f32` quadruples
//! (x, y, z, intensity), no header.

use super::{push_f32_le, read_file, write_file, FormatError};
use crate::types::{Point, PointCloud};
use std::path::Path;

pub const POINT_RECORD_BYTES: usize = 16;

/// Read one scan. Intensities outside [0, 1] are clamped; a warning with
/// the clamp count is logged.
pub fn read_velodyne_bin(path: &Path) -> Result<PointCloud, FormatError> {
    let bytes = read_file(path)?;
    let (cloud, clamped) = decode_velodyne(&bytes)?;
    if clamped > 0 {
        log::warn!(
            "{}: clamped {clamped} intensity value(s) into [0, 1]",
            path.display()
        );
    }
    Ok(cloud)
}

/// Decode scan bytes, returning the cloud and the number of intensity
/// values that had to be clamped into [0, 1].
pub fn decode_velodyne(bytes: &[u8]) -> Result<(PointCloud, usize), FormatError> {
    if !bytes.len().is_multiple_of(POINT_RECORD_BYTES) {
        return Err(FormatError::MalformedScanFile {
            bytes: bytes.len() as u64,
            record: POINT_RECORD_BYTES,
        });
    }
    let mut points = Vec::with_capacity(bytes.len() / POINT_RECORD_BYTES);
    let mut clamped = 0usize;
    for (index, record) in bytes.chunks_exact(POINT_RECORD_BYTES).enumerate() {
        let field = |k: usize| f32::from_le_bytes(record[4 * k..4 * k + 4].try_into().unwrap());
        let (x, y, z) = (field(0), field(1), field(2));
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(FormatError::MalformedPoint { index });
        }
        let mut intensity = field(3);
        if !intensity.is_finite() {
            intensity = 0.0;
            clamped += 1;
        } else if !(0.0..=1.0).contains(&intensity) {
            intensity = intensity.clamp(0.0, 1.0);
            clamped += 1;
        }
        points.push(Point::new(x, y, z, intensity));
    }
    Ok((PointCloud::new(points, 0), clamped))
}

pub fn write_velodyne_bin(cloud: &PointCloud, path: &Path) -> Result<(), FormatError> {
    write_file(path, &encode_velodyne(cloud))
}

pub fn encode_velodyne(cloud: &PointCloud) -> Vec<u8> {
    let mut out = Vec::with_capacity(cloud.len() * POINT_RECORD_BYTES);
    for p in &cloud.points {
        push_f32_le(&mut out, p.x);
        push_f32_le(&mut out, p.y);
        push_f32_le(&mut out, p.z);
        push_f32_le(&mut out, p.intensity);
    }
    out
}

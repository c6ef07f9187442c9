//! Readers and writers for the on-disk formats: KITTI Velodyne scans,
//! pose text files, score containers (`PSCR`), label containers (`PLBL`)
//! and range-image dumps (`RIMG`).
//!
//! All binary payloads are little-endian. Readers validate header-declared
//! sizes against the actual byte count before allocating, so a corrupt
//! header can never trigger an allocation larger than the file itself.

mod labels;
mod poses;
mod range_image;
mod scores;
mod velodyne;

pub use labels::{decode_labels, encode_labels, read_labels, write_labels};
pub use poses::{parse_poses, read_pose_file, write_pose_file};
pub use range_image::{
    decode_range_image, encode_range_image, read_range_image, write_range_image, RangeImageRecord,
    RIMG_MAGIC,
};
pub use scores::{decode_scores, encode_scores, read_scores, write_scores, SCORES_MAGIC};
pub use velodyne::{
    decode_velodyne, encode_velodyne, read_velodyne_bin, write_velodyne_bin, POINT_RECORD_BYTES,
};

use crate::types::DomainError;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("scan file holds {bytes} bytes, not a multiple of the {record}-byte point record")]
    MalformedScanFile { bytes: u64, record: usize },
    #[error("point {index} has a non-finite coordinate")]
    MalformedPoint { index: usize },
    #[error("line {line}: expected {expected} pose values, found {found}")]
    PoseTokenCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: unparseable value {token:?}")]
    PoseNumber { line: usize, token: String },
    #[error("line {line}: {source}")]
    PoseValidation { line: usize, source: DomainError },
    #[error("bad magic: expected {expected:?}")]
    BadMagic { expected: &'static str },
    #[error("unsupported version {found}, expected {expected}")]
    BadVersion { found: u32, expected: u32 },
    #[error("header claims {claimed} payload bytes but {present} are present")]
    PayloadSize { claimed: u64, present: u64 },
    #[error("truncated input: needed {needed} more bytes, {available} available")]
    Truncated { needed: usize, available: usize },
    #[error("score row {row} sums to {sum:.6}, beyond {tol} of 1")]
    InvalidDistribution { row: usize, sum: f64, tol: f64 },
    #[error("score entry ({row}, {col}) = {value} outside [0, 1]")]
    ScoreRange { row: usize, col: usize, value: f32 },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

impl FormatError {
    fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Little-endian cursor over a byte slice.
struct ByteReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    fn remaining(&self) -> usize {
        self.data.len() - self.pos
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], FormatError> {
        if self.remaining() < n {
            return Err(FormatError::Truncated {
                needed: n,
                available: self.remaining(),
            });
        }
        let out = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn magic(&mut self, expected: &'static str) -> Result<(), FormatError> {
        let got = self
            .take(4)
            .map_err(|_| FormatError::BadMagic { expected })?;
        if got != expected.as_bytes() {
            return Err(FormatError::BadMagic { expected });
        }
        Ok(())
    }

    fn version(&mut self, expected: u32) -> Result<(), FormatError> {
        let found = self.u32_le()?;
        if found != expected {
            return Err(FormatError::BadVersion { found, expected });
        }
        Ok(())
    }

    fn u32_le(&mut self) -> Result<u32, FormatError> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn f32_le(&mut self) -> Result<f32, FormatError> {
        Ok(f32::from_bits(self.u32_le()?))
    }

    fn i32_le(&mut self) -> Result<i32, FormatError> {
        Ok(self.u32_le()? as i32)
    }

    /// Check that exactly `claimed` payload bytes remain.
    fn expect_payload(&self, claimed: u64) -> Result<(), FormatError> {
        if self.remaining() as u64 != claimed {
            return Err(FormatError::PayloadSize {
                claimed,
                present: self.remaining() as u64,
            });
        }
        Ok(())
    }
}

fn push_u32_le(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn push_f32_le(out: &mut Vec<u8>, v: f32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn push_i32_le(out: &mut Vec<u8>, v: i32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn read_file(path: &std::path::Path) -> Result<Vec<u8>, FormatError> {
    std::fs::read(path).map_err(|e| FormatError::io(path, e))
}

fn write_file(path: &std::path::Path, bytes: &[u8]) -> Result<(), FormatError> {
    std::fs::write(path, bytes).map_err(|e| FormatError::io(path, e))
}

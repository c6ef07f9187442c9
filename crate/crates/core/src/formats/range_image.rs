//! `RIMG` range-image dumps: magic `RIMG`, version u32 = 1, H u32, W u32,
//! five H·W float32 channel planes row-major (depth, intensity, x, y, z),
//! then H·W i32 pixel-to-point indices (−1 = empty pixel).

use super::{
    push_f32_le, push_i32_le, push_u32_le, read_file, write_file, ByteReader, FormatError,
};
use std::path::Path;

pub const RIMG_MAGIC: &str = "RIMG";
pub const RIMG_VERSION: u32 = 1;
pub const RIMG_CHANNELS: usize = 5;

/// Serializable payload of a projected range image.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeImageRecord {
    pub height: u32,
    pub width: u32,
    /// Five planes of `height * width` values each.
    pub channels: Vec<f32>,
    /// `height * width` entries; −1 marks an empty pixel.
    pub pixel_to_point: Vec<i32>,
}

pub fn read_range_image(path: &Path) -> Result<RangeImageRecord, FormatError> {
    decode_range_image(&read_file(path)?)
}

pub fn decode_range_image(bytes: &[u8]) -> Result<RangeImageRecord, FormatError> {
    let mut r = ByteReader::new(bytes);
    r.magic(RIMG_MAGIC)?;
    r.version(RIMG_VERSION)?;
    let height = r.u32_le()?;
    let width = r.u32_le()?;
    let pixels = (height as u64) * (width as u64);
    let claimed =
        pixels
            .checked_mul((RIMG_CHANNELS as u64 + 1) * 4)
            .ok_or(FormatError::PayloadSize {
                claimed: u64::MAX,
                present: r.remaining() as u64,
            })?;
    r.expect_payload(claimed)?;

    let cells = (pixels as usize) * RIMG_CHANNELS;
    let mut channels = Vec::with_capacity(cells);
    for _ in 0..cells {
        channels.push(r.f32_le()?);
    }
    let mut pixel_to_point = Vec::with_capacity(pixels as usize);
    for _ in 0..pixels {
        pixel_to_point.push(r.i32_le()?);
    }
    Ok(RangeImageRecord {
        height,
        width,
        channels,
        pixel_to_point,
    })
}

pub fn write_range_image(record: &RangeImageRecord, path: &Path) -> Result<(), FormatError> {
    write_file(path, &encode_range_image(record))
}

pub fn encode_range_image(record: &RangeImageRecord) -> Vec<u8> {
    let mut out =
        Vec::with_capacity(16 + record.channels.len() * 4 + record.pixel_to_point.len() * 4);
    out.extend_from_slice(RIMG_MAGIC.as_bytes());
    push_u32_le(&mut out, RIMG_VERSION);
    push_u32_le(&mut out, record.height);
    push_u32_le(&mut out, record.width);
    for &v in &record.channels {
        push_f32_le(&mut out, v);
    }
    for &v in &record.pixel_to_point {
        push_i32_le(&mut out, v);
    }
    out
}

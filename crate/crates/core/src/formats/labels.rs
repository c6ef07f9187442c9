//! `PLBL` label containers: magic `PLBL`, version u32 = 1, point count N
//! u32, then N label bytes.

use super::{push_u32_le, read_file, write_file, ByteReader, FormatError};
use crate::types::LabelVector;
use std::path::Path;

pub const LABELS_MAGIC: &str = "PLBL";
pub const LABELS_VERSION: u32 = 1;

pub fn read_labels(path: &Path) -> Result<LabelVector, FormatError> {
    decode_labels(&read_file(path)?)
}

pub fn decode_labels(bytes: &[u8]) -> Result<LabelVector, FormatError> {
    let mut r = ByteReader::new(bytes);
    r.magic(LABELS_MAGIC)?;
    r.version(LABELS_VERSION)?;
    let n = r.u32_le()? as u64;
    r.expect_payload(n)?;
    Ok(LabelVector(r.take(n as usize)?.to_vec()))
}

pub fn write_labels(labels: &LabelVector, path: &Path) -> Result<(), FormatError> {
    write_file(path, &encode_labels(labels))
}

pub fn encode_labels(labels: &LabelVector) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + labels.len());
    out.extend_from_slice(LABELS_MAGIC.as_bytes());
    push_u32_le(&mut out, LABELS_VERSION);
    push_u32_le(&mut out, labels.len() as u32);
    out.extend_from_slice(labels.as_slice());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrips_four_labels_behind_the_12_byte_header() {
        let labels = LabelVector(vec![0, 1, 2, 3]);
        let bytes = encode_labels(&labels);
        assert_eq!(bytes.len(), 12 + 4);
        assert_eq!(decode_labels(&bytes).unwrap(), labels);
    }

    #[test]
    fn roundtrips_empty_vector() {
        let labels = LabelVector(vec![]);
        let bytes = encode_labels(&labels);
        assert_eq!(decode_labels(&bytes).unwrap(), labels);
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let mut bytes = encode_labels(&LabelVector(vec![1; 10]));
        bytes.truncate(12 + 5);
        let err = decode_labels(&bytes).unwrap_err();
        assert!(matches!(
            err,
            FormatError::PayloadSize {
                claimed: 10,
                present: 5
            }
        ));
    }

    #[test]
    fn bad_magic_is_rejected() {
        let mut bytes = encode_labels(&LabelVector(vec![1, 2]));
        bytes[3] = b'?';
        assert!(matches!(
            decode_labels(&bytes),
            Err(FormatError::BadMagic { .. })
        ));
    }
}

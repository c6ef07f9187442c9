//! `PSCR` score containers: per-point class probability rows.
//!
//! Layout: magic `PSCR`, version u32 = 1, point count N u32, class count
//! C u32, then N·C little-endian f32 row-major.

use super::{push_f32_le, push_u32_le, read_file, write_file, ByteReader, FormatError};
use crate::types::{ClassScores, SCORE_ROW_SUM_TOL};
use std::path::Path;

pub const SCORES_MAGIC: &str = "PSCR";
pub const SCORES_VERSION: u32 = 1;

/// Row sums may deviate this far from 1 before the row is rejected;
/// deviations above [`SCORE_ROW_SUM_TOL`] but inside this bound are
/// renormalized. Absorbs float32 softmax rounding without masking real
/// corruption.
pub const ROW_SUM_RENORM_TOL: f64 = 1e-3;

/// Entries may undershoot 0 or overshoot 1 by this much (float dust from
/// foreign writers); they are clamped into [0, 1].
const ENTRY_SLACK: f32 = 1e-6;

pub fn read_scores(path: &Path) -> Result<ClassScores, FormatError> {
    decode_scores(&read_file(path)?)
}

pub fn decode_scores(bytes: &[u8]) -> Result<ClassScores, FormatError> {
    let mut r = ByteReader::new(bytes);
    r.magic(SCORES_MAGIC)?;
    r.version(SCORES_VERSION)?;
    let n = r.u32_le()? as u64;
    let c = r.u32_le()? as u64;
    if c == 0 || c as usize > crate::types::MAX_CLASSES {
        return Err(FormatError::Domain(
            crate::types::DomainError::ScoresShape {
                len: r.remaining() / 4,
                classes: c as usize,
            },
        ));
    }
    // Validate the claimed payload against the real byte count before any
    // allocation, so a corrupt N·C cannot drive memory use.
    let claimed = n
        .checked_mul(c)
        .and_then(|cells| cells.checked_mul(4))
        .ok_or(FormatError::PayloadSize {
            claimed: u64::MAX,
            present: r.remaining() as u64,
        })?;
    r.expect_payload(claimed)?;

    let (n, c) = (n as usize, c as usize);
    let mut scores = Vec::with_capacity(n * c);
    for row in 0..n {
        let mut sum = 0.0f64;
        let start = scores.len();
        for col in 0..c {
            let raw = r.f32_le()?;
            // NaN and infinities fall outside the range too.
            if !(-ENTRY_SLACK..=1.0 + ENTRY_SLACK).contains(&raw) {
                return Err(FormatError::ScoreRange {
                    row,
                    col,
                    value: raw,
                });
            }
            let value = raw.clamp(0.0, 1.0);
            sum += value as f64;
            scores.push(value);
        }
        let deviation = (sum - 1.0).abs();
        if deviation > ROW_SUM_RENORM_TOL {
            return Err(FormatError::InvalidDistribution {
                row,
                sum,
                tol: ROW_SUM_RENORM_TOL,
            });
        }
        // Rows already inside the strict tolerance pass through bit-exact;
        // only drifted rows are rescaled.
        if deviation > SCORE_ROW_SUM_TOL {
            for value in &mut scores[start..] {
                *value = (*value as f64 / sum) as f32;
            }
        }
    }
    let names = ClassScores::default_names(c);
    Ok(ClassScores::new(scores, c, names)?)
}

pub fn write_scores(scores: &ClassScores, path: &Path) -> Result<(), FormatError> {
    write_file(path, &encode_scores(scores))
}

pub fn encode_scores(scores: &ClassScores) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + scores.raw().len() * 4);
    out.extend_from_slice(SCORES_MAGIC.as_bytes());
    push_u32_le(&mut out, SCORES_VERSION);
    push_u32_le(&mut out, scores.num_points() as u32);
    push_u32_le(&mut out, scores.num_classes() as u32);
    for &v in scores.raw() {
        push_f32_le(&mut out, v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file_with_rows(c: u32, rows: &[&[f32]]) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"PSCR");
        push_u32_le(&mut out, SCORES_VERSION);
        push_u32_le(&mut out, rows.len() as u32);
        push_u32_le(&mut out, c);
        for row in rows {
            for &v in *row {
                push_f32_le(&mut out, v);
            }
        }
        out
    }

    #[test]
    fn uniform_row_decodes() {
        let bytes = file_with_rows(4, &[&[0.25, 0.25, 0.25, 0.25]]);
        let scores = decode_scores(&bytes).unwrap();
        assert_eq!(scores.num_points(), 1);
        assert_eq!(scores.num_classes(), 4);
        assert_eq!(scores.row(0), &[0.25, 0.25, 0.25, 0.25]);
        assert_eq!(scores.class_names[1], "car");
    }

    #[test]
    fn valid_row_passes_through_unchanged() {
        let bytes = file_with_rows(4, &[&[0.7, 0.1, 0.1, 0.1]]);
        let scores = decode_scores(&bytes).unwrap();
        assert_eq!(scores.row(0), &[0.7, 0.1, 0.1, 0.1]);
    }

    #[test]
    fn rejects_row_summing_to_two() {
        let bytes = file_with_rows(4, &[&[0.9, 0.9, 0.1, 0.1]]);
        let err = decode_scores(&bytes).unwrap_err();
        assert!(matches!(
            err,
            FormatError::InvalidDistribution { row: 0, .. }
        ));
    }

    #[test]
    fn renormalizes_slightly_drifted_row() {
        let bytes = file_with_rows(2, &[&[0.5002, 0.5002]]);
        let scores = decode_scores(&bytes).unwrap();
        let sum: f64 = scores.row(0).iter().map(|&v| v as f64).sum();
        assert!((sum - 1.0).abs() < SCORE_ROW_SUM_TOL);
    }

    #[test]
    fn rejects_negative_entry() {
        let bytes = file_with_rows(2, &[&[1.1, -0.1]]);
        let err = decode_scores(&bytes).unwrap_err();
        assert!(matches!(
            err,
            FormatError::ScoreRange { row: 0, col: 0, .. }
        ));
    }

    #[test]
    fn rejects_bad_magic_and_version() {
        let mut bytes = file_with_rows(2, &[&[0.5, 0.5]]);
        bytes[0] = b'X';
        assert!(matches!(
            decode_scores(&bytes),
            Err(FormatError::BadMagic { .. })
        ));
        let mut bytes = file_with_rows(2, &[&[0.5, 0.5]]);
        bytes[4] = 9;
        assert!(matches!(
            decode_scores(&bytes),
            Err(FormatError::BadVersion { found: 9, .. })
        ));
    }

    fn header_only(n: u32, c: u32) -> Vec<u8> {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"PSCR");
        push_u32_le(&mut bytes, SCORES_VERSION);
        push_u32_le(&mut bytes, n);
        push_u32_le(&mut bytes, c);
        bytes
    }

    #[test]
    fn corrupt_counts_fail_before_allocation() {
        // A huge claimed N with no payload behind it.
        let err = decode_scores(&header_only(u32::MAX, 4)).unwrap_err();
        assert!(matches!(err, FormatError::PayloadSize { .. }));

        // Class counts beyond the u8 label encoding, or zero.
        for c in [u32::MAX, 0] {
            let err = decode_scores(&header_only(1, c)).unwrap_err();
            assert!(matches!(err, FormatError::Domain(_)), "c = {c}: {err:?}");
        }
    }
}

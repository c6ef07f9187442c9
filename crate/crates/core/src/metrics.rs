//! Confusion-matrix accumulation and class-wise / mean IoU reporting.
//!
//! Classes with no ground-truth and no predicted points are reported as
//! absent (a dash) and excluded from the mean. Background (class 0) joins
//! the matrix but is left out of the mean unless explicitly included.

use crate::types::LabelVector;
use std::fmt;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("ground truth has {gt} labels, prediction has {pred}")]
    LengthMismatch { gt: usize, pred: usize },
    #[error("label {label} at point {index} exceeds {classes} classes")]
    LabelOutOfRange {
        index: usize,
        label: u8,
        classes: usize,
    },
    #[error("{names} class names given for a {classes}-class matrix")]
    ClassCountMismatch { classes: usize, names: usize },
    #[error("cannot merge a {a}-class matrix into a {b}-class matrix")]
    MergeSizeMismatch { a: usize, b: usize },
    #[error("reports cover different class sets")]
    ClassSetMismatch,
    #[error("report line {line}: {reason}")]
    ReportParse { line: usize, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// C×C counts; rows index ground truth, columns index prediction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: Vec<u64>,
    num_classes: usize,
}

impl ConfusionMatrix {
    pub fn new(num_classes: usize) -> Self {
        Self {
            counts: vec![0; num_classes * num_classes],
            num_classes,
        }
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn count(&self, gt: usize, pred: usize) -> u64 {
        self.counts[gt * self.num_classes + pred]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Count one scan's labels into the matrix.
    pub fn accumulate(&mut self, gt: &LabelVector, pred: &LabelVector) -> Result<(), MetricsError> {
        if gt.len() != pred.len() {
            return Err(MetricsError::LengthMismatch {
                gt: gt.len(),
                pred: pred.len(),
            });
        }
        let c = self.num_classes;
        for (index, (&g, &p)) in gt.as_slice().iter().zip(pred.as_slice()).enumerate() {
            for label in [g, p] {
                if label as usize >= c {
                    return Err(MetricsError::LabelOutOfRange {
                        index,
                        label,
                        classes: c,
                    });
                }
            }
            self.counts[g as usize * c + p as usize] += 1;
        }
        Ok(())
    }

    /// Entry-wise sum; per-scan matrices merge into a sequence matrix.
    pub fn merge(&mut self, other: &ConfusionMatrix) -> Result<(), MetricsError> {
        if self.num_classes != other.num_classes {
            return Err(MetricsError::MergeSizeMismatch {
                a: other.num_classes,
                b: self.num_classes,
            });
        }
        for (dst, src) in self.counts.iter_mut().zip(&other.counts) {
            *dst += src;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassIoU {
    pub name: String,
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    /// None when the class never occurs in ground truth or prediction.
    pub iou: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IoUReport {
    pub classes: Vec<ClassIoU>,
    /// Mean over present classes (background excluded unless requested);
    /// None when no class qualifies.
    pub mean_iou: Option<f64>,
}

/// Derive per-class IoU from a confusion matrix. `include_background`
/// controls whether class 0 joins the mean.
pub fn iou_report(
    cm: &ConfusionMatrix,
    class_names: &[String],
    include_background: bool,
) -> Result<IoUReport, MetricsError> {
    let c = cm.num_classes();
    if class_names.len() != c {
        return Err(MetricsError::ClassCountMismatch {
            classes: c,
            names: class_names.len(),
        });
    }
    let mut classes = Vec::with_capacity(c);
    for (k, name) in class_names.iter().enumerate() {
        let tp = cm.count(k, k);
        let fp = (0..c).map(|g| cm.count(g, k)).sum::<u64>() - tp;
        let fn_ = (0..c).map(|p| cm.count(k, p)).sum::<u64>() - tp;
        let denom = tp + fp + fn_;
        let iou = (denom > 0).then(|| tp as f64 / denom as f64);
        classes.push(ClassIoU {
            name: name.clone(),
            true_positives: tp,
            false_positives: fp,
            false_negatives: fn_,
            iou,
        });
    }
    let mean_iou = mean_over_present(&classes, include_background);
    Ok(IoUReport { classes, mean_iou })
}

fn mean_over_present(classes: &[ClassIoU], include_background: bool) -> Option<f64> {
    let considered: Vec<f64> = classes
        .iter()
        .enumerate()
        .filter(|(k, _)| include_background || *k != 0)
        .filter_map(|(_, c)| c.iou)
        .collect();
    if considered.is_empty() {
        None
    } else {
        Some(considered.iter().sum::<f64>() / considered.len() as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassDelta {
    pub name: String,
    /// None when the class is absent in either report.
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaReport {
    pub classes: Vec<ClassDelta>,
    pub mean_delta: Option<f64>,
}

/// Per-class IoU change from report `a` to report `b` (positive = better
/// in `b`). Classes absent in either report are carried without a delta.
pub fn compare_reports(a: &IoUReport, b: &IoUReport) -> Result<DeltaReport, MetricsError> {
    if a.classes.len() != b.classes.len()
        || a.classes
            .iter()
            .zip(&b.classes)
            .any(|(x, y)| x.name != y.name)
    {
        return Err(MetricsError::ClassSetMismatch);
    }
    let classes = a
        .classes
        .iter()
        .zip(&b.classes)
        .map(|(x, y)| ClassDelta {
            name: x.name.clone(),
            delta: match (x.iou, y.iou) {
                (Some(xa), Some(yb)) => Some(yb - xa),
                _ => None,
            },
        })
        .collect();
    let mean_delta = match (a.mean_iou, b.mean_iou) {
        (Some(ma), Some(mb)) => Some(mb - ma),
        _ => None,
    };
    Ok(DeltaReport {
        classes,
        mean_delta,
    })
}

const REPORT_HEADER: &str = "class,tp,fp,fn,iou";

/// Write the machine-readable report: a `class,tp,fp,fn,iou` line per
/// class (dash for absent IoU) and a final `mean_iou,,,,value` line.
pub fn write_report(report: &IoUReport, path: &Path) -> Result<(), MetricsError> {
    let mut text = String::from(REPORT_HEADER);
    text.push('\n');
    for class in &report.classes {
        let iou = match class.iou {
            Some(v) => format!("{v:.6}"),
            None => "-".to_string(),
        };
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            class.name, class.true_positives, class.false_positives, class.false_negatives, iou
        ));
    }
    let mean = match report.mean_iou {
        Some(v) => format!("{v:.6}"),
        None => "-".to_string(),
    };
    text.push_str(&format!("mean_iou,,,,{mean}\n"));
    std::fs::write(path, text).map_err(|source| MetricsError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_report(path: &Path) -> Result<IoUReport, MetricsError> {
    let text = std::fs::read_to_string(path).map_err(|source| MetricsError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_report(&text)
}

pub fn parse_report(text: &str) -> Result<IoUReport, MetricsError> {
    let parse_iou = |field: &str, line: usize| -> Result<Option<f64>, MetricsError> {
        if field == "-" {
            return Ok(None);
        }
        field
            .parse()
            .map(Some)
            .map_err(|_| MetricsError::ReportParse {
                line,
                reason: format!("bad iou value {field:?}"),
            })
    };
    let mut classes = Vec::new();
    let mut mean_iou = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() || (line == 1 && raw == REPORT_HEADER) {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 5 {
            return Err(MetricsError::ReportParse {
                line,
                reason: format!("expected 5 fields, found {}", fields.len()),
            });
        }
        if fields[0] == "mean_iou" {
            mean_iou = parse_iou(fields[4], line)?;
            continue;
        }
        let count = |field: &str| -> Result<u64, MetricsError> {
            field.parse().map_err(|_| MetricsError::ReportParse {
                line,
                reason: format!("bad count {field:?}"),
            })
        };
        classes.push(ClassIoU {
            name: fields[0].to_string(),
            true_positives: count(fields[1])?,
            false_positives: count(fields[2])?,
            false_negatives: count(fields[3])?,
            iou: parse_iou(fields[4], line)?,
        });
    }
    Ok(IoUReport { classes, mean_iou })
}

impl fmt::Display for IoUReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<14} {:>10} {:>10} {:>10} {:>8}",
            "class", "tp", "fp", "fn", "iou%"
        )?;
        for class in &self.classes {
            let iou = match class.iou {
                Some(v) => format!("{:.1}", v * 100.0),
                None => "-".to_string(),
            };
            writeln!(
                f,
                "{:<14} {:>10} {:>10} {:>10} {:>8}",
                class.name, class.true_positives, class.false_positives, class.false_negatives, iou
            )?;
        }
        let mean = match self.mean_iou {
            Some(v) => format!("{:.1}", v * 100.0),
            None => "-".to_string(),
        };
        write!(f, "{:<14} {:>41}", "mean", mean)
    }
}

impl fmt::Display for DeltaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<14} {:>8}", "class", "Δiou%")?;
        for class in &self.classes {
            let delta = match class.delta {
                Some(v) => format!("{:+.1}", v * 100.0),
                None => "-".to_string(),
            };
            writeln!(f, "{:<14} {:>8}", class.name, delta)?;
        }
        let mean = match self.mean_delta {
            Some(v) => format!("{:+.1}", v * 100.0),
            None => "-".to_string(),
        };
        write!(f, "{:<14} {:>8}", "mean", mean)
    }
}

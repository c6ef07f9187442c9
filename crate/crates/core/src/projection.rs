//! Spherical projection of a scan onto a five-channel range image
//! (depth, intensity, x, y, z) and exact back-projection of per-pixel
//! labels to per-point labels.

use crate::formats::RangeImageRecord;
use crate::types::{LabelVector, PointCloud};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ProjectionError {
    #[error("invalid projection config: {reason}")]
    InvalidConfig { reason: String },
    #[error("label image holds {found} entries, image needs {expected}")]
    LabelDimensions { expected: usize, found: usize },
}

/// Channel order within the image and the `RIMG` dump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Depth = 0,
    Intensity = 1,
    X = 2,
    Y = 3,
    Z = 4,
}

pub const NUM_CHANNELS: usize = 5;

/// Projection geometry. Defaults cover the frontal crop of a HDL-64E:
/// 64×512 pixels, azimuth ±45°, elevation −24.8°..+2.0°.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionConfig {
    pub height: usize,
    pub width: usize,
    /// (min, max) azimuth in radians; azimuth = atan2(y, x).
    pub azimuth_fov: (f64, f64),
    /// (min, max) elevation in radians; elevation = asin(z / r).
    pub elevation_fov: (f64, f64),
}

impl Default for ProjectionConfig {
    fn default() -> Self {
        Self {
            height: 64,
            width: 512,
            azimuth_fov: (-45f64.to_radians(), 45f64.to_radians()),
            elevation_fov: (-24.8f64.to_radians(), 2.0f64.to_radians()),
        }
    }
}

impl ProjectionConfig {
    pub fn with_size(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ProjectionError> {
        let fail = |reason: &str| {
            Err(ProjectionError::InvalidConfig {
                reason: reason.to_string(),
            })
        };
        if self.height == 0 || self.width == 0 {
            return fail("height and width must be at least 1");
        }
        for (lo, hi) in [self.azimuth_fov, self.elevation_fov] {
            if !(lo.is_finite() && hi.is_finite()) {
                return fail("field of view bounds must be finite");
            }
            if lo >= hi {
                return fail("field of view min must be below max");
            }
        }
        Ok(())
    }
}

/// Where a point landed during projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointProjection {
    /// The point owns this pixel.
    Pixel { row: usize, col: usize },
    /// Outside the configured field of view (or at the exact origin).
    OutOfFov,
    /// Landed on a pixel won by a nearer point.
    Occluded,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ProjectionStats {
    pub skipped_origin: usize,
    pub out_of_fov: usize,
    pub occluded: usize,
}

/// Projected scan: five channel planes, validity mask and the
/// point↔pixel maps in both directions.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeImage {
    pub height: usize,
    pub width: usize,
    /// `NUM_CHANNELS` planes of `height * width` values each.
    pub channels: Vec<f32>,
    pub valid: Vec<bool>,
    /// Winning point index per pixel, −1 where empty.
    pub pixel_to_point: Vec<i32>,
    pub point_to_pixel: Vec<PointProjection>,
    pub stats: ProjectionStats,
}

impl RangeImage {
    fn pixel_index(&self, row: usize, col: usize) -> usize {
        row * self.width + col
    }

    pub fn channel(&self, channel: Channel, row: usize, col: usize) -> f32 {
        let plane = channel as usize;
        self.channels[plane * self.height * self.width + self.pixel_index(row, col)]
    }

    pub fn plane(&self, channel: Channel) -> &[f32] {
        let size = self.height * self.width;
        let plane = channel as usize;
        &self.channels[plane * size..(plane + 1) * size]
    }

    pub fn is_valid(&self, row: usize, col: usize) -> bool {
        self.valid[self.pixel_index(row, col)]
    }

    /// Winning point index at a pixel, if any.
    pub fn point_at(&self, row: usize, col: usize) -> Option<usize> {
        match self.pixel_to_point[self.pixel_index(row, col)] {
            -1 => None,
            i => Some(i as usize),
        }
    }

    pub fn to_record(&self) -> RangeImageRecord {
        RangeImageRecord {
            height: self.height as u32,
            width: self.width as u32,
            channels: self.channels.clone(),
            pixel_to_point: self.pixel_to_point.clone(),
        }
    }
}

/// Spherical bin of one point, computed in f64.
///
/// Both field-of-view endpoints are inclusive; interior bin edges follow the
/// half-open convention, with the far endpoint joining the edge bin.
fn bin_point(az: f64, el: f64, cfg: &ProjectionConfig) -> Option<(usize, usize)> {
    let (az_min, az_max) = cfg.azimuth_fov;
    let (el_min, el_max) = cfg.elevation_fov;
    if az < az_min || az > az_max || el < el_min || el > el_max {
        return None;
    }
    let col = ((az - az_min) / (az_max - az_min) * cfg.width as f64) as usize;
    // Row 0 is the top of the image (maximum elevation).
    let row = ((el_max - el) / (el_max - el_min) * cfg.height as f64) as usize;
    Some((row.min(cfg.height - 1), col.min(cfg.width - 1)))
}

/// Project a scan. Pixel collisions are won by the smallest range; among
/// equal ranges the lowest point index wins. Empty pixels are zero-filled.
pub fn project(cloud: &PointCloud, cfg: &ProjectionConfig) -> Result<RangeImage, ProjectionError> {
    cfg.validate()?;
    let size = cfg.height * cfg.width;
    let mut stats = ProjectionStats::default();

    // Pass 1: bin every point.
    let mut bins: Vec<Option<(usize, usize, f64)>> = Vec::with_capacity(cloud.len());
    for p in &cloud.points {
        let r = p.range();
        if r == 0.0 {
            stats.skipped_origin += 1;
            bins.push(None);
            continue;
        }
        let az = (p.y as f64).atan2(p.x as f64);
        let el = (p.z as f64 / r).asin();
        bins.push(bin_point(az, el, cfg).map(|(row, col)| (row, col, r)));
    }

    // Pass 2: nearest point wins each pixel. Strict `<` over ascending
    // indices resolves range ties to the lowest point index.
    let mut winner: Vec<i32> = vec![-1; size];
    let mut winner_range: Vec<f64> = vec![f64::INFINITY; size];
    for (idx, bin) in bins.iter().enumerate() {
        if let Some((row, col, r)) = *bin {
            let px = row * cfg.width + col;
            if r < winner_range[px] {
                winner_range[px] = r;
                winner[px] = idx as i32;
            }
        }
    }

    // Pass 3: classify points and fill channels from the winners.
    let mut channels = vec![0.0f32; size * NUM_CHANNELS];
    let mut valid = vec![false; size];
    let mut point_to_pixel = Vec::with_capacity(cloud.len());
    for (idx, bin) in bins.iter().enumerate() {
        match *bin {
            None => {
                stats.out_of_fov += 1;
                point_to_pixel.push(PointProjection::OutOfFov);
            }
            Some((row, col, r)) => {
                let px = row * cfg.width + col;
                if winner[px] == idx as i32 {
                    let p = &cloud.points[idx];
                    valid[px] = true;
                    channels[px] = r as f32;
                    channels[size + px] = p.intensity;
                    channels[2 * size + px] = p.x;
                    channels[3 * size + px] = p.y;
                    channels[4 * size + px] = p.z;
                    point_to_pixel.push(PointProjection::Pixel { row, col });
                } else {
                    stats.occluded += 1;
                    point_to_pixel.push(PointProjection::Occluded);
                }
            }
        }
    }

    Ok(RangeImage {
        height: cfg.height,
        width: cfg.width,
        channels,
        valid,
        pixel_to_point: winner,
        point_to_pixel,
        stats,
    })
}

/// Transfer per-pixel labels back to the scan. Winning points take their
/// pixel's label; occluded and out-of-view points take `default_class`.
pub fn unproject_labels(
    image_labels: &[u8],
    img: &RangeImage,
    default_class: u8,
) -> Result<LabelVector, ProjectionError> {
    let expected = img.height * img.width;
    if image_labels.len() != expected {
        return Err(ProjectionError::LabelDimensions {
            expected,
            found: image_labels.len(),
        });
    }
    let labels = img
        .point_to_pixel
        .iter()
        .map(|proj| match proj {
            PointProjection::Pixel { row, col } => image_labels[row * img.width + col],
            _ => default_class,
        })
        .collect();
    Ok(LabelVector(labels))
}

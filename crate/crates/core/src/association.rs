//! Data association between consecutive scans: motion-align the previous
//! scan into the current frame, then match each current point to its
//! Euclidean-nearest previous point within a distance threshold.

use crate::types::{PointCloud, Pose};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AssociationError {
    #[error("association threshold must be positive and finite, got {value}")]
    InvalidThreshold { value: f64 },
    #[error("no pose available for scan {scan}")]
    MissingPose { scan: u64 },
}

/// A matched previous-scan point and the Euclidean distance to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMatch {
    pub prev_index: usize,
    pub distance: f64,
}

/// Per current-point match result. Many-to-one matching is allowed:
/// several current points may share one previous point.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Correspondence {
    pub pairs: Vec<Option<PointMatch>>,
}

impl Correspondence {
    pub fn all_unmatched(len: usize) -> Self {
        Self {
            pairs: vec![None; len],
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn matched_count(&self) -> usize {
        self.pairs.iter().filter(|p| p.is_some()).count()
    }
}

/// Source of the rigid transform that expresses scan `prev_id` points in
/// scan `curr_id`'s frame.
pub trait MotionProvider {
    fn relative_motion(&self, prev_id: u64, curr_id: u64) -> Result<Pose, AssociationError>;
}

/// No ego-motion: scans share one frame.
pub struct IdentityMotion;

impl MotionProvider for IdentityMotion {
    fn relative_motion(&self, _prev_id: u64, _curr_id: u64) -> Result<Pose, AssociationError> {
        Ok(Pose::identity())
    }
}

/// Ego-motion from a pose sequence indexed by scan id, each pose mapping
/// its scan's frame to a common world frame.
pub struct PoseSequenceMotion {
    poses: Vec<Pose>,
}

impl PoseSequenceMotion {
    pub fn new(poses: Vec<Pose>) -> Self {
        Self { poses }
    }

    fn pose(&self, scan: u64) -> Result<&Pose, AssociationError> {
        self.poses
            .get(scan as usize)
            .ok_or(AssociationError::MissingPose { scan })
    }
}

impl MotionProvider for PoseSequenceMotion {
    fn relative_motion(&self, prev_id: u64, curr_id: u64) -> Result<Pose, AssociationError> {
        let prev = self.pose(prev_id)?;
        let curr = self.pose(curr_id)?;
        Ok(curr.inverse().compose(prev))
    }
}

/// Match every current point to the nearest motion-aligned previous point.
///
/// Points farther than `max_dist` from every previous point stay unmatched.
/// Distance ties resolve to the smaller previous-point index. An empty
/// previous cloud yields all-unmatched, not an error.
pub fn associate(
    prev: &PointCloud,
    curr: &PointCloud,
    motion: &dyn MotionProvider,
    max_dist: f64,
) -> Result<Correspondence, AssociationError> {
    if max_dist <= 0.0 || !max_dist.is_finite() {
        return Err(AssociationError::InvalidThreshold { value: max_dist });
    }
    if prev.is_empty() || curr.is_empty() {
        return Ok(Correspondence::all_unmatched(curr.len()));
    }
    let transform = motion.relative_motion(prev.scan_id, curr.scan_id)?;
    let aligned: Vec<[f64; 3]> = prev
        .points
        .iter()
        .map(|p| {
            let v = transform.apply(p.position());
            [v.x, v.y, v.z]
        })
        .collect();

    let tree = KdTree::build(&aligned);
    let pairs = curr
        .points
        .iter()
        .map(|p| {
            let q = p.position();
            let (prev_index, d2) = tree.nearest([q.x, q.y, q.z]);
            let distance = d2.sqrt();
            (distance <= max_dist).then_some(PointMatch {
                prev_index,
                distance,
            })
        })
        .collect();
    Ok(Correspondence { pairs })
}

/// Deterministic 3D k-d tree over a fixed point set.
///
/// Nearest-neighbor queries resolve distance ties to the lowest original
/// point index, and never prune subtrees at exactly the best distance, so
/// results match an exhaustive scan with the same tie rule.
struct KdTree<'a> {
    points: &'a [[f64; 3]],
    nodes: Vec<KdNode>,
    root: i32,
}

struct KdNode {
    point: usize,
    axis: usize,
    left: i32,
    right: i32,
}

impl<'a> KdTree<'a> {
    fn build(points: &'a [[f64; 3]]) -> Self {
        let mut ids: Vec<usize> = (0..points.len()).collect();
        let mut tree = Self {
            points,
            nodes: Vec::with_capacity(points.len()),
            root: -1,
        };
        tree.root = tree.build_rec(&mut ids, 0);
        tree
    }

    fn build_rec(&mut self, ids: &mut [usize], depth: usize) -> i32 {
        if ids.is_empty() {
            return -1;
        }
        let axis = depth % 3;
        let mid = ids.len() / 2;
        ids.select_nth_unstable_by(mid, |&a, &b| {
            self.points[a][axis]
                .total_cmp(&self.points[b][axis])
                .then(a.cmp(&b))
        });
        let point = ids[mid];
        let node_id = self.nodes.len() as i32;
        self.nodes.push(KdNode {
            point,
            axis,
            left: -1,
            right: -1,
        });
        let (lo, hi) = ids.split_at_mut(mid);
        let left = self.build_rec(lo, depth + 1);
        let right = self.build_rec(&mut hi[1..], depth + 1);
        let node = &mut self.nodes[node_id as usize];
        node.left = left;
        node.right = right;
        node_id
    }

    /// Global nearest neighbor: (original index, squared distance).
    /// Panics on an empty tree; `associate` guards that case.
    fn nearest(&self, query: [f64; 3]) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        self.search(self.root, &query, &mut best);
        best
    }

    fn search(&self, node_id: i32, query: &[f64; 3], best: &mut (usize, f64)) {
        if node_id < 0 {
            return;
        }
        let node = &self.nodes[node_id as usize];
        let p = &self.points[node.point];
        let d2 = squared_distance(p, query);
        if d2 < best.1 || (d2 == best.1 && node.point < best.0) {
            *best = (node.point, d2);
        }
        let diff = query[node.axis] - p[node.axis];
        let (near, far) = if diff < 0.0 {
            (node.left, node.right)
        } else {
            (node.right, node.left)
        };
        self.search(near, query, best);
        // Non-strict bound keeps equal-distance candidates visible for the
        // index tie rule.
        if diff * diff <= best.1 {
            self.search(far, query, best);
        }
    }
}

fn squared_distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

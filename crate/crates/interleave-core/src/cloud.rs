//! Mapper construction from 2D point clouds with the height filter.
//!
//! The filter is the `y` coordinate. The cover is a uniform collection of
//! overlapping intervals; the clusterer is single linkage at a fixed radius.
//! Cluster levels are rescaled onto an integer grid `0..=resolution`; edges
//! whose endpoints land more than one level apart are subdivided with chain
//! vertices, and clusters that collapse onto the same level are merged, so
//! the result is always a well-formed mapper graph.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{GraphError, MapperGraph, UnionFind};
use crate::grid::Grid;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointCloud2D {
    pub points: Vec<[f64; 2]>,
}

impl PointCloud2D {
    pub fn new(points: Vec<[f64; 2]>) -> PointCloud2D {
        PointCloud2D { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Binary image to point cloud: one point per bright pixel, row 0 on top.
pub fn image_to_cloud(width: usize, height: usize, pixels: &[u8], threshold: u8) -> PointCloud2D {
    assert_eq!(pixels.len(), width * height);
    let mut points = Vec::new();
    for row in 0..height {
        for col in 0..width {
            if pixels[row * width + col] >= threshold {
                points.push([col as f64, (height - 1 - row) as f64]);
            }
        }
    }
    PointCloud2D { points }
}

/// Cover and clustering parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverSpec {
    /// Number of cover intervals.
    pub intervals: usize,
    /// Overlap fraction between consecutive intervals, in `[0, 1)`.
    pub overlap: f64,
    /// Single-linkage merge radius.
    pub epsilon: f64,
    /// Top level of the output grid; interval indices are rescaled onto
    /// `0..=resolution`. `None` keeps one level per interval.
    pub resolution: Option<i64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CloudError {
    EmptyCloud,
    BadSpec(&'static str),
    Graph(GraphError),
}

impl fmt::Display for CloudError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CloudError::EmptyCloud => write!(f, "point cloud is empty"),
            CloudError::BadSpec(what) => write!(f, "bad cover spec: {what}"),
            CloudError::Graph(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CloudError {}

/// What happened during construction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BuildInfo {
    /// Clusters found before any level merging.
    pub clusters: usize,
    /// Vertices discarded because they sat outside the largest component.
    pub dropped_vertices: usize,
    /// True when the output was not connected before trimming.
    pub trimmed: bool,
}

fn single_linkage(points: &PointCloud2D, members: &[usize], eps: f64) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(members.len());
    let e2 = eps * eps;
    for a in 0..members.len() {
        for b in (a + 1)..members.len() {
            let p = points.points[members[a]];
            let q = points.points[members[b]];
            let (dx, dy) = (p[0] - q[0], p[1] - q[1]);
            if dx * dx + dy * dy <= e2 {
                uf.union(a, b);
            }
        }
    }
    let mut lookup = vec![usize::MAX; members.len()];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for k in 0..members.len() {
        let r = uf.find(k);
        if lookup[r] == usize::MAX {
            lookup[r] = clusters.len();
            clusters.push(Vec::new());
        }
        clusters[lookup[r]].push(members[k]);
    }
    clusters
}

/// Build the mapper graph of a cloud under the height filter.
pub fn build_mapper(
    cloud: &PointCloud2D,
    spec: &CoverSpec,
) -> Result<(MapperGraph, BuildInfo), CloudError> {
    if cloud.is_empty() {
        return Err(CloudError::EmptyCloud);
    }
    let n = spec.intervals;
    if n < 2 {
        return Err(CloudError::BadSpec("need at least two intervals"));
    }
    if !(0.0..1.0).contains(&spec.overlap) {
        return Err(CloudError::BadSpec("overlap must be in [0, 1)"));
    }
    if !(spec.epsilon > 0.0) {
        return Err(CloudError::BadSpec("epsilon must be positive"));
    }
    let resolution = spec.resolution.unwrap_or(n as i64 - 1);
    if resolution < 1 {
        return Err(CloudError::BadSpec("resolution must be at least 1"));
    }

    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &cloud.points {
        ymin = ymin.min(p[1]);
        ymax = ymax.max(p[1]);
    }
    let range = (ymax - ymin).max(f64::EPSILON);
    // Interval length so that n intervals with pairwise overlap fraction g
    // tile the range exactly.
    let len = range / (n as f64 - (n as f64 - 1.0) * spec.overlap);
    let step = len * (1.0 - spec.overlap);

    // Cluster each interval's slice of the cloud.
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut cluster_interval: Vec<usize> = Vec::new();
    // point -> cluster per interval, for wiring the overlap edges.
    let mut point_cluster: Vec<Vec<(usize, usize)>> = vec![Vec::new(); cloud.len()];
    for k in 0..n {
        let lo = ymin + k as f64 * step;
        let hi = lo + len;
        // Widen the outermost intervals so boundary points are never lost
        // to floating-point edges.
        let lo = if k == 0 { f64::NEG_INFINITY } else { lo };
        let hi = if k == n - 1 { f64::INFINITY } else { hi };
        let members: Vec<usize> = (0..cloud.len())
            .filter(|&p| cloud.points[p][1] >= lo && cloud.points[p][1] <= hi)
            .collect();
        for c in single_linkage(cloud, &members, spec.epsilon) {
            let id = clusters.len();
            for &p in &c {
                point_cluster[p].push((k, id));
            }
            clusters.push(c);
            cluster_interval.push(k);
        }
    }
    let info_clusters = clusters.len();

    // Rescale interval indices onto the grid, then merge clusters that an
    // overlap edge connects at equal levels.
    let scale = |k: usize| -> i64 {
        let x = k as f64 * resolution as f64 / (n as f64 - 1.0);
        // round half up
        (x + 0.5).floor() as i64
    };
    let mut raw_edges: Vec<(usize, usize)> = Vec::new();
    for hits in &point_cluster {
        for w in hits.windows(2) {
            let ((ka, a), (kb, b)) = (w[0], w[1]);
            if kb == ka + 1 {
                raw_edges.push((a, b));
            }
        }
    }
    raw_edges.sort_unstable();
    raw_edges.dedup();

    let mut uf = UnionFind::new(clusters.len());
    for &(a, b) in &raw_edges {
        if scale(cluster_interval[a]) == scale(cluster_interval[b]) {
            uf.union(a, b);
        }
    }
    let mut merged_id = vec![usize::MAX; clusters.len()];
    let mut levels: Vec<i64> = Vec::new();
    for c in 0..clusters.len() {
        let r = uf.find(c);
        if merged_id[r] == usize::MAX {
            merged_id[r] = levels.len();
            levels.push(scale(cluster_interval[r]));
        }
        merged_id[c] = merged_id[r];
    }

    // Carry edges over, subdividing any that now span several levels.
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut seen: Vec<(usize, usize)> = Vec::new();
    for &(a, b) in &raw_edges {
        let (mut a, mut b) = (merged_id[a], merged_id[b]);
        if levels[a] > levels[b] {
            core::mem::swap(&mut a, &mut b);
        }
        if a == b || seen.contains(&(a, b)) {
            continue;
        }
        seen.push((a, b));
        let span = levels[b] - levels[a];
        if span == 1 {
            edges.push((a, b));
        } else {
            let mut prev = a;
            for m in 1..span {
                let mid = levels.len();
                levels.push(levels[a] + m);
                edges.push((prev, mid));
                prev = mid;
            }
            edges.push((prev, b));
        }
    }

    // Trim to the largest component.
    let mut comp = UnionFind::new(levels.len());
    for &(a, b) in &edges {
        comp.union(a, b);
    }
    let mut sizes = vec![0usize; levels.len()];
    for v in 0..levels.len() {
        sizes[comp.find(v)] += 1;
    }
    let main = (0..levels.len()).max_by_key(|&v| (sizes[v], usize::MAX - v)).unwrap_or(0);
    let main = comp.find(main);
    let keep: Vec<bool> = (0..levels.len()).map(|v| comp.find(v) == main).collect();
    let dropped = keep.iter().filter(|&&k| !k).count();
    let mut remap = vec![usize::MAX; levels.len()];
    let mut kept_levels = Vec::new();
    for v in 0..levels.len() {
        if keep[v] {
            remap[v] = kept_levels.len();
            kept_levels.push(levels[v]);
        }
    }
    let kept_edges: Vec<(usize, usize)> = edges
        .iter()
        .filter(|&&(a, b)| keep[a] && keep[b])
        .map(|&(a, b)| (remap[a], remap[b]))
        .collect();

    let grid = Grid::covering(kept_levels.iter().copied().chain([resolution]));
    let graph = MapperGraph::from_parts(grid, kept_levels, kept_edges).map_err(CloudError::Graph)?;
    let info = BuildInfo {
        clusters: info_clusters,
        dropped_vertices: dropped,
        trimmed: dropped > 0,
    };
    Ok((graph, info))
}

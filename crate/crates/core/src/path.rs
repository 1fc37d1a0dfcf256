//! Paths, multi-paths, and the length/excess quantities the approximation
//! guarantees are stated in.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{angle_between, dot, PointSet};

/// An ordered visit sequence over ids of some [`PointSet`]. The first visit
/// is the source, the last one the sink.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path {
    visits: Vec<usize>,
}

impl Path {
    pub fn new(visits: Vec<usize>) -> Result<Self> {
        if visits.is_empty() {
            return Err(Error::InvalidInput(
                "a path needs at least one visit".into(),
            ));
        }
        let mut seen = HashSet::with_capacity(visits.len());
        if let Some(dup) = visits.iter().find(|v| !seen.insert(**v)) {
            return Err(Error::InvalidInput(format!("point {dup} visited twice")));
        }
        Ok(Self { visits })
    }

    pub fn single(id: usize) -> Self {
        Self { visits: vec![id] }
    }

    pub fn visits(&self) -> &[usize] {
        &self.visits
    }

    pub fn len(&self) -> usize {
        self.visits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.visits.is_empty()
    }

    pub fn source(&self) -> usize {
        self.visits[0]
    }

    pub fn sink(&self) -> usize {
        *self.visits.last().expect("paths are never empty")
    }

    pub fn reversed(&self) -> Self {
        Self {
            visits: self.visits.iter().rev().copied().collect(),
        }
    }

    /// Directed edges in visit order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.visits.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn check_ids(&self, points: &PointSet) -> Result<()> {
        self.visits.iter().try_for_each(|&v| points.check_id(v))
    }

    pub fn length(&self, points: &PointSet) -> f64 {
        self.edges().map(|(a, b)| points.distance(a, b)).sum()
    }

    /// Length of the sub-path between visit positions `from..=to`.
    pub fn sub_length(&self, points: &PointSet, from: usize, to: usize) -> f64 {
        self.visits[from..=to]
            .windows(2)
            .map(|w| points.distance(w[0], w[1]))
            .sum()
    }

    /// Length minus the straight-line distance between the endpoints.
    pub fn excess(&self, points: &PointSet) -> f64 {
        self.length(points) - points.distance(self.source(), self.sink())
    }
}

/// Paths with prescribed endpoints that share no interior visits.
///
/// A point may appear in more than one path only when it is an endpoint of
/// every path that visits it (e.g. the junction of two consecutive legs).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiPath {
    paths: Vec<Path>,
}

impl MultiPath {
    pub fn new(paths: Vec<Path>) -> Result<Self> {
        let mut owners: HashMap<usize, Vec<(usize, bool)>> = HashMap::new();
        for (slot, path) in paths.iter().enumerate() {
            for (pos, &v) in path.visits().iter().enumerate() {
                let is_end = pos == 0 || pos + 1 == path.len();
                owners.entry(v).or_default().push((slot, is_end));
            }
        }
        for (v, users) in &owners {
            if users.len() > 1 && users.iter().any(|&(_, is_end)| !is_end) {
                return Err(Error::InvalidInput(format!(
                    "point {v} is shared by several paths but is interior to one of them"
                )));
            }
        }
        Ok(Self { paths })
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn into_paths(self) -> Vec<Path> {
        self.paths
    }

    pub fn total_length(&self, points: &PointSet) -> f64 {
        self.paths.iter().map(|p| p.length(points)).sum()
    }

    pub fn excess(&self, points: &PointSet) -> f64 {
        self.paths.iter().map(|p| p.excess(points)).sum()
    }

    /// Number of distinct points visited by the union of all paths.
    pub fn visited_count(&self) -> usize {
        self.paths
            .iter()
            .flat_map(|p| p.visits().iter().copied())
            .collect::<HashSet<_>>()
            .len()
    }
}

/// Edges of a path split by the sign of their projection on an axis.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgePartition {
    pub forward: Vec<(usize, usize)>,
    pub backward: Vec<(usize, usize)>,
    pub forward_length: f64,
    pub backward_length: f64,
}

/// Splits the directed edges of `path` into those facing along `axis`
/// (projection >= 0) and those facing against it.
pub fn directed_edge_partition(
    path: &Path,
    points: &PointSet,
    axis: &[f64],
) -> Result<EdgePartition> {
    if axis.len() != points.dim() {
        return Err(Error::DimensionMismatch {
            expected: points.dim(),
            found: axis.len(),
        });
    }
    let mut part = EdgePartition {
        forward: Vec::new(),
        backward: Vec::new(),
        forward_length: 0.0,
        backward_length: 0.0,
    };
    for (a, b) in path.edges() {
        let delta = edge_vector(points, a, b);
        let len = points.distance(a, b);
        if dot(&delta, axis) >= 0.0 {
            part.forward.push((a, b));
            part.forward_length += len;
        } else {
            part.backward.push((a, b));
            part.backward_length += len;
        }
    }
    Ok(part)
}

pub(crate) fn edge_vector(points: &PointSet, a: usize, b: usize) -> Vec<f64> {
    points
        .point(b)
        .coords()
        .iter()
        .zip(points.point(a).coords())
        .map(|(y, x)| y - x)
        .collect()
}

/// Total length of the edges whose direction is more than `gamma` radians
/// away from the source-to-sink direction of the path.
pub fn offangle_edge_mass(path: &Path, points: &PointSet, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "gamma must lie in (0, 1], got {gamma}"
        )));
    }
    if path.len() < 2 || points.distance(path.source(), path.sink()) == 0.0 {
        return Err(Error::InvalidInput(
            "path angle is undefined for coincident endpoints".into(),
        ));
    }
    let heading = edge_vector(points, path.source(), path.sink());
    let mut mass = 0.0;
    for (a, b) in path.edges() {
        let len = points.distance(a, b);
        if len == 0.0 {
            continue;
        }
        if angle_between(&edge_vector(points, a, b), &heading) > gamma {
            mass += len;
        }
    }
    Ok(mass)
}

/// Constant in the off-angle bound: mass <= `offangle_bound_factor(gamma)` * excess.
pub fn offangle_bound_factor(gamma: f64) -> f64 {
    24.0 / (11.0 * gamma * gamma)
}

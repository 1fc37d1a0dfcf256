//! Points, distances and rigid motions.
//!
//! The first coordinate of every point is the sweep coordinate. Points that
//! share a sweep coordinate are ordered by their full coordinate vector and
//! then by id, so the sweep order is always a strict total order without
//! perturbing any coordinate.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when comparing path lengths; multiply by the
/// instance diameter to get an absolute slack.
pub const LENGTH_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput(
                "a point needs at least one coordinate".into(),
            ));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite coordinate {bad}")));
        }
        Ok(Self { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Coordinate along the sweep axis.
    pub fn sweep(&self) -> f64 {
        self.coords[0]
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.coords
    }
}

/// Euclidean distance between two points of equal dimension.
pub fn dist(p: &Point, q: &Point) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    Ok(euclidean(p.coords(), q.coords()))
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Angle in radians between `v` and the positive first axis.
pub fn angle_to_axis(v: &[f64]) -> Result<f64> {
    let len = norm(v);
    if v.is_empty() || len == 0.0 || !len.is_finite() {
        return Err(Error::InvalidInput(
            "angle of a zero vector is undefined".into(),
        ));
    }
    Ok((v[0] / len).clamp(-1.0, 1.0).acos())
}

/// Angle in radians between two non-zero vectors.
pub(crate) fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let denom = norm(a) * norm(b);
    (dot(a, b) / denom).clamp(-1.0, 1.0).acos()
}

/// An immutable indexed point list; ids are positions `0..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidInput("point set is empty".into()));
        };
        let d = first.dim();
        if let Some(p) = points.iter().find(|p| p.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: p.dim(),
            });
        }
        Ok(Self { points })
    }

    /// Builds a point set from raw coordinate rows.
    pub fn from_coords<I, R>(rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = R>,
        R: Into<Vec<f64>>,
    {
        let points = rows
            .into_iter()
            .map(|r| Point::new(r.into()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn point(&self, id: usize) -> &Point {
        &self.points[id]
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        euclidean(self.points[a].coords(), self.points[b].coords())
    }

    pub fn check_id(&self, id: usize) -> Result<()> {
        if id < self.len() {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "point id {id} out of range for {} points",
                self.len()
            )))
        }
    }

    /// Largest pairwise distance (0 for a single point).
    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut best = 0.0f64;
        for a in 0..n {
            for b in a + 1..n {
                best = best.max(self.distance(a, b));
            }
        }
        best
    }

    /// Absolute slack for length comparisons on this instance.
    pub fn length_slack(&self) -> f64 {
        LENGTH_TOLERANCE * self.diameter().max(1.0)
    }

    /// Strict total order on ids: sweep coordinate, then coordinates
    /// lexicographically, then id.
    pub fn sweep_cmp(&self, a: usize, b: usize) -> Ordering {
        let pa = self.points[a].coords();
        let pb = self.points[b].coords();
        pa[0]
            .total_cmp(&pb[0])
            .then_with(|| {
                pa.iter()
                    .zip(pb)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            })
            .then_with(|| a.cmp(&b))
    }

    pub fn sweep_order(&self) -> SweepOrder {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.sweep_cmp(a, b));
        SweepOrder::from_order(order)
    }

    pub fn distance_matrix(&self) -> DistanceMatrix {
        let n = self.len();
        let mut data = vec![0.0; n * n];
        for a in 0..n {
            for b in a + 1..n {
                let d = self.distance(a, b);
                data[a * n + b] = d;
                data[b * n + a] = d;
            }
        }
        DistanceMatrix { n, data }
    }
}

/// Dense symmetric distance table.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.data[a * self.n + b]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// Sweep ranks of a point set: `order[rank] = id`, `rank[id] = rank`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepOrder {
    order: Vec<usize>,
    rank: Vec<usize>,
}

impl SweepOrder {
    fn from_order(order: Vec<usize>) -> Self {
        let mut rank = vec![0; order.len()];
        for (r, &id) in order.iter().enumerate() {
            rank[id] = r;
        }
        Self { order, rank }
    }

    pub fn id_at(&self, rank: usize) -> usize {
        self.order[rank]
    }

    pub fn rank_of(&self, id: usize) -> usize {
        self.rank[id]
    }

    pub fn ids(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Rigid motion `q = R (p - origin)` with `R` orthogonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Transform {
    rotation: Vec<Vec<f64>>,
    origin: Vec<f64>,
}

impl Transform {
    pub fn identity(dim: usize) -> Self {
        let rotation = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self {
            rotation,
            origin: vec![0.0; dim],
        }
    }

    pub fn new(rotation: Vec<Vec<f64>>, origin: Vec<f64>) -> Self {
        Self { rotation, origin }
    }

    pub fn rotation(&self) -> &[Vec<f64>] {
        &self.rotation
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.origin.len())
    }

    pub fn apply(&self, p: &Point) -> Point {
        let shifted: Vec<f64> = p
            .coords()
            .iter()
            .zip(&self.origin)
            .map(|(x, o)| x - o)
            .collect();
        let coords = self.rotation.iter().map(|row| dot(row, &shifted)).collect();
        Point { coords }
    }

    pub fn invert(&self, q: &Point) -> Point {
        let d = self.origin.len();
        let coords = (0..d)
            .map(|j| {
                let back: f64 = (0..d).map(|i| self.rotation[i][j] * q.coords()[i]).sum();
                back + self.origin[j]
            })
            .collect();
        Point { coords }
    }

    pub fn apply_set(&self, set: &PointSet) -> PointSet {
        PointSet {
            points: set.points().iter().map(|p| self.apply(p)).collect(),
        }
    }
}

/// Orthogonal matrix mapping the direction of `v` onto the positive first
/// axis. Built from a Householder reflection composed with a sign flip of
/// the second coordinate, so it is a proper rotation whenever `dim >= 2`.
/// In one dimension a negative direction can only be fixed by reflection.
pub(crate) fn rotation_onto_axis(v: &[f64]) -> Result<Vec<Vec<f64>>> {
    let d = v.len();
    let len = norm(v);
    if len == 0.0 || !len.is_finite() {
        return Err(Error::Degenerate(
            "cannot align a zero vector with the axis".into(),
        ));
    }
    let u: Vec<f64> = v.iter().map(|x| x / len).collect();
    let tail_sq: f64 = u[1..].iter().map(|x| x * x).sum();
    let mut identity = vec![vec![0.0; d]; d];
    for (i, row) in identity.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    if tail_sq == 0.0 && u[0] > 0.0 {
        return Ok(identity);
    }
    // Householder vector h = u - e1, first entry computed without cancellation.
    let mut h = u.clone();
    h[0] = if u[0] > 0.0 {
        -tail_sq / (u[0] + 1.0)
    } else {
        u[0] - 1.0
    };
    let h_sq = dot(&h, &h);
    let mut m = identity;
    for i in 0..d {
        for j in 0..d {
            m[i][j] -= 2.0 * h[i] * h[j] / h_sq;
        }
    }
    if d >= 2 {
        for x in m[1].iter_mut() {
            *x = -*x;
        }
    }
    Ok(m)
}

/// Rigidly moves `set` so that `s` lands on the origin and `t` on the
/// positive first axis.
pub fn rotate_to_axis(set: &PointSet, s: &Point, t: &Point) -> Result<(PointSet, Transform)> {
    if s.dim() != set.dim() || t.dim() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            found: if s.dim() != set.dim() {
                s.dim()
            } else {
                t.dim()
            },
        });
    }
    if s == t {
        return Err(Error::Degenerate("source and sink coincide".into()));
    }
    let dir: Vec<f64> = t
        .coords()
        .iter()
        .zip(s.coords())
        .map(|(b, a)| b - a)
        .collect();
    let transform = Transform::new(rotation_onto_axis(&dir)?, s.coords().to_vec());
    Ok((transform.apply_set(set), transform))
}

//! Random sweep directions that keep every prescribed segment well inside
//! the forward half-space.
//!
//! Given unit vectors `v_1..v_m`, a Gaussian direction `x` is drawn in the
//! span of the vectors (dimension `r <= min(d, m)`) and accepted when
//! `|x|^2 < 4r` and every `|<x, v_i>| > 1/(4m)`. The normalized direction
//! then satisfies `|<y, v_i>| > 1/(4m|x|) > 1/(8m sqrt(r))`, and picking a
//! sign per vector makes every inner product positive.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::{dot, norm, rotation_onto_axis, PointSet, Transform};

pub const DEFAULT_MAX_ATTEMPTS: usize = 10_000;

const RANK_TOLERANCE: f64 = 1e-10;
const UNIT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionResult {
    /// Unit sweep direction in the input space.
    pub axis: Vec<f64>,
    /// `+1` or `-1` per input vector.
    pub signs: Vec<i8>,
    /// Smallest `<axis, sign_i * v_i>` over all inputs.
    pub margin: f64,
    /// Number of Gaussian samples drawn.
    pub attempts: usize,
}

/// Guaranteed lower bound on the margin: `1 / (8 m sqrt(min(d, m)))`.
pub fn margin_bound(m: usize, d: usize) -> f64 {
    1.0 / (8.0 * m as f64 * (d.min(m) as f64).sqrt())
}

/// Largest angle a signed segment may make with the axis:
/// `pi/2 - 1/(8 m^{3/2})`.
pub fn max_segment_angle(m: usize) -> f64 {
    std::f64::consts::FRAC_PI_2 - 1.0 / (8.0 * (m as f64).powf(1.5))
}

pub fn find_direction(vectors: &[Vec<f64>], seed: u64) -> Result<DirectionResult> {
    find_direction_bounded(vectors, seed, DEFAULT_MAX_ATTEMPTS)
}

pub fn find_direction_bounded(
    vectors: &[Vec<f64>],
    seed: u64,
    max_attempts: usize,
) -> Result<DirectionResult> {
    let m = vectors.len();
    let Some(first) = vectors.first() else {
        return Err(Error::InvalidInput("need at least one vector".into()));
    };
    let d = first.len();
    for v in vectors {
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.len(),
            });
        }
        if (norm(v) - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::InvalidInput(format!(
                "direction vectors must be unit length, got norm {}",
                norm(v)
            )));
        }
    }

    let basis = span_basis(vectors);
    let r = basis.len();
    let local: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| basis.iter().map(|b| dot(b, v)).collect())
        .collect();

    let bound = margin_bound(m, d);
    let threshold = 1.0 / (4.0 * m as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=max_attempts {
        let x: Vec<f64> = (0..r).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm_sq = dot(&x, &x);
        if norm_sq >= 4.0 * r as f64 {
            continue;
        }
        if local.iter().any(|c| dot(&x, c).abs() <= threshold) {
            continue;
        }
        let mut axis = vec![0.0; d];
        for (coef, b) in x.iter().zip(&basis) {
            for (a, bj) in axis.iter_mut().zip(b) {
                *a += coef * bj;
            }
        }
        let len = norm(&axis);
        axis.iter_mut().for_each(|a| *a /= len);

        let mut signs: Vec<i8> = vectors
            .iter()
            .map(|v| if dot(&axis, v) >= 0.0 { 1 } else { -1 })
            .collect();
        // Canonical orientation: the first vector keeps its direction.
        if signs[0] < 0 {
            axis.iter_mut().for_each(|a| *a = -*a);
            signs.iter_mut().for_each(|s| *s = -*s);
        }
        let margin = vectors
            .iter()
            .zip(&signs)
            .map(|(v, &s)| f64::from(s) * dot(&axis, v))
            .fold(f64::INFINITY, f64::min);
        if margin < bound {
            continue;
        }
        return Ok(DirectionResult {
            axis,
            signs,
            margin,
            attempts: attempt,
        });
    }
    Err(Error::SamplingFailure {
        attempts: max_attempts,
    })
}

/// Orthonormal basis of the span of `vectors`, by Gram-Schmidt that always
/// takes the remaining vector with the largest residual next.
fn span_basis(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut residuals: Vec<Vec<f64>> = vectors.to_vec();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    while let Some((idx, len)) = residuals
        .iter()
        .map(|r| norm(r))
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
    {
        if len <= RANK_TOLERANCE {
            break;
        }
        let q: Vec<f64> = residuals[idx].iter().map(|x| x / len).collect();
        for r in residuals.iter_mut() {
            let c = dot(r, &q);
            for (ri, qi) in r.iter_mut().zip(&q) {
                *ri -= c * qi;
            }
        }
        residuals[idx].iter_mut().for_each(|x| *x = 0.0);
        basis.push(q);
    }
    basis
}

/// A rigid rotation under which every (possibly swapped) pair points into
/// the forward cone.
#[derive(Debug, Clone)]
pub struct Orientation {
    pub transform: Transform,
    /// `swapped[i]` is true when pair `i` must be traversed sink-to-source.
    pub swapped: Vec<bool>,
    pub direction: DirectionResult,
}

/// Rotates space so that every directed pair (after optional swapping) makes
/// an angle of at most `pi/2 - 1/(8 m^{3/2})` with the first axis.
pub fn orient_pairs(points: &PointSet, pairs: &[(usize, usize)], seed: u64) -> Result<Orientation> {
    let mut vectors = Vec::with_capacity(pairs.len());
    for &(s, t) in pairs {
        points.check_id(s)?;
        points.check_id(t)?;
        let v: Vec<f64> = points
            .point(t)
            .coords()
            .iter()
            .zip(points.point(s).coords())
            .map(|(b, a)| b - a)
            .collect();
        let len = norm(&v);
        if len == 0.0 {
            return Err(Error::Degenerate(format!(
                "pair ({s}, {t}) has coincident endpoints"
            )));
        }
        vectors.push(v.into_iter().map(|x| x / len).collect::<Vec<_>>());
    }
    let direction = find_direction(&vectors, seed)?;
    let transform = Transform::new(
        rotation_onto_axis(&direction.axis)?,
        vec![0.0; points.dim()],
    );
    let swapped = direction.signs.iter().map(|&s| s < 0).collect();
    Ok(Orientation {
        transform,
        swapped,
        direction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::angle_to_axis;

    #[test]
    fn single_vector_becomes_the_axis() {
        let r = find_direction(&[vec![0.0, 1.0]], 3).unwrap();
        assert!(r.axis[0].abs() < 1e-12 && (r.axis[1] - 1.0).abs() < 1e-12);
        assert_eq!(r.signs, vec![1]);
        assert!((r.margin - 1.0).abs() < 1e-12);
    }

    #[test]
    fn opposite_vectors_flip_sign() {
        let r = find_direction(&[vec![1.0, 0.0], vec![-1.0, 0.0]], 11).unwrap();
        assert_eq!(r.signs, vec![1, -1]);
        assert!((r.axis[0] - 1.0).abs() < 1e-12);
        assert!((r.margin - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_unit_input() {
        assert!(find_direction(&[vec![2.0, 0.0]], 0).is_err());
        assert!(find_direction(&[], 0).is_err());
    }

    #[test]
    fn zero_budget_is_a_sampling_failure() {
        assert_eq!(
            find_direction_bounded(&[vec![1.0]], 0, 0),
            Err(Error::SamplingFailure { attempts: 0 })
        );
    }

    #[test]
    fn span_rank_is_detected() {
        let b = span_basis(&[
            vec![1.0, 0.0, 0.0],
            vec![-1.0, 0.0, 0.0],
            vec![0.0, 0.6, 0.8],
        ]);
        assert_eq!(b.len(), 2);
    }

    #[test]
    fn orient_quarter_turn() {
        let pts = PointSet::from_coords(vec![vec![0.0, 0.0], vec![0.0, 3.0]]).unwrap();
        let o = orient_pairs(&pts, &[(0, 1)], 0).unwrap();
        assert_eq!(o.swapped, vec![false]);
        let t = o.transform.apply(pts.point(1));
        assert!((t.coords()[0] - 3.0).abs() < 1e-12 && t.coords()[1].abs() < 1e-12);
    }

    #[test]
    fn orient_reversed_segment() {
        let pts = PointSet::from_coords(vec![vec![0.0, 0.0], vec![-3.0, 0.0]]).unwrap();
        let o = orient_pairs(&pts, &[(0, 1)], 5).unwrap();
        let (s, t) = if o.swapped[0] { (1, 0) } else { (0, 1) };
        let a = o.transform.apply(pts.point(s));
        let b = o.transform.apply(pts.point(t));
        let v: Vec<f64> = b
            .coords()
            .iter()
            .zip(a.coords())
            .map(|(y, x)| y - x)
            .collect();
        assert!(angle_to_axis(&v).unwrap() < 1e-12);
    }

    #[test]
    fn orient_rejects_degenerate_pair() {
        let pts = PointSet::from_coords(vec![vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(
            orient_pairs(&pts, &[(0, 1)], 0),
            Err(Error::Degenerate(_))
        ));
    }
}

//! Rooted orienteering through (m,k)-TSP queries.
//!
//! For a target count `k` the optimal path is split at `m + 1` skeleton
//! visits into `m` legs of nearly equal point count. Guessing the skeleton
//! turns the problem into an (m,k)-TSP instance with pairs
//! `(q_1, q_2), ..., (q_m, q_{m+1})`; dropping the leg with the largest
//! excess from the optimum shows that an excess-approximate answer fits the
//! budget while losing at most a `1/m` fraction of the points.

use itertools::Itertools;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::mktsp::{MktspConfig, MktspSweep, DEFAULT_MAX_SLOTS};
use crate::path::{MultiPath, Path};
use crate::window_solver::{ExactWindowSolver, WindowOracle};

/// Skeleton positions (1-based) `ceil((i-1)(k-1)/m) + 1` for `i = 1..=m+1`.
pub fn skeleton_indices(k: usize, m: usize) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::Degenerate(format!(
            "a skeleton needs k >= 2, got {k}"
        )));
    }
    if m == 0 {
        return Err(Error::InvalidInput("a skeleton needs m >= 1".into()));
    }
    Ok((1..=m + 1)
        .map(|i| ((i - 1) * (k - 1)).div_ceil(m) + 1)
        .collect())
}

/// Joins consecutive legs that meet at the skeleton points into one path.
pub fn concatenate_skeleton_paths(multi: &MultiPath, skeleton: &[usize]) -> Result<Path> {
    let legs = multi.paths();
    if skeleton.len() != legs.len() + 1 {
        return Err(Error::Internal(format!(
            "{} legs do not match a skeleton of {} points",
            legs.len(),
            skeleton.len()
        )));
    }
    let mut visits: Vec<usize> = vec![skeleton[0]];
    for (i, leg) in legs.iter().enumerate() {
        if leg.source() != skeleton[i] || leg.sink() != skeleton[i + 1] {
            return Err(Error::Internal(format!(
                "leg {i} runs {} -> {}, expected {} -> {}",
                leg.source(),
                leg.sink(),
                skeleton[i],
                skeleton[i + 1]
            )));
        }
        visits.extend_from_slice(&leg.visits()[1..]);
    }
    Path::new(visits).map_err(|e| Error::Internal(format!("legs overlap: {e}")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrienteeringInstance {
    pub points: PointSet,
    pub root: usize,
    pub budget: f64,
    pub delta: f64,
}

impl OrienteeringInstance {
    pub fn new(points: PointSet, root: usize, budget: f64, delta: f64) -> Result<Self> {
        points.check_id(root)?;
        if !budget.is_finite() || budget < 0.0 {
            return Err(Error::InvalidInput(format!(
                "budget must be finite and non-negative, got {budget}"
            )));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidInput(format!(
                "delta must lie in (0, 1), got {delta}"
            )));
        }
        Ok(Self {
            points,
            root,
            budget,
            delta,
        })
    }

    /// Number of legs: `floor(1 / delta)`.
    pub fn legs(&self) -> usize {
        (1.0 / self.delta).floor() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub k: usize,
    pub skeleton: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrienteeringSolution {
    pub path: Path,
    pub visited: usize,
    pub length: f64,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, Copy)]
pub struct OrienteeringConfig {
    pub seed: u64,
    pub max_slots: usize,
}

impl Default for OrienteeringConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            max_slots: DEFAULT_MAX_SLOTS,
        }
    }
}

pub fn solve_orienteering(inst: &OrienteeringInstance) -> Result<OrienteeringSolution> {
    solve_orienteering_with(
        &ExactWindowSolver::default(),
        inst,
        &OrienteeringConfig::default(),
    )
}

/// An accepted skeleton query.
#[derive(Debug, Clone, PartialEq)]
pub struct Acceptance {
    pub skeleton: Vec<usize>,
    pub visited: usize,
    pub length: f64,
}

/// Skeleton queries for one instance. Sweep tables are cached per skeleton,
/// so asking about several `k` reuses them.
pub struct SkeletonSearch<'a, O: ?Sized> {
    oracle: &'a O,
    inst: &'a OrienteeringInstance,
    legs: usize,
    limit: f64,
    mktsp: MktspConfig,
    // None marks skeletons that cannot be queried (coincident pair).
    sweeps: FxHashMap<Vec<usize>, Option<MktspSweep>>,
}

impl<'a, O: WindowOracle + ?Sized> SkeletonSearch<'a, O> {
    pub fn new(oracle: &'a O, inst: &'a OrienteeringInstance, config: &OrienteeringConfig) -> Self {
        let legs = inst.legs();
        Self {
            oracle,
            inst,
            legs,
            limit: inst.budget + inst.points.length_slack(),
            mktsp: MktspConfig {
                delta: 1.0 / legs as f64,
                excess_constant: 1.0,
                max_slots: config.max_slots,
                seed: config.seed,
            },
            sweeps: FxHashMap::default(),
        }
    }

    /// Best accepted answer for target `k >= 2` over all ordered skeletons
    /// of `min(m, k - 1) + 1` distinct points starting at the root: most
    /// visits first, then shortest.
    pub fn best_for(&mut self, k: usize) -> Result<Option<Acceptance>> {
        let points = &self.inst.points;
        let n = points.len();
        if k < 2 || k > n {
            return Ok(None);
        }
        let legs = self.legs.min(k - 1);
        let needed = (1.0 - 1.0 / self.legs as f64) * k as f64;
        let others: Vec<usize> = (0..n).filter(|&p| p != self.inst.root).collect();
        let mut best: Option<Acceptance> = None;
        for rest in others.into_iter().permutations(legs) {
            let skeleton: Vec<usize> = std::iter::once(self.inst.root).chain(rest).collect();
            let floor: f64 = skeleton
                .windows(2)
                .map(|w| points.distance(w[0], w[1]))
                .sum();
            if floor > self.limit {
                continue;
            }
            if !self.sweeps.contains_key(&skeleton) {
                let pairs: Vec<(usize, usize)> =
                    skeleton.windows(2).map(|w| (w[0], w[1])).collect();
                let built = match MktspSweep::build(
                    self.oracle,
                    points,
                    &pairs,
                    n,
                    self.limit,
                    &self.mktsp,
                ) {
                    Ok(s) => Some(s),
                    Err(Error::Degenerate(_)) => None,
                    Err(e) => return Err(e),
                };
                self.sweeps.insert(skeleton.clone(), built);
            }
            let Some(sweep) = &self.sweeps[&skeleton] else {
                continue;
            };
            let Some((visited, length)) = sweep.at_least(k) else {
                continue;
            };
            if length > self.limit || (visited as f64) < needed {
                continue;
            }
            if best
                .as_ref()
                .is_none_or(|b| visited > b.visited || (visited == b.visited && length < b.length))
            {
                best = Some(Acceptance {
                    skeleton,
                    visited,
                    length,
                });
            }
        }
        Ok(best)
    }

    /// Rebuilds the rooted path behind an accepted answer.
    pub fn path(&self, acc: &Acceptance) -> Result<Path> {
        let sweep = self
            .sweeps
            .get(&acc.skeleton)
            .and_then(Option::as_ref)
            .ok_or_else(|| Error::Internal("skeleton was never queried".into()))?;
        let multi = sweep.reconstruct(self.oracle, &self.inst.points, acc.visited)?;
        concatenate_skeleton_paths(&multi, &acc.skeleton)
    }
}

/// Tries every `k` in `1..=n`, keeping the accepted path with the most
/// visits (then the shortest).
pub fn solve_orienteering_with<O: WindowOracle + ?Sized>(
    oracle: &O,
    inst: &OrienteeringInstance,
    config: &OrienteeringConfig,
) -> Result<OrienteeringSolution> {
    let mut search = SkeletonSearch::new(oracle, inst, config);
    let mut best: Option<(usize, Acceptance)> = None;
    for k in 2..=inst.points.len() {
        if let Some(acc) = search.best_for(k)? {
            let better = best.as_ref().is_none_or(|(_, b)| {
                acc.visited > b.visited || (acc.visited == b.visited && acc.length < b.length)
            });
            if better {
                best = Some((k, acc));
            }
        }
    }
    let Some((k, acc)) = best else {
        return Ok(OrienteeringSolution {
            path: Path::single(inst.root),
            visited: 1,
            length: 0.0,
            certificate: Certificate {
                k: 1,
                skeleton: vec![inst.root],
            },
        });
    };
    let path = search.path(&acc)?;
    let length = path.length(&inst.points);
    if length > search.limit {
        return Err(Error::Internal(format!(
            "accepted path of length {length} exceeds the budget {}",
            inst.budget
        )));
    }
    Ok(OrienteeringSolution {
        visited: path.len(),
        length,
        path,
        certificate: Certificate {
            k,
            skeleton: acc.skeleton,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skeleton_examples() {
        assert_eq!(skeleton_indices(16, 3).unwrap(), vec![1, 6, 11, 16]);
        assert_eq!(skeleton_indices(2, 1).unwrap(), vec![1, 2]);
        assert_eq!(skeleton_indices(7, 3).unwrap(), vec![1, 3, 5, 7]);
        assert!(skeleton_indices(1, 3).is_err());
    }

    #[test]
    fn concatenation() {
        let a = Path::new(vec![0, 1]).unwrap();
        let b = Path::new(vec![1, 2]).unwrap();
        let joined =
            concatenate_skeleton_paths(&MultiPath::new(vec![a.clone(), b]).unwrap(), &[0, 1, 2])
                .unwrap();
        assert_eq!(joined.visits(), &[0, 1, 2]);
        let single =
            concatenate_skeleton_paths(&MultiPath::new(vec![a.clone()]).unwrap(), &[0, 1]).unwrap();
        assert_eq!(single, a);
        assert!(concatenate_skeleton_paths(&MultiPath::new(vec![a]).unwrap(), &[0, 2]).is_err());
    }

    fn line5() -> PointSet {
        PointSet::from_coords((0..5).map(|x| vec![f64::from(x), 0.0])).unwrap()
    }

    #[test]
    fn collinear_budget() {
        let inst = OrienteeringInstance::new(line5(), 0, 3.5, 0.5).unwrap();
        let sol = solve_orienteering(&inst).unwrap();
        assert_eq!(sol.visited, 4);
        assert!((sol.length - 3.0).abs() < 1e-12);
        assert_eq!(sol.path.source(), 0);
    }

    #[test]
    fn zero_budget_visits_the_root() {
        let inst = OrienteeringInstance::new(line5(), 2, 0.0, 0.5).unwrap();
        let sol = solve_orienteering(&inst).unwrap();
        assert_eq!(sol.visited, 1);
        assert_eq!(sol.path.visits(), &[2]);
    }

    #[test]
    fn negative_budget_is_rejected() {
        assert!(OrienteeringInstance::new(line5(), 0, -1.0, 0.5).is_err());
    }
}

//! Brute-force ground truth: subsets times orderings, nothing clever.
//!
//! Deliberately shares no code with the sweeps or the window solver.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::path::{MultiPath, Path};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_points: usize,
    pub max_paths: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            max_points: 10,
            max_paths: 3,
        }
    }
}

impl OracleBudget {
    fn check(&self, points: &PointSet, paths: usize) -> Result<()> {
        if points.len() > self.max_points {
            return Err(Error::Capacity {
                what: "oracle point count",
                size: points.len(),
                limit: self.max_points,
            });
        }
        if paths > self.max_paths {
            return Err(Error::Capacity {
                what: "oracle path count",
                size: paths,
                limit: self.max_paths,
            });
        }
        Ok(())
    }
}

fn walk_length(points: &PointSet, visits: &[usize]) -> f64 {
    visits.windows(2).map(|w| points.distance(w[0], w[1])).sum()
}

/// Shortest `s -> t` path visiting at least `k` points.
pub fn brute_ktsp(
    points: &PointSet,
    s: usize,
    t: usize,
    k: usize,
    budget: &OracleBudget,
) -> Result<(Path, f64)> {
    budget.check(points, 1)?;
    points.check_id(s)?;
    points.check_id(t)?;
    if s == t {
        return Err(Error::Degenerate("source equals sink".into()));
    }
    let n = points.len();
    if k > n {
        return Err(Error::Infeasible(format!("cannot visit {k} of {n} points")));
    }
    let inner: Vec<usize> = (0..n).filter(|&p| p != s && p != t).collect();
    let mut best: Option<(Vec<usize>, f64)> = None;
    for size in k.saturating_sub(2)..=inner.len() {
        for order in inner.iter().copied().permutations(size) {
            let visits: Vec<usize> = std::iter::once(s)
                .chain(order)
                .chain(std::iter::once(t))
                .collect();
            let len = walk_length(points, &visits);
            if best.as_ref().is_none_or(|b| len < b.1) {
                best = Some((visits, len));
            }
        }
    }
    let (visits, len) = best.expect("the direct path always qualifies");
    Ok((Path::new(visits)?, len))
}

/// Shortest system of paths joining each pair whose union visits at least
/// `k` points. A pair endpoint is visited only by the paths it terminates.
pub fn brute_mktsp(
    points: &PointSet,
    pairs: &[(usize, usize)],
    k: usize,
    budget: &OracleBudget,
) -> Result<(MultiPath, f64)> {
    budget.check(points, pairs.len())?;
    let n = points.len();
    if pairs.is_empty() {
        return Err(Error::InvalidInput("need at least one pair".into()));
    }
    let mut is_terminal = vec![false; n];
    for &(s, t) in pairs {
        points.check_id(s)?;
        points.check_id(t)?;
        if s == t {
            return Err(Error::Degenerate(format!(
                "pair ({s}, {t}) starts where it ends"
            )));
        }
        is_terminal[s] = true;
        is_terminal[t] = true;
    }
    if k > n {
        return Err(Error::Infeasible(format!("cannot visit {k} of {n} points")));
    }
    let terminals = is_terminal.iter().filter(|&&b| b).count();
    let free: Vec<usize> = (0..n).filter(|&p| !is_terminal[p]).collect();
    let m = pairs.len();

    // Each free point goes to one slot or is left out (label m).
    let mut best: Option<(Vec<Vec<usize>>, f64)> = None;
    for labels in std::iter::repeat_n(0..=m, free.len()).multi_cartesian_product() {
        let used = labels.iter().filter(|&&l| l < m).count();
        if terminals + used < k {
            continue;
        }
        let mut total = 0.0;
        let mut routes = Vec::with_capacity(m);
        for (slot, &(s, t)) in pairs.iter().enumerate() {
            let mine: Vec<usize> = free
                .iter()
                .zip(&labels)
                .filter(|(_, &l)| l == slot)
                .map(|(&p, _)| p)
                .collect();
            let mut slot_best: Option<(Vec<usize>, f64)> = None;
            for order in mine.iter().copied().permutations(mine.len()) {
                let visits: Vec<usize> = std::iter::once(s)
                    .chain(order)
                    .chain(std::iter::once(t))
                    .collect();
                let len = walk_length(points, &visits);
                if slot_best.as_ref().is_none_or(|b| len < b.1) {
                    slot_best = Some((visits, len));
                }
            }
            let (visits, len) = slot_best.expect("at least the empty ordering");
            total += len;
            routes.push(visits);
        }
        if best.as_ref().is_none_or(|b| total < b.1) {
            best = Some((routes, total));
        }
    }
    let Some((routes, total)) = best else {
        return Err(Error::Infeasible(format!(
            "no path system visits {k} points"
        )));
    };
    let paths = routes
        .into_iter()
        .map(Path::new)
        .collect::<Result<Vec<_>>>()?;
    Ok((MultiPath::new(paths)?, total))
}

/// Largest number of points an `s`-rooted path of length at most `limit`
/// can visit, with a shortest such path.
pub fn brute_orienteering(
    points: &PointSet,
    s: usize,
    limit: f64,
    budget: &OracleBudget,
) -> Result<(usize, Path)> {
    budget.check(points, 1)?;
    points.check_id(s)?;
    if limit.is_nan() || limit < 0.0 {
        return Err(Error::InvalidInput(format!(
            "budget must be non-negative, got {limit}"
        )));
    }
    let cap = limit + points.length_slack();
    let mut visited = vec![false; points.len()];
    visited[s] = true;
    let mut stack = vec![s];
    let mut best = (vec![s], 0.0);
    extend(points, cap, &mut stack, &mut visited, 0.0, &mut best);
    let (visits, _) = best;
    Ok((visits.len(), Path::new(visits)?))
}

fn extend(
    points: &PointSet,
    cap: f64,
    stack: &mut Vec<usize>,
    visited: &mut [bool],
    len: f64,
    best: &mut (Vec<usize>, f64),
) {
    if stack.len() > best.0.len() || (stack.len() == best.0.len() && len < best.1) {
        *best = (stack.clone(), len);
    }
    let last = *stack.last().expect("rooted");
    for next in 0..points.len() {
        if visited[next] {
            continue;
        }
        let step = len + points.distance(last, next);
        if step > cap {
            continue;
        }
        visited[next] = true;
        stack.push(next);
        extend(points, cap, stack, visited, step, best);
        stack.pop();
        visited[next] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> PointSet {
        PointSet::from_coords((0..n).map(|x| vec![x as f64])).unwrap()
    }

    #[test]
    fn ktsp_examples() {
        let b = OracleBudget::default();
        let (p, len) = brute_ktsp(&line(4), 0, 3, 4, &b).unwrap();
        assert_eq!(len, 3.0);
        assert_eq!(p.visits(), &[0, 1, 2, 3]);
        let (p, len) = brute_ktsp(&line(4), 0, 3, 2, &b).unwrap();
        assert_eq!(len, 3.0);
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn mktsp_endpoints_only() {
        let pts = PointSet::from_coords(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 3.0],
            vec![2.0, 3.0],
        ])
        .unwrap();
        let (mp, len) = brute_mktsp(&pts, &[(0, 1), (2, 3)], 4, &OracleBudget::default()).unwrap();
        assert_eq!(len, 3.0);
        assert_eq!(mp.visited_count(), 4);
    }

    #[test]
    fn orienteering_budget_edges() {
        let b = OracleBudget::default();
        assert_eq!(brute_orienteering(&line(5), 0, 0.0, &b).unwrap().0, 1);
        assert_eq!(brute_orienteering(&line(5), 0, 4.0, &b).unwrap().0, 5);
        assert_eq!(brute_orienteering(&line(5), 2, 3.0, &b).unwrap().0, 3);
    }

    #[test]
    fn caps_are_enforced() {
        let tight = OracleBudget {
            max_points: 3,
            max_paths: 1,
        };
        assert!(matches!(
            brute_ktsp(&line(4), 0, 3, 2, &tight),
            Err(Error::Capacity { .. })
        ));
        let pts = line(3);
        assert!(matches!(
            brute_mktsp(&pts, &[(0, 1), (1, 2)], 3, &tight),
            Err(Error::Capacity { .. })
        ));
    }
}

//! Plane-sweep dynamic program for the rooted k-TSP path problem.
//!
//! Points are ranked along the `s -> t` direction. Entry `(i, d, k')` holds
//! the cheapest `s`-rooted path ending at `d` that visits `k'` points among
//! the first `i + 1` ranks. A path is built from consecutive rank blocks:
//! the first block contains `s` and may start anywhere left of it, every
//! later block is entered by a forward bridge and solved by the window
//! oracle.

use crate::error::{Error, Result};
use crate::geometry::{rotate_to_axis, PointSet, SweepOrder, Transform};
use crate::path::Path;
use crate::window::ids_between;
use crate::window_solver::{EndpointArrays, ExactWindowSolver, WindowOracle};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KtspConfig {
    pub delta: f64,
}

impl KtspConfig {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidInput(format!(
                "delta must lie in (0, 1), got {delta}"
            )));
        }
        Ok(Self { delta })
    }

    /// Relative accuracy requested from the window oracle.
    pub fn window_accuracy(&self) -> f64 {
        self.delta / 4.0
    }
}

impl Default for KtspConfig {
    fn default() -> Self {
        Self { delta: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KtspSolution {
    pub path: Path,
    pub length: f64,
    pub visited: usize,
    pub window_accuracy: f64,
    /// Rigid map from input coordinates to the sweep frame.
    pub transform: Transform,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Back {
    /// Single block from the left end of the order up to `i`.
    Prefix,
    /// Bridge from `from_end` (rank) at block end `j` into entry rank `entry`.
    Stitch {
        j: usize,
        from_end: usize,
        entry: usize,
        from_count: usize,
    },
}

pub fn solve_ktsp(
    points: &PointSet,
    source: usize,
    sink: usize,
    k: usize,
    delta: f64,
) -> Result<KtspSolution> {
    solve_ktsp_with(
        &ExactWindowSolver::default(),
        points,
        source,
        sink,
        k,
        KtspConfig::new(delta)?,
    )
}

pub fn solve_ktsp_with<O: WindowOracle + ?Sized>(
    oracle: &O,
    points: &PointSet,
    source: usize,
    sink: usize,
    k: usize,
    config: KtspConfig,
) -> Result<KtspSolution> {
    points.check_id(source)?;
    points.check_id(sink)?;
    if source == sink {
        return Err(Error::Degenerate(
            "k-TSP needs distinct source and sink".into(),
        ));
    }
    let n = points.len();
    if k < 2 {
        return Err(Error::InvalidInput(format!(
            "k must be at least 2, got {k}"
        )));
    }
    if k > n {
        return Err(Error::Infeasible(format!(
            "cannot visit {k} points out of {n}"
        )));
    }
    let accuracy = config.window_accuracy();

    let (frame, transform) = if points.distance(source, sink) > 0.0 {
        rotate_to_axis(points, points.point(source), points.point(sink))?
    } else {
        (points.clone(), Transform::identity(points.dim()))
    };
    let order = frame.sweep_order();
    let rs = order.rank_of(source);

    // value[i][d][k'] and back[i][d][k'], with d a rank <= i.
    let mut value = vec![vec![vec![f64::INFINITY; k + 1]; n]; n];
    let mut back = vec![vec![vec![None::<Back>; k + 1]; n]; n];

    for i in rs..n {
        let window = ids_between(&order, 0, i);
        let table = oracle.path_lengths(points, &window, source, k, accuracy)?;
        for d in 0..=i {
            for kk in 1..=k {
                if table[d][kk] < value[i][d][kk] {
                    value[i][d][kk] = table[d][kk];
                    back[i][d][kk] = Some(Back::Prefix);
                }
            }
        }
    }

    for i in rs + 1..n {
        for j in rs..i {
            let window = ids_between(&order, j + 1, i);
            let w = window.len();
            for (ci, &c) in window.iter().enumerate() {
                let table = oracle.path_lengths(points, &window, c, k - 1, accuracy)?;
                let entry = j + 1 + ci;
                for from_end in 0..=j {
                    let bridge = points.distance(order.id_at(from_end), c);
                    for from_count in 1..k {
                        let base = value[j][from_end][from_count];
                        if !base.is_finite() {
                            continue;
                        }
                        let head = base + bridge;
                        for di in 0..w {
                            let d = j + 1 + di;
                            for kappa in 1..=(k - from_count) {
                                let cand = head + table[di][kappa];
                                let kk = from_count + kappa;
                                if cand < value[i][d][kk] {
                                    value[i][d][kk] = cand;
                                    back[i][d][kk] = Some(Back::Stitch {
                                        j,
                                        from_end,
                                        entry,
                                        from_count,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    let rt = order.rank_of(sink);
    let best = value[n - 1][rt][k];
    if !best.is_finite() {
        return Err(Error::Infeasible(format!(
            "no path from {source} to {sink} visits {k} points"
        )));
    }
    let visits = reconstruct(
        oracle,
        points,
        &order,
        &back,
        source,
        (n - 1, rt, k),
        accuracy,
    )?;
    let path = Path::new(visits)?;
    let length = path.length(points);
    if (length - best).abs() > points.length_slack() {
        return Err(Error::Internal(format!(
            "reconstructed length {length} differs from table value {best}"
        )));
    }
    Ok(KtspSolution {
        visited: path.len(),
        path,
        length,
        window_accuracy: accuracy,
        transform,
    })
}

fn reconstruct<O: WindowOracle + ?Sized>(
    oracle: &O,
    points: &PointSet,
    order: &SweepOrder,
    back: &[Vec<Vec<Option<Back>>>],
    source: usize,
    mut at: (usize, usize, usize),
    accuracy: f64,
) -> Result<Vec<usize>> {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    loop {
        let (i, d, kk) = at;
        let step = back[i][d][kk].ok_or_else(|| Error::Internal("missing backpointer".into()))?;
        let (lo, entry, next) = match step {
            Back::Prefix => (0, source, None),
            Back::Stitch {
                j,
                from_end,
                entry,
                from_count,
            } => (j + 1, order.id_at(entry), Some((j, from_end, from_count))),
        };
        let window = ids_between(order, lo, i);
        let kappa = kk - next.map_or(0, |n| n.2);
        let sol = oracle.solve(
            points,
            &window,
            &EndpointArrays::single(entry, order.id_at(d)),
            kappa,
            accuracy,
        )?;
        let piece = sol.paths.into_iter().next().flatten().ok_or_else(|| {
            Error::Internal(format!(
                "window query for ranks {lo}..={i} is infeasible on replay"
            ))
        })?;
        blocks.push(piece.visits().to_vec());
        match next {
            Some(prev) => at = prev,
            None => break,
        }
    }
    Ok(blocks.into_iter().rev().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(rows: &[&[f64]]) -> PointSet {
        PointSet::from_coords(rows.iter().map(|r| r.to_vec())).unwrap()
    }

    #[test]
    fn collinear_is_monotone() {
        let pts = set(&[&[0.0, 0.0], &[1.0, 0.0], &[2.0, 0.0], &[3.0, 0.0]]);
        let sol = solve_ktsp(&pts, 0, 3, 4, 0.5).unwrap();
        assert!((sol.length - 3.0).abs() < 1e-12);
        assert_eq!(sol.path.visits(), &[0, 1, 2, 3]);
        assert!(sol.path.excess(&pts).abs() < 1e-12);
    }

    #[test]
    fn detour_left_of_source() {
        let pts = set(&[&[0.0, 0.0], &[1.0, 0.0], &[-1.0, 0.0]]);
        let sol = solve_ktsp(&pts, 0, 1, 3, 0.5).unwrap();
        assert!((sol.length - 3.0).abs() < 1e-12);
        assert_eq!(sol.path.visits(), &[0, 2, 1]);
    }

    #[test]
    fn two_points_is_the_direct_edge() {
        let pts = set(&[&[0.0, 0.0], &[0.3, 0.4], &[5.0, 5.0]]);
        let sol = solve_ktsp(&pts, 0, 1, 2, 0.25).unwrap();
        assert!((sol.length - 0.5).abs() < 1e-12);
        assert!((sol.window_accuracy - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_requests() {
        let pts = set(&[&[0.0, 0.0], &[1.0, 0.0]]);
        assert!(matches!(
            solve_ktsp(&pts, 0, 0, 2, 0.5),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            solve_ktsp(&pts, 0, 1, 3, 0.5),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            solve_ktsp(&pts, 0, 1, 2, 1.5),
            Err(Error::InvalidInput(_))
        ));
    }
}

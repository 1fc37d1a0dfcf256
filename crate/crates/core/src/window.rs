//! Windows: closed slabs between two points' sweep coordinates.
//!
//! A window is named by the ids of its two boundary points, so membership is
//! decided by the tie-broken sweep order rather than by comparing floats.

use crate::error::{Error, Result};
use crate::geometry::{PointSet, SweepOrder};
use crate::path::Path;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub left: usize,
    pub right: usize,
    pub width: f64,
}

impl Window {
    pub fn new(points: &PointSet, left: usize, right: usize) -> Result<Self> {
        points.check_id(left)?;
        points.check_id(right)?;
        if points.sweep_cmp(left, right).is_gt() {
            return Err(Error::InvalidInput(format!(
                "window boundary {left} lies after {right} in sweep order"
            )));
        }
        Ok(Self::spanning(points, left, right))
    }

    fn spanning(points: &PointSet, left: usize, right: usize) -> Self {
        Self {
            left,
            right,
            width: points.point(right).sweep() - points.point(left).sweep(),
        }
    }

    pub fn contains(&self, points: &PointSet, id: usize) -> bool {
        points.sweep_cmp(self.left, id).is_le() && points.sweep_cmp(id, self.right).is_le()
    }
}

/// All windows `w(a, b)` with `a <= b` in sweep order: `n(n+1)/2` of them.
pub fn enumerate_windows(points: &PointSet) -> Vec<Window> {
    let order = points.sweep_order();
    let n = order.len();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for a in 0..n {
        for b in a..n {
            out.push(Window::spanning(points, order.id_at(a), order.id_at(b)));
        }
    }
    out
}

/// Ids inside `w`, boundaries included, in sweep order.
pub fn window_points(w: &Window, points: &PointSet) -> Vec<usize> {
    let order = points.sweep_order();
    ids_between(&order, order.rank_of(w.left), order.rank_of(w.right))
}

pub(crate) fn ids_between(order: &SweepOrder, lo_rank: usize, hi_rank: usize) -> Vec<usize> {
    (lo_rank..=hi_rank).map(|r| order.id_at(r)).collect()
}

/// How a path splits into disjoint windows covering all of its backward
/// edges, joined by sweep-monotone segments.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowDecomposition {
    pub windows: Vec<Window>,
    /// Visit positions of the first and last point of the path in each window.
    pub entry_exit: Vec<(usize, usize)>,
    /// Visit-position ranges of the monotone pieces between windows.
    pub monotone_segments: Vec<(usize, usize)>,
}

/// Finds the maximal backward sub-paths, covers each with its window, and
/// merges overlapping windows until they are pairwise disjoint.
pub fn decompose_path(path: &Path, points: &PointSet) -> WindowDecomposition {
    let order = points.sweep_order();
    let intervals = merged_backward_intervals(std::slice::from_ref(path), points, &order);
    let visits = path.visits();

    let mut windows = Vec::new();
    let mut entry_exit = Vec::new();
    for &(lo, hi) in &intervals {
        let inside = |v: &usize| (lo..=hi).contains(&order.rank_of(*v));
        let first = visits
            .iter()
            .position(inside)
            .expect("window built from path visits");
        let last = visits
            .iter()
            .rposition(inside)
            .expect("window built from path visits");
        windows.push(Window::spanning(points, order.id_at(lo), order.id_at(hi)));
        entry_exit.push((first, last));
    }

    let mut monotone_segments = Vec::new();
    let mut cursor = 0;
    for &(entry, exit) in &entry_exit {
        if entry > cursor {
            monotone_segments.push((cursor, entry));
        }
        cursor = exit;
    }
    if cursor + 1 < visits.len() {
        monotone_segments.push((cursor, visits.len() - 1));
    }

    WindowDecomposition {
        windows,
        entry_exit,
        monotone_segments,
    }
}

/// Windows covering the backward edges of several paths at once, with the
/// per-path entry/exit positions (`None` when a path misses the window).
#[derive(Debug, Clone, PartialEq)]
pub struct MultiDecomposition {
    pub windows: Vec<Window>,
    pub entry_exit: Vec<Vec<Option<(usize, usize)>>>,
}

pub fn decompose_paths(paths: &[Path], points: &PointSet) -> MultiDecomposition {
    let order = points.sweep_order();
    let intervals = merged_backward_intervals(paths, points, &order);
    let mut windows = Vec::new();
    let mut entry_exit = Vec::new();
    for &(lo, hi) in &intervals {
        windows.push(Window::spanning(points, order.id_at(lo), order.id_at(hi)));
        entry_exit.push(
            paths
                .iter()
                .map(|p| {
                    let inside = |v: &usize| (lo..=hi).contains(&order.rank_of(*v));
                    let first = p.visits().iter().position(inside)?;
                    let last = p.visits().iter().rposition(inside)?;
                    Some((first, last))
                })
                .collect(),
        );
    }
    MultiDecomposition {
        windows,
        entry_exit,
    }
}

fn merged_backward_intervals(
    paths: &[Path],
    points: &PointSet,
    order: &SweepOrder,
) -> Vec<(usize, usize)> {
    let mut intervals: Vec<(usize, usize)> = Vec::new();
    for path in paths {
        let visits = path.visits();
        let mut pos = 0;
        while pos + 1 < visits.len() {
            if points.sweep_cmp(visits[pos + 1], visits[pos]).is_lt() {
                let start = pos;
                while pos + 1 < visits.len()
                    && points.sweep_cmp(visits[pos + 1], visits[pos]).is_lt()
                {
                    pos += 1;
                }
                // Ranks decrease along the run: its window is [rank(end), rank(start)].
                intervals.push((order.rank_of(visits[pos]), order.rank_of(visits[start])));
            } else {
                pos += 1;
            }
        }
    }
    intervals.sort_unstable();
    let mut merged: Vec<(usize, usize)> = Vec::new();
    for (lo, hi) in intervals {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    merged
}

/// Length of the sub-path between the entry and exit positions minus the
/// sweep-axis distance they cover.
pub fn window_excess(
    path: &Path,
    points: &PointSet,
    w: &Window,
    entry: usize,
    exit: usize,
) -> Result<f64> {
    if entry > exit || exit >= path.len() {
        return Err(Error::InvalidInput(format!(
            "bad entry/exit positions {entry}..{exit} for a path of {} visits",
            path.len()
        )));
    }
    let (c, d) = (path.visits()[entry], path.visits()[exit]);
    if !w.contains(points, c) || !w.contains(points, d) {
        return Err(Error::InvalidInput(
            "entry or exit point outside the window".into(),
        ));
    }
    let advance = (points.point(d).sweep() - points.point(c).sweep()).abs();
    Ok(path.sub_length(points, entry, exit) - advance)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> PointSet {
        PointSet::from_coords(xs.iter().map(|&x| vec![x, 0.0])).unwrap()
    }

    #[test]
    fn window_counts() {
        assert_eq!(enumerate_windows(&line(&[0.0])).len(), 1);
        assert_eq!(enumerate_windows(&line(&[0.0, 1.0, 2.0])).len(), 6);
        let ten: Vec<f64> = (0..10).map(f64::from).collect();
        assert_eq!(enumerate_windows(&line(&ten)).len(), 55);
        assert_eq!(enumerate_windows(&line(&[0.0]))[0].width, 0.0);
    }

    #[test]
    fn window_membership() {
        let pts = line(&[3.0, 0.0, 2.0, 1.0]);
        let w = Window::new(&pts, 3, 2).unwrap();
        assert_eq!(window_points(&w, &pts), vec![3, 2]);
        let zero = Window::new(&pts, 1, 1).unwrap();
        assert_eq!(window_points(&zero, &pts), vec![1]);
        let full = Window::new(&pts, 1, 0).unwrap();
        assert_eq!(window_points(&full, &pts), vec![1, 3, 2, 0]);
        assert!(Window::new(&pts, 0, 1).is_err());
    }

    #[test]
    fn monotone_path_has_no_windows() {
        let pts = line(&[0.0, 1.0, 2.0, 3.0]);
        let d = decompose_path(&Path::new(vec![0, 1, 2, 3]).unwrap(), &pts);
        assert!(d.windows.is_empty());
        assert_eq!(d.monotone_segments, vec![(0, 3)]);
    }

    #[test]
    fn fold_back_excess() {
        let pts = line(&[0.0, 2.0, 1.0]);
        let path = Path::new(vec![0, 1, 2]).unwrap();
        let w = Window::new(&pts, 0, 1).unwrap();
        assert_eq!(window_excess(&path, &pts, &w, 0, 2).unwrap(), 2.0);
        let d = decompose_path(&path, &pts);
        assert_eq!(d.windows.len(), 1);
        assert_eq!((d.windows[0].left, d.windows[0].right), (2, 1));
    }

    /// Sixteen visits with three backward runs; the first two overlap.
    fn three_run_path() -> (PointSet, Path) {
        let xs = [
            0.0, 1.0, 2.0, 4.0, 3.0, 5.0, 3.5, 6.0, 7.0, 8.0, 10.0, 9.0, 11.0, 12.0, 13.0, 14.0,
        ];
        let pts = PointSet::from_coords(
            xs.iter()
                .enumerate()
                .map(|(i, &x)| vec![x, if i % 2 == 0 { 0.0 } else { 0.5 }]),
        )
        .unwrap();
        (pts, Path::new((0..16).collect()).unwrap())
    }

    #[test]
    fn overlapping_runs_merge() {
        let (pts, path) = three_run_path();
        let d = decompose_path(&path, &pts);
        let spans: Vec<(usize, usize)> = d.windows.iter().map(|w| (w.left, w.right)).collect();
        assert_eq!(spans, vec![(4, 5), (11, 10)]);
        assert_eq!(d.entry_exit, vec![(3, 6), (10, 11)]);
        assert_eq!(d.monotone_segments, vec![(0, 3), (6, 10), (11, 15)]);
        assert_eq!(d.windows[0].width, 2.0);
        assert_eq!(d.windows[1].width, 1.0);
    }

    #[test]
    fn straight_window_has_zero_excess() {
        let pts = line(&[0.0, 1.0, 2.0]);
        let path = Path::new(vec![0, 1, 2]).unwrap();
        let w = Window::new(&pts, 0, 2).unwrap();
        assert_eq!(window_excess(&path, &pts, &w, 0, 2).unwrap(), 0.0);
    }
}

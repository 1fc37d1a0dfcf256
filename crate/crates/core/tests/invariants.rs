//! Property tests for geometric invariants and the excess accounting
//! inequalities behind the sweep guarantees.

mod common;

use common::{close, cube, pairs, rng, two};
use orienteer_core::direction::{find_direction, margin_bound, max_segment_angle};
use orienteer_core::geometry::angle_to_axis;
use orienteer_core::mktsp::MktspConfig;
use orienteer_core::oracle::{brute_ktsp, brute_mktsp, brute_orienteering, OracleBudget};
use orienteer_core::orienteering::skeleton_indices;
use orienteer_core::path::{directed_edge_partition, offangle_bound_factor, offangle_edge_mass};
use orienteer_core::window::{decompose_path, decompose_paths, enumerate_windows, window_points};
use orienteer_core::{
    orient_pairs, rotate_to_axis, solve_ktsp, solve_mktsp, window_excess, Path, PointSet,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

const SLACK: f64 = 1e-12;

/// Random path over random points, rotated so it runs from the origin
/// along the positive first axis.
fn rotated_path(seed: u64, n: usize, d: usize) -> (PointSet, Path) {
    let mut r = rng(seed);
    let pts = cube(&mut r, n, d);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut r);
    let (s, t) = (order[0], order[n - 1]);
    let (rot, _) = rotate_to_axis(&pts, pts.point(s), pts.point(t)).unwrap();
    (rot, Path::new(order).unwrap())
}

fn axis(d: usize) -> Vec<f64> {
    let mut a = vec![0.0; d];
    a[0] = 1.0;
    a
}

/// Integer-grid points so that ties in the sweep coordinate are common.
fn grid_points() -> impl Strategy<Value = PointSet> {
    prop::collection::vec(prop::collection::vec(-3i32..3, 2), 1..12).prop_map(|rows| {
        PointSet::from_coords(
            rows.into_iter()
                .map(|r| r.into_iter().map(f64::from).collect::<Vec<_>>()),
        )
        .unwrap()
    })
}

proptest! {
    #[test]
    fn sweep_order_is_a_total_order(pts in grid_points()) {
        let n = pts.len();
        for a in 0..n {
            prop_assert!(pts.sweep_cmp(a, a).is_eq());
            for b in 0..n {
                prop_assert_eq!(pts.sweep_cmp(a, b), pts.sweep_cmp(b, a).reverse());
                if a != b {
                    prop_assert!(!pts.sweep_cmp(a, b).is_eq());
                }
                for c in 0..n {
                    if pts.sweep_cmp(a, b).is_lt() && pts.sweep_cmp(b, c).is_lt() {
                        prop_assert!(pts.sweep_cmp(a, c).is_lt());
                    }
                }
            }
        }
        let order = pts.sweep_order();
        for r in 0..n {
            prop_assert_eq!(order.rank_of(order.id_at(r)), r);
        }
    }

    #[test]
    fn windows_cover_rank_ranges(pts in grid_points()) {
        let n = pts.len();
        let windows = enumerate_windows(&pts);
        prop_assert_eq!(windows.len(), n * (n + 1) / 2);
        let order = pts.sweep_order();
        for w in &windows {
            let inside = window_points(w, &pts);
            prop_assert_eq!(inside.len(), order.rank_of(w.right) - order.rank_of(w.left) + 1);
            prop_assert!(w.width >= 0.0);
            for id in 0..n {
                prop_assert_eq!(w.contains(&pts, id), inside.contains(&id));
            }
        }
    }

    #[test]
    fn rotation_puts_the_pair_on_the_axis(seed in any::<u64>(), n in 2usize..8, d in 1usize..5) {
        let mut r = rng(seed);
        let pts = cube(&mut r, n, d);
        let (s, t) = two(&mut r, n);
        prop_assume!(pts.distance(s, t) > 1e-6);
        let (rot, tr) = rotate_to_axis(&pts, pts.point(s), pts.point(t)).unwrap();
        prop_assert!(rot.point(s).coords().iter().all(|c| c.abs() < 1e-12));
        let tt = rot.point(t).coords();
        prop_assert!((tt[0] - pts.distance(s, t)).abs() < 1e-12);
        prop_assert!(tt[1..].iter().all(|c| c.abs() < 1e-12));
        for a in 0..n {
            for b in 0..n {
                prop_assert!((rot.distance(a, b) - pts.distance(a, b)).abs() < 1e-12);
            }
            let back = tr.invert(rot.point(a));
            prop_assert!(back.coords().iter().zip(pts.point(a).coords()).all(|(x, y)| (x - y).abs() < 1e-12));
        }
    }

    #[test]
    fn decomposition_covers_backward_edges(seed in any::<u64>(), n in 2usize..14, d in 2usize..4) {
        let (pts, path) = rotated_path(seed, n, d);
        let dec = decompose_path(&path, &pts);
        let order = pts.sweep_order();
        let spans: Vec<(usize, usize)> = dec
            .windows
            .iter()
            .map(|w| (order.rank_of(w.left), order.rank_of(w.right)))
            .collect();
        for pair in spans.windows(2) {
            prop_assert!(pair[0].1 < pair[1].0, "windows overlap");
        }
        for (a, b) in path.edges() {
            if pts.sweep_cmp(b, a).is_lt() {
                prop_assert!(dec.windows.iter().any(|w| w.contains(&pts, a) && w.contains(&pts, b)));
            }
        }
        for (w, &(c, dd)) in dec.windows.iter().zip(&dec.entry_exit) {
            prop_assert!(c < dd);
            prop_assert!(w.contains(&pts, path.visits()[c]) && w.contains(&pts, path.visits()[dd]));
        }
        let multi = decompose_paths(std::slice::from_ref(&path), &pts);
        prop_assert_eq!(multi.windows, dec.windows);
    }

    #[test]
    fn backward_mass_is_bounded_by_excess(seed in any::<u64>(), n in 2usize..14, d in 2usize..4) {
        let (pts, path) = rotated_path(seed, n, d);
        let part = directed_edge_partition(&path, &pts, &axis(d)).unwrap();
        prop_assert!(part.backward_length <= path.excess(&pts) + SLACK);
        prop_assert!((part.forward_length + part.backward_length - path.length(&pts)).abs() < 1e-9);
    }

    #[test]
    fn window_excesses_sum_below_excess(seed in any::<u64>(), n in 2usize..14, d in 2usize..4) {
        let (pts, path) = rotated_path(seed, n, d);
        let dec = decompose_path(&path, &pts);
        let total: f64 = dec
            .windows
            .iter()
            .zip(&dec.entry_exit)
            .map(|(w, &(c, dd))| window_excess(&path, &pts, w, c, dd).unwrap())
            .sum();
        prop_assert!(total <= path.excess(&pts) + SLACK);
    }

    #[test]
    fn window_subpath_is_charged(seed in any::<u64>(), n in 2usize..14, d in 2usize..4) {
        let (pts, path) = rotated_path(seed, n, d);
        let dec = decompose_path(&path, &pts);
        for (w, &(c, dd)) in dec.windows.iter().zip(&dec.entry_exit) {
            let sub = path.sub_length(&pts, c, dd);
            let back: f64 = path.visits()[c..=dd]
                .windows(2)
                .filter(|e| pts.sweep_cmp(e[1], e[0]).is_lt())
                .map(|e| pts.distance(e[0], e[1]))
                .sum();
            let we = window_excess(&path, &pts, w, c, dd).unwrap();
            prop_assert!(sub <= 2.0 * back.max(we) + SLACK, "{sub} > 2 max({back}, {we})");
        }
    }

    #[test]
    fn offangle_mass_is_bounded(seed in any::<u64>(), n in 2usize..14, d in 2usize..4) {
        let (pts, path) = rotated_path(seed, n, d);
        let e = path.excess(&pts);
        for gamma in [0.1, 0.5, 1.0] {
            let mass = offangle_edge_mass(&path, &pts, gamma).unwrap();
            prop_assert!(mass <= offangle_bound_factor(gamma) * e + SLACK);
        }
    }

    #[test]
    fn direction_margin_holds(seed in any::<u64>(), m in 1usize..6, d in 1usize..6) {
        let mut r = rng(seed);
        let vectors: Vec<Vec<f64>> = (0..m)
            .map(|_| loop {
                let v: Vec<f64> = (0..d).map(|_| r.gen_range(-1.0..1.0)).collect();
                let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if len > 1e-3 {
                    break v.into_iter().map(|x| x / len).collect();
                }
            })
            .collect();
        let res = find_direction(&vectors, seed).unwrap();
        prop_assert!(res.margin >= margin_bound(m, d));
        prop_assert_eq!(res.signs[0], 1);
        prop_assert!((res.axis.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oriented_pairs_lie_in_the_cone(seed in any::<u64>(), m in 1usize..5, d in 1usize..5) {
        let mut r = rng(seed);
        let pts = cube(&mut r, 2 * m, d);
        let pr = pairs(&mut r, 2 * m, m);
        let o = orient_pairs(&pts, &pr, seed).unwrap();
        let frame = o.transform.apply_set(&pts);
        for (&(s, t), &sw) in pr.iter().zip(&o.swapped) {
            let (a, b) = if sw { (t, s) } else { (s, t) };
            let v: Vec<f64> = frame.point(b).coords().iter().zip(frame.point(a).coords()).map(|(y, x)| y - x).collect();
            prop_assert!(angle_to_axis(&v).unwrap() <= max_segment_angle(m) + 1e-12);
        }
    }

    #[test]
    fn solutions_recompute_consistently(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(3..=8);
        let pts = cube(&mut r, n, 2);
        let (s, t) = two(&mut r, n);
        let k = r.gen_range(2..=n);
        let sol = solve_ktsp(&pts, s, t, k, 0.25).unwrap();
        prop_assert!((sol.path.length(&pts) - sol.length).abs() <= 1e-9);
        prop_assert!(sol.path.visits().len() >= k);
    }
}

#[test]
fn skeleton_formula_is_exhaustively_sound() {
    for k in 2..=64 {
        for m in 1..=8 {
            let a = skeleton_indices(k, m).unwrap();
            assert_eq!(a.len(), m + 1);
            assert_eq!(a[0], 1);
            assert_eq!(a[m], k);
            for w in a.windows(2) {
                assert!(w[1] >= w[0]);
                assert!(w[1] - w[0] <= (k - 1) / m + 1, "k={k} m={m} {a:?}");
            }
        }
    }
}

#[test]
fn optimal_ktsp_paths_fit_the_stitching_bound() {
    let budget = OracleBudget::default();
    let mut r = rng(21);
    for _ in 0..40 {
        let n = r.gen_range(3..=8);
        let pts = cube(&mut r, n, 2);
        let (s, t) = two(&mut r, n);
        let k = r.gen_range(2..=n);
        let (path, opt) = brute_ktsp(&pts, s, t, k, &budget).unwrap();
        let (rot, _) = rotate_to_axis(&pts, pts.point(s), pts.point(t)).unwrap();
        let dec = decompose_path(&path, &rot);
        let windows: f64 = dec
            .entry_exit
            .iter()
            .map(|&(c, d)| path.sub_length(&rot, c, d))
            .sum();
        let excess = opt - pts.distance(s, t);
        for delta in [0.25, 0.5] {
            assert!(opt + delta / 4.0 * windows <= opt + delta * excess + SLACK);
        }
    }
}

#[test]
fn optimal_multipaths_fit_the_error_chain() {
    let budget = OracleBudget::default();
    let mut r = rng(22);
    for _ in 0..40 {
        let n = r.gen_range(4..=8);
        let m = r.gen_range(1..=3usize).min(n / 2);
        let pts = cube(&mut r, n, 2);
        let pr = pairs(&mut r, n, m);
        let k = r.gen_range(1..=n);
        let (multi, _) = brute_mktsp(&pts, &pr, k, &budget).unwrap();
        let o = orient_pairs(&pts, &pr, 0).unwrap();
        let frame = o.transform.apply_set(&pts);
        let paths: Vec<Path> = multi
            .paths()
            .iter()
            .zip(&o.swapped)
            .map(|(p, &sw)| if sw { p.reversed() } else { p.clone() })
            .collect();
        let spread = 8.0 * (m as f64).powf(1.5);
        let excess = multi.excess(&pts);
        let (mut back, mut off, mut widths) = (0.0, 0.0, 0.0);
        for p in &paths {
            let part = directed_edge_partition(p, &frame, &[1.0, 0.0]).unwrap();
            back += part.backward_length;
            let heading: Vec<f64> = frame
                .point(p.sink())
                .coords()
                .iter()
                .zip(frame.point(p.source()).coords())
                .map(|(y, x)| y - x)
                .collect();
            for &(a, b) in &part.forward {
                let e: Vec<f64> = frame
                    .point(b)
                    .coords()
                    .iter()
                    .zip(frame.point(a).coords())
                    .map(|(y, x)| y - x)
                    .collect();
                let len = frame.distance(a, b);
                if len == 0.0 {
                    continue;
                }
                let cos = (e[0] * heading[0] + e[1] * heading[1])
                    / (len * frame.distance(p.source(), p.sink()));
                if cos.clamp(-1.0, 1.0).acos() > 1.0 / (2.0 * spread) {
                    off += len;
                } else {
                    assert!(e[0] > len / (3.0 * spread), "steep edge barely advances");
                }
            }
        }
        for w in decompose_paths(&paths, &frame).windows {
            widths += w.width;
        }
        assert!(back <= 24.0 * spread * spread / 11.0 * excess + SLACK);
        assert!(off <= 24.0 * (2.0 * spread).powi(2) / 11.0 * excess + SLACK);
        assert!(widths <= back + SLACK);

        let sol = solve_mktsp(&pts, &pr, k, &MktspConfig::default()).unwrap();
        assert!(close(sol.paths.total_length(&pts), sol.length));
    }
}

#[test]
fn dropping_the_worst_leg_fits_budget() {
    let budget = OracleBudget::default();
    let mut r = rng(23);
    for _ in 0..30 {
        let n = r.gen_range(3..=8);
        let pts = cube(&mut r, n, 2);
        let root = r.gen_range(0..n);
        let b = r.gen_range(0.2..2.5);
        let (k_opt, path) = brute_orienteering(&pts, root, b, &budget).unwrap();
        assert!(path.length(&pts) <= b + pts.length_slack());
        if k_opt < 2 {
            continue;
        }
        for m in 1..=3usize {
            let legs = m.min(k_opt - 1);
            let alpha = skeleton_indices(k_opt, legs).unwrap();
            let v = path.visits();
            let excess = |i: usize| {
                let (a, z) = (alpha[i] - 1, alpha[i + 1] - 1);
                path.sub_length(&pts, a, z) - pts.distance(v[a], v[z])
            };
            let worst = (0..legs)
                .max_by(|&x, &y| excess(x).total_cmp(&excess(y)))
                .unwrap();
            let (a, z) = (alpha[worst] - 1, alpha[worst + 1] - 1);
            let kept: Vec<usize> = v[..=a].iter().chain(&v[z..]).copied().collect();
            let shorter = Path::new(kept).unwrap();
            assert!(close(
                shorter.length(&pts),
                path.length(&pts) - excess(worst)
            ));
            assert!(shorter.len() as f64 >= (1.0 - 1.0 / legs as f64) * k_opt as f64 - 1e-9);
        }
    }
}

//! Excess-approximation sweeps for rooted k-TSP, (m,k)-TSP and Euclidean
//! orienteering, plus the geometric tools and brute-force oracles they are
//! checked against.
//!
//! Every solver sweeps the points along an axis and glues together
//! solutions of small "window" subproblems. The window subproblems are
//! answered by an exact bitmask solver, so at the supported sizes the
//! sweeps return optimal k-TSP and (m,k)-TSP solutions, and the orienteering
//! driver keeps its `(1 - delta)` visit guarantee.

#![allow(clippy::needless_range_loop)]

pub mod direction;
pub mod error;
pub mod geometry;
pub mod ktsp;
pub mod mktsp;
pub mod oracle;
pub mod orienteering;
pub mod path;
pub mod window;
pub mod window_solver;

pub use direction::{find_direction, orient_pairs, DirectionResult, Orientation};
pub use error::{Error, Result};
pub use geometry::{dist, rotate_to_axis, Point, PointSet, Transform};
pub use ktsp::{solve_ktsp, KtspConfig, KtspSolution};
pub use mktsp::{solve_mktsp, MktspConfig, MktspSolution};
pub use orienteering::{solve_orienteering, OrienteeringInstance, OrienteeringSolution};
pub use path::{MultiPath, Path};
pub use window::{decompose_path, enumerate_windows, window_excess, Window};
pub use window_solver::{EndpointArrays, ExactWindowSolver, WindowOracle, WindowSolution};

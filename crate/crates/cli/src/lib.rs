//! File formats, generators, verification and rendering around the
//! `orienteer-core` solvers, plus the command-line front end.

pub mod error;
pub mod format;
pub mod generate;
pub mod render;
pub mod solve;
pub mod verify;

pub use error::{CliError, CliResult};
pub use format::{InstanceFile, Kind, SolutionFile};
pub use generate::{generate, GenerateOptions, PointDistribution};
pub use render::render_svg;
pub use solve::{solve, SolveOptions};
pub use verify::{verify, VerifyReport};

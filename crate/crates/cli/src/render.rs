//! Deterministic SVG drawing of a planar solution.

use std::fmt::Write as _;

use orienteer_core::window::decompose_paths;
use orienteer_core::Path;

use crate::error::{CliError, CliResult};
use crate::format::{InstanceFile, SolutionFile};

const SIZE: f64 = 480.0;
const MARGIN: f64 = 20.0;

/// Draws points, path edges and, with `windows`, the slabs of the window
/// decomposition of the solution along the first axis.
pub fn render_svg(inst: &InstanceFile, sol: &SolutionFile, windows: bool) -> CliResult<String> {
    if inst.dimension != 2 {
        return Err(CliError::Unsupported(format!(
            "rendering needs planar points, got dimension {}",
            inst.dimension
        )));
    }
    let points = inst.point_set()?;
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &inst.points {
        for a in 0..2 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let x = |v: f64| MARGIN + (v - lo[0]) * scale;
    let y = |v: f64| SIZE - MARGIN - (v - lo[1]) * scale;

    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )
    .unwrap();
    writeln!(
        out,
        r#"<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>"#
    )
    .unwrap();

    if windows {
        let paths = sol
            .paths
            .iter()
            .map(|v| Path::new(v.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        for w in decompose_paths(&paths, &points).windows {
            let (a, b) = (
                x(points.point(w.left).coords()[0]),
                x(points.point(w.right).coords()[0]),
            );
            writeln!(
                out,
                r##"<rect class="window" x="{a:.3}" y="0" width="{:.3}" height="{SIZE}" fill="#c8d8f0" fill-opacity="0.6"/>"##,
                b - a
            )
            .unwrap();
        }
    }
    for path in &sol.paths {
        for e in path.windows(2) {
            let (p, q) = (&inst.points[e[0]], &inst.points[e[1]]);
            writeln!(
                out,
                r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black" stroke-width="1.5"/>"#,
                x(p[0]),
                y(p[1]),
                x(q[0]),
                y(q[1])
            )
            .unwrap();
        }
    }
    for (id, p) in inst.points.iter().enumerate() {
        let visited = sol.paths.iter().any(|v| v.contains(&id));
        writeln!(
            out,
            r#"<circle cx="{:.3}" cy="{:.3}" r="3" fill="{}"/>"#,
            x(p[0]),
            y(p[1]),
            if visited { "black" } else { "gray" }
        )
        .unwrap();
    }
    writeln!(out, "</svg>").unwrap();
    Ok(out)
}

//! Independent checks of a solution file against its instance.

use orienteer_core::oracle::{brute_ktsp, brute_mktsp, brute_orienteering, OracleBudget};
use orienteer_core::{Error as CoreError, MultiPath, Path, PointSet};
use serde::Serialize;

use crate::error::CliResult;
use crate::format::{InstanceFile, Kind, SolutionFile};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect()
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn add(&mut self, name: &'static str, passed: bool, detail: impl Into<String>) {
        self.0.push(Check {
            name,
            passed,
            detail: detail.into(),
        });
    }
}

fn relative_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Recomputes length, counts, endpoints and budget. With `oracle`, also
/// re-solves small instances by brute force and checks the approximation
/// guarantee.
pub fn verify(
    inst: &InstanceFile,
    sol: &SolutionFile,
    oracle: Option<&OracleBudget>,
) -> CliResult<VerifyReport> {
    inst.validate()?;
    let points = inst.point_set()?;
    let mut checks = Checks(Vec::new());

    checks.add(
        "kind",
        sol.kind == inst.kind,
        format!(
            "instance is {}, solution is {}",
            inst.kind.name(),
            sol.kind.name()
        ),
    );
    let paths: Result<Vec<Path>, String> = sol
        .paths
        .iter()
        .map(|v| {
            if let Some(bad) = v.iter().find(|&&id| id >= points.len()) {
                return Err(format!("index {bad} out of range"));
            }
            Path::new(v.clone()).map_err(|e| e.to_string())
        })
        .collect();
    let paths = match paths {
        Ok(p) => p,
        Err(e) => {
            checks.add("paths", false, e);
            return Ok(finish(checks));
        }
    };
    let multi = match MultiPath::new(paths) {
        Ok(m) => m,
        Err(e) => {
            checks.add("paths", false, e.to_string());
            return Ok(finish(checks));
        }
    };
    checks.add("paths", true, "");

    let length = multi.total_length(&points);
    checks.add(
        "length",
        relative_close(length, sol.length),
        if relative_close(length, sol.length) {
            String::new()
        } else {
            format!(
                "length mismatch: reported {}, recomputed {length}",
                sol.length
            )
        },
    );
    let visited = multi.visited_count();
    checks.add(
        "visited",
        visited == sol.visited,
        format!("reported {}, recomputed {visited}", sol.visited),
    );

    match inst.kind {
        Kind::Orienteering => {
            let (root, budget) = (inst.root.unwrap_or(0), inst.budget.unwrap_or(0.0));
            let ok = multi.paths().len() == 1 && multi.paths()[0].source() == root;
            checks.add(
                "endpoints",
                ok,
                format!("expected one path rooted at {root}"),
            );
            let slack = points.length_slack();
            checks.add(
                "budget",
                length <= budget + slack,
                format!("length {length} against budget {budget}"),
            );
        }
        Kind::Ktsp | Kind::Mktsp => {
            let pairs = inst.pairs.clone().unwrap_or_default();
            let ok = multi.paths().len() == pairs.len()
                && multi
                    .paths()
                    .iter()
                    .zip(&pairs)
                    .all(|(p, &(s, t))| p.source() == s && p.sink() == t);
            checks.add("endpoints", ok, "every path must join its pair in order");
            let k = inst.k.unwrap_or(0);
            checks.add(
                "count",
                visited >= k,
                format!("visits {visited}, needs {k}"),
            );
        }
    }

    if let Some(budget) = oracle {
        oracle_check(inst, &points, &multi, budget, &mut checks)?;
    }
    Ok(finish(checks))
}

fn finish(checks: Checks) -> VerifyReport {
    VerifyReport {
        passed: checks.0.iter().all(|c| c.passed),
        checks: checks.0,
    }
}

fn oracle_check(
    inst: &InstanceFile,
    points: &PointSet,
    multi: &MultiPath,
    budget: &OracleBudget,
    checks: &mut Checks,
) -> CliResult<()> {
    let slack = points.length_slack();
    let length = multi.total_length(points);
    let outcome = match inst.kind {
        Kind::Orienteering => brute_orienteering(
            points,
            inst.root.unwrap_or(0),
            inst.budget.unwrap_or(0.0),
            budget,
        )
        .map(|(k_opt, _)| {
            let need = ((1.0 - inst.delta) * k_opt as f64 - 1e-9).ceil() as usize;
            let got = multi.visited_count();
            (
                got >= need,
                format!("visits {got}, optimum {k_opt}, needs {need}"),
            )
        }),
        Kind::Ktsp | Kind::Mktsp => {
            let pairs = inst.pairs.clone().unwrap_or_default();
            let k = inst.k.unwrap_or(0);
            let opt = if pairs.len() == 1 {
                brute_ktsp(points, pairs[0].0, pairs[0].1, k, budget)
                    .map(|(p, len)| (len, p.excess(points)))
            } else {
                brute_mktsp(points, &pairs, k, budget).map(|(mp, len)| (len, mp.excess(points)))
            };
            opt.map(|(opt, excess)| {
                let bound = opt + inst.delta * excess;
                (
                    length <= bound + slack,
                    format!("length {length}, optimum {opt}, bound {bound}"),
                )
            })
        }
    };
    match outcome {
        Ok((ok, detail)) => checks.add("guarantee", ok, detail),
        Err(CoreError::Capacity { .. }) => {
            checks.add("guarantee", true, "skipped: instance exceeds oracle caps")
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

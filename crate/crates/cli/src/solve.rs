//! Runs a solver on an instance file and packages a verified solution.

use orienteer_core::ktsp::{solve_ktsp_with, KtspConfig};
use orienteer_core::mktsp::{solve_mktsp_with, MktspConfig};
use orienteer_core::oracle::OracleBudget;
use orienteer_core::orienteering::{
    solve_orienteering_with, OrienteeringConfig, OrienteeringInstance,
};
use orienteer_core::window_solver::DEFAULT_POINT_CAP;
use orienteer_core::ExactWindowSolver;

use crate::error::{CliError, CliResult};
use crate::format::{
    CertificateEcho, InstanceFile, Kind, SolutionFile, SolverEcho, FORMAT_VERSION,
};
use crate::verify::verify;

/// Environment variable overriding the oracle point cap.
pub const ORACLE_POINTS_ENV: &str = "ORIENTEER_MAX_POINTS";

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    /// Must match the instance kind when given.
    pub kind: Option<Kind>,
    pub delta: Option<f64>,
    pub k: Option<usize>,
    pub budget: Option<f64>,
    pub seed: u64,
    /// Check the guarantee against the brute-force oracle when it fits.
    pub oracle: Option<OracleBudget>,
    pub cap: Option<usize>,
}

pub fn oracle_budget_from_env() -> CliResult<OracleBudget> {
    let mut budget = OracleBudget::default();
    if let Ok(raw) = std::env::var(ORACLE_POINTS_ENV) {
        budget.max_points = raw.trim().parse().map_err(|_| {
            CliError::Malformed(format!(
                "{ORACLE_POINTS_ENV} must be an integer, got {raw:?}"
            ))
        })?;
    }
    Ok(budget)
}

/// Instance with command-line overrides applied.
pub fn with_overrides(inst: &InstanceFile, opts: &SolveOptions) -> CliResult<InstanceFile> {
    if let Some(kind) = opts.kind {
        if kind != inst.kind {
            return Err(CliError::Malformed(format!(
                "--kind {} does not match the {} instance",
                kind.name(),
                inst.kind.name()
            )));
        }
    }
    let mut out = inst.clone();
    if let Some(d) = opts.delta {
        out.delta = d;
    }
    if let Some(k) = opts.k {
        out.k = Some(k);
    }
    if let Some(b) = opts.budget {
        out.budget = Some(b);
    }
    out.validate()?;
    Ok(out)
}

pub fn solve(inst: &InstanceFile, opts: &SolveOptions) -> CliResult<SolutionFile> {
    let inst = with_overrides(inst, opts)?;
    let points = inst.point_set()?;
    let cap = opts.cap.unwrap_or(DEFAULT_POINT_CAP);
    let oracle = ExactWindowSolver::with_cap(cap);
    let mut config = SolverEcho {
        delta: inst.delta,
        seed: opts.seed,
        cap,
        window_accuracy: 0.0,
        k: inst.k,
        budget: inst.budget,
    };
    let (paths, length, visited, certificate) = match inst.kind {
        Kind::Ktsp => {
            let (s, t) = inst.pairs.as_ref().expect("validated")[0];
            let sol = solve_ktsp_with(
                &oracle,
                &points,
                s,
                t,
                inst.k.expect("validated"),
                KtspConfig::new(inst.delta)?,
            )?;
            config.window_accuracy = sol.window_accuracy;
            (
                vec![sol.path.visits().to_vec()],
                sol.length,
                sol.visited,
                None,
            )
        }
        Kind::Mktsp => {
            let cfg = MktspConfig {
                delta: inst.delta,
                seed: opts.seed,
                ..MktspConfig::default()
            };
            let pairs = inst.pairs.as_ref().expect("validated");
            let sol = solve_mktsp_with(&oracle, &points, pairs, inst.k.expect("validated"), &cfg)?;
            config.window_accuracy = sol.window_accuracy;
            let paths = sol
                .paths
                .paths()
                .iter()
                .map(|p| p.visits().to_vec())
                .collect();
            (paths, sol.length, sol.visited, None)
        }
        Kind::Orienteering => {
            let problem = OrienteeringInstance::new(
                points.clone(),
                inst.root.expect("validated"),
                inst.budget.expect("validated"),
                inst.delta,
            )?;
            let cfg = OrienteeringConfig {
                seed: opts.seed,
                ..OrienteeringConfig::default()
            };
            let sol = solve_orienteering_with(&oracle, &problem, &cfg)?;
            let legs = problem.legs() as f64;
            config.window_accuracy = MktspConfig::default().excess_constant / legs / legs.powf(5.5);
            let cert = CertificateEcho {
                k: sol.certificate.k,
                skeleton: sol.certificate.skeleton,
            };
            (
                vec![sol.path.visits().to_vec()],
                sol.length,
                sol.visited,
                Some(cert),
            )
        }
    };
    let mut out = SolutionFile {
        version: FORMAT_VERSION,
        kind: inst.kind,
        paths,
        length,
        visited,
        config,
        verification: "pending".into(),
        certificate,
    };
    let report = verify(&inst, &out, opts.oracle.as_ref())?;
    if !report.passed {
        return Err(CliError::Verification(report.failures()));
    }
    out.verification = if opts.oracle.is_some() {
        "passed-with-oracle"
    } else {
        "passed"
    }
    .into();
    Ok(out)
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use orienteer_cli::solve::oracle_budget_from_env;
use orienteer_cli::{
    generate, render_svg, solve, verify, CliError, CliResult, GenerateOptions, InstanceFile, Kind,
    PointDistribution, SolutionFile, SolveOptions,
};

#[derive(Parser)]
#[command(
    name = "orienteer",
    version,
    about = "Sweep solvers for orienteering and k-TSP path problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random instance.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        n: usize,
        #[arg(long, short, default_value_t = 2)]
        d: usize,
        #[arg(long, value_enum, default_value_t = PointDistribution::UniformCube)]
        distribution: PointDistribution,
        #[arg(long, value_enum, default_value_t = Kind::Orienteering)]
        kind: Kind,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long)]
        k: Option<usize>,
        /// Number of pairs for mktsp instances.
        #[arg(long, default_value_t = 2)]
        paths: usize,
        #[arg(long, default_value_t = 0.0)]
        jitter: f64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Solve an instance and print the verified solution.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum)]
        kind: Option<Kind>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also compare against the brute-force optimum.
        #[arg(long)]
        oracle_check: bool,
        /// Write an SVG drawing of the solution here.
        #[arg(long)]
        render_out: Option<PathBuf>,
        /// Largest window the exact subsolver accepts.
        #[arg(long)]
        cap_override: Option<usize>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Check a solution against its instance.
    Verify {
        instance: PathBuf,
        solution: PathBuf,
        #[arg(long)]
        oracle_check: bool,
    },
    /// Draw a planar solution as SVG.
    Render {
        instance: PathBuf,
        solution: PathBuf,
        /// Shade the windows of the solution's decomposition.
        #[arg(long)]
        windows: bool,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> CliResult<String> {
    Ok(std::fs::read_to_string(path)?)
}

fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Generate {
            seed,
            n,
            d,
            distribution,
            kind,
            delta,
            budget,
            k,
            paths,
            jitter,
            out,
        } => {
            let opts = GenerateOptions {
                kind,
                delta,
                budget,
                k,
                paths,
                jitter,
            };
            emit(
                &generate(seed, n, d, distribution, &opts)?.to_json(),
                out.as_deref(),
            )
        }
        Command::Solve {
            instance,
            kind,
            delta,
            k,
            budget,
            seed,
            oracle_check,
            render_out,
            cap_override,
            out,
        } => {
            let inst = InstanceFile::parse(&read(&instance)?)?;
            let opts = SolveOptions {
                kind,
                delta,
                k,
                budget,
                seed,
                oracle: if oracle_check {
                    Some(oracle_budget_from_env()?)
                } else {
                    None
                },
                cap: cap_override,
            };
            let sol = solve(&inst, &opts)?;
            if let Some(svg_path) = render_out {
                std::fs::write(svg_path, render_svg(&inst, &sol, true)?)?;
            }
            emit(&sol.to_json(), out.as_deref())
        }
        Command::Verify {
            instance,
            solution,
            oracle_check,
        } => {
            let inst = InstanceFile::parse(&read(&instance)?)?;
            let sol = SolutionFile::parse(&read(&solution)?)?;
            let oracle = if oracle_check {
                Some(oracle_budget_from_env()?)
            } else {
                None
            };
            let report = verify(&inst, &sol, oracle.as_ref())?;
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("reports serialize")
            );
            if report.passed {
                Ok(())
            } else {
                Err(CliError::Verification(report.failures()))
            }
        }
        Command::Render {
            instance,
            solution,
            windows,
            out,
        } => {
            let inst = InstanceFile::parse(&read(&instance)?)?;
            let sol = SolutionFile::parse(&read(&solution)?)?;
            emit(&render_svg(&inst, &sol, windows)?, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

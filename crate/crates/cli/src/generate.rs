//! Seeded instance generators. All coordinates lie in the unit cube.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal};

use crate::error::{CliError, CliResult};
use crate::format::{InstanceFile, Kind, FORMAT_VERSION};

pub const CLUSTER_RADIUS: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PointDistribution {
    UniformCube,
    Clustered,
    CollinearJitter,
}

/// What the generated instance asks for, beyond its points.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerateOptions {
    pub kind: Kind,
    pub delta: f64,
    /// Orienteering budget; defaults to 1.
    pub budget: Option<f64>,
    /// Visit target for the path kinds; defaults to all points.
    pub k: Option<usize>,
    /// Number of pairs for mktsp; pair `i` is `(2i, 2i + 1)`.
    pub paths: usize,
    /// Standard deviation of the offsets in collinear-jitter.
    pub jitter: f64,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        Self {
            kind: Kind::Orienteering,
            delta: 0.5,
            budget: None,
            k: None,
            paths: 2,
            jitter: 0.0,
        }
    }
}

pub fn generate_points(
    seed: u64,
    n: usize,
    d: usize,
    dist: PointDistribution,
    jitter: f64,
) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match dist {
        PointDistribution::UniformCube => (0..n)
            .map(|_| (0..d).map(|_| rng.gen::<f64>()).collect())
            .collect(),
        PointDistribution::Clustered => {
            let clusters = n.div_ceil(5).max(1);
            let centers: Vec<Vec<f64>> = (0..clusters)
                .map(|_| {
                    (0..d)
                        .map(|_| rng.gen_range(CLUSTER_RADIUS..=1.0 - CLUSTER_RADIUS))
                        .collect()
                })
                .collect();
            (0..n)
                .map(|i| {
                    let c = &centers[i % clusters];
                    let dir: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
                    let len = dir
                        .iter()
                        .map(|x| x * x)
                        .sum::<f64>()
                        .sqrt()
                        .max(f64::MIN_POSITIVE);
                    let r = CLUSTER_RADIUS * rng.gen::<f64>().powf(1.0 / d as f64);
                    c.iter()
                        .zip(&dir)
                        .map(|(ci, di)| (ci + r * di / len).clamp(0.0, 1.0))
                        .collect()
                })
                .collect()
        }
        PointDistribution::CollinearJitter => (0..n)
            .map(|_| {
                let t: f64 = rng.gen();
                (0..d)
                    .map(|_| {
                        let off: f64 = StandardNormal.sample(&mut rng);
                        (t + jitter * off).clamp(0.0, 1.0)
                    })
                    .collect()
            })
            .collect(),
    }
}

pub fn generate(
    seed: u64,
    n: usize,
    d: usize,
    dist: PointDistribution,
    opts: &GenerateOptions,
) -> CliResult<InstanceFile> {
    if n == 0 || d == 0 {
        return Err(CliError::Malformed("need n >= 1 and d >= 1".into()));
    }
    let points = generate_points(seed, n, d, dist, opts.jitter);
    let mut inst = InstanceFile {
        version: FORMAT_VERSION,
        kind: opts.kind,
        dimension: d,
        points,
        root: None,
        budget: None,
        pairs: None,
        k: None,
        delta: opts.delta,
    };
    match opts.kind {
        Kind::Orienteering => {
            inst.root = Some(0);
            inst.budget = Some(opts.budget.unwrap_or(1.0));
        }
        Kind::Ktsp => {
            if n < 2 {
                return Err(CliError::Malformed("ktsp needs at least two points".into()));
            }
            inst.pairs = Some(vec![(0, n - 1)]);
            inst.k = Some(opts.k.unwrap_or(n));
        }
        Kind::Mktsp => {
            if opts.paths == 0 || 2 * opts.paths > n {
                return Err(CliError::Malformed(format!(
                    "{} disjoint pairs need at least {} points",
                    opts.paths,
                    2 * opts.paths
                )));
            }
            inst.pairs = Some((0..opts.paths).map(|i| (2 * i, 2 * i + 1)).collect());
            inst.k = Some(opts.k.unwrap_or(n));
        }
    }
    inst.validate()?;
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_cube() {
        for dist in [
            PointDistribution::UniformCube,
            PointDistribution::Clustered,
            PointDistribution::CollinearJitter,
        ] {
            let a = generate_points(7, 20, 3, dist, 0.1);
            assert_eq!(a, generate_points(7, 20, 3, dist, 0.1));
            assert!(a.iter().flatten().all(|&c| (0.0..=1.0).contains(&c)));
        }
    }

    #[test]
    fn zero_jitter_is_collinear() {
        let pts = generate_points(3, 10, 3, PointDistribution::CollinearJitter, 0.0);
        assert!(pts.iter().all(|p| p.iter().all(|&c| c == p[0])));
    }

    #[test]
    fn mktsp_needs_enough_points() {
        let opts = GenerateOptions {
            kind: Kind::Mktsp,
            paths: 3,
            ..GenerateOptions::default()
        };
        assert!(generate(1, 5, 2, PointDistribution::UniformCube, &opts).is_err());
        assert!(generate(1, 6, 2, PointDistribution::UniformCube, &opts).is_ok());
    }
}

#![allow(dead_code)]

use orienteer_core::PointSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cube(rng: &mut ChaCha8Rng, n: usize, d: usize) -> PointSet {
    PointSet::from_coords((0..n).map(|_| (0..d).map(|_| rng.gen::<f64>()).collect::<Vec<_>>()))
        .unwrap()
}

/// Two distinct ids.
pub fn two(rng: &mut ChaCha8Rng, n: usize) -> (usize, usize) {
    let a = rng.gen_range(0..n);
    let b = (a + rng.gen_range(1..n)) % n;
    (a, b)
}

/// `m` pairs of distinct ids; pairs may share endpoints.
pub fn pairs(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<(usize, usize)> {
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    (0..m)
        .map(|i| {
            if 2 * m <= n {
                (ids[2 * i], ids[2 * i + 1])
            } else {
                two(rng, n)
            }
        })
        .collect()
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

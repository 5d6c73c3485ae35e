//! Seeded pseudo-random interior sample points.

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `count` points uniform over the box `region`, reproducible for a fixed
/// seed.
pub fn sample_box(region: &[(f64, f64)], count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let axes: Vec<Uniform<f64>> = region
        .iter()
        .map(|&(lo, hi)| Uniform::new_inclusive(lo, hi))
        .collect();
    (0..count)
        .map(|_| axes.iter().map(|d| d.sample(&mut rng)).collect())
        .collect()
}

//! Seeded pseudo-random fields.
//!
//! All randomness comes from SplitMix64 (Steele, Lea and Flood's 64-bit
//! mixing generator) with its state initialized to the user seed, so a seed
//! fully determines every sampled field.

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
pub use rand_xoshiro::SplitMix64;
use rand_xoshiro::rand_core::SeedableRng;

use crate::fem::Field;

pub fn rng(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

/// Uniformly distributed direction, by rejection from the cube `[-1, 1]^m`.
pub fn unit_vector(rng: &mut impl Rng, out: &mut [f64]) {
    loop {
        for v in out.iter_mut() {
            *v = rng.random_range(-1.0..1.0);
        }
        let norm = out.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (0.1..=1.0).contains(&norm) {
            out.iter_mut().for_each(|x| *x /= norm);
            return;
        }
    }
}

/// Independent random unit vectors at every node.
pub fn unit_field(num_nodes: usize, m: usize, rng: &mut impl Rng) -> Field {
    Field::from_fn(num_nodes, m, |_, out| unit_vector(rng, out))
}

/// Random directions with moduli uniform in `[lo, hi]`.
pub fn field_with_moduli(num_nodes: usize, m: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> Field {
    Field::from_fn(num_nodes, m, |_, out| {
        unit_vector(rng, out);
        let r = rng.random_range(lo..=hi);
        out.iter_mut().for_each(|x| *x *= r);
    })
}

/// Entries uniform in `[-1, 1)`.
pub fn field(num_nodes: usize, m: usize, rng: &mut impl Rng) -> Field {
    Field::from_fn(num_nodes, m, |_, out| {
        out.iter_mut().for_each(|x| *x = rng.random_range(-1.0..1.0))
    })
}

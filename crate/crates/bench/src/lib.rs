//! Fixed inputs shared by the benchmarks.

use jetcalc::sample::{rng, PolySampler};
use jetcalc::{BundleSpec, OmegaSpec, Poly};

pub fn plane() -> BundleSpec {
    BundleSpec::new(["x"], ["u1", "u2"], Vec::<&str>::new()).expect("valid bundle")
}

pub fn symplectic() -> OmegaSpec {
    OmegaSpec::standard_symplectic(2)
}

/// `count` seeded densities of degree at most 3 and jet order at most 2.
pub fn densities(ctx: &BundleSpec, count: usize, seed: u64) -> Vec<Poly> {
    let sampler = PolySampler::default();
    let mut r = rng(seed);
    (0..count).map(|_| sampler.sample(ctx, &mut r)).collect()
}

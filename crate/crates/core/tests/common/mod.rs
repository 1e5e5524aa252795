#![allow(dead_code)]

use jetcalc::kernel::{rat, Generator};
use jetcalc::sample::{random_automorphism, rng, PolySampler, SampleRng};
use jetcalc::symmetry::FiniteGroupAction;
use jetcalc::{parse_expr, Automorphism, BundleSpec, OmegaSpec, Poly, Rational};

pub fn bundle(base: &[&str], fibers: &[&str]) -> BundleSpec {
    BundleSpec::new(base.to_vec(), fibers.to_vec(), Vec::new()).unwrap()
}

/// `n = 1`, fibers `u1, u2`.
pub fn plane() -> BundleSpec {
    bundle(&["x"], &["u1", "u2"])
}

pub fn p(s: &str, ctx: &BundleSpec) -> Poly {
    parse_expr(s, ctx).unwrap()
}

pub fn symplectic() -> OmegaSpec {
    OmegaSpec::standard_symplectic(2)
}

pub fn sampler() -> PolySampler {
    PolySampler::default()
}

pub fn seeded(seed: u64) -> SampleRng {
    rng(seed)
}

pub fn samples(ctx: &BundleSpec, count: usize, seed: u64) -> Vec<Poly> {
    let s = sampler();
    let mut r = rng(seed);
    (0..count).map(|_| s.sample(ctx, &mut r)).collect()
}

pub fn automorphisms(ctx: &BundleSpec, count: usize, seed: u64) -> Vec<Automorphism> {
    let mut r = rng(seed);
    (0..count)
        .map(|i| random_automorphism(ctx, i % 2 == 0, &mut r))
        .collect()
}

/// Drops the pure-number term.
pub fn without_constant(g: &Poly) -> Poly {
    g.filter_terms(|m| !m.is_one())
}

pub fn rot90(ctx: &BundleSpec) -> Automorphism {
    Automorphism::new(
        ctx,
        vec![p("u2", ctx), p("-u1", ctx)],
        vec![p("-u2", ctx), p("u1", ctx)],
    )
    .unwrap()
}

pub fn rot345(ctx: &BundleSpec) -> Automorphism {
    Automorphism::linear(
        ctx,
        &[vec![rat(3, 5), rat(4, 5)], vec![rat(-4, 5), rat(3, 5)]],
    )
    .unwrap()
}

pub fn scale2(ctx: &BundleSpec) -> Automorphism {
    Automorphism::new(
        ctx,
        vec![p("2*u1", ctx), p("u2", ctx)],
        vec![p("1/2*u1", ctx), p("u2", ctx)],
    )
    .unwrap()
}

pub fn c4(ctx: &BundleSpec) -> FiniteGroupAction {
    FiniteGroupAction::cyclic(ctx, &rot90(ctx), 4).unwrap()
}

pub fn rotation3() -> Vec<Vec<Rational>> {
    let z = || rat(0, 1);
    vec![
        vec![rat(3, 5), rat(-4, 5), z()],
        vec![rat(4, 5), rat(3, 5), z()],
        vec![z(), z(), rat(1, 1)],
    ]
}

pub fn fiber(a: usize) -> Poly {
    Poly::var(Generator::fiber(a))
}

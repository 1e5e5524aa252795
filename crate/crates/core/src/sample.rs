//! Seeded random local functions and fiber automorphisms for property checks.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::kernel::{int, rat, BundleSpec, Generator, Monomial, MultiIndex, Poly};
use crate::symmetry::Automorphism;

pub use rand::SeedableRng;
pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone)]
pub struct PolySampler {
    pub max_degree: u32,
    pub max_order: usize,
    pub max_terms: usize,
    /// Allow the base coordinates to appear.
    pub with_base: bool,
    /// Coefficients are `p/q` with `|p| <= coeff_bound`, `1 <= q <= 2`.
    pub coeff_bound: i64,
}

impl Default for PolySampler {
    fn default() -> Self {
        PolySampler {
            max_degree: 3,
            max_order: 2,
            max_terms: 4,
            with_base: true,
            coeff_bound: 3,
        }
    }
}

fn multi_indices(n: usize, max_order: usize) -> Vec<MultiIndex> {
    let mut out = vec![MultiIndex::empty()];
    let mut layer = vec![MultiIndex::empty()];
    for _ in 0..max_order {
        let mut next = Vec::new();
        for idx in &layer {
            let lo = idx.entries().last().copied().unwrap_or(0);
            for i in lo..n {
                next.push(idx.with(i));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

impl PolySampler {
    pub fn generators(&self, ctx: &BundleSpec) -> Vec<Generator> {
        let mut gens = Vec::new();
        if self.with_base {
            gens.extend((0..ctx.n()).map(Generator::Base));
        }
        for idx in multi_indices(ctx.n(), self.max_order) {
            gens.extend((0..ctx.m()).map(|a| Generator::Jet(a, idx.clone())));
        }
        gens
    }

    pub fn sample(&self, ctx: &BundleSpec, rng: &mut impl Rng) -> Poly {
        let gens = self.generators(ctx);
        let terms = rng.gen_range(1..=self.max_terms);
        let mut p = Poly::zero();
        for _ in 0..terms {
            let deg = rng.gen_range(0..=self.max_degree);
            let mono = Monomial::from_factors(
                (0..deg).map(|_| (gens.choose(rng).expect("nonempty generators").clone(), 1)),
            );
            let mut num = 0;
            while num == 0 {
                num = rng.gen_range(-self.coeff_bound..=self.coeff_bound);
            }
            p += &Poly::term(rat(num, rng.gen_range(1..=2)), mono);
        }
        p
    }
}

/// Random fiber automorphism `L o S` where `L` is a unimodular integer
/// matrix and `S` is a triangular shear `u^a -> u^a + f_a(x, u^{a+1}, ...)`
/// of degree at most 2. Both parts have polynomial inverses.
pub fn random_automorphism(ctx: &BundleSpec, with_base: bool, rng: &mut impl Rng) -> Automorphism {
    let m = ctx.m();
    let mut matrix: Vec<Vec<_>> = (0..m)
        .map(|i| (0..m).map(|j| int((i == j) as i64)).collect())
        .collect();
    for _ in 0..2 * m {
        if m < 2 {
            break;
        }
        let i = rng.gen_range(0..m);
        let j = (i + rng.gen_range(1..m)) % m;
        let k = int(rng.gen_range(-2..=2));
        let row_j = matrix[j].clone();
        for (c, v) in matrix[i].iter_mut().zip(row_j) {
            *c += &k * v;
        }
    }
    if rng.gen_bool(0.5) {
        let i = rng.gen_range(0..m);
        for c in matrix[i].iter_mut() {
            *c = -c.clone();
        }
    }
    let linear = Automorphism::linear(ctx, &matrix).expect("unimodular matrix is invertible");

    let sampler = PolySampler {
        max_degree: 2,
        max_order: 0,
        max_terms: 2,
        with_base,
        coeff_bound: 2,
    };
    let mut shift = Vec::with_capacity(m);
    for a in 0..m {
        let mut gens: Vec<Generator> = (a + 1..m).map(Generator::fiber).collect();
        if with_base {
            gens.extend((0..ctx.n()).map(Generator::Base));
        }
        let f = if gens.is_empty() || rng.gen_bool(0.25) {
            Poly::zero()
        } else {
            sampler.sample(ctx, rng).substitute_with(|g| match g {
                Generator::Jet(..) | Generator::Base(_) if !gens.contains(g) => {
                    Some(Poly::var(gens.choose(rng).expect("nonempty").clone()))
                }
                _ => None,
            })
        };
        shift.push(f);
    }
    let psi: Vec<Poly> = (0..m)
        .map(|a| &Poly::var(Generator::fiber(a)) + &shift[a])
        .collect();
    let mut inv = vec![Poly::zero(); m];
    for a in (0..m).rev() {
        let back = shift[a].substitute_with(|g| match g {
            Generator::Jet(b, idx) if idx.is_empty() && *b > a => Some(inv[*b].clone()),
            _ => None,
        });
        inv[a] = &Poly::var(Generator::fiber(a)) - &back;
    }
    let shear = Automorphism::new(ctx, psi, inv).expect("triangular shear is invertible");
    linear.compose(&shear)
}

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::bundle::Generator;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// A power product of generators, stored sorted by generator with
/// strictly positive exponents.
///
/// `Ord` is the display order: higher total degree first, then
/// lexicographic with the earliest generator most significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Generator, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(g: Generator) -> Self {
        Monomial(vec![(g, 1)])
    }

    pub fn from_factors(factors: impl IntoIterator<Item = (Generator, u32)>) -> Self {
        let mut m = Monomial::one();
        for (g, e) in factors {
            m = m.mul(&Monomial(vec![(g, e)]));
        }
        m.0.retain(|(_, e)| *e > 0);
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn factors(&self) -> &[(Generator, u32)] {
        &self.0
    }

    pub fn exponent(&self, g: &Generator) -> u32 {
        self.0
            .binary_search_by(|(h, _)| h.cmp(g))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Exponent of `g` and the monomial with `g` removed.
    pub fn split_off(&self, g: &Generator) -> (u32, Monomial) {
        match self.0.binary_search_by(|(h, _)| h.cmp(g)) {
            Ok(i) => {
                let mut rest = self.0.clone();
                let (_, e) = rest.remove(i);
                (e, Monomial(rest))
            }
            Err(_) => (0, self.clone()),
        }
    }

    pub fn with_exponent(&self, g: &Generator, e: u32) -> Monomial {
        let (_, rest) = self.split_off(g);
        if e == 0 {
            rest
        } else {
            rest.mul(&Monomial::var(g.clone()).pow(e))
        }
    }

    pub fn pow(&self, k: u32) -> Monomial {
        Monomial(self.0.iter().map(|(g, e)| (g.clone(), e * k)).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other.degree().cmp(&self.degree()).then_with(|| {
            for (a, b) in self.0.iter().zip(&other.0) {
                match a.0.cmp(&b.0) {
                    // `self` has a positive power of an earlier generator.
                    Ordering::Less => return Ordering::Less,
                    Ordering::Greater => return Ordering::Greater,
                    Ordering::Equal => match b.1.cmp(&a.1) {
                        Ordering::Equal => continue,
                        o => return o,
                    },
                }
            }
            other.0.len().cmp(&self.0.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial with exact rational coefficients in canonical form:
/// no zero coefficients are ever stored, so equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::term(c, Monomial::one())
    }

    pub fn from_int(n: i64) -> Self {
        Poly::constant(int(n))
    }

    pub fn var(g: Generator) -> Self {
        Poly::term(Rational::one(), Monomial::var(g))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in display order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Coefficient of the unit monomial.
    pub fn constant_coeff(&self) -> Rational {
        self.terms
            .get(&Monomial::one())
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// The constant value if the polynomial has no generators.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn generators(&self) -> BTreeSet<Generator> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(g, _)| g.clone()))
            .collect()
    }

    pub fn contains(&self, g: &Generator) -> bool {
        self.terms.keys().any(|m| m.exponent(g) > 0)
    }

    /// Largest jet order `|I|` among the generators (0 if none).
    pub fn max_order(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().filter_map(|(g, _)| g.jet_order()))
            .max()
            .unwrap_or(0)
    }

    /// Total degree of the polynomial (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Formal partial derivative, every generator treated as independent.
    pub fn partial(&self, g: &Generator) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(g);
            if e == 0 {
                continue;
            }
            let m2 = if e == 1 {
                rest
            } else {
                rest.mul(&Monomial::var(g.clone()).pow(e - 1))
            };
            out.add_term(m2, c * int(e as i64));
        }
        out
    }

    /// Antiderivative with respect to `g` with no integration constant.
    pub fn integrate(&self, g: &Generator) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(g);
            out.add_term(m.with_exponent(g, e + 1), c / int(e as i64 + 1));
        }
        out
    }

    /// Simultaneous substitution; unmapped generators are left fixed.
    pub fn substitute_with<F>(&self, mut map: F) -> Poly
    where
        F: FnMut(&Generator) -> Option<Poly>,
    {
        let mut images: BTreeMap<Generator, Option<Poly>> = BTreeMap::new();
        let mut powers: BTreeMap<(Generator, u32), Poly> = BTreeMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut fixed = Monomial::one();
            let mut acc = Poly::constant(c.clone());
            for (g, e) in &m.0 {
                let image = images.entry(g.clone()).or_insert_with(|| map(g));
                match image {
                    None => fixed = fixed.mul(&Monomial(vec![(g.clone(), *e)])),
                    Some(p) => {
                        let pw = powers.entry((g.clone(), *e)).or_insert_with(|| p.pow(*e));
                        acc = &acc * &*pw;
                    }
                }
                if acc.is_zero() {
                    break;
                }
            }
            for (m2, c2) in acc.terms {
                out.add_term(m2.mul(&fixed), c2);
            }
        }
        out
    }

    pub fn substitute(&self, map: &BTreeMap<Generator, Poly>) -> Poly {
        self.substitute_with(|g| map.get(g).cloned())
    }

    /// Split into `(coefficient, rest)` where `self = coefficient * g + rest`
    /// and `rest` is free of `g`. Returns `None` if `g` occurs with
    /// exponent above one.
    pub fn linear_part(&self, g: &Generator) -> Option<(Poly, Poly)> {
        let mut coeff = Poly::zero();
        let mut rest = Poly::zero();
        for (m, c) in &self.terms {
            match m.split_off(g) {
                (0, _) => rest.add_term(m.clone(), c.clone()),
                (1, r) => coeff.add_term(r, c.clone()),
                _ => return None,
            }
        }
        Some((coeff, rest))
    }

    /// Terms containing only parameters (no base or jet generators).
    pub fn constant_part(&self) -> Poly {
        Poly::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.0.iter().all(|(g, _)| matches!(g, Generator::Param(_))))
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    /// Keep only the terms satisfying `pred`.
    pub fn filter_terms(&self, mut pred: impl FnMut(&Monomial) -> bool) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| pred(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn leading_sign_negative(&self) -> bool {
        self.terms
            .values()
            .next()
            .map(|c| c.is_negative())
            .unwrap_or(false)
    }
}

impl From<Generator> for Poly {
    fn from(g: Generator) -> Self {
        Poly::var(g)
    }
}

impl From<Rational> for Poly {
    fn from(c: Rational) -> Self {
        Poly::constant(c)
    }
}

impl From<i64> for Poly {
    fn from(n: i64) -> Self {
        Poly::from_int(n)
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly { (&self).$f(&rhs) }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $f(self, rhs: &Poly) -> Poly { (&self).$f(rhs) }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly { self.$f(&rhs) }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl std::iter::Sum for Poly {
    fn sum<I: Iterator<Item = Poly>>(iter: I) -> Poly {
        let mut acc = Poly::zero();
        for p in iter {
            acc += &p;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn u(a: usize) -> Poly {
        Poly::var(Generator::fiber(a))
    }

    fn ux(a: usize) -> Poly {
        Poly::var(Generator::jet(a, vec![0]))
    }

    fn x() -> Poly {
        Poly::var(Generator::Base(0))
    }

    #[test]
    fn partial_examples() {
        let p = &u(0) * &ux(1);
        assert_eq!(p.partial(&Generator::jet(1, vec![0])), u(0));
        assert_eq!(
            u(0).pow(3).partial(&Generator::fiber(0)),
            &Poly::from_int(3) * &u(0).pow(2)
        );
        assert_eq!((&x() * &u(0)).partial(&Generator::Base(0)), u(0));
    }

    #[test]
    fn substitution_examples() {
        let rot: BTreeMap<_, _> = [(Generator::fiber(0), u(1)), (Generator::fiber(1), -u(0))]
            .into_iter()
            .collect();
        assert_eq!((&u(0) + &u(1)).substitute(&rot), &u(1) - &u(0));

        let p = u(0).pow(2);
        assert_eq!(p.substitute(&BTreeMap::new()), p);

        let shift: BTreeMap<_, _> = [(Generator::fiber(0), &u(0) + &x())].into_iter().collect();
        let expected = &(&u(0).pow(2) + &(&Poly::from_int(2) * &(&x() * &u(0)))) + &x().pow(2);
        assert_eq!(p.substitute(&shift), expected);
    }

    #[test]
    fn integrate_inverts_partial() {
        let p = &(&u(0).pow(2) * &ux(1)) + &x();
        let g = Generator::fiber(0);
        assert_eq!(p.integrate(&g).partial(&g), p);
    }

    #[test]
    fn linear_part_detects_nonlinearity() {
        let g = Generator::jet(0, vec![0]);
        let p = &(&u(1) * &ux(0)) + &u(0);
        let (c, r) = p.linear_part(&g).unwrap();
        assert_eq!(c, u(1));
        assert_eq!(r, u(0));
        assert!(ux(0).pow(2).linear_part(&g).is_none());
    }

    #[test]
    fn monomial_display_order() {
        let a = Monomial::from_factors([(Generator::fiber(0), 1), (Generator::jet(1, vec![0]), 1)]);
        let b = Monomial::from_factors([(Generator::jet(0, vec![0]), 1), (Generator::fiber(1), 1)]);
        let c = Monomial::from_factors([(Generator::fiber(0), 3)]);
        let d = Monomial::one();
        let mut v = vec![d.clone(), b.clone(), a.clone(), c.clone()];
        v.sort();
        assert_eq!(v, vec![c, a, b, d]);
    }

    fn arb_generator() -> impl Strategy<Value = Generator> {
        prop_oneof![
            (0usize..2).prop_map(Generator::Base),
            (0usize..2, prop::collection::vec(0usize..2, 0..3))
                .prop_map(|(a, d)| Generator::jet(a, d)),
            Just(Generator::Param(0)),
        ]
    }

    fn arb_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec(
            (
                -5i64..6,
                1i64..4,
                prop::collection::vec((arb_generator(), 1u32..3), 0..3),
            ),
            0..5,
        )
        .prop_map(|terms| {
            Poly::from_terms(
                terms
                    .into_iter()
                    .map(|(n, d, fs)| (Monomial::from_factors(fs), rat(n, d))),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 256, rng_seed: proptest::test_runner::RngSeed::Fixed(7), ..ProptestConfig::default() })]

        #[test]
        fn ring_axioms(p in arb_poly(), q in arb_poly(), r in arb_poly()) {
            prop_assert_eq!(&p + &q, &q + &p);
            prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
            prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
            prop_assert!((&p + &p.scale(&int(-1))).is_zero());
            prop_assert!((&p - &p).is_zero());
        }

        #[test]
        fn partials_commute(p in arb_poly(), g in arb_generator(), h in arb_generator()) {
            prop_assert_eq!(p.partial(&g).partial(&h), p.partial(&h).partial(&g));
        }

        #[test]
        fn no_zero_coefficients(p in arb_poly(), q in arb_poly()) {
            let s = &(&p * &q) - &(&q * &p);
            prop_assert!(s.is_zero());
            prop_assert!((&p * &q).terms().all(|(_, c)| !c.is_zero()));
        }
    }
}

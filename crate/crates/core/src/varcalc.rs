//! Total derivatives, the horizontal differential, the Euler operator and
//! the inverse total derivative (one independent variable).

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::kernel::{int, BundleSpec, Generator, Monomial, MultiIndex, Poly};

/// Total derivative `D_i = d/dx^i + u^a_{iJ} d/du^a_J`.
pub fn total_derivative(p: &Poly, i: usize) -> Poly {
    let mut terms = Vec::new();
    for (m, c) in p.terms() {
        for (g, e) in m.factors() {
            let lowered = m.with_exponent(g, e - 1);
            let coeff = c * int(*e as i64);
            match g {
                Generator::Base(j) if *j == i => terms.push((lowered, coeff)),
                Generator::Jet(a, idx) => {
                    let raised = Monomial::var(Generator::Jet(*a, idx.with(i)));
                    terms.push((lowered.mul(&raised), coeff));
                }
                _ => {}
            }
        }
    }
    Poly::from_terms(terms)
}

/// Iterated total derivative `D_I`.
pub fn total_derivative_multi(p: &Poly, idx: &MultiIndex) -> Poly {
    idx.entries()
        .iter()
        .fold(p.clone(), |acc, &i| total_derivative(&acc, i))
}

/// Component `E_a(P) = sum_I (-D)_I dP/du^a_I`, summed over the distinct
/// sorted multi-indices occurring in `P`.
pub fn euler_component(p: &Poly, a: usize) -> Poly {
    let mut out = Poly::zero();
    for g in p.generators() {
        if let Generator::Jet(b, idx) = &g {
            if *b != a {
                continue;
            }
            let q = total_derivative_multi(&p.partial(&g), idx);
            if idx.order() % 2 == 0 {
                out += &q;
            } else {
                out -= &q;
            }
        }
    }
    out
}

/// All `m` Euler–Lagrange components of a density.
pub fn euler(p: &Poly, ctx: &BundleSpec) -> Vec<Poly> {
    (0..ctx.m()).map(|a| euler_component(p, a)).collect()
}

fn fibers_of(p: &Poly) -> BTreeSet<usize> {
    p.generators()
        .into_iter()
        .filter_map(|g| match g {
            Generator::Jet(a, _) => Some(a),
            _ => None,
        })
        .collect()
}

/// Null-Lagrangian test: every Euler component vanishes. On a polynomial
/// density over `R^n` this is membership in the image of `d_H`.
pub fn is_divergence(p: &Poly) -> bool {
    fibers_of(p)
        .into_iter()
        .all(|a| euler_component(p, a).is_zero())
}

/// Euler components that do not vanish, as `(fiber, component)`.
pub fn euler_residuals(p: &Poly) -> Vec<(usize, Poly)> {
    fibers_of(p)
        .into_iter()
        .map(|a| (a, euler_component(p, a)))
        .filter(|(_, e)| !e.is_zero())
        .collect()
}

/// Solve `D_x g = h` for `g` with no parameter-only terms (`n = 1`).
///
/// Peels off the top jet order one step at a time: an exact `h` is affine
/// in its highest-order jets `u^a_k`, and their coefficients are the
/// partials of `g` along `u^a_{k-1}`.
pub fn invert_total_derivative(h: &Poly, ctx: &BundleSpec) -> Result<Poly> {
    if ctx.n() != 1 {
        return Err(Error::Unsupported(format!(
            "inverse total derivative needs one base direction, bundle has {}",
            ctx.n()
        )));
    }
    let mut g = Poly::zero();
    let mut rest = h.clone();
    loop {
        let k = rest.max_order();
        if rest.is_zero() {
            return Ok(g);
        }
        if k == 0 {
            break;
        }
        let mut primitive = Poly::zero();
        let mut remaining = rest.clone();
        for a in 0..ctx.m() {
            let top = Generator::Jet(a, MultiIndex::repeated(0, k));
            let (coeff, r) = remaining.linear_part(&top).ok_or_else(|| {
                Error::NotExact(format!("nonlinear in {}", ctx.generator_name(&top)))
            })?;
            remaining = r;
            if coeff.is_zero() {
                continue;
            }
            let below = Generator::Jet(a, MultiIndex::repeated(0, k - 1));
            let needed = &coeff - &primitive.partial(&below);
            primitive += &needed.integrate(&below);
        }
        let next = &rest - &total_derivative(&primitive, 0);
        if next.max_order() >= k && !next.is_zero() {
            return Err(Error::NotExact(format!("order-{k} part is not integrable")));
        }
        g += &primitive;
        rest = next;
    }
    if rest
        .generators()
        .iter()
        .any(|g| matches!(g, Generator::Jet(..)))
    {
        return Err(Error::NotExact("undifferentiated fields remain".into()));
    }
    g += &rest.integrate(&Generator::Base(0));
    Ok(g)
}

/// A horizontal `k`-form `sum_I alpha_I dx^I` over increasing tuples `I`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HorizontalForm {
    n: usize,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, Poly>,
}

impl HorizontalForm {
    pub fn zero(n: usize, degree: usize) -> Self {
        assert!(
            degree <= n,
            "form degree {degree} exceeds base dimension {n}"
        );
        HorizontalForm {
            n,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// Degree-0 form.
    pub fn function(n: usize, p: Poly) -> Self {
        let mut f = HorizontalForm::zero(n, 0);
        f.set(vec![], p);
        f
    }

    /// Top-degree form `p dx^1 ^ ... ^ dx^n`.
    pub fn density(n: usize, p: Poly) -> Self {
        let mut f = HorizontalForm::zero(n, n);
        f.set((0..n).collect(), p);
        f
    }

    pub fn new(
        n: usize,
        degree: usize,
        coeffs: impl IntoIterator<Item = (Vec<usize>, Poly)>,
    ) -> Result<Self> {
        if degree > n {
            return Err(Error::Degree(format!(
                "form degree {degree} exceeds base dimension {n}"
            )));
        }
        let mut f = HorizontalForm::zero(n, degree);
        for (idx, p) in coeffs {
            if idx.len() != degree
                || idx.windows(2).any(|w| w[0] >= w[1])
                || idx.iter().any(|&i| i >= n)
            {
                return Err(Error::Degree(format!(
                    "{idx:?} is not an increasing {degree}-tuple"
                )));
            }
            let prev = f.coeff(&idx);
            f.set(idx, &prev + &p);
        }
        Ok(f)
    }

    fn set(&mut self, idx: Vec<usize>, p: Poly) {
        if p.is_zero() {
            self.coeffs.remove(&idx);
        } else {
            self.coeffs.insert(idx, p);
        }
    }

    pub fn base_dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, idx: &[usize]) -> Poly {
        self.coeffs.get(idx).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&Vec<usize>, &Poly)> {
        self.coeffs.iter()
    }

    /// The single coefficient of a degree-0 or degree-`n` form.
    pub fn scalar(&self) -> Poly {
        if self.degree == 0 {
            self.coeff(&[])
        } else {
            self.coeff(&(0..self.n).collect::<Vec<_>>())
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn map_coeffs(&self, mut f: impl FnMut(&Poly) -> Poly) -> HorizontalForm {
        let mut out = HorizontalForm::zero(self.n, self.degree);
        for (idx, p) in &self.coeffs {
            out.set(idx.clone(), f(p));
        }
        out
    }

    pub fn add(&self, other: &HorizontalForm) -> HorizontalForm {
        assert_eq!((self.n, self.degree), (other.n, other.degree));
        let mut out = self.clone();
        for (idx, p) in &other.coeffs {
            let sum = &out.coeff(idx) + p;
            out.set(idx.clone(), sum);
        }
        out
    }

    pub fn scale(&self, c: &crate::kernel::Rational) -> HorizontalForm {
        self.map_coeffs(|p| p.scale(c))
    }
}

/// `d_H alpha = dx^i ^ D_i alpha_I dx^I`, re-sorted onto increasing tuples.
pub fn d_h(alpha: &HorizontalForm) -> Result<HorizontalForm> {
    if alpha.degree >= alpha.n {
        return Err(Error::Degree(format!(
            "d_H of a degree-{} form on a {}-dimensional base",
            alpha.degree, alpha.n
        )));
    }
    let mut out = HorizontalForm::zero(alpha.n, alpha.degree + 1);
    for (idx, p) in &alpha.coeffs {
        for i in 0..alpha.n {
            if idx.contains(&i) {
                continue;
            }
            let pos = idx.partition_point(|&j| j < i);
            let mut target = idx.clone();
            target.insert(pos, i);
            let mut term = total_derivative(p, i);
            if pos % 2 == 1 {
                term = -term;
            }
            let sum = &out.coeff(&target) + &term;
            out.set(target, sum);
        }
    }
    Ok(out)
}

/// Chain homotopy on densities for `n = 1`: `s(h dx) = -g` with `D_x g = h`,
/// so that `d_H(s(f)) = -f` on exact `f`.
pub fn homotopy_s(f: &HorizontalForm, ctx: &BundleSpec) -> Result<HorizontalForm> {
    if ctx.n() != 1 || f.n != 1 {
        return Err(Error::Unsupported(
            "homotopy operator is implemented for n = 1 only".into(),
        ));
    }
    if f.degree != 1 {
        return Err(Error::Degree(
            "homotopy s acts on densities (degree-1 forms)".into(),
        ));
    }
    let g = invert_total_derivative(&f.scalar(), ctx)?;
    Ok(HorizontalForm::function(1, -g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::parse_expr;

    fn ctx1() -> BundleSpec {
        BundleSpec::new(["x"], ["u1", "u2"], Vec::<&str>::new()).unwrap()
    }

    fn ctx2() -> BundleSpec {
        BundleSpec::new(["x", "y"], ["u1", "u2"], Vec::<&str>::new()).unwrap()
    }

    fn p(s: &str, ctx: &BundleSpec) -> Poly {
        parse_expr(s, ctx).unwrap()
    }

    #[test]
    fn total_derivative_examples() {
        let c = ctx1();
        assert_eq!(
            total_derivative(&p("u1*u2", &c), 0),
            p("u1_x*u2 + u1*u2_x", &c)
        );
        assert_eq!(total_derivative(&p("2*u1^2", &c), 0), p("4*u1*u1_x", &c));
        assert_eq!(total_derivative(&p("x^2", &c), 0), p("2*x", &c));
    }

    #[test]
    fn d_h_examples() {
        let c = ctx1();
        let f = HorizontalForm::function(1, p("2*u1^2", &c));
        assert_eq!(
            d_h(&f).unwrap(),
            HorizontalForm::density(1, p("4*u1*u1_x", &c))
        );

        let c2 = ctx2();
        let a = HorizontalForm::new(2, 1, [(vec![0], p("u1", &c2))]).unwrap();
        assert_eq!(
            d_h(&a).unwrap(),
            HorizontalForm::density(2, p("-u1_y", &c2))
        );

        let g = HorizontalForm::function(2, p("x*u1*u2_y + u1_xx", &c2));
        assert!(d_h(&d_h(&g).unwrap()).unwrap().is_zero());
        assert!(matches!(
            d_h(&d_h(&d_h(&g).unwrap()).unwrap()),
            Err(Error::Degree(_))
        ));
    }

    #[test]
    fn euler_examples() {
        let c = ctx1();
        assert_eq!(
            euler(&p("u1*u2_x", &c), &c),
            vec![p("u2_x", &c), p("-u1_x", &c)]
        );
        let div = total_derivative(&p("u1*u2", &c), 0);
        assert_eq!(euler(&div, &c), vec![Poly::zero(), Poly::zero()]);
        assert_eq!(
            euler(&p("1/2*u1_x^2 + 1/2*u2_x^2", &c), &c),
            vec![p("-u1_xx", &c), p("-u2_xx", &c)]
        );
    }

    #[test]
    fn mixed_multi_index_euler() {
        // E(u_x u_y) = -D_x(u_y) - D_y(u_x) = -2 u_xy
        let c = ctx2();
        assert_eq!(euler_component(&p("u1_x*u1_y", &c), 0), p("-2*u1_xy", &c));
        // E(u1_xy * u2) for u1: D_x D_y u2
        assert_eq!(euler_component(&p("u1_xy*u2", &c), 0), p("u2_xy", &c));
    }

    #[test]
    fn divergence_examples() {
        let c = ctx1();
        assert!(is_divergence(&p("4*u1*u1_x", &c)));
        assert!(!is_divergence(&p("u1", &c)));
        assert!(is_divergence(&p("x^3", &c)));
    }

    #[test]
    fn invert_examples() {
        let c = ctx1();
        assert_eq!(
            invert_total_derivative(&p("4*u1*u1_x", &c), &c).unwrap(),
            p("2*u1^2", &c)
        );
        assert_eq!(
            invert_total_derivative(&p("u1_x*u2 + u1*u2_x", &c), &c).unwrap(),
            p("u1*u2", &c)
        );
        assert!(matches!(
            invert_total_derivative(&p("u1", &c), &c),
            Err(Error::NotExact(_))
        ));
        assert!(matches!(
            invert_total_derivative(&p("u1_x^2", &c), &c),
            Err(Error::NotExact(_))
        ));
        assert!(matches!(
            invert_total_derivative(&p("u1*u2_x", &c), &c),
            Err(Error::NotExact(_))
        ));
        assert_eq!(
            invert_total_derivative(&p("x^3", &c), &c).unwrap(),
            p("1/4*x^4", &c)
        );
        assert!(matches!(
            invert_total_derivative(&Poly::zero(), &ctx2()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn homotopy_examples() {
        let c = ctx1();
        let f = HorizontalForm::density(1, p("4*u1*u1_x", &c));
        assert_eq!(homotopy_s(&f, &c).unwrap().scalar(), p("-2*u1^2", &c));
        assert!(homotopy_s(&HorizontalForm::zero(1, 1), &c)
            .unwrap()
            .is_zero());
        let d = HorizontalForm::density(1, total_derivative(&p("u1*u2", &c), 0));
        assert_eq!(homotopy_s(&d, &c).unwrap().scalar(), p("-u1*u2", &c));
        let c2 = ctx2();
        assert!(matches!(
            homotopy_s(&HorizontalForm::zero(2, 2), &c2),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn form_validation() {
        assert!(HorizontalForm::new(2, 1, [(vec![0, 1], Poly::one())]).is_err());
        assert!(HorizontalForm::new(2, 2, [(vec![1, 0], Poly::one())]).is_err());
        assert!(HorizontalForm::new(1, 2, []).is_err());
    }
}

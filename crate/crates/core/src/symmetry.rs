//! Fiber automorphisms over the identity base map, their prolongation and
//! pullback, covariance and canonicity tests, and finite group actions.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{rat, BundleSpec, Generator, MultiIndex, Poly, Rational};
use crate::poisson::{l2_density, OmegaSpec};
use crate::varcalc::{d_h, euler, euler_residuals, total_derivative_multi, HorizontalForm};

/// An invertible fiber map `u^a -> psi^a(x, u)` covering the identity on
/// the base, together with its exact inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automorphism {
    psi: Vec<Poly>,
    psi_inv: Vec<Poly>,
}

fn fiber_substitution(images: &[Poly]) -> BTreeMap<Generator, Poly> {
    images
        .iter()
        .enumerate()
        .map(|(a, p)| (Generator::fiber(a), p.clone()))
        .collect()
}

fn is_fiber_map_entry(p: &Poly) -> bool {
    p.generators().iter().all(|g| match g {
        Generator::Jet(_, idx) => idx.is_empty(),
        _ => true,
    })
}

impl Automorphism {
    /// Validates that both maps involve only `x`, `u^a` and parameters, and
    /// that they are mutually inverse.
    pub fn new(ctx: &BundleSpec, psi: Vec<Poly>, psi_inv: Vec<Poly>) -> Result<Self> {
        let m = ctx.m();
        if psi.len() != m || psi_inv.len() != m {
            return Err(Error::InvalidAutomorphism(format!(
                "expected {m} component maps"
            )));
        }
        if let Some(a) = psi
            .iter()
            .chain(&psi_inv)
            .position(|p| !is_fiber_map_entry(p))
        {
            return Err(Error::InvalidAutomorphism(format!(
                "component {} involves derivative coordinates",
                a % m + 1
            )));
        }
        let to_inv = fiber_substitution(&psi_inv);
        let to_psi = fiber_substitution(&psi);
        for a in 0..m {
            let u = Poly::var(Generator::fiber(a));
            if psi[a].substitute(&to_inv) != u || psi_inv[a].substitute(&to_psi) != u {
                return Err(Error::InvalidAutomorphism(format!(
                    "inverse does not invert component {}",
                    ctx.fiber_names()[a]
                )));
            }
        }
        Ok(Automorphism { psi, psi_inv })
    }

    pub fn identity(ctx: &BundleSpec) -> Self {
        let id: Vec<Poly> = (0..ctx.m())
            .map(|a| Poly::var(Generator::fiber(a)))
            .collect();
        Automorphism {
            psi: id.clone(),
            psi_inv: id,
        }
    }

    /// `u -> A u` for an invertible rational matrix.
    pub fn linear(ctx: &BundleSpec, matrix: &[Vec<Rational>]) -> Result<Self> {
        let inv = invert_matrix(matrix)
            .ok_or_else(|| Error::InvalidAutomorphism("matrix is singular or not square".into()))?;
        if matrix.len() != ctx.m() {
            return Err(Error::InvalidAutomorphism(format!(
                "expected a {0} x {0} matrix",
                ctx.m()
            )));
        }
        Automorphism::new(ctx, apply_matrix(matrix), apply_matrix(&inv))
    }

    pub fn components(&self) -> &[Poly] {
        &self.psi
    }

    pub fn inverse_components(&self) -> &[Poly] {
        &self.psi_inv
    }

    pub fn inverse(&self) -> Automorphism {
        Automorphism {
            psi: self.psi_inv.clone(),
            psi_inv: self.psi.clone(),
        }
    }

    /// `self o other`: pulling back by the composite equals pulling back by
    /// `self` and then by `other`.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        let into_other = fiber_substitution(&other.psi);
        let into_self_inv = fiber_substitution(&self.psi_inv);
        Automorphism {
            psi: self.psi.iter().map(|p| p.substitute(&into_other)).collect(),
            psi_inv: other
                .psi_inv
                .iter()
                .map(|p| p.substitute(&into_self_inv))
                .collect(),
        }
    }

    /// Jacobian `d psi^c / d u^a`, indexed `[c][a]`.
    pub fn jacobian(&self) -> Vec<Vec<Poly>> {
        let m = self.psi.len();
        self.psi
            .iter()
            .map(|p| (0..m).map(|a| p.partial(&Generator::fiber(a))).collect())
            .collect()
    }
}

fn apply_matrix(matrix: &[Vec<Rational>]) -> Vec<Poly> {
    matrix
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(b, c)| Poly::var(Generator::fiber(b)).scale(c))
                .sum()
        })
        .collect()
}

/// Gauss–Jordan inverse over the rationals.
pub fn invert_matrix(matrix: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = matrix.len();
    if matrix.iter().any(|r| r.len() != n) {
        return None;
    }
    let mut a: Vec<Vec<Rational>> = matrix.to_vec();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let scale = a[col][col].recip();
        for j in 0..n {
            a[col][j] = &a[col][j] * &scale;
            inv[col][j] = &inv[col][j] * &scale;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let (da, di) = (&a[col][j] * &f, &inv[col][j] * &f);
                    a[r][j] -= da;
                    inv[r][j] -= di;
                }
            }
        }
    }
    Some(inv)
}

/// `(j psi)^* u^a_I = D_I psi^a`.
pub fn prolong(psi: &Automorphism, a: usize, idx: &MultiIndex) -> Poly {
    total_derivative_multi(&psi.psi[a], idx)
}

/// `P o j psi`: every jet coordinate replaced by its prolongation.
pub fn pullback(p: &Poly, psi: &Automorphism) -> Poly {
    p.substitute_with(|g| match g {
        Generator::Jet(a, idx) => Some(prolong(psi, *a, idx)),
        _ => None,
    })
}

/// Pullback of a horizontal form; the `dx` part is unchanged since the base
/// map is the identity.
pub fn pullback_form(alpha: &HorizontalForm, psi: &Automorphism) -> HorizontalForm {
    alpha.map_coeffs(|p| pullback(p, psi))
}

/// `d_H (j psi)^* alpha == (j psi)^* d_H alpha`.
pub fn check_pullback_dh_commute(alpha: &HorizontalForm, psi: &Automorphism) -> Result<bool> {
    Ok(d_h(&pullback_form(alpha, psi))? == pullback_form(&d_h(alpha)?, psi))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CovarianceReport {
    /// `((a, b), residual)` for every failing entry.
    pub failures: Vec<((usize, usize), Poly)>,
}

impl CovarianceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Transformation law `omega^{ab}(psi(u)) = omega^{cd} dpsi^a/du^c dpsi^b/du^d`.
pub fn check_covariance(omega: &OmegaSpec, psi: &Automorphism) -> CovarianceReport {
    let m = omega.dim();
    let jac = psi.jacobian();
    let into_psi = fiber_substitution(&psi.psi);
    let mut failures = Vec::new();
    for a in 0..m {
        for b in 0..m {
            let lhs = omega.entry(a, b).substitute(&into_psi);
            let mut rhs = Poly::zero();
            for c in 0..m {
                if jac[a][c].is_zero() {
                    continue;
                }
                for d in 0..m {
                    let w = omega.entry(c, d);
                    if w.is_zero() || jac[b][d].is_zero() {
                        continue;
                    }
                    rhs += &(&(w * &jac[a][c]) * &jac[b][d]);
                }
            }
            let r = &lhs - &rhs;
            if !r.is_zero() {
                failures.push(((a, b), r));
            }
        }
    }
    CovarianceReport { failures }
}

/// `l2(psi^* P, psi^* Q) - psi^* l2(P, Q)`.
pub fn canonical_residual(
    omega: &OmegaSpec,
    psi: &Automorphism,
    p: &Poly,
    q: &Poly,
    ctx: &BundleSpec,
) -> Poly {
    let lhs = l2_density(&pullback(p, psi), &pullback(q, psi), omega, ctx);
    let rhs = pullback(&l2_density(p, q, omega, ctx), psi);
    &lhs - &rhs
}

/// The induced map preserves the bracket of `P` and `Q` up to a divergence.
pub fn check_canonical_density(
    omega: &OmegaSpec,
    psi: &Automorphism,
    p: &Poly,
    q: &Poly,
    ctx: &BundleSpec,
) -> bool {
    euler_residuals(&canonical_residual(omega, psi, p, q, ctx)).is_empty()
}

/// `E_a(psi^* P) = sum_c dpsi^c/du^a psi^*(E_c P)` for every `a`.
pub fn check_el_transform(psi: &Automorphism, p: &Poly, ctx: &BundleSpec) -> bool {
    let lhs = euler(&pullback(p, psi), ctx);
    let ep: Vec<Poly> = euler(p, ctx).iter().map(|e| pullback(e, psi)).collect();
    let jac = psi.jacobian();
    lhs.iter().enumerate().all(|(a, l)| {
        let rhs: Poly = (0..ctx.m()).map(|c| &jac[c][a] * &ep[c]).sum();
        *l == rhs
    })
}

/// A finite group of automorphisms, closed under composition and inverses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupAction {
    elements: Vec<Automorphism>,
}

impl FiniteGroupAction {
    pub fn new(ctx: &BundleSpec, elements: Vec<Automorphism>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidGroup(
                "a group needs at least one element".into(),
            ));
        }
        let id = Automorphism::identity(ctx);
        if !elements.iter().any(|g| g.psi == id.psi) {
            return Err(Error::InvalidGroup("the identity is missing".into()));
        }
        let listed = |p: &[Poly]| elements.iter().any(|h| h.psi == p);
        for (i, g) in elements.iter().enumerate() {
            if !listed(&g.psi_inv) {
                return Err(Error::InvalidGroup(format!(
                    "inverse of element {} is missing",
                    i + 1
                )));
            }
            for (j, h) in elements.iter().enumerate() {
                if !listed(&g.compose(h).psi) {
                    return Err(Error::InvalidGroup(format!(
                        "product of elements {} and {} is missing",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(FiniteGroupAction { elements })
    }

    /// The cyclic group generated by `g`, if `g` has order at most `max_order`.
    pub fn cyclic(ctx: &BundleSpec, g: &Automorphism, max_order: usize) -> Result<Self> {
        let id = Automorphism::identity(ctx);
        let mut elements = vec![id.clone()];
        let mut cur = g.clone();
        while cur.psi != id.psi {
            if elements.len() >= max_order {
                return Err(Error::InvalidGroup(format!(
                    "generator has order above {max_order}"
                )));
            }
            elements.push(cur.clone());
            cur = cur.compose(g);
        }
        FiniteGroupAction::new(ctx, elements)
    }

    pub fn trivial(ctx: &BundleSpec) -> Self {
        FiniteGroupAction {
            elements: vec![Automorphism::identity(ctx)],
        }
    }

    pub fn elements(&self) -> &[Automorphism] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

pub fn check_invariance(alpha: &HorizontalForm, group: &FiniteGroupAction) -> bool {
    group
        .elements
        .par_iter()
        .all(|g| pullback_form(alpha, g) == *alpha)
}

/// Projection `(1/|G|) sum_g (j psi_g)^* alpha` onto invariant forms.
pub fn group_average(alpha: &HorizontalForm, group: &FiniteGroupAction) -> HorizontalForm {
    let pulled: Vec<HorizontalForm> = group
        .elements
        .par_iter()
        .map(|g| pullback_form(alpha, g))
        .collect();
    let sum = pulled.iter().fold(
        HorizontalForm::zero(alpha.base_dim(), alpha.degree()),
        |acc, f| acc.add(f),
    );
    sum.scale(&rat(1, group.order() as i64))
}

/// The bracket density of two invariant densities is invariant, given a
/// covariant `omega`.
pub fn check_invariant_closure(
    alpha: &HorizontalForm,
    beta: &HorizontalForm,
    group: &FiniteGroupAction,
    omega: &OmegaSpec,
    ctx: &BundleSpec,
) -> Result<bool> {
    for (name, f) in [("first", alpha), ("second", beta)] {
        if f.degree() != ctx.n() {
            return Err(Error::Degree(format!("{name} argument must be a density")));
        }
        if !check_invariance(f, group) {
            return Err(Error::PreconditionFailed(format!(
                "{name} argument is not invariant"
            )));
        }
    }
    if let Some(i) = group
        .elements
        .iter()
        .position(|g| !check_covariance(omega, g).passed())
    {
        return Err(Error::PreconditionFailed(format!(
            "omega is not covariant under group element {}",
            i + 1
        )));
    }
    let bracket = l2_density(&alpha.scalar(), &beta.scalar(), omega, ctx);
    Ok(check_invariance(
        &HorizontalForm::density(ctx.n(), bracket),
        group,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{int, parse_expr};

    fn ctx() -> BundleSpec {
        BundleSpec::new(["x"], ["u1", "u2"], Vec::<&str>::new()).unwrap()
    }

    fn p(s: &str) -> Poly {
        parse_expr(s, &ctx()).unwrap()
    }

    fn auto(psi: [&str; 2], inv: [&str; 2]) -> Result<Automorphism> {
        Automorphism::new(
            &ctx(),
            psi.iter().map(|s| p(s)).collect(),
            inv.iter().map(|s| p(s)).collect(),
        )
    }

    fn rot90() -> Automorphism {
        auto(["u2", "-u1"], ["-u2", "u1"]).unwrap()
    }

    fn c4() -> FiniteGroupAction {
        FiniteGroupAction::cyclic(&ctx(), &rot90(), 8).unwrap()
    }

    fn dens(s: &str) -> HorizontalForm {
        HorizontalForm::density(1, p(s))
    }

    #[test]
    fn construction_checks_inverse() {
        assert!(auto(["u1 + x", "u2"], ["u1 - x", "u2"]).is_ok());
        assert!(matches!(
            auto(["u1 + x", "u2"], ["u1 + x", "u2"]),
            Err(Error::InvalidAutomorphism(_))
        ));
        assert!(matches!(
            auto(["u1_x", "u2"], ["u1", "u2"]),
            Err(Error::InvalidAutomorphism(_))
        ));
        let lin = Automorphism::linear(
            &ctx(),
            &[vec![rat(3, 5), rat(4, 5)], vec![rat(-4, 5), rat(3, 5)]],
        )
        .unwrap();
        assert_eq!(
            lin.inverse_components(),
            &[p("3/5*u1 - 4/5*u2"), p("4/5*u1 + 3/5*u2")]
        );
        assert!(
            Automorphism::linear(&ctx(), &[vec![int(1), int(2)], vec![int(2), int(4)]]).is_err()
        );
    }

    #[test]
    fn prolong_examples() {
        let shift = auto(["u1 + x", "u2"], ["u1 - x", "u2"]).unwrap();
        assert_eq!(prolong(&shift, 0, &MultiIndex::new(vec![0])), p("u1_x + 1"));
        assert_eq!(prolong(&rot90(), 0, &MultiIndex::new(vec![0])), p("u2_x"));
        let id = Automorphism::identity(&ctx());
        assert_eq!(prolong(&id, 1, &MultiIndex::new(vec![0, 0])), p("u2_xx"));
    }

    #[test]
    fn pullback_examples() {
        assert_eq!(pullback(&p("u1^2"), &rot90()), p("u2^2"));
        let beta = p("1/2*u1^2 + 1/2*u2^2");
        for g in c4().elements() {
            assert_eq!(pullback(&beta, g), beta);
        }
        let q = p("x*u1_xx*u2");
        assert_eq!(pullback(&q, &Automorphism::identity(&ctx())), q);
    }

    #[test]
    fn commute_examples() {
        let f = HorizontalForm::function(1, p("u1"));
        assert!(check_pullback_dh_commute(&f, &rot90()).unwrap());
        let g = HorizontalForm::function(1, p("x*u1"));
        let psi = auto(["u1 + x^2", "u2"], ["u1 - x^2", "u2"]).unwrap();
        assert!(check_pullback_dh_commute(&g, &psi).unwrap());
    }

    #[test]
    fn covariance_examples() {
        let w = OmegaSpec::standard_symplectic(2);
        assert!(check_covariance(&w, &rot90()).passed());
        let r = Automorphism::linear(
            &ctx(),
            &[vec![rat(3, 5), rat(4, 5)], vec![rat(-4, 5), rat(3, 5)]],
        )
        .unwrap();
        assert!(check_covariance(&w, &r).passed());
        let scale = auto(["2*u1", "u2"], ["1/2*u1", "u2"]).unwrap();
        let report = check_covariance(&w, &scale);
        assert_eq!(
            report.failures,
            vec![((0, 1), Poly::from_int(-1)), ((1, 0), Poly::from_int(1))]
        );
    }

    #[test]
    fn canonical_examples() {
        let (c, w) = (ctx(), OmegaSpec::standard_symplectic(2));
        assert!(check_canonical_density(
            &w,
            &rot90(),
            &p("u1^3"),
            &p("u2^2"),
            &c
        ));
        let scale = auto(["2*u1", "u2"], ["1/2*u1", "u2"]).unwrap();
        assert!(!check_canonical_density(
            &w,
            &scale,
            &p("u1^2"),
            &p("u2^2"),
            &c
        ));
        assert_eq!(
            canonical_residual(&w, &scale, &p("u1^2"), &p("u2^2"), &c),
            p("8*u1*u2")
        );
        let id = Automorphism::identity(&c);
        assert!(check_canonical_density(
            &w,
            &id,
            &p("u1_x*u2"),
            &p("u2^2*u1"),
            &c
        ));
    }

    #[test]
    fn el_transform_examples() {
        let c = ctx();
        assert!(check_el_transform(&rot90(), &p("u1^2"), &c));
        assert!(check_el_transform(
            &Automorphism::identity(&c),
            &p("u1_xx*u2^2 + x"),
            &c
        ));
        let psi = auto(["u1 + x*u2^2", "u2 + x"], ["u1 - x*(u2 - x)^2", "u2 - x"]).unwrap();
        assert!(check_el_transform(&psi, &p("u1_x*u2 + u1^2*u2_x"), &c));
    }

    #[test]
    fn group_validation() {
        let c = ctx();
        assert_eq!(c4().order(), 4);
        assert!(FiniteGroupAction::new(&c, vec![rot90()]).is_err());
        assert!(FiniteGroupAction::new(&c, vec![Automorphism::identity(&c), rot90()]).is_err());
        let neg = auto(["-u1", "-u2"], ["-u1", "-u2"]).unwrap();
        assert!(FiniteGroupAction::new(&c, vec![Automorphism::identity(&c), neg]).is_ok());
        let shift = auto(["u1 + 1", "u2"], ["u1 - 1", "u2"]).unwrap();
        assert!(FiniteGroupAction::cyclic(&c, &shift, 10).is_err());
    }

    #[test]
    fn invariance_examples() {
        let g = c4();
        assert!(check_invariance(&dens("1/2*u1^2 + 1/2*u2^2"), &g));
        assert!(!check_invariance(&dens("u1"), &g));
        assert!(check_invariance(
            &dens("u1"),
            &FiniteGroupAction::trivial(&ctx())
        ));
    }

    #[test]
    fn averaging_examples() {
        let g = c4();
        assert_eq!(
            group_average(&dens("u1^2"), &g),
            dens("1/2*u1^2 + 1/2*u2^2")
        );
        let c = ctx();
        let neg = auto(["-u1", "-u2"], ["-u1", "-u2"]).unwrap();
        let pm = FiniteGroupAction::new(&c, vec![Automorphism::identity(&c), neg]).unwrap();
        assert!(group_average(&dens("u1"), &pm).is_zero());
        let inv = dens("u1*u2_x - u1_x*u2");
        assert_eq!(group_average(&inv, &g), inv);
    }

    #[test]
    fn closure_examples() {
        let (c, w, g) = (ctx(), OmegaSpec::standard_symplectic(2), c4());
        let beta = dens("1/2*u1^2 + 1/2*u2^2");
        let gamma = dens("1/2*u1_x^2 + 1/2*u2_x^2");
        assert!(check_invariant_closure(&beta, &gamma, &g, &w, &c).unwrap());
        assert!(matches!(
            check_invariant_closure(&dens("u1"), &gamma, &g, &w, &c),
            Err(Error::PreconditionFailed(_))
        ));
        let t = FiniteGroupAction::trivial(&c);
        assert!(check_invariant_closure(&dens("u1"), &dens("u2_x*u1"), &t, &w, &c).unwrap());
    }
}

//! The graded space `X_i = Omega^{n-i,0}` and its structure maps `l1`,
//! `l2`, `l3` in the degrees where they are nonzero.
//!
//! `l2` and `l3` vanish as soon as one argument has positive degree; in
//! degree 0, `l2` is the bracket density and `l3` is the homotopy applied to
//! the Jacobiator (one base direction only).

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{BundleSpec, Poly};
use crate::poisson::{check_poisson_tensor, jacobiator, l2_density, OmegaSpec};
use crate::varcalc::{d_h, homotopy_s, total_derivative, HorizontalForm};

/// An element of `X_i`: a horizontal form of degree `n - i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedElement {
    degree: usize,
    form: HorizontalForm,
}

impl GradedElement {
    pub fn new(degree: usize, form: HorizontalForm) -> Result<Self> {
        if degree > form.base_dim() || form.degree() != form.base_dim() - degree {
            return Err(Error::Degree(format!(
                "a degree-{} form cannot live in X_{degree} over a {}-dimensional base",
                form.degree(),
                form.base_dim()
            )));
        }
        Ok(GradedElement { degree, form })
    }

    pub fn zero(n: usize, degree: usize) -> Self {
        GradedElement {
            degree,
            form: HorizontalForm::zero(n, n - degree),
        }
    }

    /// Degree-0 element `P dx^1 ^ ... ^ dx^n`.
    pub fn density(n: usize, p: Poly) -> Self {
        GradedElement {
            degree: 0,
            form: HorizontalForm::density(n, p),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn form(&self) -> &HorizontalForm {
        &self.form
    }

    pub fn is_zero(&self) -> bool {
        self.form.is_zero()
    }

    fn n(&self) -> usize {
        self.form.base_dim()
    }
}

/// `l1 = d_H`, lowering the degree by one.
pub fn l1(e: &GradedElement) -> Result<GradedElement> {
    if e.degree == 0 {
        return Err(Error::Degree("l1 is not defined on X_0".into()));
    }
    Ok(GradedElement {
        degree: e.degree - 1,
        form: d_h(&e.form)?,
    })
}

/// `l2`; `None` when the target degree exceeds `n` (the zero space).
pub fn l2(
    a: &GradedElement,
    b: &GradedElement,
    omega: &OmegaSpec,
    ctx: &BundleSpec,
) -> Option<GradedElement> {
    let n = a.n();
    let degree = a.degree + b.degree;
    if degree > n {
        return None;
    }
    if degree == 0 {
        let p = l2_density(&a.form.scalar(), &b.form.scalar(), omega, ctx);
        return Some(GradedElement::density(n, p));
    }
    Some(GradedElement::zero(n, degree))
}

/// `l3` on degree-0 densities: `s` applied to the Jacobiator, i.e.
/// `-g` where `D_x g` is the Jacobiator.
pub fn l3(
    p: &Poly,
    q: &Poly,
    r: &Poly,
    omega: &OmegaSpec,
    ctx: &BundleSpec,
) -> Result<GradedElement> {
    let jac = jacobiator(p, q, r, omega, ctx);
    let s = homotopy_s(&HorizontalForm::density(ctx.n(), jac), ctx)?;
    GradedElement::new(1, s)
}

/// `l3` on graded elements; zero whenever an argument has positive degree.
pub fn l3_graded(
    args: [&GradedElement; 3],
    omega: &OmegaSpec,
    ctx: &BundleSpec,
) -> Result<Option<GradedElement>> {
    let n = ctx.n();
    let degree: usize = args.iter().map(|e| e.degree).sum::<usize>() + 1;
    if degree > n {
        return Ok(None);
    }
    if args.iter().all(|e| e.degree == 0) {
        let [p, q, r] = args.map(|e| e.form.scalar());
        return l3(&p, &q, &r, omega, ctx).map(Some);
    }
    Ok(Some(GradedElement::zero(n, degree)))
}

/// Inputs for [`check_shlie_relations`].
#[derive(Debug, Clone, Default)]
pub struct ShLieSamples {
    /// Degree-0 densities `(P, Q, R)`.
    pub triples: Vec<[Poly; 3]>,
    /// `(f, g)`: `f` a degree-0 density, `g` a degree-1 function.
    pub pairs: Vec<(Poly, Poly)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShLieViolation {
    pub relation: &'static str,
    pub sample: usize,
    pub residual: Poly,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ShLieReport {
    pub checked_triples: usize,
    pub checked_pairs: usize,
    pub violations: Vec<ShLieViolation>,
}

impl ShLieReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Residual of the degree-0 homotopy Jacobi relation
/// `Jac(P,Q,R) + l1(l3(P,Q,R))`, computed as a polynomial.
pub fn jacobi_relation_residual(
    p: &Poly,
    q: &Poly,
    r: &Poly,
    omega: &OmegaSpec,
    ctx: &BundleSpec,
) -> Result<Poly> {
    let jac = jacobiator(p, q, r, omega, ctx);
    let l3v = l3(p, q, r, omega, ctx)?;
    Ok(&jac + &total_derivative(&l3v.form().scalar(), 0))
}

/// Verifies `l2(f, l1 g) = 0` on every pair and `Jac + l1 l3 = 0` on every
/// triple. Requires `n = 1` and `omega` passing the Poisson-tensor test.
pub fn check_shlie_relations(
    samples: &ShLieSamples,
    omega: &OmegaSpec,
    ctx: &BundleSpec,
) -> Result<ShLieReport> {
    if ctx.n() != 1 {
        return Err(Error::Unsupported(
            "sh-Lie relations are checked for n = 1 only".into(),
        ));
    }
    if !check_poisson_tensor(omega).passed() {
        return Err(Error::PreconditionFailed(
            "omega fails the Poisson-tensor condition".into(),
        ));
    }
    let mut violations: Vec<ShLieViolation> = samples
        .pairs
        .par_iter()
        .enumerate()
        .filter_map(|(i, (f, g))| {
            let fe = GradedElement::density(1, f.clone());
            let ge = GradedElement::new(1, HorizontalForm::function(1, g.clone())).ok()?;
            let dg = l1(&ge).ok()?;
            let out = l2(&fe, &dg, omega, ctx)?;
            (!out.is_zero()).then(|| ShLieViolation {
                relation: "l2(f, l1 g) = 0",
                sample: i,
                residual: out.form().scalar(),
            })
        })
        .collect();
    let triple_results: Vec<(usize, Result<Poly>)> = samples
        .triples
        .par_iter()
        .enumerate()
        .map(|(i, [p, q, r])| (i, jacobi_relation_residual(p, q, r, omega, ctx)))
        .collect();
    for (i, res) in triple_results {
        match res {
            Ok(residual) if residual.is_zero() => {}
            Ok(residual) => violations.push(ShLieViolation {
                relation: "Jac + l1 l3 = 0",
                sample: i,
                residual,
            }),
            Err(Error::NotExact(_)) => violations.push(ShLieViolation {
                relation: "Jacobiator is exact",
                sample: i,
                residual: jacobiator(
                    &samples.triples[i][0],
                    &samples.triples[i][1],
                    &samples.triples[i][2],
                    omega,
                    ctx,
                ),
            }),
            Err(e) => return Err(e),
        }
    }
    Ok(ShLieReport {
        checked_triples: samples.triples.len(),
        checked_pairs: samples.pairs.len(),
        violations,
    })
}

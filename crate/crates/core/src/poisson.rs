//! Skew structure matrices `omega^{ab}`, the fiberwise Poisson-tensor test,
//! bracket densities of local functionals and the Jacobiator.

use crate::error::{Error, Result};
use crate::kernel::{BundleSpec, Generator, Poly};
use crate::varcalc::{euler, euler_component, is_divergence};

/// An `m x m` skew matrix whose entries depend only on undifferentiated
/// fiber coordinates (and parameters).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaSpec {
    entries: Vec<Vec<Poly>>,
}

impl OmegaSpec {
    /// Build and validate (see [`validate_omega`]).
    pub fn new(ctx: &BundleSpec, entries: Vec<Vec<Poly>>) -> Result<Self> {
        let omega = OmegaSpec { entries };
        validate_omega(&omega, ctx)?;
        Ok(omega)
    }

    /// The constant matrix `[[0, 1], [-1, 0]]` repeated along the diagonal.
    pub fn standard_symplectic(m: usize) -> Self {
        assert!(
            m.is_multiple_of(2),
            "standard symplectic matrix needs an even dimension"
        );
        let mut entries = vec![vec![Poly::zero(); m]; m];
        for k in (0..m).step_by(2) {
            entries[k][k + 1] = Poly::one();
            entries[k + 1][k] = Poly::from_int(-1);
        }
        OmegaSpec { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, a: usize, b: usize) -> &Poly {
        &self.entries[a][b]
    }

    pub fn rows(&self) -> &[Vec<Poly>] {
        &self.entries
    }

    pub fn is_constant(&self) -> bool {
        self.entries
            .iter()
            .flatten()
            .all(|p| p.as_constant().is_some())
    }
}

/// Confirms shape, skewness and that every entry is a function of the
/// undifferentiated fiber coordinates only.
pub fn validate_omega(omega: &OmegaSpec, ctx: &BundleSpec) -> Result<()> {
    let m = ctx.m();
    if omega.entries.len() != m || omega.entries.iter().any(|r| r.len() != m) {
        return Err(Error::Dimension(format!("omega must be {m} x {m}")));
    }
    for a in 0..m {
        for b in 0..m {
            let e = &omega.entries[a][b];
            let base_free = e.generators().iter().all(|g| match g {
                Generator::Base(_) => false,
                Generator::Jet(_, idx) => idx.is_empty(),
                Generator::Param(_) => true,
            });
            if !base_free {
                return Err(Error::EntryNotOrderZero(a, b));
            }
        }
    }
    for a in 0..m {
        for b in a..m {
            if !(&omega.entries[a][b] + &omega.entries[b][a]).is_zero() {
                return Err(Error::NonSkew(a, b));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoissonTensorReport {
    /// Triples `a < b < c` whose cyclic sum does not vanish.
    pub failures: Vec<((usize, usize, usize), Poly)>,
}

impl PoissonTensorReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Cyclic sum `w^{cd} d_d w^{ab} + w^{ad} d_d w^{bc} + w^{bd} d_d w^{ca}`.
pub fn cyclic_sum(omega: &OmegaSpec, a: usize, b: usize, c: usize) -> Poly {
    let m = omega.dim();
    let mut s = Poly::zero();
    for d in 0..m {
        let ud = Generator::fiber(d);
        for (x, y, z) in [(c, a, b), (a, b, c), (b, c, a)] {
            let w = &omega.entries[x][d];
            if w.is_zero() {
                continue;
            }
            s += &(w * &omega.entries[y][z].partial(&ud));
        }
    }
    s
}

/// Pointwise Poisson-tensor condition over all fiber triples. The cyclic
/// sum of a skew matrix is totally antisymmetric, so only `a < b < c` is
/// evaluated.
pub fn check_poisson_tensor(omega: &OmegaSpec) -> PoissonTensorReport {
    let m = omega.dim();
    let mut failures = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                let r = cyclic_sum(omega, a, b, c);
                if !r.is_zero() {
                    failures.push(((a, b, c), r));
                }
            }
        }
    }
    PoissonTensorReport { failures }
}

fn bilinear(omega: &OmegaSpec, ep: &[Poly], eq: &[Poly]) -> Poly {
    let mut out = Poly::zero();
    for (a, ea) in ep.iter().enumerate() {
        if ea.is_zero() {
            continue;
        }
        for (b, eb) in eq.iter().enumerate() {
            let w = &omega.entries[a][b];
            if w.is_zero() || eb.is_zero() {
                continue;
            }
            out += &(&(w * ea) * eb);
        }
    }
    out
}

/// Bracket density `omega^{ab} E_a(P) E_b(Q)`.
pub fn l2_density(p: &Poly, q: &Poly, omega: &OmegaSpec, ctx: &BundleSpec) -> Poly {
    bilinear(omega, &euler(p, ctx), &euler(q, ctx))
}

/// `1/2 [omega(E P, E Q) - omega(E Q, E P)]`; equal to [`l2_density`] for
/// skew `omega`.
pub fn l2_density_antisymmetrized(p: &Poly, q: &Poly, omega: &OmegaSpec, ctx: &BundleSpec) -> Poly {
    let (ep, eq) = (euler(p, ctx), euler(q, ctx));
    let half = crate::kernel::rat(1, 2);
    (&bilinear(omega, &ep, &eq) - &bilinear(omega, &eq, &ep)).scale(&half)
}

/// A local functional, represented by a density modulo total divergences.
#[derive(Debug, Clone)]
pub struct FunctionalClass {
    pub density: Poly,
}

impl FunctionalClass {
    pub fn new(density: Poly) -> Self {
        FunctionalClass { density }
    }

    pub fn is_zero(&self) -> bool {
        is_divergence(&self.density)
    }
}

impl PartialEq for FunctionalClass {
    fn eq(&self, other: &Self) -> bool {
        let diff = &self.density - &other.density;
        diff.generators()
            .into_iter()
            .filter_map(|g| match g {
                Generator::Jet(a, _) => Some(a),
                _ => None,
            })
            .all(|a| euler_component(&diff, a).is_zero())
    }
}

impl Eq for FunctionalClass {}

/// Poisson bracket of functionals.
pub fn bracket(
    p: &FunctionalClass,
    q: &FunctionalClass,
    omega: &OmegaSpec,
    ctx: &BundleSpec,
) -> FunctionalClass {
    FunctionalClass::new(l2_density(&p.density, &q.density, omega, ctx))
}

/// Signed sum of nested brackets over the (2,1)-unshuffles:
/// `l2(l2(P,Q),R) - l2(l2(P,R),Q) + l2(l2(Q,R),P)`.
pub fn jacobiator(p: &Poly, q: &Poly, r: &Poly, omega: &OmegaSpec, ctx: &BundleSpec) -> Poly {
    let l = |a: &Poly, b: &Poly| l2_density(a, b, omega, ctx);
    let mut out = l(&l(p, q), r);
    out -= &l(&l(p, r), q);
    out += &l(&l(q, r), p);
    out
}

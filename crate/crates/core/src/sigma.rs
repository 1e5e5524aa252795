//! Poisson sigma model on a two-dimensional base.
//!
//! Fibers are ordered `u1..uN`, then `w1m0..wNm0`, then `w1m1..wNm1`, where
//! `wAmμ` is the `μ`-component of the one-form field `w^A`. Directions are
//! `x0`, `x1` with `eps^{01} = 1`. The metric on `V` is the identity, so
//! upper and lower `W` components coincide.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::kernel::{int, rat, BundleSpec, Generator, Poly, Rational};
use crate::poisson::{check_poisson_tensor, jacobiator, OmegaSpec, PoissonTensorReport};
use crate::symmetry::{check_covariance, pullback, Automorphism, CovarianceReport};
use crate::varcalc::{euler_component, euler_residuals, total_derivative};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaModelSpec {
    n: usize,
    w: Vec<Vec<Poly>>,
}

/// `eps^{mu nu}` with `eps^{01} = 1`.
fn eps(mu: usize, nu: usize) -> i64 {
    match (mu, nu) {
        (0, 1) => 1,
        (1, 0) => -1,
        _ => 0,
    }
}

impl SigmaModelSpec {
    /// `w` is an `N x N` skew matrix of polynomials in `u1..uN`, written
    /// over the generators of [`SigmaModelSpec::bundle_for`]`(N)`.
    pub fn new(n: usize, w: Vec<Vec<Poly>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidBundle("sigma model needs N >= 1".into()));
        }
        if w.len() != n || w.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(format!("W must be {n} x {n}")));
        }
        for (a, row) in w.iter().enumerate() {
            for (b, entry) in row.iter().enumerate() {
                let u_only = entry.generators().iter().all(|g| match g {
                    Generator::Jet(c, idx) => *c < n && idx.is_empty(),
                    Generator::Param(_) => true,
                    Generator::Base(_) => false,
                });
                if !u_only {
                    return Err(Error::EntryNotOrderZero(a, b));
                }
                if !(entry + &w[b][a]).is_zero() {
                    return Err(Error::NonSkew(a, b));
                }
            }
        }
        Ok(SigmaModelSpec { n, w })
    }

    /// Linear Lie–Poisson tensor of so(3): `W_{AB} = eps_{ABC} u_C`.
    pub fn lie_poisson_so3() -> Self {
        let u = |c: usize| Poly::var(Generator::fiber(c));
        let mut w = vec![vec![Poly::zero(); 3]; 3];
        for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            w[a][b] = u(c);
            w[b][a] = -u(c);
        }
        SigmaModelSpec { n: 3, w }
    }

    /// Constant `W`.
    pub fn constant(w: &[Vec<Rational>]) -> Result<Self> {
        let rows = w
            .iter()
            .map(|r| r.iter().cloned().map(Poly::constant).collect())
            .collect();
        SigmaModelSpec::new(w.len(), rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w(&self) -> &[Vec<Poly>] {
        &self.w
    }

    pub fn bundle_for(n: usize) -> BundleSpec {
        let mut fibers: Vec<String> = (1..=n).map(|a| format!("u{a}")).collect();
        for mu in 0..2 {
            fibers.extend((1..=n).map(|a| format!("w{a}m{mu}")));
        }
        BundleSpec::new(vec!["x0".to_string(), "x1".to_string()], fibers, Vec::new())
            .expect("generated sigma bundle is valid")
    }

    pub fn bundle(&self) -> BundleSpec {
        SigmaModelSpec::bundle_for(self.n)
    }

    /// Fiber index of `u_A` (0-based `A`).
    pub fn u_index(&self, a: usize) -> usize {
        a
    }

    /// Fiber index of `w^A_mu`.
    pub fn w_index(&self, a: usize, mu: usize) -> usize {
        self.n * (1 + mu) + a
    }

    fn u(&self, a: usize) -> Poly {
        Poly::var(Generator::fiber(self.u_index(a)))
    }

    fn u_d(&self, a: usize, nu: usize) -> Poly {
        Poly::var(Generator::jet(self.u_index(a), vec![nu]))
    }

    fn wf(&self, a: usize, mu: usize) -> Poly {
        Poly::var(Generator::fiber(self.w_index(a, mu)))
    }
}

/// The generated bundle and the block-diagonal `omega = diag(W, W, W)`.
pub fn build_sigma(spec: &SigmaModelSpec) -> Result<(BundleSpec, OmegaSpec)> {
    let ctx = spec.bundle();
    let n = spec.n;
    let mut entries = vec![vec![Poly::zero(); 3 * n]; 3 * n];
    for block in 0..3 {
        for a in 0..n {
            for b in 0..n {
                entries[block * n + a][block * n + b] = spec.w[a][b].clone();
            }
        }
    }
    let omega = OmegaSpec::new(&ctx, entries)?;
    Ok((ctx, omega))
}

/// `L = eps^{mu nu} [ w^A_mu (u_{A,nu} + W_{AB} w^B_nu) - 1/2 W_{AB} w^A_mu w^B_nu ]`.
pub fn ikeda_lagrangian(spec: &SigmaModelSpec) -> Poly {
    let n = spec.n;
    let half = rat(1, 2);
    let mut l = Poly::zero();
    for mu in 0..2 {
        for nu in 0..2 {
            let e = eps(mu, nu);
            if e == 0 {
                continue;
            }
            let mut bracket = Poly::zero();
            for a in 0..n {
                let mut cov = spec.u_d(a, nu);
                for b in 0..n {
                    cov += &(&spec.w[a][b] * &spec.wf(b, nu));
                }
                bracket += &(&spec.wf(a, mu) * &cov);
                for b in 0..n {
                    let quad = &(&spec.w[a][b] * &spec.wf(a, mu)) * &spec.wf(b, nu);
                    bracket -= &quad.scale(&half);
                }
            }
            l += &bracket.scale(&int(e));
        }
    }
    l
}

/// `D_nu psi_A = u_{A,nu} + W_{AB} w^B_nu`.
pub fn covariant_derivative(spec: &SigmaModelSpec, a: usize, nu: usize) -> Poly {
    let mut out = spec.u_d(a, nu);
    for b in 0..spec.n {
        out += &(&spec.w[a][b] * &spec.wf(b, nu));
    }
    out
}

/// `R^A_{mu nu} = D_mu w^A_nu - D_nu w^A_mu + dW_{BC}/du_A w^B_mu w^C_nu`.
pub fn curvature(spec: &SigmaModelSpec, a: usize, mu: usize, nu: usize) -> Poly {
    let n = spec.n;
    let mut out = &total_derivative(&spec.wf(a, nu), mu) - &total_derivative(&spec.wf(a, mu), nu);
    let ua = Generator::fiber(spec.u_index(a));
    for b in 0..n {
        for c in 0..n {
            let dw = spec.w[b][c].partial(&ua);
            if !dw.is_zero() {
                out += &(&(&dw * &spec.wf(b, mu)) * &spec.wf(c, nu));
            }
        }
    }
    out
}

/// `eps^{mu nu} R^A_{mu nu}` without the factor one half.
pub fn eps_curvature(spec: &SigmaModelSpec, a: usize) -> Poly {
    &curvature(spec, a, 0, 1) - &curvature(spec, a, 1, 0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaEulerReport {
    pub lagrangian: Poly,
    /// `E^mu_A(L) - eps^{mu nu} D_nu psi_A`, labelled `w{A}m{mu}`.
    pub w_residuals: Vec<(String, Poly)>,
    /// `E^A(L) - 1/2 eps^{mu nu} R^A_{mu nu}`, labelled `u{A}`.
    pub u_residuals: Vec<(String, Poly)>,
    /// Common factor `c` with `E^A(L) = c * eps^{mu nu} R^A_{mu nu}` for every
    /// `A`, when one exists and the curvature expressions are nonzero.
    pub u_factor_vs_unhalved: Option<Rational>,
}

impl SigmaEulerReport {
    pub fn passed(&self) -> bool {
        self.w_residuals.is_empty() && self.u_residuals.is_empty()
    }
}

fn proportionality(lhs: &Poly, rhs: &Poly) -> Option<Rational> {
    let (m, c) = rhs.terms().next()?;
    let factor = lhs
        .terms()
        .find(|(m2, _)| *m2 == m)
        .map(|(_, c2)| c2 / c)
        .unwrap_or_else(Rational::zero);
    (rhs.scale(&factor) == *lhs).then_some(factor)
}

/// Euler operators of the Lagrangian against the closed forms of the field
/// equations.
pub fn sigma_euler_check(spec: &SigmaModelSpec) -> SigmaEulerReport {
    let n = spec.n;
    let lagrangian = ikeda_lagrangian(spec);
    let mut w_residuals = Vec::new();
    for mu in 0..2 {
        for a in 0..n {
            let lhs = euler_component(&lagrangian, spec.w_index(a, mu));
            let mut rhs = Poly::zero();
            for nu in 0..2 {
                if eps(mu, nu) != 0 {
                    rhs += &covariant_derivative(spec, a, nu).scale(&int(eps(mu, nu)));
                }
            }
            let r = &lhs - &rhs;
            if !r.is_zero() {
                w_residuals.push((format!("w{}m{mu}", a + 1), r));
            }
        }
    }
    let mut u_residuals = Vec::new();
    let mut factor: Option<Option<Rational>> = None;
    for a in 0..n {
        let lhs = euler_component(&lagrangian, spec.u_index(a));
        let full = eps_curvature(spec, a);
        let r = &lhs - &full.scale(&rat(1, 2));
        if !r.is_zero() {
            u_residuals.push((format!("u{}", a + 1), r));
        }
        let f = proportionality(&lhs, &full);
        factor = match factor {
            None => Some(f),
            Some(prev) if prev == f => Some(prev),
            Some(_) => Some(None),
        };
    }
    SigmaEulerReport {
        lagrangian,
        w_residuals,
        u_residuals,
        u_factor_vs_unhalved: factor.flatten(),
    }
}

fn is_orthogonal(m: &[Vec<Rational>]) -> bool {
    let n = m.len();
    m.iter().all(|r| r.len() == n)
        && (0..n).all(|i| {
            (0..n).all(|j| {
                let dot: Rational = (0..n).map(|k| &m[i][k] * &m[j][k]).sum();
                dot == if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
        })
}

/// Gauge automorphism `u_B -> M^A_B u_A`, `w^D_mu -> (M^{-1})^D_A w^A_mu`
/// for a rational orthogonal `M` (row index upper).
#[allow(clippy::needless_range_loop)]
pub fn orthogonal_action(spec: &SigmaModelSpec, m: &[Vec<Rational>]) -> Result<Automorphism> {
    let n = spec.n;
    if m.len() != n || !is_orthogonal(m) {
        return Err(Error::NotOrthogonal);
    }
    let ctx = spec.bundle();
    let mut psi = vec![Poly::zero(); 3 * n];
    let mut inv = vec![Poly::zero(); 3 * n];
    for b in 0..n {
        for a in 0..n {
            // M^{-1} = M^T, so both blocks use the transpose.
            psi[spec.u_index(b)] += &spec.u(a).scale(&m[a][b]);
            inv[spec.u_index(b)] += &spec.u(a).scale(&m[b][a]);
            for mu in 0..2 {
                psi[spec.w_index(b, mu)] += &spec.wf(a, mu).scale(&m[a][b]);
                inv[spec.w_index(b, mu)] += &spec.wf(a, mu).scale(&m[b][a]);
            }
        }
    }
    Automorphism::new(&ctx, psi, inv)
}

/// Ikeda's Lagrangian is unchanged by the gauge action of `M`.
pub fn check_lagrangian_invariance(spec: &SigmaModelSpec, m: &[Vec<Rational>]) -> Result<bool> {
    let psi = orthogonal_action(spec, m)?;
    let l = ikeda_lagrangian(spec);
    Ok(pullback(&l, &psi) == l)
}

/// Covariance of the block `omega` under the gauge action of `M`.
pub fn sigma_covariance(spec: &SigmaModelSpec, m: &[Vec<Rational>]) -> Result<CovarianceReport> {
    let (_, omega) = build_sigma(spec)?;
    let psi = orthogonal_action(spec, m)?;
    Ok(check_covariance(&omega, &psi))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaJacobiReport {
    /// Cyclic Poisson-tensor condition of `W` alone on the `u` block.
    pub w_block: PoissonTensorReport,
    /// The same condition over all `3N` fiber coordinates.
    pub full: PoissonTensorReport,
    /// Jacobiator of `(w1m0, w2m0, u1)`, when `N >= 2`.
    pub witness_jacobiator: Option<Poly>,
    /// Nonzero Euler components of that Jacobiator, labelled by fiber name.
    pub witness_residuals: Vec<(String, Poly)>,
}

impl SigmaJacobiReport {
    pub fn passed(&self) -> bool {
        self.full.passed() && self.witness_residuals.is_empty()
    }
}

/// Jacobi diagnostics for the block `omega`.
pub fn sigma_jacobi_check(spec: &SigmaModelSpec) -> Result<SigmaJacobiReport> {
    let (ctx, omega) = build_sigma(spec)?;
    let n = spec.n;
    let u_ctx = BundleSpec::new(
        vec!["x".to_string()],
        (1..=n).map(|a| format!("u{a}")).collect::<Vec<_>>(),
        Vec::new(),
    )?;
    let w_block = check_poisson_tensor(&OmegaSpec::new(&u_ctx, spec.w.clone())?);
    let full = check_poisson_tensor(&omega);
    let (witness_jacobiator, witness_residuals) = if n >= 2 {
        let jac = jacobiator(&spec.wf(0, 0), &spec.wf(1, 0), &spec.u(0), &omega, &ctx);
        let res = euler_residuals(&jac)
            .into_iter()
            .map(|(a, e)| (ctx.fiber_names()[a].clone(), e))
            .collect();
        (Some(jac), res)
    } else {
        (None, Vec::new())
    };
    Ok(SigmaJacobiReport {
        w_block,
        full,
        witness_jacobiator,
        witness_residuals,
    })
}

//! Exact symbolic variational calculus on jet bundles of trivial vector
//! bundles.
//!
//! Local functions are polynomials with rational coefficients in the base
//! coordinates, jet coordinates `u^a_I` and free parameters. On top of the
//! [`kernel`] sit the total derivative and Euler operator ([`varcalc`]),
//! local Poisson brackets ([`poisson`]), the low-degree sh-Lie maps
//! ([`shlie`]), fiber automorphisms and finite group actions
//! ([`symmetry`]) and the Poisson sigma model ([`sigma`]).
//!
//! ```
//! use jetcalc::poisson::jacobiator;
//! use jetcalc::shlie::l3;
//! use jetcalc::{parse_expr, render_expr, BundleSpec, OmegaSpec};
//!
//! # fn main() -> jetcalc::Result<()> {
//! let ctx = BundleSpec::new(["x"], ["u1", "u2"], Vec::<&str>::new())?;
//! let omega = OmegaSpec::standard_symplectic(2);
//! let p = |s: &str| parse_expr(s, &ctx);
//! let (p1, p2, p3) = (p("u1*u2_x")?, p("u1*u2")?, p("u1^2")?);
//!
//! assert_eq!(render_expr(&jacobiator(&p1, &p2, &p3, &omega, &ctx), &ctx), "4*u1*u1_x");
//! assert_eq!(render_expr(&l3(&p1, &p2, &p3, &omega, &ctx)?.form().scalar(), &ctx), "-2*u1^2");
//! # Ok(())
//! # }
//! ```

pub mod error;
pub mod kernel;
pub mod poisson;
pub mod sample;
pub mod shlie;
pub mod sigma;
pub mod symmetry;
pub mod varcalc;

pub use error::{Error, Result};
pub use kernel::{
    parse_expr, parse_expr_with, render_expr, BundleSpec, Generator, Monomial, MultiIndex, Poly,
    Rational,
};
pub use poisson::{FunctionalClass, OmegaSpec};
pub use shlie::GradedElement;
pub use sigma::SigmaModelSpec;
pub use symmetry::{Automorphism, FiniteGroupAction};
pub use varcalc::HorizontalForm;

//! Exact expression kernel: bundles, jet generators, canonical sparse
//! polynomials, and the text parser/renderer.

mod bundle;
mod parse;
mod poly;
mod render;

pub use bundle::{BundleSpec, Generator, MultiIndex};
pub use parse::{parse_expr, parse_expr_with, parse_rational};
pub use poly::{int, rat, Monomial, Poly, Rational};
pub use render::{render_expr, render_monomial};

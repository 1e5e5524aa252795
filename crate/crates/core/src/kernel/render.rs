use std::fmt::Write;

use num_traits::{One, Signed};

use super::bundle::BundleSpec;
use super::poly::{Monomial, Poly, Rational};

fn render_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn render_monomial(m: &Monomial, ctx: &BundleSpec) -> String {
    let mut s = String::new();
    for (i, (g, e)) in m.factors().iter().enumerate() {
        if i > 0 {
            s.push('*');
        }
        s.push_str(&ctx.generator_name(g));
        if *e > 1 {
            write!(s, "^{e}").unwrap();
        }
    }
    s
}

/// Canonical text form; terms appear in graded-lexicographic order.
pub fn render_expr(p: &Poly, ctx: &BundleSpec) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().enumerate() {
        let neg = c.is_negative();
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let abs = c.abs();
        if m.is_one() {
            out.push_str(&render_rational(&abs));
        } else if abs.is_one() {
            out.push_str(&render_monomial(m, ctx));
        } else {
            write!(out, "{}*{}", render_rational(&abs), render_monomial(m, ctx)).unwrap();
        }
    }
    out
}

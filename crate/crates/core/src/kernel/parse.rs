//! Recursive-descent parser for the expression language.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor ("*" factor)*
//! factor := atom ("^" posint)? | "-" factor | "(" expr ")" ("^" posint)?
//! atom   := rational | name
//! ```

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::bundle::BundleSpec;
use super::poly::{Poly, Rational};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Int(text[start..i].parse().expect("digits"))));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Name(text[start..i].to_string())));
                continue;
            }
            _ => {
                return Err(Error::Parse {
                    pos: start,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    ctx: &'a BundleSpec,
    defs: Option<&'a BTreeMap<String, Poly>>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc += &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc -= &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        while let Some(Tok::Star) = self.peek() {
            self.bump();
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        let base = match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                return Ok(-self.factor()?);
            }
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.expr()?;
                if self.bump() != Some(Tok::RParen) {
                    self.pos -= 1;
                    return self.err("expected `)`");
                }
                inner
            }
            _ => self.atom()?,
        };
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            match self.bump() {
                Some(Tok::Int(k)) => {
                    let k: u32 = k.try_into().map_err(|_| Error::Parse {
                        pos: self.offset(),
                        msg: "exponent too large".into(),
                    })?;
                    return Ok(base.pow(k));
                }
                _ => {
                    self.pos -= 1;
                    return self.err("expected a non-negative integer exponent");
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.bump() {
            Some(Tok::Int(n)) => {
                if let Some(Tok::Slash) = self.peek() {
                    self.bump();
                    match self.bump() {
                        Some(Tok::Int(d)) if !d.is_zero() => {
                            Ok(Poly::constant(Rational::new(n, d)))
                        }
                        _ => {
                            self.pos -= 1;
                            self.err("expected a positive denominator")
                        }
                    }
                } else {
                    Ok(Poly::constant(Rational::from_integer(n)))
                }
            }
            Some(Tok::Name(name)) => {
                if let Some(p) = self.defs.and_then(|d| d.get(&name)) {
                    return Ok(p.clone());
                }
                Ok(Poly::var(self.ctx.generator(&name)?))
            }
            Some(_) => {
                self.pos -= 1;
                self.err("expected a number, a name or `(`")
            }
            None => self.err("unexpected end of expression"),
        }
    }
}

fn run(text: &str, ctx: &BundleSpec, defs: Option<&BTreeMap<String, Poly>>) -> Result<Poly> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        ctx,
        defs,
    };
    if p.toks.is_empty() {
        return p.err("empty expression");
    }
    let out = p.expr()?;
    if p.pos < p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(out)
}

/// Parse an expression over the generators of `ctx`.
pub fn parse_expr(text: &str, ctx: &BundleSpec) -> Result<Poly> {
    run(text, ctx, None)
}

/// Like [`parse_expr`], but names found in `defs` expand to their value.
pub fn parse_expr_with(
    text: &str,
    ctx: &BundleSpec,
    defs: &BTreeMap<String, Poly>,
) -> Result<Poly> {
    run(text, ctx, Some(defs))
}

/// Parse a rational literal such as `-3/5`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let ctx = BundleSpec::new(["x"], ["u"], Vec::<&str>::new()).expect("static bundle");
    let p = parse_expr(text, &ctx)?;
    p.as_constant().ok_or_else(|| Error::Parse {
        pos: 0,
        msg: format!("`{text}` is not a number"),
    })
}

//! Model files.
//!
//! ```text
//! bundle { base = [x]; fibers = [u1, u2]; params = [] }
//! omega = [[0, 1], [-1, 0]]
//! let P1 = u1*u2_x
//! auto Rot90 { u1 -> u2, u2 -> -u1, inv { u1 -> -u2, u2 -> u1 } }
//! group C4 = [Id, Rot90, Rot180, Rot270]
//! sigma { n = 3; w = [[0, u3, -u2], [-u3, 0, u1], [u2, -u1, 0]] }
//! ```
//!
//! Statements end at a newline or `;` outside brackets; `#` starts a comment.
//! A `sigma` block generates the bundle and `omega`, so it excludes both.

use std::collections::{BTreeMap, BTreeSet};

use jetcalc::kernel::parse_rational;
use jetcalc::sigma::build_sigma;
use jetcalc::{
    parse_expr_with, Automorphism, BundleSpec, FiniteGroupAction, OmegaSpec, Poly, Rational,
    SigmaModelSpec,
};

use crate::CliError;

#[derive(Debug, Clone)]
pub struct ModelFile {
    pub bundle: BundleSpec,
    pub omega: Option<OmegaSpec>,
    pub definitions: BTreeMap<String, Poly>,
    pub automorphisms: BTreeMap<String, Automorphism>,
    pub groups: BTreeMap<String, FiniteGroupAction>,
    pub sigma: Option<SigmaModelSpec>,
}

impl ModelFile {
    pub fn expr(&self, text: &str) -> Result<Poly, CliError> {
        Ok(parse_expr_with(text, &self.bundle, &self.definitions)?)
    }

    pub fn omega(&self) -> Result<&OmegaSpec, CliError> {
        self.omega
            .as_ref()
            .ok_or_else(|| CliError::Usage("model declares no omega".into()))
    }

    pub fn automorphism(&self, name: &str) -> Result<&Automorphism, CliError> {
        self.automorphisms
            .get(name)
            .ok_or_else(|| CliError::Usage(format!("unknown automorphism `{name}`")))
    }

    pub fn group(&self, name: &str) -> Result<&FiniteGroupAction, CliError> {
        self.groups
            .get(name)
            .ok_or_else(|| CliError::Usage(format!("unknown group `{name}`")))
    }

    pub fn sigma(&self) -> Result<&SigmaModelSpec, CliError> {
        self.sigma
            .as_ref()
            .ok_or_else(|| CliError::Usage("model declares no sigma block".into()))
    }
}

/// Splits at depth-0 occurrences of any of `seps`, keeping the line number
/// where each piece starts. Pieces are trimmed; empty ones are dropped.
fn split_top(text: &str, seps: &[char], first_line: usize) -> Result<Vec<(usize, String)>, String> {
    let mut out = Vec::new();
    let mut depth: i32 = 0;
    let mut cur = String::new();
    let mut line = first_line;
    let mut start = first_line;
    let mut push = |cur: &mut String, start: usize| {
        let t = cur.trim();
        if !t.is_empty() {
            out.push((start, t.to_string()));
        }
        cur.clear();
    };
    for c in text.chars() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => {
                depth -= 1;
                if depth < 0 {
                    return Err(format!("line {line}: unbalanced `{c}`"));
                }
            }
            _ => {}
        }
        if depth == 0 && seps.contains(&c) {
            push(&mut cur, start);
            if c == '\n' {
                line += 1;
            }
            start = line;
            continue;
        }
        if cur.trim().is_empty() {
            start = line;
        }
        if c == '\n' {
            line += 1;
        }
        cur.push(c);
    }
    if depth != 0 {
        return Err(format!("line {start}: unclosed bracket"));
    }
    push(&mut cur, start);
    Ok(out)
}

fn strip_comments(text: &str) -> String {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join("\n")
}

/// `[a, b, c]` -> `["a", "b", "c"]`.
fn list(text: &str) -> Result<Vec<String>, String> {
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| format!("expected a bracketed list, found `{text}`"))?;
    Ok(split_top(inner, &[','], 0)?
        .into_iter()
        .map(|(_, s)| s)
        .collect())
}

fn matrix(text: &str) -> Result<Vec<Vec<String>>, String> {
    list(text)?.iter().map(|row| list(row)).collect()
}

/// Parses a rational matrix such as `[[3/5, -4/5], [4/5, 3/5]]`.
pub fn parse_rational_matrix(text: &str) -> Result<Vec<Vec<Rational>>, CliError> {
    let rows = matrix(text).map_err(CliError::Usage)?;
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|e| parse_rational(e).map_err(CliError::from))
                .collect()
        })
        .collect()
}

fn braced<'a>(text: &'a str, keyword: &str) -> Result<&'a str, String> {
    text.trim()
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| format!("`{keyword}` expects a `{{ ... }}` body"))
}

/// `key = value` pairs of a block body.
fn assignments(body: &str, keyword: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (_, item) in split_top(body, &[';', '\n'], 0)? {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| format!("`{keyword}` entries have the form `key = value`"))?;
        let k = k.trim().to_string();
        if out.insert(k.clone(), v.trim().to_string()).is_some() {
            return Err(format!("`{k}` given twice in `{keyword}`"));
        }
    }
    Ok(out)
}

fn ident(text: &str) -> Result<String, String> {
    let t = text.trim();
    let mut chars = t.chars();
    let ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
    if ok {
        Ok(t.to_string())
    } else {
        Err(format!("`{t}` is not a valid name"))
    }
}

#[derive(Default)]
struct Builder {
    bundle: Option<BundleSpec>,
    omega: Option<OmegaSpec>,
    sigma: Option<SigmaModelSpec>,
    definitions: BTreeMap<String, Poly>,
    automorphisms: BTreeMap<String, Automorphism>,
    groups: BTreeMap<String, FiniteGroupAction>,
    names: BTreeSet<String>,
}

impl Builder {
    fn ctx(&self) -> Result<&BundleSpec, String> {
        self.bundle
            .as_ref()
            .ok_or_else(|| "`bundle` or `sigma` must come first".to_string())
    }

    fn expr(&self, text: &str) -> Result<Poly, String> {
        parse_expr_with(text, self.ctx()?, &self.definitions).map_err(|e| e.to_string())
    }

    fn claim(&mut self, name: &str) -> Result<(), String> {
        if self.ctx()?.generator(name).is_ok() {
            return Err(format!(
                "`{name}` is already a coordinate or parameter name"
            ));
        }
        if !self.names.insert(name.to_string()) {
            return Err(format!("`{name}` is defined twice"));
        }
        Ok(())
    }

    fn statement(&mut self, stmt: &str) -> Result<(), String> {
        let (head, rest) = match stmt.find(|c: char| c.is_whitespace() || c == '{' || c == '=') {
            Some(i) => (&stmt[..i], stmt[i..].trim()),
            None => (stmt, ""),
        };
        match head {
            "bundle" => self.bundle_stmt(rest),
            "omega" => self.omega_stmt(rest),
            "let" => self.let_stmt(rest),
            "auto" => self.auto_stmt(rest),
            "group" => self.group_stmt(rest),
            "sigma" => self.sigma_stmt(rest),
            _ => Err(format!("unknown statement `{head}`")),
        }
    }

    fn bundle_stmt(&mut self, rest: &str) -> Result<(), String> {
        if self.sigma.is_some() {
            return Err("a model with a `sigma` block cannot declare a bundle".into());
        }
        if self.bundle.is_some() {
            return Err("`bundle` given twice".into());
        }
        let mut fields = assignments(braced(rest, "bundle")?, "bundle")?;
        let mut take = |k: &str| fields.remove(k).map(|v| list(&v)).transpose();
        let base = take("base")?.ok_or("`bundle` needs `base`")?;
        let fibers = take("fibers")?.ok_or("`bundle` needs `fibers`")?;
        let params = take("params")?.unwrap_or_default();
        if let Some(k) = fields.keys().next() {
            return Err(format!("unknown bundle field `{k}`"));
        }
        self.bundle = Some(BundleSpec::new(base, fibers, params).map_err(|e| e.to_string())?);
        Ok(())
    }

    fn omega_stmt(&mut self, rest: &str) -> Result<(), String> {
        if self.sigma.is_some() {
            return Err("a `sigma` block already determines omega".into());
        }
        if self.omega.is_some() {
            return Err("`omega` given twice".into());
        }
        let rhs = rest
            .strip_prefix('=')
            .ok_or("expected `omega = [[...], ...]`")?;
        let entries = matrix(rhs)?
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| self.expr(e))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.omega = Some(OmegaSpec::new(self.ctx()?, entries).map_err(|e| e.to_string())?);
        Ok(())
    }

    fn let_stmt(&mut self, rest: &str) -> Result<(), String> {
        let (name, rhs) = rest.split_once('=').ok_or("expected `let NAME = expr`")?;
        let name = ident(name)?;
        let value = self.expr(rhs)?;
        self.claim(&name)?;
        self.definitions.insert(name, value);
        Ok(())
    }

    fn auto_stmt(&mut self, rest: &str) -> Result<(), String> {
        let brace = rest.find('{').ok_or("expected `auto NAME { ... }`")?;
        let name = ident(&rest[..brace])?;
        let body = braced(&rest[brace..], "auto")?;
        let ctx = self.ctx()?.clone();
        let identity: Vec<Poly> = (0..ctx.m())
            .map(|a| Poly::var(ctx.fiber_coord(a)))
            .collect();
        let (mut psi, mut inv) = (identity.clone(), identity);
        let mut seen_inv = false;
        for (_, item) in split_top(body, &[',', '\n'], 0)? {
            if let Some(inv_body) = item.strip_prefix("inv") {
                if seen_inv {
                    return Err(format!("`{name}` has two `inv` blocks"));
                }
                seen_inv = true;
                for (_, entry) in split_top(braced(inv_body, "inv")?, &[',', '\n'], 0)? {
                    self.map_entry(&ctx, &entry, &mut inv)?;
                }
            } else {
                self.map_entry(&ctx, &item, &mut psi)?;
            }
        }
        if !seen_inv {
            return Err(format!("`{name}` needs an `inv {{ ... }}` block"));
        }
        let auto = Automorphism::new(&ctx, psi, inv).map_err(|e| format!("`{name}`: {e}"))?;
        self.claim(&name)?;
        self.automorphisms.insert(name, auto);
        Ok(())
    }

    fn map_entry(&self, ctx: &BundleSpec, entry: &str, images: &mut [Poly]) -> Result<(), String> {
        let (lhs, rhs) = entry
            .split_once("->")
            .ok_or_else(|| format!("expected `fiber -> expr`, found `{entry}`"))?;
        let a = ctx
            .fiber(lhs.trim())
            .ok_or_else(|| format!("`{}` is not a fiber", lhs.trim()))?;
        images[a] = self.expr(rhs)?;
        Ok(())
    }

    fn group_stmt(&mut self, rest: &str) -> Result<(), String> {
        let (name, rhs) = rest
            .split_once('=')
            .ok_or("expected `group NAME = [...]`")?;
        let name = ident(name)?;
        let elements = list(rhs)?
            .iter()
            .map(|e| {
                self.automorphisms
                    .get(e.as_str())
                    .cloned()
                    .ok_or_else(|| format!("unknown automorphism `{e}`"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let group =
            FiniteGroupAction::new(self.ctx()?, elements).map_err(|e| format!("`{name}`: {e}"))?;
        self.claim(&name)?;
        self.groups.insert(name, group);
        Ok(())
    }

    fn sigma_stmt(&mut self, rest: &str) -> Result<(), String> {
        if self.bundle.is_some() {
            return Err("a model with a `sigma` block cannot declare a bundle".into());
        }
        let mut fields = assignments(braced(rest, "sigma")?, "sigma")?;
        let n: usize = fields
            .remove("n")
            .ok_or("`sigma` needs `n`")?
            .parse()
            .map_err(|_| "`n` must be a positive integer".to_string())?;
        let w_text = fields.remove("w").ok_or("`sigma` needs `w`")?;
        if let Some(k) = fields.keys().next() {
            return Err(format!("unknown sigma field `{k}`"));
        }
        if n == 0 {
            return Err("`n` must be a positive integer".into());
        }
        self.bundle = Some(SigmaModelSpec::bundle_for(n));
        let w = matrix(&w_text)?
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| self.expr(e))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let spec = SigmaModelSpec::new(n, w).map_err(|e| e.to_string())?;
        let (_, omega) = build_sigma(&spec).map_err(|e| e.to_string())?;
        self.omega = Some(omega);
        self.sigma = Some(spec);
        Ok(())
    }
}

pub fn parse_model(text: &str) -> Result<ModelFile, CliError> {
    let clean = strip_comments(text);
    let stmts =
        split_top(&clean, &[';', '\n'], 1).map_err(|msg| CliError::Model { line: 0, msg })?;
    let mut b = Builder::default();
    for (line, stmt) in stmts {
        b.statement(&stmt)
            .map_err(|msg| CliError::Model { line, msg })?;
    }
    let bundle = b.bundle.ok_or(CliError::Model {
        line: 0,
        msg: "model declares no bundle".into(),
    })?;
    Ok(ModelFile {
        bundle,
        omega: b.omega,
        definitions: b.definitions,
        automorphisms: b.automorphisms,
        groups: b.groups,
        sigma: b.sigma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use jetcalc::render_expr;

    const EXAMPLE: &str = "
# plane with the standard symplectic form
bundle { base = [x]; fibers = [u1, u2] }
omega = [[0, 1], [-1, 0]]
let P1 = u1*u2_x; let P2 = 2*P1
auto Rot90 {
  u1 -> u2, u2 -> -u1,
  inv { u1 -> -u2, u2 -> u1 }
}
";

    #[test]
    fn parses_statements() {
        let m = parse_model(EXAMPLE).unwrap();
        assert_eq!(m.bundle.fiber_names(), &["u1", "u2"]);
        assert_eq!(render_expr(&m.definitions["P2"], &m.bundle), "2*u1*u2_x");
        assert!(m.omega.is_some());
        assert_eq!(
            render_expr(&m.automorphisms["Rot90"].components()[1], &m.bundle),
            "-u1"
        );
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_model("bundle { base = [x]; fibers = [u] }\n\nlet A = u +\n").unwrap_err();
        assert!(matches!(err, CliError::Model { line: 3, .. }), "{err:?}");
        let err = parse_model("bundle { base = [x]; fibers = [u] }\nlet u = 1\n").unwrap_err();
        assert!(matches!(err, CliError::Model { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn rejects_bad_models() {
        for text in [
            "let A = 1",
            "bundle { base = [x]; fibers = [u] }\nbundle { base = [x]; fibers = [u] }",
            "bundle { base = [x]; fibers = [u]; colour = [red] }",
            "bundle { base = [x]; fibers = [u, v] }\nomega = [[0, 1], [1, 0]]",
            "bundle { base = [x]; fibers = [u] }\nauto A { u -> 2*u, inv { u -> u } }",
            "bundle { base = [x]; fibers = [u] }\nauto A { u -> -u }",
            "bundle { base = [x]; fibers = [u] }\nauto A { u -> -u, inv { u -> -u } }\ngroup G = [A]",
            "sigma { n = 1; w = [[0]] }\nbundle { base = [x]; fibers = [u] }",
            "sigma { n = 1; w = [[0]] }\nomega = [[0]]",
            "bundle { base = [x]; fibers = [u] }\nlet A = (u",
        ] {
            assert!(parse_model(text).is_err(), "{text}");
        }
    }

    #[test]
    fn sigma_generates_bundle_and_omega() {
        let m =
            parse_model("sigma { n = 2; w = [[0, u1], [-u1, 0]] }\nlet L = w1m0*u1_x1").unwrap();
        assert_eq!(m.bundle.m(), 6);
        assert_eq!(m.omega.unwrap().dim(), 6);
        assert!(m.sigma.is_some());
    }

    #[test]
    fn groups_from_lists() {
        let text = "
bundle { base = [x]; fibers = [u] }
auto Id { inv { } }
auto Flip { u -> -u, inv { u -> -u } }
group Z2 = [Id, Flip]
";
        let m = parse_model(text).unwrap();
        assert_eq!(m.groups["Z2"].order(), 2);
    }

    #[test]
    fn rational_matrices() {
        let m = parse_rational_matrix("[[3/5, -4/5], [4/5, 3/5]]").unwrap();
        assert_eq!(m[0][1], jetcalc::kernel::rat(-4, 5));
    }
}

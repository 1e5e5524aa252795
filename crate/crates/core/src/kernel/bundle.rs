use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

/// Names of the base directions, fibers and free parameters of a trivial
/// vector bundle `R^n x R^m -> R^n`.
///
/// Direction names must be prefix-free so that a jet suffix word such as
/// `x0x1` splits into directions in exactly one way.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BundleSpec {
    base: Vec<String>,
    fibers: Vec<String>,
    params: Vec<String>,
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric())
}

impl BundleSpec {
    pub fn new<S: Into<String>>(
        base: impl IntoIterator<Item = S>,
        fibers: impl IntoIterator<Item = S>,
        params: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let base: Vec<String> = base.into_iter().map(Into::into).collect();
        let fibers: Vec<String> = fibers.into_iter().map(Into::into).collect();
        let params: Vec<String> = params.into_iter().map(Into::into).collect();
        if base.is_empty() {
            return Err(Error::InvalidBundle(
                "at least one base direction is required".into(),
            ));
        }
        if fibers.is_empty() {
            return Err(Error::InvalidBundle(
                "at least one fiber is required".into(),
            ));
        }
        let mut seen = HashSet::new();
        for name in base.iter().chain(&fibers).chain(&params) {
            if !valid_name(name) {
                return Err(Error::InvalidBundle(format!(
                    "`{name}` is not a valid name"
                )));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidBundle(format!("duplicate name `{name}`")));
            }
        }
        for a in &base {
            for b in &base {
                if a != b && b.starts_with(a.as_str()) {
                    return Err(Error::InvalidBundle(format!(
                        "direction `{a}` is a prefix of `{b}`"
                    )));
                }
            }
        }
        Ok(BundleSpec {
            base,
            fibers,
            params,
        })
    }

    /// Base dimension `n`.
    pub fn n(&self) -> usize {
        self.base.len()
    }

    /// Fiber dimension `m`.
    pub fn m(&self) -> usize {
        self.fibers.len()
    }

    pub fn base_names(&self) -> &[String] {
        &self.base
    }

    pub fn fiber_names(&self) -> &[String] {
        &self.fibers
    }

    pub fn param_names(&self) -> &[String] {
        &self.params
    }

    pub fn direction(&self, name: &str) -> Option<usize> {
        self.base.iter().position(|b| b == name)
    }

    pub fn fiber(&self, name: &str) -> Option<usize> {
        self.fibers.iter().position(|f| f == name)
    }

    pub fn param(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p == name)
    }

    /// Split a suffix word like `yx` into a sorted multi-index.
    pub fn parse_suffix(&self, word: &str) -> Option<MultiIndex> {
        let mut rest = word;
        let mut dirs = Vec::new();
        while !rest.is_empty() {
            let i = self
                .base
                .iter()
                .position(|b| rest.starts_with(b.as_str()))?;
            dirs.push(i);
            rest = &rest[self.base[i].len()..];
        }
        Some(MultiIndex::new(dirs))
    }

    /// Resolve a single identifier token to a generator.
    pub fn generator(&self, token: &str) -> Result<Generator> {
        if let Some((head, word)) = token.split_once('_') {
            let a = self
                .fiber(head)
                .ok_or_else(|| Error::UnknownName(token.to_string()))?;
            let idx = self
                .parse_suffix(word)
                .filter(|_| !word.is_empty())
                .ok_or_else(|| Error::UnknownName(token.to_string()))?;
            return Ok(Generator::Jet(a, idx));
        }
        if let Some(i) = self.direction(token) {
            Ok(Generator::Base(i))
        } else if let Some(a) = self.fiber(token) {
            Ok(Generator::Jet(a, MultiIndex::empty()))
        } else if let Some(p) = self.param(token) {
            Ok(Generator::Param(p))
        } else {
            Err(Error::UnknownName(token.to_string()))
        }
    }

    pub fn generator_name(&self, g: &Generator) -> String {
        match g {
            Generator::Base(i) => self.base[*i].clone(),
            Generator::Param(p) => self.params[*p].clone(),
            Generator::Jet(a, idx) if idx.is_empty() => self.fibers[*a].clone(),
            Generator::Jet(a, idx) => {
                let mut s = self.fibers[*a].clone();
                s.push('_');
                for &i in idx.entries() {
                    s.push_str(&self.base[i]);
                }
                s
            }
        }
    }

    pub fn fiber_coord(&self, a: usize) -> Generator {
        Generator::Jet(a, MultiIndex::empty())
    }

    /// Does `g` refer to a name declared in this bundle?
    pub fn declares(&self, g: &Generator) -> bool {
        match g {
            Generator::Base(i) => *i < self.n(),
            Generator::Param(p) => *p < self.params.len(),
            Generator::Jet(a, idx) => *a < self.m() && idx.entries().iter().all(|&i| i < self.n()),
        }
    }
}

/// Symmetric multi-index: a sorted multiset of base directions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(mut dirs: Vec<usize>) -> Self {
        dirs.sort_unstable();
        MultiIndex(dirs)
    }

    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    /// The multi-index `(i, i, ..., i)` of order `k`.
    pub fn repeated(i: usize, k: usize) -> Self {
        MultiIndex(vec![i; k])
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn with(&self, i: usize) -> Self {
        let pos = self.0.partition_point(|&j| j <= i);
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.extend_from_slice(&self.0[..pos]);
        v.push(i);
        v.extend_from_slice(&self.0[pos..]);
        MultiIndex(v)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial variable: base coordinate, jet coordinate `u^a_I`, or a
/// free parameter.
///
/// The derived order (Base < Jet < Param, jets by fiber then multi-index)
/// is the global variable order used for canonical rendering.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Base(usize),
    Jet(usize, MultiIndex),
    Param(usize),
}

impl Generator {
    pub fn jet(a: usize, dirs: Vec<usize>) -> Self {
        Generator::Jet(a, MultiIndex::new(dirs))
    }

    pub fn fiber(a: usize) -> Self {
        Generator::Jet(a, MultiIndex::empty())
    }

    pub fn jet_order(&self) -> Option<usize> {
        match self {
            Generator::Jet(_, idx) => Some(idx.order()),
            _ => None,
        }
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

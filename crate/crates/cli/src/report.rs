use serde::{Deserialize, Serialize};

use jetcalc::{render_expr, BundleSpec, Poly};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedExpr {
    pub name: String,
    pub expression: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Residual {
    pub location: String,
    pub expression: String,
}

/// Output of one command; serialized as-is for `--json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub pass: bool,
    pub results: Vec<NamedExpr>,
    pub residuals: Vec<Residual>,
    #[serde(skip)]
    check: bool,
}

impl Report {
    pub fn compute(command: &str) -> Self {
        Report {
            command: command.to_string(),
            pass: true,
            results: Vec::new(),
            residuals: Vec::new(),
            check: false,
        }
    }

    pub fn check(command: &str) -> Self {
        Report {
            check: true,
            ..Report::compute(command)
        }
    }

    pub fn result(&mut self, name: impl Into<String>, p: &Poly, ctx: &BundleSpec) {
        self.result_text(name, render_expr(p, ctx));
    }

    pub fn result_text(&mut self, name: impl Into<String>, text: impl Into<String>) {
        self.results.push(NamedExpr {
            name: name.into(),
            expression: text.into(),
        });
    }

    pub fn residual(&mut self, location: impl Into<String>, p: &Poly, ctx: &BundleSpec) {
        self.pass = false;
        self.residuals.push(Residual {
            location: location.into(),
            expression: render_expr(p, ctx),
        });
    }

    pub fn fail(&mut self) {
        self.pass = false;
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Plain text. A computation with one result and no failures prints only
    /// the expression.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if self.check || !self.pass {
            out.push_str(if self.pass { "pass\n" } else { "fail\n" });
        } else if self.results.len() == 1 {
            return format!("{}\n", self.results[0].expression);
        }
        for r in &self.results {
            out.push_str(&format!("{}: {}\n", r.name, r.expression));
        }
        for r in &self.residuals {
            out.push_str(&format!("{}: {}\n", r.location, r.expression));
        }
        out
    }
}

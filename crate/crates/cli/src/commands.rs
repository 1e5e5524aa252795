use std::path::Path;

use jetcalc::kernel::int;
use jetcalc::poisson::{check_poisson_tensor, jacobiator, l2_density};
use jetcalc::sample::{rng, PolySampler};
use jetcalc::shlie::{check_shlie_relations, l3, ShLieSamples};
use jetcalc::sigma::{ikeda_lagrangian, orthogonal_action, sigma_covariance, sigma_euler_check};
use jetcalc::symmetry::{
    canonical_residual, check_covariance, check_el_transform, check_invariant_closure,
    check_pullback_dh_commute, group_average, pullback, pullback_form,
};
use jetcalc::varcalc::{d_h, euler, euler_residuals, invert_total_derivative, total_derivative};
use jetcalc::{BundleSpec, Error, HorizontalForm, Poly};

use crate::model::{parse_model, parse_rational_matrix, ModelFile};
use crate::{Check, CliError, Command, FormArgs, Report};

fn load(path: &Path) -> Result<ModelFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    parse_model(&text)
}

/// Increasing `k`-tuples of `0..n` in lexicographic order.
fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn form_label(idx: &[usize], ctx: &BundleSpec) -> String {
    if idx.is_empty() {
        return "1".into();
    }
    idx.iter()
        .map(|&i| format!("d{}", ctx.base_names()[i]))
        .collect::<Vec<_>>()
        .join("^")
}

fn read_form(
    m: &ModelFile,
    args: &FormArgs,
    default_degree: usize,
) -> Result<HorizontalForm, CliError> {
    let n = m.bundle.n();
    let k = args.degree.unwrap_or(default_degree);
    if k > n {
        return Err(Error::Degree(format!("form degree {k} exceeds base dimension {n}")).into());
    }
    let slots = tuples(n, k);
    if args.coeffs.len() != slots.len() {
        return Err(CliError::Usage(format!(
            "a degree-{k} form on a {n}-dimensional base has {} coefficients, got {}",
            slots.len(),
            args.coeffs.len()
        )));
    }
    let coeffs = slots
        .into_iter()
        .zip(&args.coeffs)
        .map(|(idx, text)| Ok((idx, m.expr(text)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(HorizontalForm::new(n, k, coeffs)?)
}

fn push_form(report: &mut Report, form: &HorizontalForm, ctx: &BundleSpec) {
    for idx in tuples(form.base_dim(), form.degree()) {
        report.result(form_label(&idx, ctx), &form.coeff(&idx), ctx);
    }
}

fn push_euler_residuals(report: &mut Report, p: &Poly, ctx: &BundleSpec) {
    for (a, e) in euler_residuals(p) {
        report.residual(format!("E_{}", ctx.fiber_names()[a]), &e, ctx);
    }
    report.fail();
}

pub(crate) fn dispatch(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Euler { model, expr } => {
            let m = load(model)?;
            let p = m.expr(expr)?;
            let mut r = Report::compute("euler");
            for (a, e) in euler(&p, &m.bundle).iter().enumerate() {
                r.result(format!("E_{}", m.bundle.fiber_names()[a]), e, &m.bundle);
            }
            Ok(r)
        }
        Command::Dh { model, form } => {
            let m = load(model)?;
            let f = read_form(&m, form, 0)?;
            let mut r = Report::compute("dh");
            push_form(&mut r, &d_h(&f)?, &m.bundle);
            Ok(r)
        }
        Command::Td {
            model,
            direction,
            expr,
        } => {
            let m = load(model)?;
            let i = m
                .bundle
                .direction(direction)
                .ok_or_else(|| CliError::Usage(format!("`{direction}` is not a base direction")))?;
            let mut r = Report::compute("td");
            r.result(
                format!("D_{direction}"),
                &total_derivative(&m.expr(expr)?, i),
                &m.bundle,
            );
            Ok(r)
        }
        Command::L2 { model, p, q } => {
            let m = load(model)?;
            let mut r = Report::compute("l2");
            r.result(
                "l2",
                &l2_density(&m.expr(p)?, &m.expr(q)?, m.omega()?, &m.bundle),
                &m.bundle,
            );
            Ok(r)
        }
        Command::L3 {
            model,
            p,
            q,
            r: third,
        } => {
            let m = load(model)?;
            let (a, b, c) = (m.expr(p)?, m.expr(q)?, m.expr(third)?);
            let mut r = Report::compute("l3");
            match l3(&a, &b, &c, m.omega()?, &m.bundle) {
                Ok(v) => r.result("l3", &v.form().scalar(), &m.bundle),
                Err(Error::NotExact(_)) => {
                    let jac = jacobiator(&a, &b, &c, m.omega()?, &m.bundle);
                    push_euler_residuals(&mut r, &jac, &m.bundle);
                }
                Err(e) => return Err(e.into()),
            }
            Ok(r)
        }
        Command::Jacobiator {
            model,
            p,
            q,
            r: third,
        } => {
            let m = load(model)?;
            let jac = jacobiator(
                &m.expr(p)?,
                &m.expr(q)?,
                &m.expr(third)?,
                m.omega()?,
                &m.bundle,
            );
            let mut r = Report::compute("jacobiator");
            r.result("jacobiator", &jac, &m.bundle);
            Ok(r)
        }
        Command::InvertDx { model, expr } => {
            let m = load(model)?;
            let h = m.expr(expr)?;
            let mut r = Report::compute("invert-dx");
            match invert_total_derivative(&h, &m.bundle) {
                Ok(g) => r.result("g", &g, &m.bundle),
                Err(Error::NotExact(_)) => push_euler_residuals(&mut r, &h, &m.bundle),
                Err(e) => return Err(e.into()),
            }
            Ok(r)
        }
        Command::Average { model, group, form } => {
            let m = load(model)?;
            let f = read_form(&m, form, m.bundle.n())?;
            let mut r = Report::compute("average");
            push_form(&mut r, &group_average(&f, m.group(group)?), &m.bundle);
            Ok(r)
        }
        Command::Check(check) => dispatch_check(check),
    }
}

fn dispatch_check(check: &Check) -> Result<Report, CliError> {
    match check {
        Check::Poisson { model } => {
            let m = load(model)?;
            let names = m.bundle.fiber_names();
            let mut r = Report::check("check poisson");
            for ((a, b, c), res) in check_poisson_tensor(m.omega()?).failures {
                r.residual(
                    format!("{},{},{}", names[a], names[b], names[c]),
                    &res,
                    &m.bundle,
                );
            }
            Ok(r)
        }
        Check::Covariance { model, auto } => {
            let m = load(model)?;
            let names = m.bundle.fiber_names();
            let mut r = Report::check("check covariance");
            for ((a, b), res) in check_covariance(m.omega()?, m.automorphism(auto)?).failures {
                r.residual(format!("{},{}", names[a], names[b]), &res, &m.bundle);
            }
            Ok(r)
        }
        Check::Canonical { model, auto, p, q } => {
            let m = load(model)?;
            let res = canonical_residual(
                m.omega()?,
                m.automorphism(auto)?,
                &m.expr(p)?,
                &m.expr(q)?,
                &m.bundle,
            );
            let mut r = Report::check("check canonical");
            r.result("difference", &res, &m.bundle);
            if !euler_residuals(&res).is_empty() {
                push_euler_residuals(&mut r, &res, &m.bundle);
            }
            Ok(r)
        }
        Check::Invariance { model, group, form } => {
            let m = load(model)?;
            let f = read_form(&m, form, m.bundle.n())?;
            let mut r = Report::check("check invariance");
            for (i, g) in m.group(group)?.elements().iter().enumerate() {
                let diff = pullback_form(&f, g).add(&f.scale(&int(-1)));
                for (idx, c) in diff.coeffs() {
                    if !c.is_zero() {
                        r.residual(
                            format!("g{} {}", i + 1, form_label(idx, &m.bundle)),
                            c,
                            &m.bundle,
                        );
                    }
                }
            }
            Ok(r)
        }
        Check::Closure { model, group, p, q } => {
            let m = load(model)?;
            let n = m.bundle.n();
            let (a, b) = (m.expr(p)?, m.expr(q)?);
            let ok = check_invariant_closure(
                &HorizontalForm::density(n, a.clone()),
                &HorizontalForm::density(n, b.clone()),
                m.group(group)?,
                m.omega()?,
                &m.bundle,
            )?;
            let mut r = Report::check("check closure");
            r.result("l2", &l2_density(&a, &b, m.omega()?, &m.bundle), &m.bundle);
            if !ok {
                r.fail();
            }
            Ok(r)
        }
        Check::Shlie {
            model,
            triples,
            count,
            seed,
        } => {
            let m = load(model)?;
            let samples = if triples.is_empty() {
                let sampler = PolySampler::default();
                let mut g = rng(*seed);
                let mut draw = || sampler.sample(&m.bundle, &mut g);
                ShLieSamples {
                    triples: (0..*count).map(|_| [draw(), draw(), draw()]).collect(),
                    pairs: (0..*count).map(|_| (draw(), draw())).collect(),
                }
            } else {
                if triples.len() % 3 != 0 {
                    return Err(CliError::Usage("explicit densities come in triples".into()));
                }
                let ps = triples
                    .iter()
                    .map(|t| m.expr(t))
                    .collect::<Result<Vec<_>, _>>()?;
                ShLieSamples {
                    triples: ps
                        .chunks(3)
                        .map(|t| [t[0].clone(), t[1].clone(), t[2].clone()])
                        .collect(),
                    pairs: Vec::new(),
                }
            };
            let report = check_shlie_relations(&samples, m.omega()?, &m.bundle)?;
            let mut r = Report::check("check shlie");
            r.result_text("triples", report.checked_triples.to_string());
            r.result_text("pairs", report.checked_pairs.to_string());
            for v in &report.violations {
                r.residual(
                    format!("sample {}: {}", v.sample + 1, v.relation),
                    &v.residual,
                    &m.bundle,
                );
            }
            Ok(r)
        }
        Check::ElTransform { model, auto, p } => {
            let m = load(model)?;
            let mut r = Report::check("check el-transform");
            if !check_el_transform(m.automorphism(auto)?, &m.expr(p)?, &m.bundle) {
                r.fail();
            }
            Ok(r)
        }
        Check::Commute { model, auto, form } => {
            let m = load(model)?;
            let f = read_form(&m, form, 0)?;
            let psi = m.automorphism(auto)?;
            let mut r = Report::check("check commute");
            if !check_pullback_dh_commute(&f, psi)? {
                let lhs = pullback_form(&d_h(&f)?, psi);
                let diff = lhs.add(&d_h(&pullback_form(&f, psi))?.scale(&int(-1)));
                for (idx, c) in diff.coeffs() {
                    if !c.is_zero() {
                        r.residual(form_label(idx, &m.bundle), c, &m.bundle);
                    }
                }
                r.fail();
            }
            Ok(r)
        }
        Check::SigmaEuler { model } => {
            let m = load(model)?;
            let report = sigma_euler_check(m.sigma()?);
            let mut r = Report::check("check sigma-euler");
            r.result("L", &report.lagrangian, &m.bundle);
            let factor = match &report.u_factor_vs_unhalved {
                Some(c) => render_rational(c),
                None => "none".into(),
            };
            r.result_text("E^A(L) / eps^{mu nu} R^A_{mu nu}", factor);
            for (loc, res) in report.w_residuals.iter().chain(&report.u_residuals) {
                r.residual(format!("E_{loc}"), res, &m.bundle);
            }
            Ok(r)
        }
        Check::SigmaInvariance { model, matrix } => {
            let m = load(model)?;
            let spec = m.sigma()?;
            let mat = parse_rational_matrix(matrix)?;
            let names = m.bundle.fiber_names();
            let mut r = Report::check("check sigma-invariance");
            for ((a, b), res) in sigma_covariance(spec, &mat)?.failures {
                r.residual(format!("{},{}", names[a], names[b]), &res, &m.bundle);
            }
            let psi = orthogonal_action(spec, &mat)?;
            let l = ikeda_lagrangian(spec);
            let diff = &pullback(&l, &psi) - &l;
            if !diff.is_zero() {
                r.residual("L", &diff, &m.bundle);
            }
            Ok(r)
        }
    }
}

fn render_rational(c: &jetcalc::Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

use serde_json::{json, Map, Value};

use bspline_quad::rational::{to_f64_nearest, to_fraction_string};
use bspline_quad::{
    auto_reference, auto_reference_box, coefficients, convergence_study, euler_maclaurin,
    evalcount_study, integrate_box, integrate_composite_with, m_alpha_rule, simpson, trapezoid,
    BoxRequest, BudgetPolicy, CompositePath, ConvergenceReport, EvalCountReport, Expression,
    Integrand, IntegrationRequest, QuadratureResult, Reference, Rule, SplineDegree, Summation,
    MAX_RULE_DEGREE,
};

use crate::args::{
    CoeffsArgs, Command, Common, Config, ConvergenceArgs, EvalcountArgs, Format, IntegrateArgs,
    PathKind, PolicyKind, RefSpec, RuleKind, RuleSettings, SummationKind,
};
use crate::output::{csv, emit, json_document, order_text, sci4, shortest, table};
use crate::CliError;

pub fn run(command: Command) -> Result<(), CliError> {
    let (text, out) = match command {
        Command::Integrate(a) => integrate(a)?,
        Command::Convergence(a) => convergence(a)?,
        Command::Coeffs(a) => coeffs(a)?,
        Command::Evalcount(a) => evalcount(a)?,
    };
    emit(&text, out.as_deref()).map_err(|e| CliError::Io(format!("cannot write output: {e}")))
}

type Rendered = (String, Option<std::path::PathBuf>);

/// A parsed request ready to evaluate at any `N`.
struct Plan {
    common: Common,
    expr: Expression,
    rule: RuleSettings,
    derivs: Vec<Expression>,
}

impl Plan {
    fn new(common: Common, rule: RuleSettings) -> Result<Plan, CliError> {
        let expr = parse(&common.function, common.dims)?;
        let derivs = rule
            .deriv
            .iter()
            .map(|src| parse(src, 1))
            .collect::<Result<Vec<_>, _>>()?;
        let plan = Plan {
            common,
            expr,
            rule,
            derivs,
        };
        plan.validate()?;
        Ok(plan)
    }

    fn validate(&self) -> Result<(), CliError> {
        let dims = self.common.dims;
        match self.rule.rule {
            RuleKind::Tp => {
                self.degree()?;
                if dims > 1 && self.rule.path.is_some() {
                    return Err(CliError::Spec(
                        "--path applies to one-dimensional integrals only".into(),
                    ));
                }
            }
            RuleKind::Malpha if self.common.alpha.is_none() => {
                return Err(CliError::Spec("rule malpha needs --alpha".into()));
            }
            RuleKind::EulerMaclaurin if self.corrections() == 0 => {
                return Err(CliError::Spec(
                    "rule euler-maclaurin needs --p >= 1 or at least one --deriv".into(),
                ));
            }
            _ => {}
        }
        if dims > 1 && self.rule.rule != RuleKind::Tp {
            return Err(CliError::Spec(format!(
                "rule {} is one-dimensional; use --rule tp for dims > 1",
                self.label()
            )));
        }
        Ok(())
    }

    fn degree(&self) -> Result<SplineDegree, CliError> {
        let p = self
            .rule
            .p
            .ok_or_else(|| CliError::Spec("rule tp needs --p".into()))?;
        rule_degree(p)
    }

    fn corrections(&self) -> usize {
        self.rule.p.unwrap_or(self.derivs.len())
    }

    fn label(&self) -> String {
        match self.rule.rule {
            RuleKind::Tp => format!("tp{}", self.rule.p.unwrap_or(0)),
            RuleKind::Trapezoid => "trapezoid".into(),
            RuleKind::Simpson => "simpson".into(),
            RuleKind::Malpha => "malpha".into(),
            RuleKind::EulerMaclaurin => "euler-maclaurin".into(),
        }
    }

    fn apply(&self, n: usize) -> Result<QuadratureResult, bspline_quad::QuadError> {
        let f = &self.expr;
        let (a, b) = self.common.intervals[0];
        match self.rule.rule {
            RuleKind::Tp => {
                let degree = self.degree().expect("validated");
                if self.common.dims > 1 {
                    let axes = self
                        .common
                        .intervals
                        .iter()
                        .map(|&(a, b)| IntegrationRequest::new(a, b, n, degree))
                        .collect::<Result<Vec<_>, _>>()?;
                    return integrate_box(f, &BoxRequest::new(axes)?);
                }
                let summation = summation(self.common.summation);
                match self.rule.path {
                    None => Rule::BSpline {
                        degree,
                        path: CompositePath::ClosedForm,
                        summation,
                    }
                    .apply(f, a, b, n),
                    Some(path) => {
                        let path = match path {
                            PathKind::ClosedForm => CompositePath::ClosedForm,
                            PathKind::PerCell => CompositePath::PerCell,
                        };
                        let req = IntegrationRequest::new(a, b, n, degree)?;
                        integrate_composite_with(f, &req, path, summation)
                    }
                }
            }
            RuleKind::Trapezoid => trapezoid(f, a, b, n),
            RuleKind::Simpson => simpson(f, a, b, n),
            RuleKind::Malpha => m_alpha_rule(f, a, b, n, self.common.alpha.expect("validated")),
            RuleKind::EulerMaclaurin => {
                let derivs: Vec<&dyn Integrand> =
                    self.derivs.iter().map(|d| d as &dyn Integrand).collect();
                euler_maclaurin(f, &derivs, a, b, n, self.corrections())
            }
        }
    }

    fn reference(&self, spec: RefSpec, n_max: usize) -> Result<Reference, CliError> {
        match spec {
            RefSpec::Value(v) => Ok(Reference::explicit(v)),
            RefSpec::Auto if self.common.dims == 1 => {
                let (a, b) = self.common.intervals[0];
                Ok(auto_reference(&self.expr, a, b, n_max)?)
            }
            RefSpec::Auto => Ok(auto_reference_box(
                &self.expr,
                &self.common.intervals,
                n_max,
            )?),
        }
    }

    fn meta(&self, command: &str) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("command".into(), json!(command));
        m.insert("function".into(), json!(self.expr.to_string()));
        m.insert("dims".into(), json!(self.common.dims));
        m.insert("intervals".into(), json!(self.common.intervals));
        m.insert("rule".into(), json!(self.label()));
        if let Some(p) = self.rule.p {
            m.insert("p".into(), json!(p));
        }
        if let Some(alpha) = self.common.alpha {
            m.insert("alpha".into(), json!(alpha));
        }
        m
    }

    fn text_header(&self) -> String {
        let intervals = self
            .common
            .intervals
            .iter()
            .map(|(a, b)| format!("[{}, {}]", shortest(*a), shortest(*b)))
            .collect::<Vec<_>>()
            .join(" x ");
        format!(
            "# f = {}, {}, rule {}\n",
            self.expr,
            intervals,
            self.label()
        )
    }
}

/// Rule order in `1..=16`.
fn rule_degree(p: usize) -> Result<SplineDegree, CliError> {
    if !(1..=MAX_RULE_DEGREE).contains(&p) {
        return Err(CliError::Spec(format!(
            "p = {p} out of range (supported: 1..={MAX_RULE_DEGREE})"
        )));
    }
    Ok(SplineDegree::new(p)?)
}

fn parse(src: &str, dims: usize) -> Result<Expression, CliError> {
    Expression::parse(src, dims).map_err(|e| CliError::parse(src, &e))
}

fn summation(kind: SummationKind) -> Summation {
    match kind {
        SummationKind::Compensated => Summation::Compensated,
        SummationKind::Plain => Summation::Plain,
    }
}

fn reference_text(r: &Reference) -> String {
    match &r.source {
        bspline_quad::ReferenceSource::Explicit => {
            format!("# reference {} (given)\n", shortest(r.value))
        }
        bspline_quad::ReferenceSource::Auto { rule, n } => {
            format!("# reference {} ({rule}, N = {n})\n", shortest(r.value))
        }
    }
}

fn integrate(args: IntegrateArgs) -> Result<Rendered, CliError> {
    let mut cfg = Config::load(args.common.config.as_deref())?;
    let n = args.n(&mut cfg)?;
    let common = args.common.resolve(&mut cfg)?;
    let rule = args.rule.resolve(&mut cfg)?;
    let plan = Plan::new(common, rule)?;
    let r = plan.apply(n)?;

    let text = match plan.common.format {
        Format::Text => format!(
            "value        {}\nevaluations  {}\n",
            shortest(r.value),
            r.evaluations
        ),
        Format::Csv => csv(
            &["N", "M", "value"],
            &[vec![
                n.to_string(),
                r.evaluations.to_string(),
                shortest(r.value),
            ]],
        ),
        Format::Json => {
            let mut meta = plan.meta("integrate");
            meta.insert("n".into(), json!(n));
            let mut body = Map::new();
            body.insert("value".into(), json!(r.value));
            body.insert("evaluations".into(), json!(r.evaluations));
            json_document(meta, body)
        }
    };
    Ok((text, plan.common.out))
}

fn convergence(mut args: ConvergenceArgs) -> Result<Rendered, CliError> {
    let mut cfg = Config::load(args.common.config.as_deref())?;
    let ns = args.ns(&mut cfg);
    if ns.is_empty() {
        return Err(CliError::Spec("--n needs at least one value".into()));
    }
    let spec = args.reference.or(cfg.reference).unwrap_or_default();
    let common = args.common.resolve(&mut cfg)?;
    let rule = args.rule.resolve(&mut cfg)?;
    let plan = Plan::new(common, rule)?;

    let n_max = *ns.iter().max().expect("non-empty");
    let reference = plan.reference(spec, n_max)?;
    let report = convergence_study(&ns, reference, |n| plan.apply(n))?;
    let text = render_convergence(&plan, &report);
    Ok((text, plan.common.out))
}

fn render_convergence(plan: &Plan, report: &ConvergenceReport) -> String {
    match plan.common.format {
        Format::Text => {
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.m.to_string(),
                        sci4(r.error),
                        order_text(r.order),
                    ]
                })
                .collect();
            let header = ["N", "M", "error", "order"].map(String::from);
            format!(
                "{}{}{}",
                plan.text_header(),
                reference_text(&report.reference),
                table(&header, &rows)
            )
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.m.to_string(),
                        shortest(r.error),
                        r.order.map(shortest).unwrap_or_default(),
                    ]
                })
                .collect();
            csv(&["N", "M", "error", "order"], &rows)
        }
        Format::Json => {
            let mut meta = plan.meta("convergence");
            meta.insert("reference".into(), json!(report.reference));
            let rows: Vec<Value> = report
                .rows
                .iter()
                .map(|r| json!({"n": r.n, "m": r.m, "error": r.error, "order": r.order}))
                .collect();
            let mut body = Map::new();
            body.insert("rows".into(), Value::Array(rows));
            json_document(meta, body)
        }
    }
}

fn parse_rule(name: &str, alpha: Option<f64>, summation: Summation) -> Result<Rule, CliError> {
    let name = name.trim();
    match name {
        "trapezoid" => Ok(Rule::Trapezoid),
        "simpson" => Ok(Rule::Simpson),
        "malpha" => alpha
            .map(|alpha| Rule::MAlpha { alpha })
            .ok_or_else(|| CliError::Spec("rule malpha needs --alpha".into())),
        _ => {
            let p = name
                .strip_prefix("tp")
                .and_then(|p| p.parse::<usize>().ok())
                .ok_or_else(|| {
                    CliError::Spec(format!(
                        "unknown rule `{name}` (expected tp<p>, trapezoid, simpson or malpha)"
                    ))
                })?;
            Ok(Rule::BSpline {
                degree: rule_degree(p)?,
                path: CompositePath::ClosedForm,
                summation,
            })
        }
    }
}

const DEFAULT_EVALCOUNT_RULES: [&str; 4] = ["tp1", "tp2", "tp3", "simpson"];

fn evalcount(mut args: EvalcountArgs) -> Result<Rendered, CliError> {
    let mut cfg = Config::load(args.common.config.as_deref())?;
    let budgets = if args.m.is_empty() {
        cfg.m.take().unwrap_or_default()
    } else {
        std::mem::take(&mut args.m)
    };
    if budgets.is_empty() {
        return Err(CliError::Spec("--m needs at least one budget".into()));
    }
    let names = if !args.rules.is_empty() {
        std::mem::take(&mut args.rules)
    } else {
        cfg.rules.take().unwrap_or_else(|| {
            DEFAULT_EVALCOUNT_RULES
                .iter()
                .map(|s| s.to_string())
                .collect()
        })
    };
    let spec = args.reference.or(cfg.reference).unwrap_or_default();
    let policy = match args.budget_policy.or(cfg.budget_policy).unwrap_or_default() {
        PolicyKind::Shared => BudgetPolicy::Shared,
        PolicyKind::PerRule => BudgetPolicy::PerRule,
    };
    let common = args.common.resolve(&mut cfg)?;
    if common.dims != 1 {
        return Err(CliError::Spec("evalcount is one-dimensional".into()));
    }
    let expr = parse(&common.function, 1)?;
    let sum = summation(common.summation);
    let rules = names
        .iter()
        .map(|n| parse_rule(n, common.alpha, sum))
        .collect::<Result<Vec<_>, _>>()?;

    let (a, b) = common.intervals[0];
    let reference = match spec {
        RefSpec::Value(v) => Reference::explicit(v),
        RefSpec::Auto => auto_reference(&expr, a, b, *budgets.iter().max().expect("non-empty"))?,
    };
    let report = evalcount_study(&expr, a, b, &budgets, &rules, policy, reference)?;
    let text = render_evalcount(&expr, &common, &report);
    Ok((text, common.out))
}

fn render_evalcount(expr: &Expression, common: &Common, report: &EvalCountReport) -> String {
    let policy = match report.policy {
        BudgetPolicy::Shared => "shared",
        BudgetPolicy::PerRule => "per-rule",
    };
    match common.format {
        Format::Text => {
            let (a, b) = common.intervals[0];
            let mut header = vec!["M".to_string()];
            header.extend(report.rules.iter().cloned());
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|row| {
                    let mut cells = vec![row.m.to_string()];
                    cells.extend(row.cells.iter().map(|c| sci4(c.error)));
                    cells
                })
                .collect();
            format!(
                "# f = {expr}, [{}, {}], budget policy {policy}\n{}{}",
                shortest(a),
                shortest(b),
                reference_text(&report.reference),
                table(&header, &rows)
            )
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .flat_map(|row| {
                    row.cells.iter().map(move |c| {
                        vec![
                            row.m.to_string(),
                            c.rule.clone(),
                            c.n.to_string(),
                            c.evaluations.to_string(),
                            shortest(c.error),
                        ]
                    })
                })
                .collect();
            csv(&["M", "rule", "N", "evaluations", "error"], &rows)
        }
        Format::Json => {
            let mut meta = Map::new();
            meta.insert("command".into(), json!("evalcount"));
            meta.insert("function".into(), json!(expr.to_string()));
            meta.insert("intervals".into(), json!(common.intervals));
            meta.insert("rules".into(), json!(report.rules));
            meta.insert("budget_policy".into(), json!(policy));
            meta.insert("reference".into(), json!(report.reference));
            let rows: Vec<Value> = report
                .rows
                .iter()
                .map(|row| {
                    let cells: Vec<Value> = row
                        .cells
                        .iter()
                        .map(|c| {
                            json!({"rule": c.rule, "n": c.n, "evaluations": c.evaluations, "error": c.error})
                        })
                        .collect();
                    json!({"m": row.m, "cells": cells})
                })
                .collect();
            let mut body = Map::new();
            body.insert("rows".into(), Value::Array(rows));
            json_document(meta, body)
        }
    }
}

fn coeffs(args: CoeffsArgs) -> Result<Rendered, CliError> {
    let degree = rule_degree(args.p)?;
    let rc = coefficients(degree)?;
    let tables = [
        (
            "c",
            rc.quasi
                .c
                .map(|q| (to_fraction_string(q), to_f64_nearest(q))),
        ),
        (
            "tau",
            rc.tau.map(|q| (to_fraction_string(q), to_f64_nearest(q))),
        ),
        (
            "xi",
            rc.xi.map(|q| (to_fraction_string(q), to_f64_nearest(q))),
        ),
    ];
    let format = if args.json { Format::Json } else { args.format };

    let text = match format {
        Format::Text => {
            let mut s = format!("# p = {}\n", args.p);
            for (name, t) in &tables {
                for (j, (exact, v)) in t.iter() {
                    s.push_str(&format!("{name}[{j}] = {exact}  ({})\n", shortest(*v)));
                }
            }
            s
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = tables
                .iter()
                .flat_map(|(name, t)| {
                    t.iter().map(move |(j, (exact, v))| {
                        vec![
                            name.to_string(),
                            args.p.to_string(),
                            j.to_string(),
                            exact.clone(),
                            shortest(*v),
                        ]
                    })
                })
                .collect();
            csv(&["table", "p", "index", "exact", "value"], &rows)
        }
        Format::Json => {
            let mut body = Map::new();
            body.insert("p".into(), json!(args.p));
            for (name, t) in &tables {
                let exact: Map<String, Value> = t
                    .iter()
                    .map(|(j, (e, _))| (j.to_string(), json!(e)))
                    .collect();
                let float: Map<String, Value> = t
                    .iter()
                    .map(|(j, (_, v))| (j.to_string(), json!(v)))
                    .collect();
                body.insert(name.to_string(), Value::Object(exact));
                body.insert(format!("{name}_float"), Value::Object(float));
            }
            let mut s = serde_json::to_string_pretty(&Value::Object(body)).expect("serializable");
            s.push('\n');
            s
        }
    };
    Ok((text, args.out))
}

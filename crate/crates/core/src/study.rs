//! Convergence tables: errors and observed orders over a sequence of grids, and
//! comparisons of rules at matched evaluation budgets.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::QuadError;
use crate::rules::{
    integrate_composite, CompositePath, Integrand, IntegrationRequest, QuadratureResult, Rule,
};
use crate::spline::SplineDegree;
use crate::tensor::{integrate_box, BoxRequest, MultiIntegrand};

/// Errors at or below this are treated as round-off and get no order estimate.
pub const ORDER_FLOOR: f64 = 1e-15;

/// Rule order and minimum grid used for automatic reference values.
pub const AUTO_REFERENCE_DEGREE: usize = 7;
pub const AUTO_REFERENCE_MIN_N: usize = 4096;
/// Grid refinement of the automatic reference relative to the finest study grid.
pub const AUTO_REFERENCE_FACTOR: usize = 16;
/// Cap on the total number of nodes of a multi-dimensional automatic reference.
pub const AUTO_REFERENCE_MAX_NODES: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReferenceSource {
    /// Supplied by the caller.
    Explicit,
    /// Computed with `T^degree` on `n` subdivisions per axis.
    Auto { rule: String, n: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reference {
    pub value: f64,
    pub source: ReferenceSource,
}

impl Reference {
    pub fn explicit(value: f64) -> Self {
        Reference {
            value,
            source: ReferenceSource::Explicit,
        }
    }
}

fn auto_degree() -> SplineDegree {
    SplineDegree::new(AUTO_REFERENCE_DEGREE).expect("valid degree")
}

/// Reference integral from `T^7` on `max(4096, 16·n_max)` subdivisions.
pub fn auto_reference<F: Integrand + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    n_max: usize,
) -> Result<Reference, QuadError> {
    let n = AUTO_REFERENCE_MIN_N.max(AUTO_REFERENCE_FACTOR * n_max);
    let req = IntegrationRequest::new(a, b, n, auto_degree())?;
    let value = integrate_composite(f, &req, CompositePath::ClosedForm)?.value;
    Ok(Reference {
        value,
        source: ReferenceSource::Auto {
            rule: format!("tp{AUTO_REFERENCE_DEGREE}"),
            n,
        },
    })
}

/// Box version of [`auto_reference`]: the per-axis grid is `16·n_max`, reduced so the
/// whole grid stays within [`AUTO_REFERENCE_MAX_NODES`] nodes.
pub fn auto_reference_box<F: MultiIntegrand + ?Sized>(
    f: &F,
    intervals: &[(f64, f64)],
    n_max: usize,
) -> Result<Reference, QuadError> {
    let k = intervals.len().max(1) as f64;
    let overhang = 4 * (AUTO_REFERENCE_DEGREE / 2);
    let cap = (AUTO_REFERENCE_MAX_NODES as f64).powf(1.0 / k).floor() as usize - 1 - overhang;
    let n = (AUTO_REFERENCE_FACTOR * n_max).min(cap).max(n_max);
    let axes = intervals
        .iter()
        .map(|&(a, b)| IntegrationRequest::new(a, b, n, auto_degree()))
        .collect::<Result<Vec<_>, _>>()?;
    let value = integrate_box(f, &BoxRequest::new(axes)?)?.value;
    Ok(Reference {
        value,
        source: ReferenceSource::Auto {
            rule: format!("tp{AUTO_REFERENCE_DEGREE}"),
            n,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    /// Integrand evaluations.
    pub m: usize,
    pub value: f64,
    pub error: f64,
    /// `log2(e_N / e_{2N})`, when the next row has `2N` and both errors exceed
    /// [`ORDER_FLOOR`].
    pub order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub reference: Reference,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn row(&self, n: usize) -> Option<&ConvergenceRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

/// Runs `rule(N)` for every `N` (strictly increasing) and tabulates errors against
/// `reference`. Rows are computed concurrently and assembled in input order.
pub fn convergence_study<R>(
    ns: &[usize],
    reference: Reference,
    rule: R,
) -> Result<ConvergenceReport, QuadError>
where
    R: Fn(usize) -> Result<QuadratureResult, QuadError> + Sync,
{
    if ns.is_empty() {
        return Err(QuadError::InvalidStudy("no grid sizes given".into()));
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(QuadError::InvalidStudy(
            "grid sizes must be strictly increasing".into(),
        ));
    }
    let results: Vec<Result<QuadratureResult, QuadError>> =
        ns.par_iter().map(|&n| rule(n)).collect();
    let mut rows = Vec::with_capacity(ns.len());
    for (&n, r) in ns.iter().zip(results) {
        let r = r?;
        rows.push(ConvergenceRow {
            n,
            m: r.evaluations,
            value: r.value,
            error: (r.value - reference.value).abs(),
            order: None,
        });
    }
    for i in 0..rows.len().saturating_sub(1) {
        let (e1, e2) = (rows[i].error, rows[i + 1].error);
        if rows[i + 1].n == 2 * rows[i].n && e1 > ORDER_FLOOR && e2 > ORDER_FLOOR {
            rows[i].order = Some((e1 / e2).log2());
        }
    }
    Ok(ConvergenceReport { reference, rows })
}

/// How B-spline rules turn an evaluation budget `M` into a grid size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BudgetPolicy {
    /// Every `T^p` in the study uses `N = M − 1 − 4·max⌊p/2⌋` over the study's rules.
    #[default]
    Shared,
    /// Each `T^p` uses its own `N = M − 1 − 4⌊p/2⌋`.
    PerRule,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalCountCell {
    pub rule: String,
    pub n: usize,
    pub evaluations: usize,
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalCountRow {
    pub m: usize,
    pub cells: Vec<EvalCountCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalCountReport {
    pub reference: Reference,
    pub policy: BudgetPolicy,
    pub rules: Vec<String>,
    pub rows: Vec<EvalCountRow>,
}

/// Grid size a rule gets under budget `m`. Simpson rounds down to even.
pub fn budget_subdivisions(
    rule: &Rule,
    m: usize,
    shared_overhang: usize,
    policy: BudgetPolicy,
) -> Option<usize> {
    let extra = match rule {
        Rule::BSpline { degree, .. } => match policy {
            BudgetPolicy::Shared => 1 + 2 * shared_overhang,
            BudgetPolicy::PerRule => 1 + 2 * degree.overhang(),
        },
        Rule::Trapezoid | Rule::Simpson => 1,
        Rule::MAlpha { .. } => 5,
    };
    let mut n = m.checked_sub(extra)?;
    if *rule == Rule::Simpson {
        n -= n % 2;
    }
    (n >= 1).then_some(n)
}

/// Compares `rules` at each evaluation budget in `budgets`.
pub fn evalcount_study<F: Integrand + Sync + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    budgets: &[usize],
    rules: &[Rule],
    policy: BudgetPolicy,
    reference: Reference,
) -> Result<EvalCountReport, QuadError> {
    if budgets.is_empty() || rules.is_empty() {
        return Err(QuadError::InvalidStudy(
            "need at least one budget and one rule".into(),
        ));
    }
    let shared = rules
        .iter()
        .filter_map(|r| match r {
            Rule::BSpline { degree, .. } => Some(degree.overhang()),
            _ => None,
        })
        .max()
        .unwrap_or(0);

    let mut jobs = Vec::new();
    for &m in budgets {
        for rule in rules {
            let n = budget_subdivisions(rule, m, shared, policy).ok_or_else(|| {
                QuadError::InvalidStudy(format!("budget M = {m} is too small for {}", rule.label()))
            })?;
            jobs.push((m, *rule, n));
        }
    }
    let results: Vec<Result<QuadratureResult, QuadError>> = jobs
        .par_iter()
        .map(|(_, rule, n)| rule.apply(f, a, b, *n))
        .collect();

    let mut rows: Vec<EvalCountRow> = Vec::new();
    for ((m, rule, n), r) in jobs.into_iter().zip(results) {
        let r = r?;
        let cell = EvalCountCell {
            rule: rule.label(),
            n,
            evaluations: r.evaluations,
            value: r.value,
            error: (r.value - reference.value).abs(),
        };
        match rows.last_mut() {
            Some(row) if row.m == m => row.cells.push(cell),
            _ => rows.push(EvalCountRow {
                m,
                cells: vec![cell],
            }),
        }
    }
    Ok(EvalCountReport {
        reference,
        policy,
        rules: rules.iter().map(Rule::label).collect(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(p: usize) -> SplineDegree {
        SplineDegree::new(p).unwrap()
    }

    fn f1(x: f64) -> f64 {
        (x * x).exp()
    }

    fn f2(x: f64) -> f64 {
        1.0 / (1.0 + 25.0 * x * x)
    }

    const F1_REF: f64 = 1.4626517459071815;

    #[test]
    fn trapezoid_column() {
        let rep = convergence_study(&[80, 160, 320], Reference::explicit(F1_REF), |n| {
            Rule::bspline(deg(1)).apply(&f1, 0.0, 1.0, n)
        })
        .unwrap();
        let want = [7.0787e-05, 1.7697e-05, 4.4243e-06];
        for (row, w) in rep.rows.iter().zip(want) {
            assert!((row.error - w).abs() < 0.01 * w);
        }
        assert!((rep.rows[0].order.unwrap() - 1.9999).abs() < 0.01);
        assert!((rep.rows[1].order.unwrap() - 2.0).abs() < 0.01);
        assert_eq!(rep.rows[2].order, None);
        assert_eq!(rep.rows[0].m, 81);
    }

    #[test]
    fn order_needs_doubling_and_floor() {
        let rep = convergence_study(&[10, 30, 60], Reference::explicit(F1_REF), |n| {
            Rule::Trapezoid.apply(&f1, 0.0, 1.0, n)
        })
        .unwrap();
        assert_eq!(rep.rows[0].order, None);
        assert!(rep.rows[1].order.is_some());

        let rep = convergence_study(&[8, 16], Reference::explicit(1.0), |n| {
            Rule::Trapezoid.apply(&|_x: f64| 1.0, 0.0, 1.0, n)
        })
        .unwrap();
        assert_eq!(rep.rows[0].order, None);
    }

    #[test]
    fn rejects_bad_grids() {
        let run = |ns: &[usize]| {
            convergence_study(ns, Reference::explicit(0.0), |n| {
                Rule::Trapezoid.apply(&f1, 0.0, 1.0, n)
            })
        };
        assert!(matches!(run(&[]), Err(QuadError::InvalidStudy(_))));
        assert!(matches!(run(&[20, 10]), Err(QuadError::InvalidStudy(_))));
        assert!(matches!(run(&[10, 10]), Err(QuadError::InvalidStudy(_))));
    }

    #[test]
    fn auto_reference_is_accurate() {
        let r = auto_reference(&f1, 0.0, 1.0, 320).unwrap();
        assert!((r.value - F1_REF).abs() < 1e-14);
        assert_eq!(
            r.source,
            ReferenceSource::Auto {
                rule: "tp7".into(),
                n: 5120
            }
        );
        let r = auto_reference_box(
            &|v: &[f64]| f1(v[0]) * f1(v[1]),
            &[(0.0, 1.0), (0.0, 1.0)],
            40,
        )
        .unwrap();
        assert!((r.value - F1_REF * F1_REF).abs() < 1e-13);
    }

    #[test]
    fn runge_budgets() {
        let rules = [
            Rule::bspline(deg(1)),
            Rule::bspline(deg(2)),
            Rule::bspline(deg(3)),
            Rule::Simpson,
        ];
        let rep = evalcount_study(
            &f2,
            -1.0,
            1.0,
            &[15, 85],
            &rules,
            BudgetPolicy::Shared,
            Reference::explicit(0.4 * 5f64.atan()),
        )
        .unwrap();
        let e = |m: usize, i: usize| rep.rows.iter().find(|r| r.m == m).unwrap().cells[i].error;
        assert!((e(15, 0) - 1.8614e-03).abs() < 0.01 * 1.8614e-03);
        assert!((e(85, 1) - 1.2627e-08).abs() < 0.02 * 1.2627e-08);
        assert_eq!(rep.rows[0].cells[3].n, 14);
        assert_eq!(rep.rows[0].cells[0].n, 10);
        assert_eq!(rep.rules, ["tp1", "tp2", "tp3", "simpson"]);
    }

    #[test]
    fn budget_policies() {
        let t1 = Rule::bspline(deg(1));
        let t4 = Rule::bspline(deg(4));
        assert_eq!(
            budget_subdivisions(&t1, 15, 2, BudgetPolicy::Shared),
            Some(10)
        );
        assert_eq!(
            budget_subdivisions(&t1, 15, 2, BudgetPolicy::PerRule),
            Some(14)
        );
        assert_eq!(
            budget_subdivisions(&t4, 15, 4, BudgetPolicy::PerRule),
            Some(6)
        );
        assert_eq!(
            budget_subdivisions(&Rule::Simpson, 46, 0, BudgetPolicy::Shared),
            Some(44)
        );
        assert_eq!(budget_subdivisions(&t4, 9, 4, BudgetPolicy::PerRule), None);
        assert_eq!(
            budget_subdivisions(&Rule::Simpson, 2, 0, BudgetPolicy::Shared),
            None
        );

        let err = evalcount_study(
            &f2,
            -1.0,
            1.0,
            &[5],
            &[Rule::bspline(deg(3))],
            BudgetPolicy::PerRule,
            Reference::explicit(0.0),
        )
        .unwrap_err();
        assert!(matches!(err, QuadError::InvalidStudy(_)));
    }

    #[test]
    fn constant_has_zero_error() {
        let rules = [Rule::bspline(deg(1)), Rule::bspline(deg(3)), Rule::Simpson];
        let rep = evalcount_study(
            &|_x: f64| 1.0,
            -1.0,
            1.0,
            &[15, 25, 45, 85],
            &rules,
            BudgetPolicy::Shared,
            Reference::explicit(2.0),
        )
        .unwrap();
        for row in &rep.rows {
            for c in &row.cells {
                assert!(c.error < 1e-15, "{} at M = {}", c.rule, row.m);
            }
        }
    }
}

//! The `auto` pipeline and the tests that recurse into it.

use super::battery::*;
use super::{Auxiliary, Outcome, Step, TestKind, TestReport, Verdict};
use crate::asymptotics::{
    compare, difference_derivative, log_form, simplify_dominant, strip_bounded_factor, var_of, with_orders, AsymError,
    Limit, Relation, DEFAULT_DEPTH,
};
use crate::expr::{parse_with, Expr, ParseError, ParseOptions};
use crate::oracle::{empirical_verdict, DEFAULT_SCHEDULE};
use crate::rearrange::{block, BlockSpec};
use thiserror::Error;

/// Nesting limit for condensation and block hand-offs.
const MAX_NEST: usize = 2;
/// Derivative applications in the L'Hopital test.
const LHOPITAL_DEPTH: usize = 4;

#[derive(Clone, Debug)]
pub struct Options {
    pub max_depth: usize,
    pub precision: usize,
    /// Attach a numeric advisory to inconclusive results.
    pub numeric_advisory: bool,
    pub schedule: Vec<u32>,
    /// Tests tried after normalization, in order.
    pub order: Vec<TestKind>,
}

impl Default for Options {
    fn default() -> Self {
        Options::with_depth(DEFAULT_DEPTH)
    }
}

impl Options {
    pub fn with_depth(max_depth: usize) -> Options {
        Options {
            max_depth,
            precision: crate::oracle::DEFAULT_PRECISION,
            numeric_advisory: true,
            schedule: DEFAULT_SCHEDULE.to_vec(),
            order: vec![
                TestKind::NthTerm,
                TestKind::PSeries,
                TestKind::GeneralizedP,
                TestKind::Ratio,
                TestKind::Raabe,
                TestKind::GeneralizedRatio(1),
                TestKind::GeneralizedRatio(2),
                TestKind::GeneralizedRatio(3),
                TestKind::Boundary(max_depth),
                TestKind::Condensation,
            ],
        }
    }

    fn quiet(&self) -> Options {
        Options {
            numeric_advisory: false,
            ..self.clone()
        }
    }
}

pub fn auto(a: &Expr) -> Verdict {
    auto_with(a, &Options::default())
}

pub fn auto_with(a: &Expr, opts: &Options) -> Verdict {
    auto_inner(a, opts, 0)
}

const STRIP_REF: &str = "a factor between two positive constants does not change the verdict";
const SIMPLIFY_REF: &str = "a + b = a at infinity when a is much greater than b";

fn normalize(a: &Expr, trace: &mut TestReport) -> Expr {
    let mut cur = a.clone();
    let stripped = strip_step(&cur);
    if stripped != cur.to_string() {
        trace.push("strip_bounded_factor", STRIP_REF, &cur, stripped.clone());
        if let Ok(s) = strip_bounded_factor(&cur) {
            cur = s.expr;
        }
    }
    let simp = simplify_dominant(&cur, true);
    if simp != cur {
        trace.push("simplify_dominant", SIMPLIFY_REF, &cur, simp.to_string());
        cur = simp;
    }
    cur
}

/// The term `auto` hands to the battery.
pub fn normalized(a: &Expr) -> Expr {
    normalize(a, &mut TestReport::new(&var_of(a)))
}

fn strip_step(a: &Expr) -> String {
    match strip_bounded_factor(a) {
        Ok(s) => s.expr.to_string(),
        Err(e) => format!("refused: {e}"),
    }
}

fn adopt(mut v: Verdict, mut trace: TestReport) -> Verdict {
    trace.extend(std::mem::take(&mut v.trace));
    v.trace = trace;
    v
}

fn auto_inner(a: &Expr, opts: &Options, depth: usize) -> Verdict {
    let mut trace = TestReport::new(&var_of(a));
    let cur = normalize(a, &mut trace);
    let mut last = None;
    if cur.has_alt_sign() {
        let v = alternating_inner(&cur, opts, depth);
        if v.is_decisive() {
            return adopt(v, trace);
        }
        trace.extend(v.trace);
    } else {
        for kind in &opts.order {
            if *kind == TestKind::Condensation && depth >= MAX_NEST {
                continue;
            }
            let v = run_inner(*kind, &cur, opts, depth);
            if v.is_decisive() {
                return adopt(v, trace);
            }
            trace.extend(v.trace.clone());
            last = Some(v);
        }
    }
    let mut v = Verdict::inconclusive(trace);
    if let Some(l) = last {
        v.auxiliary = l.auxiliary;
    }
    if opts.numeric_advisory && depth == 0 {
        v.advisory = Some(empirical_verdict(a, &opts.schedule, opts.precision.min(128)));
    }
    v
}

/// Runs one named test; recursing tests use the pipeline underneath.
pub fn run_test(kind: TestKind, a: &Expr, opts: &Options) -> Verdict {
    run_inner(kind, a, opts, 0)
}

fn run_inner(kind: TestKind, a: &Expr, opts: &Options, depth: usize) -> Verdict {
    match kind {
        TestKind::NthTerm => nth_term_test(a),
        TestKind::PSeries => p_series_test(a),
        TestKind::GeneralizedP => generalized_p_series_test(a, opts.max_depth),
        TestKind::Ratio => ratio_test(a),
        TestKind::Raabe => raabe_test(a),
        TestKind::GeneralizedRatio(m) => generalized_ratio_test(a, m),
        TestKind::NthRoot => nth_root_test(a),
        TestKind::Boundary(w) => boundary_test(a, w),
        TestKind::Exp => exp_test(a),
        TestKind::Condensation => condensation_inner(a, opts, depth),
        TestKind::Alternating => alternating_inner(a, opts, depth),
        TestKind::LHopital => lhopital_inner(a, opts, depth),
        TestKind::LimitComparison => match crate::rearrange::leading_term(a) {
            Some(b) => limit_comparison(a, &b, opts),
            None => finish(
                kind,
                a,
                Outcome::Inconclusive,
                Auxiliary::default(),
                "no leading term to compare with".into(),
            ),
        },
    }
}

/// `2^n a(2^n)`, simplified.
pub fn condense(a: &Expr) -> Expr {
    let var = var_of(a);
    let two_n = Expr::pow(Expr::int(2), Expr::sym(&var));
    simplify_dominant(&(two_n.clone() * a.substitute(&var, &two_n)), true)
}

pub fn condensation_test(a: &Expr) -> Verdict {
    condensation_inner(a, &Options::default().quiet(), 0)
}

fn condensation_inner(a: &Expr, opts: &Options, depth: usize) -> Verdict {
    let kind = TestKind::Condensation;
    let positive = with_orders(&var_of(a), |ctx| Ok(log_form(a, ctx)?.sign)).ok() == Some(1);
    if !positive || eventual_trend(a).ok() != Some(-1) {
        return finish(
            kind,
            a,
            Outcome::Inconclusive,
            Auxiliary::default(),
            "no decision: term not shown positive and decreasing".into(),
        );
    }
    let b = condense(a);
    let mut trace = TestReport::new(&var_of(a));
    trace.push(kind.to_string(), kind.reference(), a, b.to_string());
    let sub = auto_inner(&b, &opts.quiet(), depth + 1);
    let outcome = sub.outcome;
    let label = sub.deciding_test.map(|t| t.label());
    trace.extend(sub.trace);
    Verdict {
        outcome,
        deciding_test: outcome.is_decisive().then_some(kind),
        trace,
        auxiliary: sub.auxiliary,
        advisory: None,
        note: label.map(|l| format!("condensed series by {l}")),
    }
}

pub fn alternating_test(a: &Expr) -> Verdict {
    alternating_inner(a, &Options::default().quiet(), 0)
}

fn alternating_inner(a: &Expr, opts: &Options, depth: usize) -> Verdict {
    let kind = TestKind::Alternating;
    if !a.has_alt_sign() {
        return finish(
            kind,
            a,
            Outcome::Inconclusive,
            Auxiliary::default(),
            "no decision: no alternating sign".into(),
        );
    }
    // Terms that do not tend to zero settle it.
    let nth = nth_term_test(a);
    if nth.is_decisive() {
        return nth;
    }
    if let Some(b) = split_alternating(a) {
        if matches!(log_limit(&b), Ok(Limit::MinusInfinity)) && eventual_trend(&b).ok() == Some(-1) {
            let mut v = finish(
                kind,
                a,
                Outcome::Converges,
                Auxiliary::default(),
                format!("|a| = {b} decreases to 0"),
            );
            let mut t = nth.trace;
            t.extend(v.trace);
            v.trace = t;
            return v;
        }
    }
    let mut trace = nth.trace;
    if nth.auxiliary.limit != Some(Limit::Finite(Expr::zero())) || depth >= MAX_NEST {
        trace.push(
            kind.to_string(),
            kind.reference(),
            a,
            "no decision: terms not shown to tend to 0",
        );
        return Verdict::inconclusive(trace);
    }
    // Terms tend to 0, so pairing neighbours preserves the verdict.
    let blk = match block(a, BlockSpec::Fixed(2)) {
        Ok(b) if !b.needs_numeric() => b,
        _ => {
            trace.push("block(2)", BLOCK_REF, a, "no decision: block sum has no leading term");
            return Verdict::inconclusive(trace);
        }
    };
    trace.push("block(2)", BLOCK_REF, a, blk.term().to_string());
    let sub = auto_inner(blk.term(), &opts.quiet(), depth + 1);
    let outcome = sub.outcome;
    let label = sub.deciding_test.map(|t| t.label());
    trace.extend(sub.trace);
    Verdict {
        outcome,
        deciding_test: outcome.is_decisive().then_some(kind),
        trace,
        auxiliary: sub.auxiliary,
        advisory: None,
        note: label.map(|l| format!("pairs of terms by {l}")),
    }
}

const BLOCK_REF: &str = "grouping consecutive terms in blocks of fixed length keeps the verdict when terms tend to 0";
const GUARD_REF: &str = "f/g of the form ln_(w+2) n / L_(w+1) misleads the derivative step";

/// `(f, g)` with `a = f/g`: factors with negative exponents form `g`.
pub fn split_quotient(a: &Expr) -> (Expr, Expr) {
    let mut num = Vec::new();
    let mut den = Vec::new();
    for f in a.factors() {
        match &f {
            Expr::Pow(b, x) if x.has_negative_coeff() => den.push(Expr::pow((**b).clone(), Expr::neg((**x).clone()))),
            Expr::Exp(x) if x.has_negative_coeff() => den.push(Expr::exp(Expr::neg((**x).clone()))),
            _ => num.push(f),
        }
    }
    (Expr::mul(num), Expr::mul(den))
}

/// `+1` for infinity, `-1` for zero, `0` otherwise.
fn end_behaviour(e: &Expr) -> i8 {
    match log_limit(e) {
        Ok(Limit::PlusInfinity) => 1,
        Ok(Limit::MinusInfinity) => -1,
        _ => 0,
    }
}

fn indeterminate(f: &Expr, g: &Expr) -> bool {
    let (bf, bg) = (end_behaviour(f), end_behaviour(g));
    bf != 0 && bf == bg
}

/// Guard outcome: `Some(w)` when `a` is `ln_(w+1) n / L_w`-like.
pub fn lhopital_guard(a: &Expr) -> Result<Option<usize>, AsymError> {
    let s = simplify_dominant(a, true);
    with_orders(&var_of(&s), |ctx| {
        Ok(log_levels(&log_form(&s, ctx)?.l)?.and_then(|v| guard_match(&v)))
    })
}

fn guard_detail(a: &Expr) -> String {
    match lhopital_guard(a) {
        Ok(Some(w)) => format!("triggered: a ~ ln_{} n / L_{w}", w + 1),
        Ok(None) => "clear".into(),
        Err(e) => format!("undecided: {e}"),
    }
}

/// One derivative step `f/g -> f'/g'`.
pub fn lhopital_step(a: &Expr) -> Result<Expr, AsymError> {
    let (f, g) = split_quotient(a);
    let df = difference_derivative(&f)?;
    let dg = difference_derivative(&g)?;
    Ok(simplify_dominant(&(df / dg), false))
}

pub fn lhopital_test(a: &Expr) -> Verdict {
    lhopital_inner(a, &Options::default().quiet(), 0)
}

fn lhopital_inner(a: &Expr, opts: &Options, depth: usize) -> Verdict {
    let kind = TestKind::LHopital;
    let mut trace = TestReport::new(&var_of(a));
    let guard = guard_detail(a);
    trace.push("lhopital_guard", GUARD_REF, a, guard.clone());
    if guard.starts_with("triggered") {
        let mut v = generalized_p_series_test(a, opts.max_depth);
        v.note = Some("L'Hopital guard triggered".into());
        return adopt(v, trace);
    }
    if guard.starts_with("undecided") {
        return Verdict::inconclusive(trace);
    }
    let (f, g) = split_quotient(a);
    if !indeterminate(&f, &g) {
        trace.push(
            kind.to_string(),
            kind.reference(),
            a,
            format!("no decision: {f} / {g} is not indeterminate"),
        );
        return Verdict::inconclusive(trace);
    }
    let mut cur = a.clone();
    for _ in 0..LHOPITAL_DEPTH {
        let next = match lhopital_step(&cur) {
            Ok(n) => n,
            Err(e) => {
                trace.push(
                    "lhopital_derivative",
                    kind.reference(),
                    &cur,
                    format!("no decision: {e}"),
                );
                return Verdict::inconclusive(trace);
            }
        };
        trace.push("lhopital_derivative", kind.reference(), &cur, next.to_string());
        cur = next;
        let (f, g) = split_quotient(&cur);
        if !indeterminate(&f, &g) {
            break;
        }
    }
    let sub = auto_inner(&cur, &opts.quiet(), depth + 1);
    let outcome = sub.outcome;
    trace.extend(sub.trace);
    if !outcome.is_decisive() {
        return Verdict::inconclusive(trace);
    }
    // The derivative rule for sums is not proved; demand a second opinion.
    let check = auto_inner(a, &opts.quiet(), depth + 1);
    let (outcome, note) = match check.outcome {
        o if o == outcome => (
            outcome,
            format!(
                "confirmed by {}",
                check.deciding_test.map(|t| t.label()).unwrap_or_default()
            ),
        ),
        Outcome::Inconclusive => (
            Outcome::Inconclusive,
            format!("unconfirmed: derivative series {}", outcome),
        ),
        other => (
            Outcome::Inconclusive,
            format!("contradicted: derivative series {outcome}, direct {other}"),
        ),
    };
    Verdict {
        outcome,
        deciding_test: outcome.is_decisive().then_some(kind),
        trace,
        auxiliary: sub.auxiliary,
        advisory: None,
        note: Some(note),
    }
}

/// `a` inherits the verdict of `b` when `a/b` tends to a positive constant.
pub fn limit_comparison(a: &Expr, b: &Expr, opts: &Options) -> Verdict {
    let kind = TestKind::LimitComparison;
    let c = match compare(a, b) {
        Ok(Relation::Comparable(c)) if crate::asymptotics::coef_sign(&c) == Some(1) => c,
        Ok(r) => {
            return finish(
                kind,
                a,
                Outcome::Inconclusive,
                Auxiliary::default(),
                format!("no decision: a {} b = {b}", r.symbol()),
            );
        }
        Err(e) => {
            return finish(
                kind,
                a,
                Outcome::Inconclusive,
                Auxiliary::default(),
                format!("no decision: {e}"),
            )
        }
    };
    let vb = auto_inner(b, &opts.quiet(), MAX_NEST);
    let mut trace = TestReport::new(&var_of(a));
    trace.push(
        kind.to_string(),
        kind.reference(),
        a,
        format!("a/b -> {c} with b = {b}"),
    );
    let outcome = vb.outcome;
    let label = vb.deciding_test.map(|t| t.label());
    trace.extend(vb.trace);
    Verdict {
        outcome,
        deciding_test: outcome.is_decisive().then_some(kind),
        trace,
        auxiliary: Auxiliary {
            constant: Some(c.to_string()),
            ..Default::default()
        },
        advisory: None,
        note: label.map(|l| format!("b by {l}")),
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReplayError {
    #[error("cannot parse recorded input `{text}`: {source}")]
    Parse { text: String, source: ParseError },
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("rule {rule} on `{before}` gave `{got}`, recorded `{want}`")]
    Mismatch {
        rule: String,
        before: String,
        got: String,
        want: String,
    },
}

/// Re-applies a recorded step and checks its output.
pub fn replay(step: &Step, var: &str, opts: &Options) -> Result<(), ReplayError> {
    let e = parse_with(&step.before, &ParseOptions::with_var(var)).map_err(|source| ReplayError::Parse {
        text: step.before.clone(),
        source,
    })?;
    let got = match step.rule.as_str() {
        "strip_bounded_factor" => strip_step(&e),
        "simplify_dominant" => simplify_dominant(&e, true).to_string(),
        "block(2)" => match block(&e, BlockSpec::Fixed(2)) {
            Ok(b) if !b.needs_numeric() => b.term().to_string(),
            _ => "no decision: block sum has no leading term".into(),
        },
        "lhopital_guard" => guard_detail(&e),
        "lhopital_derivative" => match lhopital_step(&e) {
            Ok(n) => n.to_string(),
            Err(err) => format!("no decision: {err}"),
        },
        "condensation" => match condensation_precheck(&e) {
            true => condense(&e).to_string(),
            false => "no decision: term not shown positive and decreasing".into(),
        },
        rule => {
            let kind: TestKind = rule.parse().map_err(|_| ReplayError::UnknownRule(rule.to_string()))?;
            let v = match kind {
                TestKind::Alternating => alternating_step(&e),
                TestKind::LHopital => {
                    let (f, g) = split_quotient(&e);
                    format!("no decision: {f} / {g} is not indeterminate")
                }
                TestKind::LimitComparison => match compare(&e, &limit_partner(&step.after, var)?) {
                    Ok(Relation::Comparable(c)) => format!("a/b -> {c} with b = {}", limit_partner(&step.after, var)?),
                    _ => String::new(),
                },
                other => run_inner(other, &e, &opts.quiet(), MAX_NEST)
                    .trace
                    .steps
                    .last()
                    .map(|s| s.after.clone())
                    .unwrap_or_default(),
            };
            v
        }
    };
    if got == step.after {
        Ok(())
    } else {
        Err(ReplayError::Mismatch {
            rule: step.rule.clone(),
            before: step.before.clone(),
            got,
            want: step.after.clone(),
        })
    }
}

fn condensation_precheck(a: &Expr) -> bool {
    let positive = with_orders(&var_of(a), |ctx| Ok(log_form(a, ctx)?.sign)).ok() == Some(1);
    positive && eventual_trend(a).ok() == Some(-1)
}

fn alternating_step(a: &Expr) -> String {
    if !a.has_alt_sign() {
        return "no decision: no alternating sign".into();
    }
    match split_alternating(a) {
        Some(b) if matches!(log_limit(&b), Ok(Limit::MinusInfinity)) && eventual_trend(&b).ok() == Some(-1) => {
            format!("|a| = {b} decreases to 0")
        }
        _ => "no decision: terms not shown to tend to 0".into(),
    }
}

fn limit_partner(after: &str, var: &str) -> Result<Expr, ReplayError> {
    let text = after.rsplit_once("with b = ").map(|(_, b)| b).unwrap_or("");
    parse_with(text, &ParseOptions::with_var(var)).map_err(|source| ReplayError::Parse {
        text: text.to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn quiet() -> Options {
        Options::default().quiet()
    }

    #[test]
    fn auto_examples() {
        for s in ["1/(n*sqrt(n^3+1))", "(3+sin(n))/n^2", "1/(8*n^2+12*n+4)"] {
            assert_eq!(auto_with(&p(s), &quiet()).outcome, Outcome::Converges, "{s}");
        }
    }

    #[test]
    fn condensation_examples() {
        assert_eq!(condense(&p("1/(n*ln(n))")), p("1/(n*ln(2))"));
        assert_eq!(condensation_test(&p("1/(n*ln(n))")).outcome, Outcome::Diverges);
        assert_eq!(condense(&p("1/n")), Expr::one());
        assert_eq!(condensation_test(&p("1/n")).outcome, Outcome::Diverges);
        assert_eq!(condense(&p("1/n^2")), p("2^(-n)"));
        assert_eq!(condensation_test(&p("1/n^2")).outcome, Outcome::Converges);
    }

    #[test]
    fn alternating_examples() {
        assert_eq!(alternating_test(&p("(-1)^n/n")).outcome, Outcome::Converges);
        assert_eq!(alternating_test(&p("(-1)^n")).outcome, Outcome::Diverges);
        let v = alternating_test(&p("(-1)^n/(sqrt(n) - (-1)^n)"));
        assert_eq!(v.outcome, Outcome::Diverges);
        assert!(v.trace.steps.iter().any(|s| s.rule == "block(2)"));
    }

    #[test]
    fn lhopital_examples() {
        let v = lhopital_test(&p("ln(n)/n^2"));
        assert_eq!(v.outcome, Outcome::Converges);
        let v = lhopital_test(&p("n^2/2^n"));
        assert_eq!(v.outcome, Outcome::Converges);
        assert_eq!(
            v.trace.steps.iter().filter(|s| s.rule == "lhopital_derivative").count(),
            2
        );
        let v = lhopital_test(&p("lnk(2, n)/(n*ln(n))"));
        assert_eq!(v.outcome, Outcome::Diverges);
        assert_eq!(v.deciding_test, Some(TestKind::GeneralizedP));
        assert!(v.trace.steps[0].after.starts_with("triggered"));
    }

    #[test]
    fn limit_comparison_examples() {
        let v = limit_comparison(&p("1/(n^2+1)"), &p("1/n^2"), &quiet());
        assert_eq!(
            (v.outcome, v.auxiliary.constant.as_deref()),
            (Outcome::Converges, Some("1"))
        );
        let v = limit_comparison(&p("(5*n+2)/(n^3+1)"), &p("1/n^2"), &quiet());
        assert_eq!(
            (v.outcome, v.auxiliary.constant.as_deref()),
            (Outcome::Converges, Some("5"))
        );
    }

    #[test]
    fn traces_replay() {
        for s in [
            "1/(n^2-3*n)",
            "(3+sin(n))/n^2",
            "(-1)^n/(sqrt(n) - (-1)^n)",
            "1/lnk(2, n)",
            "n^2/2^n",
        ] {
            let v = auto_with(&p(s), &quiet());
            for step in &v.trace.steps {
                replay(step, &v.trace.var, &quiet()).unwrap();
            }
        }
    }
}

//! Single tests that do not recurse into the pipeline.

use super::{Auxiliary, Outcome, TestKind, TestReport, Verdict};
use crate::asymptotics::{
    coef_sign, exp_series, lead_sign, log_form, series_limit, shift_log_ratio, simplify_dominant, var_of, with_orders,
    AsymError, Ctx, Limit, Mono, Series,
};
use crate::expr::{Expr, Q};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub(crate) fn finish(kind: TestKind, a: &Expr, outcome: Outcome, auxiliary: Auxiliary, detail: String) -> Verdict {
    let mut trace = TestReport::new(&var_of(a));
    trace.push(kind.to_string(), kind.reference(), a, detail);
    Verdict {
        outcome,
        deciding_test: outcome.is_decisive().then_some(kind),
        trace,
        auxiliary,
        advisory: None,
        note: None,
    }
}

fn give_up(kind: TestKind, a: &Expr, why: impl std::fmt::Display) -> Verdict {
    finish(
        kind,
        a,
        Outcome::Inconclusive,
        Auxiliary::default(),
        format!("no decision: {why}"),
    )
}

fn one() -> Series {
    Series::constant(Expr::one())
}

/// `exp(limit of ln)`, keeping infinities.
pub(crate) fn exp_limit(l: &Limit) -> Limit {
    match l {
        Limit::PlusInfinity => Limit::PlusInfinity,
        Limit::MinusInfinity => Limit::Finite(Expr::zero()),
        Limit::Finite(c) => Limit::Finite(Expr::exp(c.clone())),
    }
}

/// Limit of `ln |a|`.
pub fn log_limit(a: &Expr) -> Result<Limit, AsymError> {
    with_orders(&var_of(a), |ctx| series_limit(&log_form(a, ctx)?.l))
}

/// `b` when `a = (-1)^(...) * b` with `b` free of alternating signs.
pub fn split_alternating(a: &Expr) -> Option<Expr> {
    let fs = a.factors();
    let (alt, rest): (Vec<Expr>, Vec<Expr>) = fs.into_iter().partition(|f| matches!(f, Expr::AltSign(_)));
    if alt.is_empty() || rest.iter().any(|f| f.has_alt_sign()) {
        return None;
    }
    Some(Expr::mul(rest))
}

/// Even and odd subsequences `a(2n)`, `a(2n+1)`.
pub fn parity_split(a: &Expr) -> (Expr, Expr) {
    let var = var_of(a);
    let n = Expr::sym(&var);
    let two_n = Expr::int(2) * n;
    (a.substitute(&var, &two_n), a.substitute(&var, &(two_n + Expr::one())))
}

pub fn nth_term_test(a: &Expr) -> Verdict {
    let kind = TestKind::NthTerm;
    let lim = if a.has_alt_sign() {
        match split_alternating(a) {
            Some(b) => log_limit(&b).map(|l| vec![l]),
            None => {
                let (even, odd) = parity_split(a);
                if even.has_alt_sign() || odd.has_alt_sign() {
                    return give_up(kind, a, "alternating sign does not reduce on even and odd indices");
                }
                log_limit(&even).and_then(|le| Ok(vec![le, log_limit(&odd)?]))
            }
        }
    } else {
        log_limit(a).map(|l| vec![l])
    };
    let lims = match lim {
        Ok(l) => l,
        Err(e) => return give_up(kind, a, e),
    };
    match lims.iter().find(|l| !matches!(l, Limit::MinusInfinity)) {
        Some(l) => {
            let mag = exp_limit(l);
            let aux = Auxiliary {
                limit: Some(mag.clone()),
                ..Default::default()
            };
            finish(kind, a, Outcome::Diverges, aux, format!("lim |a(n)| = {mag} != 0"))
        }
        None => finish(
            kind,
            a,
            Outcome::Inconclusive,
            Auxiliary {
                limit: Some(Limit::Finite(Expr::zero())),
                ..Default::default()
            },
            "lim a(n) = 0".into(),
        ),
    }
}

fn index_factors(e: &Expr, var: &str) -> Expr {
    Expr::mul(e.factors().into_iter().filter(|f| f.contains_sym(var)).collect())
}

fn decide_p(p: &Q) -> Outcome {
    if *p > Q::one() {
        Outcome::Converges
    } else {
        Outcome::Diverges
    }
}

pub fn p_series_test(a: &Expr) -> Verdict {
    let kind = TestKind::PSeries;
    let var = var_of(a);
    if a.has_alt_sign() {
        return give_up(kind, a, "alternating term");
    }
    let s = simplify_dominant(a, true);
    let core = index_factors(&s, &var);
    let p = match &core {
        Expr::Num(_) => Q::zero(),
        Expr::Sym(_) => -Q::one(),
        Expr::Pow(b, x) if matches!(**b, Expr::Sym(_)) => match x.as_num() {
            Some(q) => -q.clone(),
            None => return give_up(kind, a, format!("{s} is not c/n^p")),
        },
        _ => return give_up(kind, a, format!("{s} is not c/n^p")),
    };
    let outcome = decide_p(&p);
    let aux = Auxiliary {
        w: Some(0),
        p: Some(Limit::Finite(Expr::num(p.clone()))),
        ..Default::default()
    };
    let cmp = if outcome == Outcome::Converges { ">" } else { "<=" };
    finish(
        kind,
        a,
        outcome,
        aux,
        format!("a ~ c/n^p with p = {} {cmp} 1", Expr::num(p)),
    )
}

/// Coefficients of `ln_k n` (index `k-1`) making up the growing part of
/// `l`, when it consists of nothing else.
pub(crate) fn log_levels(l: &Series) -> Result<Option<Vec<Q>>, AsymError> {
    let (growing, _, _) = l.split();
    if let Some(e) = &growing.err {
        return Err(AsymError::Undetermined(format!("growing part known only up to O({e})")));
    }
    let mut v: Vec<Q> = Vec::new();
    for (m, c) in &growing.terms {
        let (Some(k), Some(q)) = (m.as_log_level(), c.as_num()) else {
            return Ok(None);
        };
        if v.len() < k {
            v.resize(k, Q::zero());
        }
        v[k - 1] = q.clone();
    }
    while v.last().map(|q| q.is_zero()).unwrap_or(false) {
        v.pop();
    }
    Ok(Some(v))
}

/// `(w, p)` when `ln a = -ln n - ... - ln_w n - p ln_(w+1) n + O(1)`.
pub(crate) fn family_match(levels: &[Q]) -> Option<(usize, Q)> {
    let minus_one = -Q::one();
    let lead = levels.iter().take_while(|c| **c == minus_one).count();
    if lead == levels.len() {
        return Some(match lead {
            0 => (0, Q::zero()),
            n => (n - 1, Q::one()),
        });
    }
    if levels[lead + 1..].iter().all(|c| c.is_zero()) {
        Some((lead, -levels[lead].clone()))
    } else {
        None
    }
}

/// `w` when `a ~ c ln_(w+2) n^q / L_(w+1)` with `q > 0`: the members of the
/// family where replacing `f/g` by `f'/g'` misleads.
pub(crate) fn guard_match(levels: &[Q]) -> Option<usize> {
    let minus_one = -Q::one();
    let lead = levels.iter().take_while(|c| **c == minus_one).count();
    let next = levels.get(lead)?;
    (lead >= 1 && next.is_positive() && levels[lead + 1..].iter().all(|c| c.is_zero())).then(|| lead - 1)
}

pub fn generalized_p_series_test(a: &Expr, max_depth: usize) -> Verdict {
    let kind = TestKind::GeneralizedP;
    if a.has_alt_sign() {
        return give_up(kind, a, "alternating term");
    }
    let s = simplify_dominant(a, true);
    let levels = with_orders(&var_of(&s), |ctx| log_levels(&log_form(&s, ctx)?.l));
    let m = match levels {
        Ok(Some(v)) => family_match(&v),
        Ok(None) => None,
        Err(e) => return give_up(kind, a, e),
    };
    match m {
        Some((w, p)) if w <= max_depth => {
            let outcome = decide_p(&p);
            let aux = Auxiliary {
                w: Some(w),
                p: Some(Limit::Finite(Expr::num(p.clone()))),
                ..Default::default()
            };
            let cmp = if outcome == Outcome::Converges { ">" } else { "<=" };
            finish(
                kind,
                a,
                outcome,
                aux,
                format!(
                    "a ~ c/(L_{} (ln_{w} n)^p), w = {w}, p = {} {cmp} 1",
                    w as i64 - 1,
                    Expr::num(p)
                ),
            )
        }
        Some((w, _)) => give_up(kind, a, format!("depth {w} exceeds {max_depth}")),
        None => give_up(kind, a, "not a member of the generalized p-series family"),
    }
}

fn positive_shift(a: &Expr, ctx: &Ctx) -> Result<Series, AsymError> {
    let d = shift_log_ratio(a, ctx)?;
    if d.sign < 0 {
        return Err(AsymError::NotEventuallyPositive(format!("{a} changes sign")));
    }
    Ok(d.l)
}

fn sign_of(l: &Limit, against: &Q) -> Option<i8> {
    l.cmp_num(against)
}

pub fn ratio_test(a: &Expr) -> Verdict {
    let kind = TestKind::Ratio;
    let lim = with_orders(&var_of(a), |ctx| series_limit(&positive_shift(a, ctx)?));
    let lim = match lim {
        Ok(l) => l,
        Err(e) => return give_up(kind, a, e),
    };
    let ratio = exp_limit(&lim);
    let aux = Auxiliary {
        ratio: Some(ratio.clone()),
        ..Default::default()
    };
    let (outcome, rel) = match sign_of(&lim, &Q::zero()) {
        Some(-1) => (Outcome::Converges, "< 1"),
        Some(1) => (Outcome::Diverges, "> 1"),
        Some(_) => (Outcome::Inconclusive, "= 1"),
        None => (Outcome::Inconclusive, "undecided"),
    };
    finish(kind, a, outcome, aux, format!("lim a(n+1)/a(n) = {ratio} {rel}"))
}

/// `exp(s)` where a super-logarithmic exponent is mapped to a limit.
fn exp_or_limit(s: &Series, ctx: &Ctx) -> Result<Result<Series, Limit>, AsymError> {
    match exp_series(s, ctx) {
        Ok(v) => Ok(Ok(v)),
        Err(AsymError::ExpScale { sign }) if sign > 0 => Ok(Err(Limit::PlusInfinity)),
        Err(AsymError::ExpScale { .. }) => Ok(Err(Limit::Finite(Expr::zero()))),
        Err(e) => Err(e),
    }
}

pub fn raabe_test(a: &Expr) -> Verdict {
    let kind = TestKind::Raabe;
    let lim = with_orders(&var_of(a), |ctx| {
        let d = positive_shift(a, ctx)?;
        match exp_or_limit(&d.neg(), ctx)? {
            Ok(e) => series_limit(&e.sub(&one(), ctx).mul_mono(&Mono::n_pow(Q::one()))),
            Err(Limit::PlusInfinity) => Ok(Limit::PlusInfinity),
            Err(_) => Ok(Limit::MinusInfinity),
        }
    });
    let r = match lim {
        Ok(l) => l,
        Err(e) => return give_up(kind, a, e),
    };
    let aux = Auxiliary {
        raabe: Some(r.clone()),
        ..Default::default()
    };
    let (outcome, rel) = match sign_of(&r, &Q::one()) {
        Some(1) => (Outcome::Converges, "> 1"),
        Some(-1) => (Outcome::Diverges, "< 1"),
        Some(_) => (Outcome::Inconclusive, "= 1"),
        None => (Outcome::Inconclusive, "undecided"),
    };
    finish(
        kind,
        a,
        outcome,
        aux,
        format!("R = lim n (a(n)/a(n+1) - 1) = {r} {rel}"),
    )
}

/// `lim L_m (a(n)/a(n+1) - 1 - sum_{i=0}^{m} 1/L_i)`.
fn generalized_ratio_limit(d: &Series, m: i32, ctx: &Ctx) -> Result<Limit, AsymError> {
    let e = match exp_or_limit(&d.neg(), ctx)? {
        Ok(e) => e,
        Err(Limit::PlusInfinity) => return Ok(Limit::PlusInfinity),
        Err(_) => return Ok(Limit::MinusInfinity),
    };
    let mut g = e.sub(&one(), ctx);
    for i in 0..=m {
        g = g.sub(&Series::term(Mono::inv_log_product(i as usize), Expr::one()), ctx);
    }
    if m >= 0 {
        g = g.mul_mono(&Mono::inv_log_product(m as usize).inv());
    }
    series_limit(&g)
}

pub fn generalized_ratio_test(a: &Expr, m: i32) -> Verdict {
    let kind = TestKind::GeneralizedRatio(m);
    if m < -1 {
        return give_up(kind, a, "level must be at least -1");
    }
    let var = var_of(a);
    let res = with_orders(&var, |ctx| {
        let ctx = Ctx {
            max_log_depth: ctx.max_log_depth.max((m + 4) as usize),
            ..ctx.clone()
        };
        let d = positive_shift(a, &ctx)?;
        let g = generalized_ratio_limit(&d, m, &ctx)?;
        let next = match sign_of(&g, &Q::zero()) {
            Some(0) => Some(generalized_ratio_limit(&d, m + 1, &ctx)?),
            _ => None,
        };
        Ok((g, next))
    });
    let (g, next) = match res {
        Ok(r) => r,
        Err(e) => return give_up(kind, a, e),
    };
    let aux = Auxiliary {
        m: Some(m),
        limit: Some(g.clone()),
        ..Default::default()
    };
    let head = format!("lim G_{m} = {g}");
    match (sign_of(&g, &Q::zero()), next) {
        (Some(1), _) => finish(kind, a, Outcome::Converges, aux, format!("{head} > 0")),
        (Some(-1), _) => finish(kind, a, Outcome::Diverges, aux, format!("{head} < 0")),
        (Some(0), Some(n)) if sign_of(&n, &Q::zero()) == Some(-1) => finish(
            kind,
            a,
            Outcome::Diverges,
            aux,
            format!("{head}, lim G_{} = {n} < 0: on the boundary at level {m}", m + 1),
        ),
        (Some(0), Some(n)) => finish(
            kind,
            a,
            Outcome::Inconclusive,
            aux,
            format!("{head}, lim G_{} = {n}: decide at a higher level", m + 1),
        ),
        _ => finish(kind, a, Outcome::Inconclusive, aux, format!("{head} undecided")),
    }
}

pub fn nth_root_test(a: &Expr) -> Verdict {
    let kind = TestKind::NthRoot;
    let lim = with_orders(&var_of(a), |ctx| {
        let lf = log_form(a, ctx)?;
        series_limit(&lf.l.mul_mono(&Mono::n_pow(-Q::one())))
    });
    let lim = match lim {
        Ok(l) => l,
        Err(e) => return give_up(kind, a, e),
    };
    let root = exp_limit(&lim);
    let aux = Auxiliary {
        limit: Some(root.clone()),
        ..Default::default()
    };
    let (outcome, rel) = match sign_of(&lim, &Q::zero()) {
        Some(-1) => (Outcome::Converges, "< 1"),
        Some(1) => (Outcome::Diverges, "> 1"),
        Some(_) => (Outcome::Inconclusive, "= 1"),
        None => (Outcome::Inconclusive, "undecided"),
    };
    finish(kind, a, outcome, aux, format!("lim |a(n)|^(1/n) = {root} {rel}"))
}

/// Position of `a` against the boundary family `1/L_w`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryResult {
    pub outcome: Outcome,
    pub w: usize,
    pub p: Limit,
}

fn boundary_search(a: &Expr, max_depth: usize) -> Result<Option<BoundaryResult>, AsymError> {
    with_orders(&var_of(a), |ctx| {
        let ctx = Ctx {
            max_log_depth: ctx.max_log_depth.max(max_depth + 3),
            ..ctx.clone()
        };
        let lf = log_form(a, &ctx)?;
        // x = ln(1/(a L_(d-1))), measured against the ruler ln_(d+1) n.
        let mut x = lf.l.neg();
        for d in 0..=max_depth {
            if d >= 1 {
                x = x.sub(&Series::term(Mono::log(d), Expr::one()), &ctx);
            }
            let ruler = Mono::log(d + 1);
            let p = series_limit(&x.mul_mono(&ruler.inv()))?;
            let found = |outcome| {
                Ok(Some(BoundaryResult {
                    outcome,
                    w: d,
                    p: p.clone(),
                }))
            };
            match p.cmp_num(&Q::one()) {
                Some(1) => return found(Outcome::Converges),
                Some(-1) => return found(Outcome::Diverges),
                Some(_) => {
                    let rest = x.sub(&Series::term(ruler, Expr::one()), &ctx);
                    match series_limit(&rest)? {
                        Limit::PlusInfinity => continue,
                        // At or above 1/L_d.
                        _ => return found(Outcome::Diverges),
                    }
                }
                None => return Err(AsymError::Undetermined(format!("p_{d} = {p}"))),
            }
        }
        Ok(None)
    })
}

pub fn boundary(a: &Expr, max_depth: usize) -> Result<Option<BoundaryResult>, AsymError> {
    boundary_search(a, max_depth)
}

pub fn boundary_test(a: &Expr, max_depth: usize) -> Verdict {
    let kind = TestKind::Boundary(max_depth);
    if a.has_alt_sign() {
        return give_up(kind, a, "alternating term");
    }
    match boundary_search(a, max_depth) {
        Ok(Some(r)) => {
            let aux = Auxiliary {
                w: Some(r.w),
                p: Some(r.p.clone()),
                ..Default::default()
            };
            let rel = match r.p.cmp_num(&Q::one()) {
                Some(1) => "> 1: below the family",
                Some(-1) => "< 1: above the family",
                _ => "= 1: at or above the family member",
            };
            let d = r.w;
            finish(
                kind,
                a,
                r.outcome,
                aux,
                format!(
                    "p_{d} = lim ln(1/(a L_{})) / ln_{} n = {} {rel}",
                    d as i64 - 1,
                    d + 1,
                    r.p
                ),
            )
        }
        Ok(None) => give_up(kind, a, format!("p = 1 at every depth up to {max_depth}")),
        Err(e) => give_up(kind, a, e),
    }
}

/// The exponent `f` when `a = c * exp(-f)` or `c * b^(-f)`.
fn exp_exponent(a: &Expr) -> Option<Expr> {
    let var = var_of(a);
    match index_factors(a, &var) {
        Expr::Exp(g) => Some(Expr::neg((*g).clone())),
        Expr::Pow(b, x) if !b.contains_sym(&var) && coef_sign(&b).map(|s| s > 0).unwrap_or(false) => {
            Some(Expr::neg(Expr::mul(vec![(*x).clone(), Expr::ln((*b).clone())])))
        }
        _ => None,
    }
}

pub fn exp_test(a: &Expr) -> Verdict {
    let kind = TestKind::Exp;
    let Some(f) = exp_exponent(a) else {
        return give_up(kind, a, "term is not of the form c/exp(f)");
    };
    let ln_n = Expr::ln(Expr::sym(&var_of(a)));
    match crate::asymptotics::compare(&ln_n, &f) {
        Ok(crate::asymptotics::Relation::MuchLess) => finish(
            kind,
            a,
            Outcome::Converges,
            Auxiliary::default(),
            format!("a = c/exp({f}) with ln n much less than {f}"),
        ),
        Ok(r) => give_up(kind, a, format!("ln n {} {f}", r.symbol())),
        Err(e) => give_up(kind, a, e),
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SlowerError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("the product {0} did not re-verify")]
    NotVerified(String),
}

/// `b = 1/ln_(w+1) n` with `sum a b` still divergent.
pub fn slower_divergent(a: &Expr, max_depth: usize) -> Result<Expr, SlowerError> {
    let r = boundary_search(a, max_depth)
        .map_err(|e| SlowerError::Precondition(e.to_string()))?
        .filter(|r| r.outcome == Outcome::Diverges)
        .ok_or_else(|| SlowerError::Precondition(format!("boundary test does not show {a} divergent")))?;
    let b = Expr::recip(Expr::lnk(r.w as u32 + 1, Expr::sym(&var_of(a))));
    verify(a, &b, Outcome::Diverges, max_depth)?;
    Ok(b)
}

/// `b = ln_(w+1) n`, unbounded, with `sum a b` still convergent.
pub fn slower_convergent(a: &Expr, max_depth: usize) -> Result<Expr, SlowerError> {
    let r = boundary_search(a, max_depth)
        .map_err(|e| SlowerError::Precondition(e.to_string()))?
        .filter(|r| r.outcome == Outcome::Converges)
        .ok_or_else(|| SlowerError::Precondition(format!("boundary test does not show {a} convergent")))?;
    let b = Expr::lnk(r.w as u32 + 1, Expr::sym(&var_of(a)));
    verify(a, &b, Outcome::Converges, max_depth)?;
    Ok(b)
}

fn verify(a: &Expr, b: &Expr, want: Outcome, max_depth: usize) -> Result<(), SlowerError> {
    let prod = a.clone() * b.clone();
    match boundary_search(&prod, max_depth) {
        Ok(Some(r)) if r.outcome == want => Ok(()),
        _ => Err(SlowerError::NotVerified(prod.to_string())),
    }
}

/// Sign of `a(n+1) - a(n)` at infinity for an eventually positive `a`.
pub fn eventual_trend(a: &Expr) -> Result<i8, AsymError> {
    with_orders(&var_of(a), |ctx| {
        let d = positive_shift(a, ctx)?;
        lead_sign(&d)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn outcome(v: Verdict) -> Outcome {
        v.outcome
    }

    #[test]
    fn nth_term_examples() {
        let v = nth_term_test(&p("(n^3+n)/(5*n^3+n^2+27)"));
        assert_eq!(v.outcome, Outcome::Diverges);
        assert_eq!(v.auxiliary.limit, Some(Limit::Finite(p("1/5"))));
        assert_eq!(outcome(nth_term_test(&p("1/n"))), Outcome::Inconclusive);
        assert_eq!(outcome(nth_term_test(&p("(-1)^n"))), Outcome::Diverges);
        assert_eq!(
            outcome(nth_term_test(&p("(-1)^n/(sqrt(n) - (-1)^n)"))),
            Outcome::Inconclusive
        );
    }

    #[test]
    fn p_series_examples() {
        assert_eq!(outcome(p_series_test(&p("1/(n^2-3*n)"))), Outcome::Converges);
        assert_eq!(outcome(p_series_test(&p("1/n"))), Outcome::Diverges);
        let v = p_series_test(&p("1/(n*sqrt(n^3+1))"));
        assert_eq!(v.outcome, Outcome::Converges);
        assert_eq!(v.auxiliary.p, Some(Limit::Finite(p("5/2"))));
    }

    #[test]
    fn generalized_p_examples() {
        let v = generalized_p_series_test(&p("1/(n*ln(n))"), 6);
        assert_eq!((v.outcome, v.auxiliary.w), (Outcome::Diverges, Some(1)));
        assert_eq!(v.auxiliary.p, Some(Limit::Finite(Expr::one())));
        let v = generalized_p_series_test(&p("1/(n*ln(n)^2)"), 6);
        assert_eq!((v.outcome, v.auxiliary.w), (Outcome::Converges, Some(1)));
        assert_eq!(
            outcome(generalized_p_series_test(&p("1/(n*sqrt(ln(n)))"), 6)),
            Outcome::Diverges
        );
        let v = generalized_p_series_test(&p("lnk(2, n)/(n*ln(n))"), 6);
        assert_eq!((v.outcome, v.auxiliary.w), (Outcome::Diverges, Some(2)));
    }

    #[test]
    fn ratio_examples() {
        let v = ratio_test(&p("1/e^n"));
        assert_eq!(v.outcome, Outcome::Converges);
        assert_eq!(v.auxiliary.ratio, Some(Limit::Finite(p("1/e"))));
        assert_eq!(outcome(ratio_test(&p("1/n"))), Outcome::Inconclusive);
        let v = ratio_test(&p("2^n"));
        assert_eq!(
            (v.outcome, v.auxiliary.ratio),
            (Outcome::Diverges, Some(Limit::Finite(Expr::int(2))))
        );
        let v = ratio_test(&p("3^n*n!/n^n"));
        assert_eq!(
            (v.outcome, v.auxiliary.ratio),
            (Outcome::Diverges, Some(Limit::Finite(p("3/e"))))
        );
    }

    #[test]
    fn raabe_examples() {
        let v = raabe_test(&p("1/n^2"));
        assert_eq!(
            (v.outcome, v.auxiliary.raabe),
            (Outcome::Converges, Some(Limit::Finite(Expr::int(2))))
        );
        assert_eq!(outcome(raabe_test(&p("1/n"))), Outcome::Inconclusive);
        let v = raabe_test(&p("1/(n*ln(n))"));
        assert_eq!(
            (v.outcome, v.auxiliary.raabe),
            (Outcome::Inconclusive, Some(Limit::Finite(Expr::one())))
        );
    }

    #[test]
    fn generalized_ratio_examples() {
        assert_eq!(outcome(generalized_ratio_test(&p("1/n^2"), 0)), Outcome::Converges);
        assert_eq!(
            outcome(generalized_ratio_test(&p("1/(n*ln(n)^2)"), 1)),
            Outcome::Converges
        );
        assert_eq!(outcome(generalized_ratio_test(&p("1/(n*ln(n))"), 1)), Outcome::Diverges);
        assert_eq!(outcome(generalized_ratio_test(&p("1/e^n"), -1)), Outcome::Converges);
        // Converges, but only visible one level up.
        assert_eq!(
            outcome(generalized_ratio_test(&p("1/(n*ln(n)*lnk(2,n)^2)"), 1)),
            Outcome::Inconclusive
        );
        assert_eq!(
            outcome(generalized_ratio_test(&p("1/(n*ln(n)*lnk(2,n)^2)"), 2)),
            Outcome::Converges
        );
    }

    #[test]
    fn nth_root_examples() {
        assert_eq!(outcome(nth_root_test(&p("1/2^n"))), Outcome::Converges);
        let v = nth_root_test(&p("n^2/2^n"));
        assert_eq!(
            (v.outcome, v.auxiliary.limit),
            (Outcome::Converges, Some(Limit::Finite(p("1/2"))))
        );
        assert_eq!(outcome(nth_root_test(&p("1/n"))), Outcome::Inconclusive);
    }

    #[test]
    fn boundary_examples() {
        let v = boundary_test(&p("1/n^2"), 6);
        assert_eq!((v.outcome, v.auxiliary.w), (Outcome::Converges, Some(0)));
        assert_eq!(v.auxiliary.p, Some(Limit::Finite(Expr::int(2))));
        assert_eq!(outcome(boundary_test(&p("1/n!"), 6)), Outcome::Converges);
        assert_eq!(outcome(boundary_test(&p("1/lnk(2, n)"), 6)), Outcome::Diverges);
        assert_eq!(outcome(boundary_test(&p("n!/(2*n)!"), 6)), Outcome::Converges);
        let r = p("(4*n)!*(1103+26390*n)/((n!)^4*396^(4*n))");
        assert_eq!(outcome(boundary_test(&r, 6)), Outcome::Converges);
        let v = boundary_test(&p("1/(n*ln(n))"), 6);
        assert_eq!((v.outcome, v.auxiliary.w), (Outcome::Diverges, Some(1)));
    }

    #[test]
    fn exp_examples() {
        assert_eq!(outcome(exp_test(&p("1/e^n"))), Outcome::Converges);
        assert_eq!(outcome(exp_test(&p("exp(-n^2)"))), Outcome::Converges);
        assert_eq!(outcome(exp_test(&p("1/e^ln(n)"))), Outcome::Inconclusive);
    }

    #[test]
    fn slower_series() {
        assert_eq!(slower_divergent(&p("1/n"), 6).unwrap(), p("1/ln(n)"));
        assert_eq!(slower_divergent(&p("1/(n*ln(n))"), 6).unwrap(), p("1/lnk(2, n)"));
        assert_eq!(slower_divergent(&p("1"), 6).unwrap(), p("1/ln(n)"));
        assert_eq!(slower_convergent(&p("1/n^2"), 6).unwrap(), p("ln(n)"));
        assert_eq!(slower_convergent(&p("1/(n*ln(n)^2)"), 6).unwrap(), p("lnk(2, n)"));
        assert_eq!(slower_convergent(&p("1/2^n"), 6).unwrap(), p("ln(n)"));
        assert!(slower_convergent(&p("1/n"), 6).is_err());
    }
}

//! Comparison of functions at `n = infinity`.
//!
//! Everything here reduces to the sign of the leading term of
//! `ln f - ln g`, expanded on the scale `n ln n, n^q, ln n, ln_2 n, ..., 1`
//! by [`expand`]. When the symbolic route gives up, [`compare`] samples
//! `ln f - ln g` numerically.

pub mod expand;
pub mod series;

pub use expand::{exp_series, lead_sign, ln_series, log_form, pow_series, value, LogForm};
pub use series::{Ctx, Lead, Mono, Series};

use crate::expr::{derivative, DiffError, Evaluator, Expr, Point};
use rayon::prelude::*;
use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// Default deepest nested logarithm on the comparison scale.
pub const DEFAULT_DEPTH: usize = 6;
/// Truncation orders tried in turn when a leading term cancels.
const ORDERS: [i64; 3] = [4, 8, 14];
/// Sample points for the numeric fallback of [`compare`].
pub const FALLBACK_POINTS: [i64; 4] = [1_000, 1_000_000, 1_000_000_000, 1_000_000_000_000];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AsymError {
    #[error("not eventually positive: {0}")]
    NotEventuallyPositive(String),
    #[error("unsupported form: {0}")]
    Unsupported(String),
    #[error("oscillating factor: {0}")]
    Oscillatory(String),
    #[error("leading term undetermined: {0}")]
    Undetermined(String),
    #[error("growth beyond any power (sign {sign})")]
    ExpScale { sign: i8 },
    #[error("nested logarithm depth {0} exceeds the configured scale")]
    DepthExceeded(usize),
    #[error("sequence is constant")]
    ConstantSequence,
    #[error("factor is not bounded away from zero: {0}")]
    NotBoundedAwayFromZero(String),
}

impl From<DiffError> for AsymError {
    fn from(e: DiffError) -> Self {
        match e {
            DiffError::ConstantSequence(_) => AsymError::ConstantSequence,
            DiffError::Unsupported(s) => AsymError::Unsupported(s),
        }
    }
}

thread_local! {
    static SIGN_CACHE: RefCell<HashMap<Expr, Option<i8>>> = RefCell::new(HashMap::new());
}

/// Numeric sign of an index-free coefficient: `Some(0)` when it vanishes to
/// working precision, `None` when it cannot be evaluated (free parameters).
pub fn coef_sign(c: &Expr) -> Option<i8> {
    if let Expr::Num(v) = c {
        return Some(if v.is_zero_q() {
            0
        } else if v.is_neg_q() {
            -1
        } else {
            1
        });
    }
    if !c.free_symbols().is_empty() {
        return None;
    }
    if let Some(hit) = SIGN_CACHE.with(|m| m.borrow().get(c).cloned()) {
        return hit;
    }
    let ev = Evaluator::new("n", 256);
    let out = match ev.eval_log(c, &Point::from(1)) {
        Ok(v) if v.sign == 0 => Some(0),
        // Anything below 2^-200 in magnitude is taken as a cancellation.
        Ok(v) if v.ln_f64() < -200.0 * std::f64::consts::LN_2 => Some(0),
        Ok(v) => Some(v.sign),
        Err(_) => None,
    };
    SIGN_CACHE.with(|m| m.borrow_mut().insert(c.clone(), out));
    out
}

trait QSign {
    fn is_zero_q(&self) -> bool;
    fn is_neg_q(&self) -> bool;
}

impl QSign for crate::expr::Q {
    fn is_zero_q(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn is_neg_q(&self) -> bool {
        num_traits::Signed::is_negative(self)
    }
}

/// Runs `f` at increasing truncation orders until the answer stops being
/// undetermined.
pub fn with_orders<T>(var: &str, f: impl Fn(&Ctx) -> Result<T, AsymError>) -> Result<T, AsymError> {
    let base = Ctx::new(var);
    let mut last = None;
    for order in ORDERS {
        match f(&base.with_order(order)) {
            Err(e @ AsymError::Undetermined(_)) => last = Some(e),
            other => return other,
        }
    }
    Err(last.unwrap())
}

pub fn var_of(e: &Expr) -> String {
    e.index_var().unwrap_or_else(|| "n".into())
}

/// Limit of a quantity given by its series.
#[derive(Clone, Debug, PartialEq)]
pub enum Limit {
    Finite(Expr),
    PlusInfinity,
    MinusInfinity,
}

impl serde::Serialize for Limit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Limit {
    /// Sign of `limit - c` for a rational `c`; `None` when undecidable.
    pub fn cmp_num(&self, c: &crate::expr::Q) -> Option<i8> {
        match self {
            Limit::PlusInfinity => Some(1),
            Limit::MinusInfinity => Some(-1),
            Limit::Finite(v) => coef_sign(&(v.clone() - Expr::num(c.clone()))),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Limit::Finite(_))
    }
}

impl fmt::Display for Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Limit::Finite(c) => write!(f, "{c}"),
            Limit::PlusInfinity => write!(f, "inf"),
            Limit::MinusInfinity => write!(f, "-inf"),
        }
    }
}

pub fn series_limit(s: &Series) -> Result<Limit, AsymError> {
    match s.lead() {
        Lead::Zero => Ok(Limit::Finite(Expr::zero())),
        Lead::Unknown(m) if m.is_decaying() => Ok(Limit::Finite(Expr::zero())),
        Lead::Unknown(m) => Err(AsymError::Undetermined(format!("limit hidden in O({m})"))),
        Lead::Term(m, c) => {
            if m.is_growing() {
                match coef_sign(c) {
                    Some(1) => Ok(Limit::PlusInfinity),
                    Some(-1) => Ok(Limit::MinusInfinity),
                    _ => Err(AsymError::Undetermined(format!("sign of {c}"))),
                }
            } else if m.is_one() {
                Ok(Limit::Finite(c.clone()))
            } else {
                Ok(Limit::Finite(Expr::zero()))
            }
        }
    }
}

/// `lim e` as `n -> infinity` for an eventually sign-stable `e`.
pub fn limit(e: &Expr) -> Result<Limit, AsymError> {
    let var = var_of(e);
    with_orders(&var, |ctx| {
        let lf = log_form(e, ctx)?;
        Ok(match series_limit(&lf.l)? {
            Limit::MinusInfinity => Limit::Finite(Expr::zero()),
            Limit::PlusInfinity if lf.sign > 0 => Limit::PlusInfinity,
            Limit::PlusInfinity => Limit::MinusInfinity,
            Limit::Finite(c) => {
                let v = Expr::exp(c);
                Limit::Finite(if lf.sign < 0 { Expr::neg(v) } else { v })
            }
        })
    })
}

/// `ln a(n+1) - ln a(n)` expanded at infinity; the log of the ratio
/// `a(n+1)/a(n)`. Also returns the sign of that ratio.
pub fn shift_log_ratio(a: &Expr, ctx: &Ctx) -> Result<LogForm, AsymError> {
    let n = Expr::sym(&ctx.var);
    let shifted = a.substitute(&ctx.var, &(n + Expr::one()));
    let l1 = log_form(&shifted, ctx)?;
    let l0 = log_form(a, ctx)?;
    Ok(LogForm {
        sign: l1.sign * l0.sign,
        l: l1.l.sub(&l0.l, ctx),
    })
}

/// Relation of `f` to `g` at infinity.
#[derive(Clone, Debug, PartialEq)]
pub enum Relation {
    /// `f ≺ g`: `f/g -> 0`.
    MuchLess,
    /// `f ≻ g`.
    MuchGreater,
    /// `f ≍ g` with `f/g ->` the constant.
    Comparable(Expr),
    /// `ln f ≺ ln g`.
    LogMuchLess,
    /// `ln f ≻ ln g`.
    LogMuchGreater,
    LessEq,
    GreaterEq,
    Unknown,
}

impl Relation {
    pub fn symbol(&self) -> &'static str {
        match self {
            Relation::MuchLess => "≺",
            Relation::MuchGreater => "≻",
            Relation::Comparable(_) => "≍",
            Relation::LogMuchLess => "≺≺",
            Relation::LogMuchGreater => "≻≻",
            Relation::LessEq => "≤",
            Relation::GreaterEq => "≥",
            Relation::Unknown => "?",
        }
    }

    /// The relation seen from the other side.
    pub fn flip(&self) -> Relation {
        match self {
            Relation::MuchLess => Relation::MuchGreater,
            Relation::MuchGreater => Relation::MuchLess,
            Relation::Comparable(c) => Relation::Comparable(Expr::recip(c.clone())),
            Relation::LogMuchLess => Relation::LogMuchGreater,
            Relation::LogMuchGreater => Relation::LogMuchLess,
            Relation::LessEq => Relation::GreaterEq,
            Relation::GreaterEq => Relation::LessEq,
            Relation::Unknown => Relation::Unknown,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Comparable(c) => write!(f, "≍ (ratio {c})"),
            other => write!(f, "{}", other.symbol()),
        }
    }
}

/// `ln f` on the comparison scale: the non-vanishing axes with their
/// coefficients, largest first.
#[derive(Clone, Debug, PartialEq)]
pub struct LogExpansion {
    pub var: String,
    pub axes: Vec<(Mono, Expr)>,
    /// Set when lower-order terms (below the constant axis) were dropped.
    pub remainder: bool,
}

impl LogExpansion {
    pub fn coefficient(&self, axis: &Mono) -> Expr {
        self.axes
            .iter()
            .find(|(m, _)| m == axis)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Expr::zero)
    }
}

impl fmt::Display for LogExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .axes
            .iter()
            .map(|(m, c)| format!("({}, {c})", m.to_expr(&self.var)))
            .collect();
        write!(f, "[{}]", parts.join(", "))?;
        if self.remainder {
            write!(f, " + o(1)")?;
        }
        Ok(())
    }
}

pub fn log_expand(f: &Expr, depth: usize) -> Result<LogExpansion, AsymError> {
    let var = var_of(f);
    let lf = with_orders(&var, |ctx| {
        let ctx = Ctx {
            max_log_depth: depth.max(1),
            ..ctx.clone()
        };
        log_form(f, &ctx)
    })?;
    if lf.sign < 0 {
        return Err(AsymError::NotEventuallyPositive(f.to_string()));
    }
    let one = Mono::one();
    let axes = lf.l.above(&one);
    let remainder = lf.l.terms.iter().any(|(m, _)| *m < one) || lf.l.err.is_some();
    Ok(LogExpansion { var, axes, remainder })
}

/// Relation of `f` to `g` decided by `ln f - ln g`, with a numeric fallback.
pub fn compare(f: &Expr, g: &Expr) -> Result<Relation, AsymError> {
    let var = common_var(f, g);
    let symbolic = with_orders(&var, |ctx| {
        let lf = log_form(f, ctx)?;
        let lg = log_form(g, ctx)?;
        if lf.sign < 0 || lg.sign < 0 {
            return Err(AsymError::NotEventuallyPositive(
                if lf.sign < 0 { f } else { g }.to_string(),
            ));
        }
        let d = lf.l.sub(&lg.l, ctx);
        Ok(match series_limit(&d)? {
            Limit::PlusInfinity => Relation::MuchGreater,
            Limit::MinusInfinity => Relation::MuchLess,
            Limit::Finite(c) => Relation::Comparable(Expr::exp(c)),
        })
    });
    match symbolic {
        Ok(r) => Ok(r),
        Err(e @ AsymError::NotEventuallyPositive(_)) => Err(e),
        Err(_) => Ok(numeric_compare(f, g, &var)),
    }
}

fn common_var(f: &Expr, g: &Expr) -> String {
    let mut syms = f.free_symbols();
    syms.extend(g.free_symbols());
    if syms.len() == 1 {
        syms.into_iter().next().unwrap()
    } else {
        "n".into()
    }
}

/// Sign test on sampled `ln f - ln g`: all samples must share a sign and
/// grow strictly in magnitude.
pub fn numeric_compare(f: &Expr, g: &Expr, var: &str) -> Relation {
    let ev = Evaluator::new(var, 128);
    let diffs: Vec<Option<f64>> = FALLBACK_POINTS
        .par_iter()
        .map(|&n| {
            let at = Point::from(n);
            let a = ev.eval_log(f, &at).ok()?;
            let b = ev.eval_log(g, &at).ok()?;
            if a.sign <= 0 || b.sign <= 0 {
                return None;
            }
            Some(crate::bignum::to_f64(&a.log_mag.sub(
                &b.log_mag,
                192,
                crate::bignum::RM,
            )))
        })
        .collect();
    let Some(diffs) = diffs.into_iter().collect::<Option<Vec<f64>>>() else {
        return Relation::Unknown;
    };
    let same_sign = diffs.iter().all(|d| *d > 0.0) || diffs.iter().all(|d| *d < 0.0);
    let growing = diffs.windows(2).all(|w| w[1].abs() > w[0].abs());
    if !same_sign || !growing {
        return Relation::Unknown;
    }
    if diffs[0] > 0.0 {
        Relation::MuchGreater
    } else {
        Relation::MuchLess
    }
}

/// `ln a ≻ ln b`: `a` dominates `b` even as a multiplicative factor.
pub fn log_dominates(a: &Expr, b: &Expr) -> Result<bool, AsymError> {
    let var = common_var(a, b);
    with_orders(&var, |ctx| {
        let la = log_form(a, ctx)?;
        let lb = log_form(b, ctx)?;
        let ta = match la.l.lead() {
            Lead::Term(m, _) => m.clone(),
            Lead::Zero => return Ok(false),
            Lead::Unknown(m) => return Err(AsymError::Undetermined(format!("ln {a} = O({m})"))),
        };
        let tb = match lb.l.lead() {
            Lead::Term(m, _) => m.clone(),
            Lead::Zero => Mono::one(),
            Lead::Unknown(m) => m.clone(),
        };
        Ok(ta > tb && ta.is_growing())
    })
}

/// True when `ln |e|` grows faster than any `c ln_k n`, so that `e` is not
/// of polynomial-logarithmic size.
pub fn is_super_log(lf: &LogForm, ctx: &Ctx) -> bool {
    matches!(exp_series(&lf.l, ctx), Err(AsymError::ExpScale { .. }))
}

/// Dominant-term simplification.
///
/// Sums keep their ≻-maximal terms, accepted only when the result is
/// asymptotically equal (ratio 1) to the original. With `whole_sum`, the
/// top-level product may also drop positive factors of polynomial-log size
/// next to a factor of super-logarithmic size, which leaves the verdict of
/// the whole series unchanged.
pub fn simplify_dominant(e: &Expr, whole_sum: bool) -> Expr {
    let var = var_of(e);
    let s = simplify_rec(e, &var);
    if whole_sum {
        drop_log_level_factors(&s, &var)
    } else {
        s
    }
}

fn simplify_rec(e: &Expr, var: &str) -> Expr {
    if !e.contains_sym(var) {
        return e.clone();
    }
    match e {
        Expr::Add(ts) => {
            let inner = Expr::add(ts.iter().map(|t| simplify_rec(t, var)).collect());
            // Simplifying terms separately can cancel a leading order.
            let full = if &inner != e && asymptotically_equal(&inner, e) {
                inner
            } else {
                e.clone()
            };
            let Expr::Add(ts) = &full else { return full };
            match dominant_terms(ts, var) {
                Some(kept) if kept.len() < ts.len() => {
                    let cand = Expr::add(kept);
                    if asymptotically_equal(&cand, &full) {
                        cand
                    } else {
                        full
                    }
                }
                _ => full,
            }
        }
        Expr::Mul(fs) => Expr::mul(fs.iter().map(|f| simplify_rec(f, var)).collect()),
        Expr::Pow(b, x) if !x.contains_sym(var) => Expr::pow(simplify_rec(b, var), (**x).clone()),
        _ => e.clone(),
    }
}

fn asymptotically_equal(a: &Expr, b: &Expr) -> bool {
    matches!(compare(a, b), Ok(Relation::Comparable(ref c)) if c.is_one())
}

/// Terms of maximal order, if every pair can be ordered.
fn dominant_terms(ts: &[Expr], var: &str) -> Option<Vec<Expr>> {
    with_orders(var, |ctx| {
        let forms = ts.iter().map(|t| log_form(t, ctx)).collect::<Result<Vec<_>, _>>()?;
        let mut best: Vec<usize> = vec![0];
        for i in 1..forms.len() {
            let d = forms[i].l.sub(&forms[best[0]].l, ctx);
            match series_limit(&d)? {
                Limit::PlusInfinity => best = vec![i],
                Limit::MinusInfinity => {}
                Limit::Finite(_) => best.push(i),
            }
        }
        Ok(best.into_iter().map(|i| ts[i].clone()).collect())
    })
    .ok()
}

fn drop_log_level_factors(e: &Expr, var: &str) -> Expr {
    let Expr::Mul(fs) = e else { return e.clone() };
    let attempt = with_orders(var, |ctx| {
        let mut keep = Vec::new();
        let mut droppable = Vec::new();
        let mut any_super = false;
        for f in fs {
            if !f.contains_sym(var) {
                keep.push(f.clone());
                continue;
            }
            match log_form(f, ctx) {
                Ok(lf) if is_super_log(&lf, ctx) => {
                    any_super = true;
                    keep.push(f.clone());
                }
                Ok(lf) if lf.sign > 0 => droppable.push(f.clone()),
                _ => keep.push(f.clone()),
            }
        }
        if !any_super || droppable.is_empty() {
            return Ok(None);
        }
        let kept = Expr::mul(keep);
        // The retained product must itself stay super-logarithmic.
        let lf = log_form(&kept, ctx)?;
        Ok(is_super_log(&lf, ctx).then_some(kept))
    });
    match attempt {
        Ok(Some(kept)) => kept,
        _ => e.clone(),
    }
}

/// A factor removed by [`strip_bounded_factor`].
#[derive(Clone, Debug, PartialEq)]
pub struct Stripped {
    pub expr: Expr,
    pub removed: Vec<Expr>,
}

/// Removes factors certified to stay between two positive constants.
///
/// Certified: index-free constants, `c + k1 sin(.) + k2 cos(.) ...` with
/// `|k1| + |k2| + ... < |c|` (and constant powers of such), and factors
/// whose logarithm tends to a finite limit. A trigonometric factor without
/// such a certificate is refused.
pub fn strip_bounded_factor(e: &Expr) -> Result<Stripped, AsymError> {
    let var = var_of(e);
    let mut keep = Vec::new();
    let mut removed = Vec::new();
    let mut sign_flip = false;
    for f in e.factors() {
        if !f.contains_sym(&var) {
            match coef_sign(&f) {
                Some(s) if s < 0 => {
                    sign_flip = !sign_flip;
                    if !f.is_num() || f != Expr::int(-1) {
                        removed.push(Expr::neg(f.clone()));
                    }
                }
                Some(0) => keep.push(f),
                _ => removed.push(f),
            }
            continue;
        }
        if trig_bounded_away(&f) {
            removed.push(f);
            continue;
        }
        if f.contains(&|x| matches!(x, Expr::Sin(_) | Expr::Cos(_))) {
            return Err(AsymError::NotBoundedAwayFromZero(f.to_string()));
        }
        if f.has_alt_sign() {
            keep.push(f);
            continue;
        }
        let bounded = with_orders(&var, |ctx| {
            let lf = log_form(&f, ctx)?;
            Ok(lf.sign > 0 && matches!(series_limit(&lf.l)?, Limit::Finite(_)))
        })
        .unwrap_or(false);
        if bounded {
            removed.push(f);
        } else {
            keep.push(f);
        }
    }
    if sign_flip {
        keep.insert(0, Expr::int(-1));
    }
    let expr = Expr::mul(keep);
    Ok(Stripped { expr, removed })
}

fn trig_bounded_away(f: &Expr) -> bool {
    match f {
        Expr::Pow(b, x) => x.is_num() && trig_bounded_away(b),
        Expr::Add(ts) => {
            let mut c = None;
            let mut amp = crate::expr::Q::from_integer(0.into());
            for t in ts {
                match t {
                    Expr::Num(v) if c.is_none() => c = Some(v.clone()),
                    _ => {
                        let (k, rest) = t.coeff_and_rest();
                        if !matches!(rest, Expr::Sin(_) | Expr::Cos(_)) {
                            return false;
                        }
                        amp += num_traits::Signed::abs(&k);
                    }
                }
            }
            match c {
                Some(c) => num_traits::Signed::abs(&c) > amp,
                None => false,
            }
        }
        _ => false,
    }
}

/// The derivative of the continuous extension, standing in for
/// `a(n+1) - a(n)` at infinity.
pub fn difference_derivative(a: &Expr) -> Result<Expr, AsymError> {
    let var = var_of(a);
    Ok(derivative(a, &var)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn compare_examples() {
        assert_eq!(compare(&p("n^2"), &p("n^3")).unwrap(), Relation::MuchLess);
        assert_eq!(compare(&p("n^2"), &p("3*n")).unwrap(), Relation::MuchGreater);
        assert_eq!(compare(&p("n!"), &p("n!")).unwrap(), Relation::Comparable(Expr::one()));
        assert_eq!(compare(&p("ln(n)"), &p("sqrt(n)")).unwrap(), Relation::MuchLess);
        assert_eq!(
            compare(&p("(5*n+2)/(n^3+1)"), &p("1/n^2")).unwrap(),
            Relation::Comparable(Expr::int(5))
        );
    }

    #[test]
    fn log_dominance_examples() {
        assert!(log_dominates(&p("3^n"), &p("n^2")).unwrap());
        assert!(log_dominates(&p("(3/2)^n"), &p("n")).unwrap());
        assert!(!log_dominates(&p("n"), &p("n")).unwrap());
    }

    #[test]
    fn dominant_simplification() {
        assert_eq!(simplify_dominant(&p("n^2 - 3*n"), false), p("n^2"));
        assert_eq!(simplify_dominant(&p("n + n^(3/2)"), false), p("n^(3/2)"));
        assert_eq!(simplify_dominant(&p("(5*n+2)/(n^3+1)"), false), p("5/n^2"));
        assert_eq!(simplify_dominant(&p("8*n^2 + 12*n + 4"), false), p("8*n^2"));
        assert_eq!(simplify_dominant(&p("n^2/2^n"), true), p("2^(-n)"));
        assert_eq!(simplify_dominant(&p("n^2/2^n"), false), p("n^2/2^n"));
        // A sum whose leading terms cancel is left alone.
        let s = p("sqrt(n+1) - sqrt(n)");
        assert_eq!(simplify_dominant(&s, false), s);
    }

    #[test]
    fn bounded_factors() {
        assert_eq!(strip_bounded_factor(&p("(3 + sin(n))/n^2")).unwrap().expr, p("1/n^2"));
        assert_eq!(strip_bounded_factor(&p("7/n")).unwrap().expr, p("1/n"));
        assert!(matches!(
            strip_bounded_factor(&p("abs(sin(1/n))/n")),
            Err(AsymError::NotBoundedAwayFromZero(_))
        ));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(difference_derivative(&p("n^2")).unwrap(), p("2*n"));
        assert_eq!(
            difference_derivative(&p("lnk(3, n)")).unwrap(),
            p("1/(n*ln(n)*lnk(2, n))")
        );
        assert!(matches!(
            difference_derivative(&p("5")),
            Err(AsymError::ConstantSequence)
        ));
    }

    #[test]
    fn log_expansion_axes() {
        let le = log_expand(&p("1/n^2"), 6).unwrap();
        assert_eq!(le.axes, vec![(Mono::log(1), Expr::int(-2))]);
        let le = log_expand(&p("n!/(2*n)!"), 6).unwrap();
        assert_eq!(le.axes[0].1, Expr::int(-1));
        assert!(le.remainder);
    }
}

//! Contiguous regrouping of alternating series, and the classical
//! rearrangement constructions for conditionally convergent ones.

use crate::asymptotics::Limit;
use crate::asymptotics::{difference_derivative, value, var_of, with_orders, Lead};
use crate::bignum::{self, RM};
use crate::convergence::{auto, eventual_trend, log_limit, split_alternating, Outcome};
use crate::expr::{EvalError, Evaluator, Expr, Point};
use astro_float::BigFloat;
use thiserror::Error;

pub const MAX_SYMBOLIC_PERIOD: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockSpec {
    /// Blocks `a(tn), ..., a(tn + t - 1)`.
    Fixed(usize),
    /// Block `k` covers indices `2^k + 1 ..= 2^(k+1)`.
    PowerOfTwo,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RearrangeError {
    #[error("period {0} is not supported symbolically (use 2..={MAX_SYMBOLIC_PERIOD})")]
    Period(usize),
    #[error("power-of-two blocks are handled numerically only")]
    VariablePeriod,
    #[error("sequence is not monotonic at position {0}")]
    NotMonotonic(usize),
    #[error("not conditionally convergent: {0}")]
    NotConditional(String),
    #[error("series converges absolutely; every rearrangement has the same sum")]
    AbsolutelyConvergent,
    #[error("term {index}: {source}")]
    Eval { index: u64, source: EvalError },
    #[error("ran out of {0} terms")]
    Exhausted(&'static str),
}

/// A block term: its exact sum and, when the expansion succeeds, its
/// leading asymptotic term.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub raw: Expr,
    pub lead: Option<Expr>,
}

impl Block {
    /// The term to analyze further.
    pub fn term(&self) -> &Expr {
        self.lead.as_ref().unwrap_or(&self.raw)
    }

    pub fn needs_numeric(&self) -> bool {
        self.lead.is_none()
    }
}

pub fn block(a: &Expr, spec: BlockSpec) -> Result<Block, RearrangeError> {
    let tau = match spec {
        BlockSpec::Fixed(t) if (2..=MAX_SYMBOLIC_PERIOD).contains(&t) => t,
        BlockSpec::Fixed(t) => return Err(RearrangeError::Period(t)),
        BlockSpec::PowerOfTwo => return Err(RearrangeError::VariablePeriod),
    };
    let var = var_of(a);
    let n = Expr::sym(&var);
    let pieces: Vec<Expr> = (0..tau)
        .map(|j| a.substitute(&var, &(Expr::int(tau as i64) * n.clone() + Expr::int(j as i64))))
        .collect();
    let mut b = block_pattern(&pieces);
    if b.lead.is_none() && tau == 2 {
        b.lead = pair_envelope(a, &var);
    }
    Ok(b)
}

/// For `a = s(n) b(n)` with a smooth envelope `b`, the pair
/// `s(2n) (b(2n) - b(2n+1))` behaves like `-s(2n) b'(2n)`.
fn pair_envelope(a: &Expr, var: &str) -> Option<Expr> {
    let b = split_alternating(a)?;
    let two_n = Expr::int(2) * Expr::sym(var);
    let sign = (a.clone() / b.clone()).substitute(var, &two_n);
    let sign = sign.as_num().cloned()?;
    let d = difference_derivative(&b).ok()?.substitute(var, &two_n);
    leading_term(&(Expr::Num(-sign) * d))
}

/// Block whose `j`-th entry is `pieces[j]`, for periodic patterns that no
/// single formula describes.
pub fn block_pattern(pieces: &[Expr]) -> Block {
    let raw = Expr::add(pieces.to_vec());
    let lead = leading_term(&raw);
    Block { raw, lead }
}

/// `c * m(n)` for the first term of the expansion of `e`.
pub fn leading_term(e: &Expr) -> Option<Expr> {
    let var = var_of(e);
    let s = with_orders(&var, |ctx| value(e, ctx)).ok()?;
    match s.lead() {
        Lead::Term(m, c) => Some(Expr::mul(vec![c.clone(), m.to_expr(&var)])),
        _ => None,
    }
}

/// Collapses plateaus of a monotonic sequence.
pub fn deduplicate_strict<T: PartialOrd + Clone>(xs: &[T]) -> Result<Vec<T>, RearrangeError> {
    let up = xs.windows(2).all(|w| w[0] <= w[1]);
    let down = xs.windows(2).all(|w| w[0] >= w[1]);
    if !up && !down {
        let at = xs
            .windows(3)
            .position(|w| (w[0] < w[1] && w[1] > w[2]) || (w[0] > w[1] && w[1] < w[2]))
            .map(|i| i + 1)
            .unwrap_or(0);
        return Err(RearrangeError::NotMonotonic(at));
    }
    let mut out: Vec<T> = Vec::new();
    for x in xs {
        if out.last().map(|l| l != x).unwrap_or(true) {
            out.push(x.clone());
        }
    }
    Ok(out)
}

/// Checks that `a = (-1)^(..) b` with `b` decreasing to 0 and `sum b` divergent.
fn require_conditional(a: &Expr) -> Result<(), RearrangeError> {
    let b = split_alternating(a).ok_or_else(|| RearrangeError::NotConditional(format!("{a} is not (-1)^n b(n)")))?;
    if !matches!(log_limit(&b), Ok(Limit::MinusInfinity)) {
        return Err(RearrangeError::NotConditional(format!("{b} does not tend to 0")));
    }
    if eventual_trend(&b).ok() != Some(-1) {
        return Err(RearrangeError::NotConditional(format!(
            "{b} is not eventually decreasing"
        )));
    }
    match auto(&b).outcome {
        Outcome::Diverges => Ok(()),
        Outcome::Converges => Err(RearrangeError::AbsolutelyConvergent),
        Outcome::Inconclusive => Err(RearrangeError::NotConditional(format!("cannot show sum {b} diverges"))),
    }
}

/// Positive and negative terms of `a` in index order.
struct SignedTerms {
    a: Expr,
    ev: Evaluator,
    next: [u64; 2],
    limit: u64,
}

impl SignedTerms {
    fn new(a: &Expr, start: u64, precision: usize, limit: u64) -> SignedTerms {
        SignedTerms {
            a: a.clone(),
            ev: Evaluator::for_expr(a, precision),
            next: [start, start],
            limit,
        }
    }

    /// Next term with the requested sign (`0` positive, `1` negative).
    fn take(&mut self, which: usize) -> Result<(u64, BigFloat), RearrangeError> {
        loop {
            let k = self.next[which];
            if k > self.limit {
                return Err(RearrangeError::Exhausted(if which == 0 {
                    "positive"
                } else {
                    "negative"
                }));
            }
            self.next[which] = k + 1;
            let v = self
                .ev
                .eval_real(&self.a, &Point::from(k as i64))
                .map_err(|source| RearrangeError::Eval { index: k, source })?;
            let s = bignum::signum_i8(&v);
            if (which == 0 && s > 0) || (which == 1 && s < 0) {
                return Ok((k, v));
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct RiemannRun {
    pub sum: BigFloat,
    /// `|last crossing term|`, a bound on `|sum - target|`.
    pub bound: BigFloat,
    pub steps: usize,
    pub crossings: usize,
    /// Steps where `|s - target|` exceeded the last crossing term.
    pub violations: usize,
}

/// Greedy rearrangement toward `target`: positive terms while `s < target`,
/// negative terms otherwise.
pub fn riemann_rearrange(
    a: &Expr,
    start: u64,
    target: &BigFloat,
    max_steps: usize,
    precision: usize,
) -> Result<RiemannRun, RearrangeError> {
    require_conditional(a)?;
    let p = precision;
    let mut terms = SignedTerms::new(a, start, p, u64::MAX / 4);
    let mut s = BigFloat::from_word(0, p);
    let mut bound: Option<BigFloat> = None;
    let (mut crossings, mut violations) = (0usize, 0usize);
    for _ in 0..max_steps {
        let below = s < *target;
        let (_, t) = terms.take(if below { 0 } else { 1 })?;
        s = s.add(&t, p, RM);
        if (s < *target) != below {
            crossings += 1;
            bound = Some(t.abs());
        }
        if let Some(b) = &bound {
            if s.sub(target, p, RM).abs() > *b {
                violations += 1;
            }
        }
    }
    Ok(RiemannRun {
        sum: s,
        bound: bound.unwrap_or_else(|| target.abs()),
        steps: max_steps,
        crossings,
        violations,
    })
}

/// Partial sums at the end of each block of a rearrangement whose every
/// block contributes at least `1/4`.
pub fn divergent_rearrangement_demo(
    a: &Expr,
    start: u64,
    blocks: usize,
    precision: usize,
) -> Result<Vec<f64>, RearrangeError> {
    require_conditional(a)?;
    let p = precision;
    let quarter = BigFloat::from_f64(0.25, p);
    let mut terms = SignedTerms::new(a, start, p, u64::MAX / 4);
    let mut s = BigFloat::from_word(0, p);
    let mut out = Vec::with_capacity(blocks);
    for _ in 0..blocks {
        let (_, neg) = terms.take(1)?;
        let need = quarter.add(&neg.abs(), p, RM);
        let mut got = BigFloat::from_word(0, p);
        while got < need {
            let (_, t) = terms.take(0)?;
            got = got.add(&t, p, RM);
        }
        s = s.add(&got, p, RM).add(&neg, p, RM);
        out.push(bignum::to_f64(&s));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn alternating_harmonic_pairs() {
        let b = block(&p("(-1)^(n+1)/n"), BlockSpec::Fixed(2)).unwrap();
        assert_eq!(b.raw, p("1/(2*n+1) - 1/(2*n)"));
        assert_eq!(b.lead, Some(p("-1/(4*n^2)")));
    }

    #[test]
    fn shifted_alternation_pairs() {
        let b = block(&p("(-1)^n/(sqrt(n) - (-1)^n)"), BlockSpec::Fixed(2)).unwrap();
        assert_eq!(b.lead, Some(p("1/n")));
    }

    #[test]
    fn log_envelope_pairs() {
        // The truncated log-scale expansion of the raw pair stops short of 1/n.
        let b = block(&p("(-1)^n/ln(n)"), BlockSpec::Fixed(2)).unwrap();
        assert_eq!(b.lead, Some(p("1/(2*n*ln(n)^2)")));
    }

    #[test]
    fn period_three_pattern() {
        let b = block_pattern(&[p("1/(4*n+1)"), p("1/(4*n+3)"), p("-1/(2*n+2)")]);
        assert_eq!(b.lead, Some(p("1/(4*n^2)")));
    }

    #[test]
    fn unsupported_periods() {
        assert_eq!(block(&p("1/n"), BlockSpec::Fixed(5)), Err(RearrangeError::Period(5)));
        assert_eq!(
            block(&p("1/n"), BlockSpec::PowerOfTwo),
            Err(RearrangeError::VariablePeriod)
        );
    }

    #[test]
    fn dedup() {
        assert_eq!(deduplicate_strict(&[1, 3, 3, 5, 7, 7, 9]).unwrap(), vec![1, 3, 5, 7, 9]);
        assert_eq!(deduplicate_strict(&[1, 2, 4]).unwrap(), vec![1, 2, 4]);
        assert_eq!(deduplicate_strict(&[2, 2, 2]).unwrap(), vec![2]);
        assert_eq!(deduplicate_strict(&[1, 3, 2]), Err(RearrangeError::NotMonotonic(1)));
    }

    #[test]
    fn riemann_small_run() {
        let t = BigFloat::from_f64(0.0, 128);
        let r = riemann_rearrange(&p("(-1)^(n+1)/n"), 1, &t, 2000, 128).unwrap();
        assert_eq!(r.violations, 0);
        assert!(bignum::to_f64(&r.sum).abs() <= bignum::to_f64(&r.bound));
        assert!(matches!(
            riemann_rearrange(&p("(-1)^n/n^2"), 1, &t, 10, 128),
            Err(RearrangeError::AbsolutelyConvergent)
        ));
    }

    #[test]
    fn divergent_blocks_grow() {
        let sums = divergent_rearrangement_demo(&p("(-1)^(n+1)/n"), 1, 20, 128).unwrap();
        assert!(sums.windows(2).all(|w| w[1] > w[0]));
        assert!(sums[19] >= 20.0 * 0.25 - 1.0);
    }
}

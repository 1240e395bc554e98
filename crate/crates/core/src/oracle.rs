//! Numeric ground truth: partial sums, Cauchy windows, term ratios and an
//! empirical convergence advisory.
//!
//! Sums run in ascending index order with Neumaier compensation. Large
//! ranges are cut into fixed chunks that are summed in parallel and then
//! combined in chunk order, so results do not depend on thread scheduling.

use crate::bignum::{self, RM};
use crate::convergence::Outcome;
use crate::expr::{BigValue, EvalError, Evaluator, Expr, Point};
use astro_float::BigFloat;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub const DEFAULT_PRECISION: usize = 256;
const CHUNK: u64 = 4096;
/// Window indices used by [`empirical_verdict`] unless told otherwise.
pub const DEFAULT_SCHEDULE: [u32; 4] = [4, 8, 12, 16];
/// A window is "bounded away from zero" when the last one is at least this
/// fraction of the first.
const WINDOW_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("term {index}: {source}")]
    Eval { index: u64, source: EvalError },
    #[error("window index {0} is out of range")]
    WindowTooLarge(u32),
}

/// A high-precision sum with its a-priori rounding bound.
#[derive(Clone, Debug)]
pub struct Summed {
    pub value: BigFloat,
    /// Bound on `|value - exact|`.
    pub error_bound: f64,
    pub terms: u64,
}

#[derive(Clone)]
struct Acc {
    sum: BigFloat,
    comp: BigFloat,
    abs: BigFloat,
}

impl Acc {
    fn new(p: usize) -> Acc {
        let z = BigFloat::from_word(0, p);
        Acc {
            sum: z.clone(),
            comp: z.clone(),
            abs: z,
        }
    }

    fn push(&mut self, x: &BigFloat, p: usize) {
        let t = self.sum.add(x, p, RM);
        let lost = if self.sum.abs() >= x.abs() {
            self.sum.sub(&t, p, RM).add(x, p, RM)
        } else {
            x.sub(&t, p, RM).add(&self.sum, p, RM)
        };
        self.comp = self.comp.add(&lost, p, RM);
        self.sum = t;
        self.abs = self.abs.add(&x.abs(), p, RM);
    }

    fn merge(&mut self, o: &Acc, p: usize) {
        self.push(&o.sum, p);
        self.comp = self.comp.add(&o.comp, p, RM);
        // `push` counted |o.sum|; replace it by o's own absolute total.
        self.abs = self.abs.sub(&o.sum.abs(), p, RM).add(&o.abs, p, RM);
    }

    fn total(&self, p: usize) -> BigFloat {
        self.sum.add(&self.comp, p, RM)
    }
}

/// `sum_{k=lo}^{hi} a(k)`.
pub fn range_sum(a: &Expr, lo: u64, hi: u64, precision: usize) -> Result<Summed, OracleError> {
    let wp = precision + 32;
    if hi < lo {
        return Ok(Summed {
            value: BigFloat::from_word(0, precision),
            error_bound: 0.0,
            terms: 0,
        });
    }
    let ev = Evaluator::for_expr(a, wp);
    let chunks: Vec<(u64, u64)> = (0..=(hi - lo) / CHUNK)
        .map(|c| (lo + c * CHUNK, (lo + (c + 1) * CHUNK - 1).min(hi)))
        .collect();
    let parts: Vec<Result<Acc, OracleError>> = chunks
        .par_iter()
        .map(|&(s, e)| {
            let mut acc = Acc::new(wp);
            for k in s..=e {
                let x = ev
                    .eval_real(a, &Point::from(k as i64))
                    .map_err(|source| OracleError::Eval { index: k, source })?;
                acc.push(&x, wp);
            }
            Ok(acc)
        })
        .collect();
    let mut acc = Acc::new(wp);
    for part in parts {
        acc.merge(&part?, wp);
    }
    let terms = hi - lo + 1;
    let scale = bignum::to_f64(&acc.abs);
    Ok(Summed {
        value: acc.total(precision),
        error_bound: terms as f64 * 2f64.powi(4 - precision as i32) * scale,
        terms,
    })
}

/// `s_N = sum_{k=start}^{N} a(k)`; zero for an empty range.
pub fn partial_sum(a: &Expr, start: u64, n: u64, precision: usize) -> Result<Summed, OracleError> {
    range_sum(a, start, n, precision)
}

/// `s_{2^n} - s_{2^(n-1)}`, the terms with index in `(2^(n-1), 2^n]`.
pub fn cauchy_window(a: &Expr, n: u32, precision: usize) -> Result<Summed, OracleError> {
    if n == 0 || n > 40 {
        return Err(OracleError::WindowTooLarge(n));
    }
    range_sum(a, (1u64 << (n - 1)) + 1, 1u64 << n, precision)
}

/// `a(n+1)/a(n)`, computed in the log domain.
pub fn rate(a: &Expr, n: u64, precision: usize) -> Result<BigFloat, OracleError> {
    let ev = Evaluator::for_expr(a, precision + 32);
    let at = |k: u64| {
        ev.eval_log(a, &Point::from(k as i64))
            .map_err(|source| OracleError::Eval { index: k, source })
    };
    let (x0, x1) = (at(n)?, at(n + 1)?);
    let r = x1.div(&x0).map_err(|source| OracleError::Eval { index: n, source })?;
    let mut v = r.to_real();
    v.set_precision(precision, RM).ok();
    Ok(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Confidence {
    High,
    Low,
}

/// Numeric advisory. Never a proof.
#[derive(Clone, Debug, Serialize)]
pub struct Advisory {
    pub outcome: Outcome,
    pub confidence: Confidence,
    pub reason: String,
    pub windows: Vec<(u32, f64)>,
    pub terms: Vec<(u64, f64)>,
}

/// Advisory from term sizes at `2^n` and windows over the schedule.
pub fn empirical_verdict(a: &Expr, schedule: &[u32], precision: usize) -> Advisory {
    let ev = Evaluator::for_expr(a, precision);
    let mut terms = Vec::new();
    let mut windows = Vec::new();
    for &n in schedule {
        let k = 1u64 << n;
        if let Ok(v) = ev.eval_log(a, &Point::from(k as i64)) {
            terms.push((k, v.to_f64().abs()));
        }
        if let Ok(w) = cauchy_window(a, n, precision) {
            windows.push((n, bignum::to_f64(&w.value)));
        }
    }
    let inconclusive = |reason: &str, windows, terms| Advisory {
        outcome: Outcome::Inconclusive,
        confidence: Confidence::Low,
        reason: reason.to_string(),
        windows,
        terms,
    };
    if terms.len() < 2 || windows.len() < 2 {
        return inconclusive("too few evaluable samples", windows, terms);
    }
    let monotone = |xs: &[f64], up: bool| xs.windows(2).all(|w| if up { w[1] >= w[0] } else { w[1] <= w[0] });
    let mags: Vec<f64> = terms.iter().map(|t| t.1).collect();
    let (t0, t1) = (mags[0], *mags.last().unwrap());
    if t0 > 0.0 && t1 >= 0.5 * t0 {
        let high = mags.len() >= 4 && (monotone(&mags, true) || (t1 / t0 - 1.0).abs() < 0.5);
        return Advisory {
            outcome: Outcome::Diverges,
            confidence: if high { Confidence::High } else { Confidence::Low },
            reason: format!("terms do not shrink: |a({})| = {t1:.3e}", terms.last().unwrap().0),
            windows,
            terms,
        };
    }
    let ws: Vec<f64> = windows.iter().map(|w| w.1.abs()).collect();
    let (w0, w1) = (ws[0], *ws.last().unwrap());
    if w0 == 0.0 {
        return inconclusive("first window vanishes", windows, terms);
    }
    let trend = ws.len() >= 4 && (monotone(&ws, false) || monotone(&ws, true));
    let confidence = if trend { Confidence::High } else { Confidence::Low };
    if w1 >= WINDOW_FLOOR * w0 {
        Advisory {
            outcome: Outcome::Diverges,
            confidence,
            reason: format!("windows stay bounded away from 0 (last {w1:.3e}, first {w0:.3e})"),
            windows,
            terms,
        }
    } else {
        Advisory {
            outcome: Outcome::Converges,
            confidence,
            reason: format!("windows decay (last {w1:.3e}, first {w0:.3e})"),
            windows,
            terms,
        }
    }
}

/// Partial sums at the given checkpoints, windows and ratios in one record.
#[derive(Clone, Debug)]
pub struct SumProfile {
    pub checkpoints: Vec<(u64, BigValue)>,
    pub windows: Vec<(u32, BigValue)>,
    pub rate_samples: Vec<(u64, BigValue)>,
    pub advisory: Advisory,
}

pub fn profile(a: &Expr, start: u64, schedule: &[u32], precision: usize) -> Result<SumProfile, OracleError> {
    let mut checkpoints = Vec::new();
    let mut windows = Vec::new();
    let mut rate_samples = Vec::new();
    let mut running = BigFloat::from_word(0, precision);
    let mut last = start.saturating_sub(1);
    for &n in schedule {
        let upto = 1u64 << n;
        let s = range_sum(a, last + 1, upto, precision)?;
        running = running.add(&s.value, precision, RM);
        last = upto;
        checkpoints.push((upto, BigValue::from_real(&running, precision)));
        windows.push((
            n,
            BigValue::from_real(&cauchy_window(a, n, precision)?.value, precision),
        ));
        rate_samples.push((upto, BigValue::from_real(&rate(a, upto, precision)?, precision)));
    }
    Ok(SumProfile {
        checkpoints,
        windows,
        rate_samples,
        advisory: empirical_verdict(a, schedule, precision),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn f(x: &BigFloat) -> f64 {
        bignum::to_f64(x)
    }

    #[test]
    fn geometric_partial_sum() {
        let s = partial_sum(&parse("1/2^k").unwrap(), 1, 20, 256).unwrap();
        let exact = 1.0 - 2f64.powi(-20);
        assert!((f(&s.value) - exact).abs() < 1e-15);
        assert_eq!(partial_sum(&parse("1/2^k").unwrap(), 1, 0, 256).unwrap().terms, 0);
    }

    #[test]
    fn chunked_sum_is_order_independent() {
        let a = parse("1/k^2").unwrap();
        let whole = range_sum(&a, 1, 3 * CHUNK + 17, 128).unwrap().value;
        let again = range_sum(&a, 1, 3 * CHUNK + 17, 128).unwrap().value;
        assert_eq!(whole, again);
    }

    #[test]
    fn factorial_rate() {
        let r = rate(&parse("1/n!").unwrap(), 10, 128).unwrap();
        assert!((f(&r) - 1.0 / 11.0).abs() < 1e-15);
        let r = rate(&parse("1/n^2").unwrap(), 1_000_000, 128).unwrap();
        assert!((f(&r) - (1.0 - 2e-6)).abs() < 1e-11);
    }

    #[test]
    fn advisories() {
        let adv = |s: &str| empirical_verdict(&parse(s).unwrap(), &DEFAULT_SCHEDULE, 128);
        assert_eq!(adv("1/n^2").outcome, Outcome::Converges);
        assert_eq!(adv("1/n^2").confidence, Confidence::High);
        assert_eq!(adv("1/(n*ln(n+1))").outcome, Outcome::Diverges);
        assert_eq!(adv("(-1)^n").outcome, Outcome::Diverges);
    }
}

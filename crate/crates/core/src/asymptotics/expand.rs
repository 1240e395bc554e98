//! Expansion of expressions at `n -> infinity`.
//!
//! Two mutually recursive views of a term:
//!
//! * [`value`]: the term itself as a [`Series`] of log-monomials. Only
//!   possible when the term has polynomial-logarithmic size.
//! * [`log_form`]: eventual sign plus the series of `ln |term|`. This covers
//!   exponential and factorial growth (`2^n`, `3^sqrt(n)`, `n!`).

use super::series::{compose_small, Ctx, Lead, Mono, Series};
use super::{coef_sign, AsymError};
use crate::expr::{Expr, Q};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

/// Cap on Taylor terms in any single composition.
const MAX_TAYLOR: usize = 24;

/// `a ~ sign * exp(l)`.
#[derive(Clone, Debug)]
pub struct LogForm {
    pub sign: i8,
    pub l: Series,
}

fn unsupported(e: &Expr, why: &str) -> AsymError {
    AsymError::Unsupported(format!("{e}: {why}"))
}

pub fn value(e: &Expr, ctx: &Ctx) -> Result<Series, AsymError> {
    let var = ctx.var.as_str();
    if !e.contains_sym(var) {
        return Ok(Series::constant(e.clone()));
    }
    match e {
        Expr::Sym(_) => Ok(Series::term(Mono::n_pow(Q::one()), Expr::one())),
        Expr::Add(ts) => {
            let mut acc = Series::zero();
            for t in ts {
                match value(t, ctx) {
                    Ok(v) => acc = acc.add(&v, ctx),
                    Err(AsymError::ExpScale { .. }) => return via_log(e, ctx),
                    Err(err) => return Err(err),
                }
            }
            Ok(acc)
        }
        Expr::Mul(fs) => {
            let mut acc = Series::constant(Expr::one());
            for f in fs {
                match value(f, ctx) {
                    Ok(v) => acc = acc.mul(&v, ctx),
                    Err(AsymError::ExpScale { .. }) => return via_log(e, ctx),
                    Err(err) => return Err(err),
                }
            }
            Ok(acc)
        }
        Expr::Pow(b, x) if !x.contains_sym(var) => match value(b, ctx) {
            Ok(vb) => pow_series(&vb, x, ctx),
            Err(AsymError::ExpScale { .. }) => via_log(e, ctx),
            Err(err) => Err(err),
        },
        Expr::Exp(a) => exp_series(&value(a, ctx)?, ctx),
        Expr::Ln(k, a) => {
            let lf = log_form(a, ctx)?;
            if lf.sign <= 0 {
                return Err(AsymError::NotEventuallyPositive(a.to_string()));
            }
            let mut s = lf.l;
            for _ in 1..*k {
                s = ln_series(&s, ctx)?;
            }
            Ok(s)
        }
        Expr::Sin(a) | Expr::Cos(a) => {
            let va = value(a, ctx)?;
            if va.top().map(|m| m.is_growing()).unwrap_or(false) {
                return Err(AsymError::Oscillatory(e.to_string()));
            }
            trig_series(matches!(e, Expr::Sin(_)), &va, ctx)
        }
        Expr::Abs(a) => {
            let va = value(a, ctx)?;
            match lead_sign(&va)? {
                s if s < 0 => Ok(va.neg()),
                _ => Ok(va),
            }
        }
        Expr::Binom(a, k) => {
            let va = value(a, ctx)?;
            let mut acc = Series::constant(Expr::one());
            for j in 0..*k {
                let shifted = va.add(&Series::constant(Expr::int(-(j as i64))), ctx);
                acc = acc.mul(&shifted, ctx);
            }
            let kf: BigInt = (1..=*k as u64).fold(BigInt::one(), |a, i| a * i);
            Ok(acc.scale(&Expr::Num(Q::new(BigInt::one(), kf))))
        }
        Expr::AltSign(_) => Err(AsymError::Oscillatory(e.to_string())),
        _ => via_log(e, ctx),
    }
}

fn via_log(e: &Expr, ctx: &Ctx) -> Result<Series, AsymError> {
    let lf = log_form(e, ctx)?;
    let v = exp_series(&lf.l, ctx)?;
    Ok(if lf.sign < 0 { v.neg() } else { v })
}

/// Sign of the leading coefficient.
pub fn lead_sign(s: &Series) -> Result<i8, AsymError> {
    match s.lead() {
        Lead::Zero => Ok(0),
        Lead::Unknown(m) => Err(AsymError::Undetermined(format!("leading term lost below O({m})"))),
        Lead::Term(_, c) => match coef_sign(c) {
            Some(0) | None => Err(AsymError::Undetermined(format!("sign of coefficient {c}"))),
            Some(s) => Ok(s),
        },
    }
}

pub fn log_form(e: &Expr, ctx: &Ctx) -> Result<LogForm, AsymError> {
    let var = ctx.var.as_str();
    if !e.contains_sym(var) {
        let sign = match coef_sign(e) {
            Some(0) => return Err(AsymError::Undetermined(format!("{e} is zero"))),
            Some(s) => s,
            // Parameters are taken to be positive, as elsewhere.
            None if e.is_structurally_positive() => 1,
            None => return Err(AsymError::Undetermined(format!("sign of {e}"))),
        };
        return Ok(LogForm {
            sign,
            l: Series::constant(Expr::ln(Expr::abs(e.clone()))),
        });
    }
    match e {
        Expr::Sym(_) => Ok(LogForm {
            sign: 1,
            l: Series::term(Mono::log(1), Expr::one()),
        }),
        Expr::Mul(fs) => {
            let mut sign = 1i8;
            let mut l = Series::zero();
            for f in fs {
                let lf = log_form(f, ctx)?;
                sign *= lf.sign;
                l = l.add(&lf.l, ctx);
            }
            Ok(LogForm { sign, l })
        }
        Expr::Pow(b, x) => {
            let lb = log_form(b, ctx)?;
            if !x.contains_sym(var) {
                let sign = if lb.sign > 0 {
                    1
                } else {
                    match x.as_num() {
                        Some(k) if k.is_integer() => {
                            if k.to_integer().to_i64().map(|v| v % 2 != 0).unwrap_or(true) {
                                -1
                            } else {
                                1
                            }
                        }
                        _ => return Err(AsymError::NotEventuallyPositive(e.to_string())),
                    }
                };
                return Ok(LogForm { sign, l: lb.l.scale(x) });
            }
            if lb.sign <= 0 {
                return Err(AsymError::NotEventuallyPositive(b.to_string()));
            }
            let vx = value(x, ctx)?;
            Ok(LogForm {
                sign: 1,
                l: vx.mul(&lb.l, ctx).truncate_below(&ctx.floor()),
            })
        }
        Expr::Exp(a) => Ok(LogForm {
            sign: 1,
            l: value(a, ctx)?,
        }),
        Expr::Factorial(a) => {
            let va = value(a, ctx)?;
            match va.lead() {
                Lead::Term(m, c) if m.is_growing() && coef_sign(c) == Some(1) => {}
                _ => return Err(unsupported(e, "factorial argument must grow to +infinity")),
            }
            Ok(LogForm {
                sign: 1,
                l: stirling(&va, ctx)?,
            })
        }
        Expr::Abs(a) => {
            let lf = log_form(a, ctx)?;
            Ok(LogForm { sign: 1, l: lf.l })
        }
        Expr::Add(ts) => log_form_sum(ts, ctx),
        Expr::AltSign(_) => Err(AsymError::Oscillatory(e.to_string())),
        _ => {
            let v = value(e, ctx)?;
            let sign = lead_sign(&v)?;
            if sign == 0 {
                return Err(AsymError::Undetermined(format!("{e} vanishes identically")));
            }
            let v = if sign < 0 { v.neg() } else { v };
            Ok(LogForm {
                sign,
                l: ln_series(&v, ctx)?,
            })
        }
    }
}

/// `ln` of a sum: factor out the dominant term and expand the rest.
fn log_form_sum(ts: &[Expr], ctx: &Ctx) -> Result<LogForm, AsymError> {
    let forms = ts.iter().map(|t| log_form(t, ctx)).collect::<Result<Vec<_>, _>>()?;
    let mut dom = 0usize;
    for i in 1..forms.len() {
        let d = forms[i].l.sub(&forms[dom].l, ctx);
        match d.lead() {
            Lead::Term(m, c) if m.is_growing() => match coef_sign(c) {
                Some(1) => dom = i,
                Some(-1) => {}
                _ => {
                    return Err(AsymError::Undetermined(format!(
                        "order of {} versus {}",
                        ts[i], ts[dom]
                    )))
                }
            },
            Lead::Unknown(m) if m.is_growing() || m.is_one() => {
                return Err(AsymError::Undetermined(format!(
                    "order of {} versus {}",
                    ts[i], ts[dom]
                )))
            }
            _ => {}
        }
    }
    // ratio = 1 + sum_i s_i/s_dom * exp(L_i - L_dom)
    let mut ratio = Series::constant(Expr::one());
    for (i, f) in forms.iter().enumerate() {
        if i == dom {
            continue;
        }
        let d = f.l.sub(&forms[dom].l, ctx);
        let r = match exp_series(&d, ctx) {
            Ok(r) => r,
            Err(AsymError::ExpScale { sign: -1 }) => Series::big_o(ctx.floor()),
            Err(err) => return Err(err),
        };
        let r = if f.sign * forms[dom].sign < 0 { r.neg() } else { r };
        ratio = ratio.add(&r, ctx);
    }
    let s = lead_sign(&ratio)?;
    if s == 0 {
        return Err(AsymError::Undetermined("sum cancels identically".into()));
    }
    let ratio = if s < 0 { ratio.neg() } else { ratio };
    let lr = ln_series(&ratio, ctx)?;
    Ok(LogForm {
        sign: s * forms[dom].sign,
        l: forms[dom].l.add(&lr, ctx),
    })
}

/// `exp(s)` as a series, when the growing part of `s` is a combination of
/// `ln_k n` (so the result has polynomial-logarithmic size).
pub fn exp_series(s: &Series, ctx: &Ctx) -> Result<Series, AsymError> {
    let (growing, c0, small) = s.split();
    let Some(c0) = c0 else {
        return Err(AsymError::Undetermined(format!("constant term of exponent {s}")));
    };
    let mut mono = Mono::one();
    for (i, (m, c)) in growing.terms.iter().enumerate() {
        let level = m.as_log_level();
        let rational = c.as_num().cloned();
        match (level, rational) {
            (Some(k), Some(q)) => mono = mono.mul(&Mono::unit(k - 1, q)),
            _ => {
                if i == 0 {
                    let sign = coef_sign(c).unwrap_or(0);
                    if m.as_log_level().is_none() && sign != 0 {
                        return Err(AsymError::ExpScale { sign });
                    }
                }
                return Err(AsymError::Unsupported(format!("exp of {s} is not a log-monomial")));
            }
        }
    }
    if let Some(e) = &growing.err {
        return Err(AsymError::Undetermined(format!("exponent known only up to O({e})")));
    }
    let body = compose_small(
        &small,
        |j| Expr::Num(Q::new(BigInt::one(), factorial(j))),
        ctx,
        MAX_TAYLOR,
    );
    Ok(body.scale(&Expr::exp(c0)).mul_mono(&mono))
}

/// `ln(s)` for a series with positive leading coefficient.
pub fn ln_series(s: &Series, ctx: &Ctx) -> Result<Series, AsymError> {
    let (m, c) = match s.lead() {
        Lead::Term(m, c) => (m.clone(), c.clone()),
        Lead::Zero => return Err(AsymError::Undetermined("logarithm of zero".into())),
        Lead::Unknown(m) => return Err(AsymError::Undetermined(format!("logarithm of O({m})"))),
    };
    if coef_sign(&c) != Some(1) && !(!c.free_symbols().is_empty() && c.is_structurally_positive()) {
        return Err(AsymError::NotEventuallyPositive(format!("{s}")));
    }
    let mut out = Series::constant(Expr::ln(c.clone()));
    for (j, e) in m.exps().iter().enumerate() {
        if e.is_zero() {
            continue;
        }
        if j + 1 > ctx.max_log_depth {
            return Err(AsymError::DepthExceeded(j + 1));
        }
        out = out.add(&Series::term(Mono::log(j + 1), Expr::Num(e.clone())), ctx);
    }
    let u = relative_rest(s, &m, &c, ctx);
    let tail = compose_small(
        &u,
        |j| {
            if j == 0 {
                Expr::zero()
            } else {
                let sign = if j % 2 == 1 { 1 } else { -1 };
                Expr::Num(Q::new(BigInt::from(sign), BigInt::from(j as u64)))
            }
        },
        ctx,
        MAX_TAYLOR,
    );
    Ok(out.add(&tail, ctx))
}

/// `s / (c m) - 1`, which tends to zero.
fn relative_rest(s: &Series, m: &Mono, c: &Expr, ctx: &Ctx) -> Series {
    let inv = Expr::recip(c.clone());
    let scaled = s.mul_mono(&m.inv()).scale(&inv);
    scaled.sub(&Series::constant(Expr::one()), ctx)
}

/// `s^x` for an index-free exponent `x`.
pub fn pow_series(s: &Series, x: &Expr, ctx: &Ctx) -> Result<Series, AsymError> {
    if s.is_exact_zero() {
        return Ok(Series::zero());
    }
    let (m, c) = match s.lead() {
        Lead::Term(m, c) => (m.clone(), c.clone()),
        Lead::Unknown(m) => return Err(AsymError::Undetermined(format!("power of O({m})"))),
        Lead::Zero => unreachable!(),
    };
    let Some(q) = x.as_num().cloned() else {
        // Symbolic exponent: only a constant base keeps the monomial form.
        if m.is_one() {
            let lf = ln_series(s, ctx)?.scale(x);
            return exp_series(&lf, ctx);
        }
        return Err(unsupported(x, "symbolic exponent of a non-constant base"));
    };
    let u = relative_rest(s, &m, &c, ctx);
    let qe = Expr::Num(q.clone());
    let body = compose_small(
        &u,
        |j| {
            // binom(q, j)
            let mut acc = Q::one();
            for i in 0..j {
                acc = acc * (q.clone() - Q::from_integer((i as i64).into())) / Q::from_integer((i as i64 + 1).into());
            }
            Expr::Num(acc)
        },
        ctx,
        MAX_TAYLOR,
    );
    Ok(body.scale(&Expr::pow(c, qe)).mul_mono(&m.pow(&q)))
}

/// `sin(a)` or `cos(a)` for bounded `a = c + small`.
fn trig_series(is_sin: bool, a: &Series, ctx: &Ctx) -> Result<Series, AsymError> {
    let (_, c0, small) = a.split();
    let c0 = c0.ok_or_else(|| AsymError::Undetermined(format!("constant term of {a}")))?;
    let sin_t = compose_small(
        &small,
        |j| {
            if j % 2 == 1 {
                let sign = if (j / 2) % 2 == 0 { 1 } else { -1 };
                Expr::Num(Q::new(BigInt::from(sign), factorial(j)))
            } else {
                Expr::zero()
            }
        },
        ctx,
        MAX_TAYLOR,
    );
    let cos_t = compose_small(
        &small,
        |j| {
            if j % 2 == 0 {
                let sign = if (j / 2) % 2 == 0 { 1 } else { -1 };
                Expr::Num(Q::new(BigInt::from(sign), factorial(j)))
            } else {
                Expr::zero()
            }
        },
        ctx,
        MAX_TAYLOR,
    );
    let (sc, cc) = (Expr::sin(c0.clone()), Expr::cos(c0));
    Ok(if is_sin {
        // sin(c + t) = sin c cos t + cos c sin t
        cos_t.scale(&sc).add(&sin_t.scale(&cc), ctx)
    } else {
        // cos(c + t) = cos c cos t - sin c sin t
        cos_t.scale(&cc).sub(&sin_t.scale(&sc), ctx)
    })
}

/// `ln Gamma(A + 1)` for a series `A -> +infinity`.
fn stirling(a: &Series, ctx: &Ctx) -> Result<Series, AsymError> {
    let floor = ctx.floor();
    let ln_a = ln_series(a, ctx)?;
    let mut l = a.mul(&ln_a, ctx).sub(a, ctx);
    let half = Expr::rational(1, 2);
    l = l.add(&ln_a.scale(&half), ctx);
    l = l.add(
        &Series::constant(Expr::mul(vec![
            half,
            Expr::ln(Expr::mul(vec![Expr::int(2), Expr::pi()])),
        ])),
        ctx,
    );
    let inv = pow_series(a, &Expr::int(-1), ctx)?;
    let inv_lead = inv.top().cloned().unwrap_or_else(Mono::one);
    let inv_sq = inv.mul(&inv, ctx).truncate_below(&floor);
    let mut power = inv.clone();
    let b = bernoulli_even();
    for k in 1..b.len() {
        let term_mono = inv_lead.pow(&Q::from_integer(((2 * k - 1) as i64).into()));
        if term_mono <= floor {
            break;
        }
        let denom = BigInt::from((2 * k) as u64) * BigInt::from((2 * k - 1) as u64);
        let coef = b[k].clone() / Q::from_integer(denom);
        l = l.add(&power.scale(&Expr::Num(coef)), ctx);
        power = power.mul(&inv_sq, ctx).truncate_below(&floor);
    }
    Ok(l.add(&Series::big_o(floor), ctx))
}

fn bernoulli_even() -> Vec<Q> {
    // B_0, B_2, ..., B_20 (enough for any truncation order we use).
    [
        (1, 1),
        (1, 6),
        (-1, 30),
        (1, 42),
        (-1, 30),
        (5, 66),
        (-691, 2730),
        (7, 6),
        (-3617, 510),
        (43867, 798),
        (-174611, 330),
    ]
    .iter()
    .map(|&(p, q)| Q::new(p.into(), q.into()))
    .collect()
}

fn factorial(j: usize) -> BigInt {
    (1..=j as u64).fold(BigInt::one(), |a, i| a * i)
}

/// Is the coefficient `c` known to be positive or structurally positive?
pub fn positive_coef(c: &Expr) -> bool {
    match coef_sign(c) {
        Some(s) => s > 0,
        None => c.is_structurally_positive(),
    }
}

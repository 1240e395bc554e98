//! High-precision evaluation at a sample point.
//!
//! Two paths share one tree walk shape. The log-domain path carries
//! `(sign, ln |value|)` so terms like `(4n)!/396^(4n)` stay finite at
//! `n = 10^12`. The direct path works on plain big floats and is used for
//! summation, falling back to the log domain whenever a value overflows.

use super::{Constant, Expr};
use crate::bignum::{self, from_bigint, from_rational, is_finite, RM};
use astro_float::BigFloat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;
use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;
use thiserror::Error;

/// Extra working bits on top of the requested precision.
const GUARD_BITS: usize = 64;
/// Largest argument whose `ln m!` comes from the exact product at any
/// precision; see [`factorial_exact_limit`].
pub const FACTORIAL_EXACT_LIMIT: u64 = 1000;
/// Direct-path factorials are multiplied out up to this argument.
const DIRECT_FACTORIAL_LIMIT: u64 = 170;
const MAX_STIRLING_TERMS: usize = 60;

/// Exact-product cutoff for `ln m!` at `p` bits. Past it the Stirling
/// series reaches `2^-p` within [`MAX_STIRLING_TERMS`] terms: the `k`-th
/// term is about `(k / (pi e m))^(2k)`.
pub fn factorial_exact_limit(p: usize) -> u64 {
    (16 + p as u64 / 4).min(FACTORIAL_EXACT_LIMIT)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("value out of range: {0}")]
    Overflow(String),
    #[error("no value bound for symbol `{0}`")]
    UnboundSymbol(String),
    #[error("expected an integer value for {0}")]
    NonInteger(String),
}

/// Sample point for the index variable.
#[derive(Clone, Debug)]
pub enum Point {
    Int(BigInt),
    Real(BigFloat),
}

impl Point {
    pub fn to_float(&self, p: usize) -> BigFloat {
        match self {
            Point::Int(i) => from_bigint(i, p),
            Point::Real(x) => x.clone(),
        }
    }
}

impl From<i64> for Point {
    fn from(v: i64) -> Self {
        Point::Int(BigInt::from(v))
    }
}

impl From<BigInt> for Point {
    fn from(v: BigInt) -> Self {
        Point::Int(v)
    }
}

/// A signed value stored as `sign * exp(log_mag)`.
#[derive(Clone, Debug)]
pub struct BigValue {
    pub sign: i8,
    /// Natural log of the magnitude; `-inf` exactly when `sign == 0`.
    pub log_mag: BigFloat,
    pub precision: usize,
}

impl BigValue {
    pub fn zero(precision: usize) -> Self {
        BigValue {
            sign: 0,
            log_mag: astro_float::INF_NEG,
            precision,
        }
    }

    pub fn from_real(x: &BigFloat, precision: usize) -> Self {
        if x.is_zero() {
            return BigValue::zero(precision);
        }
        BigValue {
            sign: bignum::signum_i8(x),
            log_mag: bignum::ln(&x.abs(), precision),
            precision,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Back to an ordinary big float; infinite when the magnitude does not fit.
    pub fn to_real(&self) -> BigFloat {
        if self.sign == 0 {
            return BigFloat::from_word(0, self.precision);
        }
        let m = bignum::exp(&self.log_mag, self.precision);
        if self.sign < 0 {
            m.neg()
        } else {
            m
        }
    }

    pub fn to_f64(&self) -> f64 {
        bignum::to_f64(&self.to_real())
    }

    /// `ln |value|` as f64 (`-inf` for zero).
    pub fn ln_f64(&self) -> f64 {
        if self.sign == 0 {
            f64::NEG_INFINITY
        } else {
            bignum::to_f64(&self.log_mag)
        }
    }

    pub fn mul(&self, o: &BigValue) -> BigValue {
        if self.sign == 0 || o.sign == 0 {
            return BigValue::zero(self.precision);
        }
        BigValue {
            sign: self.sign * o.sign,
            log_mag: self.log_mag.add(&o.log_mag, self.precision, RM),
            precision: self.precision,
        }
    }

    pub fn div(&self, o: &BigValue) -> Result<BigValue, EvalError> {
        if o.sign == 0 {
            return Err(EvalError::DivisionByZero);
        }
        if self.sign == 0 {
            return Ok(BigValue::zero(self.precision));
        }
        Ok(BigValue {
            sign: self.sign * o.sign,
            log_mag: self.log_mag.sub(&o.log_mag, self.precision, RM),
            precision: self.precision,
        })
    }

    /// Sum of signed log-magnitude values (log-sum-exp).
    pub fn sum(terms: &[BigValue], precision: usize) -> BigValue {
        let live: Vec<&BigValue> = terms.iter().filter(|t| t.sign != 0).collect();
        let Some(max) = live
            .iter()
            .map(|t| &t.log_mag)
            .max_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal))
            .cloned()
        else {
            return BigValue::zero(precision);
        };
        // Terms below the working precision relative to the largest cannot move the sum.
        let cutoff = -((precision as f64 + 16.0) * std::f64::consts::LN_2);
        let mut acc = BigFloat::from_word(0, precision);
        for t in live {
            let rel = t.log_mag.sub(&max, precision, RM);
            if bignum::to_f64(&rel) < cutoff {
                continue;
            }
            let v = bignum::exp(&rel, precision);
            acc = if t.sign < 0 {
                acc.sub(&v, precision, RM)
            } else {
                acc.add(&v, precision, RM)
            };
        }
        if acc.is_zero() {
            return BigValue::zero(precision);
        }
        BigValue {
            sign: bignum::signum_i8(&acc),
            log_mag: max.add(&bignum::ln(&acc.abs(), precision), precision, RM),
            precision,
        }
    }
}

/// Evaluates expressions in one index variable, with optional bound parameters.
#[derive(Debug)]
pub struct Evaluator {
    pub precision: usize,
    pub var: String,
    bindings: BTreeMap<String, BigFloat>,
    /// Values of subtrees free of the index variable.
    fixed_log: Mutex<HashMap<Expr, BigValue>>,
    fixed_direct: Mutex<HashMap<Expr, Option<BigFloat>>>,
}

impl Clone for Evaluator {
    fn clone(&self) -> Self {
        Evaluator {
            precision: self.precision,
            var: self.var.clone(),
            bindings: self.bindings.clone(),
            fixed_log: Mutex::new(HashMap::new()),
            fixed_direct: Mutex::new(HashMap::new()),
        }
    }
}

struct At {
    x: BigFloat,
    int: Option<BigInt>,
}

impl Evaluator {
    pub fn new(var: &str, precision: usize) -> Self {
        Evaluator {
            precision: precision.max(64),
            var: var.to_string(),
            bindings: BTreeMap::new(),
            fixed_log: Mutex::new(HashMap::new()),
            fixed_direct: Mutex::new(HashMap::new()),
        }
    }

    /// Evaluator for `e`'s own index variable.
    pub fn for_expr(e: &Expr, precision: usize) -> Self {
        Evaluator::new(&e.index_var().unwrap_or_else(|| "n".into()), precision)
    }

    pub fn bind(mut self, name: &str, value: BigFloat) -> Self {
        self.fixed_log.get_mut().unwrap().clear();
        self.fixed_direct.get_mut().unwrap().clear();
        self.bindings.insert(name.to_string(), value);
        self
    }

    fn wp(&self) -> usize {
        self.precision + GUARD_BITS
    }

    fn at(&self, point: &Point) -> At {
        At {
            x: point.to_float(self.wp()),
            int: match point {
                Point::Int(i) => Some(i.clone()),
                Point::Real(_) => None,
            },
        }
    }

    pub fn eval_log(&self, e: &Expr, point: &Point) -> Result<BigValue, EvalError> {
        let at = self.at(point);
        let mut v = self.lg(e, &at)?;
        v.precision = self.precision;
        Ok(v)
    }

    /// Plain value; tries the direct path first.
    pub fn eval_real(&self, e: &Expr, point: &Point) -> Result<BigFloat, EvalError> {
        let at = self.at(point);
        match self.direct(e, &at)? {
            Some(v) => Ok(v),
            None => Ok(self.lg(e, &at)?.to_real()),
        }
    }

    fn real_of(&self, e: &Expr, at: &At) -> Result<BigFloat, EvalError> {
        if let Some(v) = self.direct(e, at)? {
            return Ok(v);
        }
        let v = self.lg(e, at)?.to_real();
        if !is_finite(&v) {
            return Err(EvalError::Overflow(format!("{e} is too large to use as a plain value")));
        }
        Ok(v)
    }

    fn integer_of(&self, e: &Expr, at: &At, what: &str) -> Result<BigInt, EvalError> {
        if let (Expr::Sym(s), Some(i)) = (e, &at.int) {
            if *s == self.var {
                return Ok(i.clone());
            }
        }
        let v = self.real_of(e, at)?;
        bignum::near_integer(&v, self.precision / 2).ok_or_else(|| EvalError::NonInteger(what.into()))
    }

    fn sym(&self, s: &str, at: &At) -> Result<BigFloat, EvalError> {
        if s == self.var {
            return Ok(at.x.clone());
        }
        self.bindings
            .get(s)
            .cloned()
            .ok_or_else(|| EvalError::UnboundSymbol(s.to_string()))
    }

    fn is_fixed(&self, e: &Expr) -> bool {
        !matches!(e, Expr::Sym(_)) && !e.contains_sym(&self.var)
    }

    fn lg(&self, e: &Expr, at: &At) -> Result<BigValue, EvalError> {
        if !self.is_fixed(e) {
            return self.lg_walk(e, at);
        }
        if let Some(v) = self.fixed_log.lock().unwrap().get(e) {
            return Ok(v.clone());
        }
        let v = self.lg_walk(e, at)?;
        self.fixed_log.lock().unwrap().insert(e.clone(), v.clone());
        Ok(v)
    }

    fn lg_walk(&self, e: &Expr, at: &At) -> Result<BigValue, EvalError> {
        let p = self.wp();
        Ok(match e {
            Expr::Num(v) => {
                if v.is_zero() {
                    BigValue::zero(p)
                } else {
                    let ln_num = bignum::ln(&from_bigint(&v.numer().abs(), p), p);
                    let ln_den = bignum::ln(&from_bigint(v.denom(), p), p);
                    BigValue {
                        sign: if v.is_negative() { -1 } else { 1 },
                        log_mag: ln_num.sub(&ln_den, p, RM),
                        precision: p,
                    }
                }
            }
            Expr::Const(Constant::Pi) => BigValue::from_real(&bignum::pi(p), p),
            Expr::Const(Constant::E) => BigValue {
                sign: 1,
                log_mag: BigFloat::from_word(1, p),
                precision: p,
            },
            Expr::Sym(s) => BigValue::from_real(&self.sym(s, at)?, p),
            Expr::Add(ts) => {
                if let Some(v) = self.direct(e, at)? {
                    return Ok(BigValue::from_real(&v, p));
                }
                let vals = ts.iter().map(|t| self.lg(t, at)).collect::<Result<Vec<_>, _>>()?;
                BigValue::sum(&vals, p)
            }
            Expr::Mul(fs) => {
                let mut acc = BigValue {
                    sign: 1,
                    log_mag: BigFloat::from_word(0, p),
                    precision: p,
                };
                for f in fs {
                    let v = self.lg(f, at)?;
                    if v.is_zero() {
                        // Keep scanning so a later division by zero is still reported.
                        for g in fs {
                            self.lg(g, at)?;
                        }
                        return Ok(BigValue::zero(p));
                    }
                    acc = acc.mul(&v);
                }
                acc
            }
            Expr::Pow(b, x) => {
                let bv = self.lg(b, at)?;
                let xv = self.real_of(x, at)?;
                if bv.is_zero() {
                    if xv.is_positive() && !xv.is_zero() {
                        return Ok(BigValue::zero(p));
                    }
                    return Err(EvalError::DivisionByZero);
                }
                let mut sign = 1;
                if bv.sign < 0 {
                    let k = bignum::near_integer(&xv, self.precision / 2)
                        .ok_or_else(|| EvalError::Domain(format!("non-integer power of a negative value in {e}")))?;
                    if k.is_odd() {
                        sign = -1;
                    }
                }
                BigValue {
                    sign,
                    log_mag: xv.mul(&bv.log_mag, p, RM),
                    precision: p,
                }
            }
            Expr::Exp(a) => {
                let v = self.real_of(a, at)?;
                BigValue {
                    sign: 1,
                    log_mag: v,
                    precision: p,
                }
            }
            Expr::Ln(k, a) => {
                let mut v = self.lg(a, at)?;
                for _ in 0..*k {
                    if v.sign <= 0 {
                        return Err(EvalError::Domain(format!("logarithm of a non-positive value in {e}")));
                    }
                    v = BigValue::from_real(&v.log_mag, p);
                }
                v
            }
            Expr::Abs(a) => {
                let mut v = self.lg(a, at)?;
                v.sign = v.sign.abs();
                v
            }
            Expr::Factorial(a) => {
                let m = self.integer_of(a, at, "a factorial argument")?;
                if m.is_negative() {
                    return Err(EvalError::Domain("factorial of a negative integer".into()));
                }
                BigValue {
                    sign: 1,
                    log_mag: ln_factorial(&m, p)?,
                    precision: p,
                }
            }
            Expr::Sin(a) => BigValue::from_real(&bignum::sin(&self.real_of(a, at)?, p), p),
            Expr::Cos(a) => BigValue::from_real(&bignum::cos(&self.real_of(a, at)?, p), p),
            Expr::AltSign(a) => {
                let k = self.integer_of(a, at, "an alternating-sign exponent")?;
                BigValue {
                    sign: if k.is_odd() { -1 } else { 1 },
                    log_mag: BigFloat::from_word(0, p),
                    precision: p,
                }
            }
            Expr::Binom(a, k) => {
                let v = self.real_of(a, at)?;
                BigValue::from_real(&binom_real(&v, *k, p), p)
            }
        })
    }

    /// Plain evaluation; `Ok(None)` when an intermediate leaves the float range.
    fn direct(&self, e: &Expr, at: &At) -> Result<Option<BigFloat>, EvalError> {
        if matches!(e, Expr::Num(_)) || !self.is_fixed(e) {
            return self.direct_walk(e, at);
        }
        if let Some(v) = self.fixed_direct.lock().unwrap().get(e) {
            return Ok(v.clone());
        }
        let v = self.direct_walk(e, at)?;
        self.fixed_direct.lock().unwrap().insert(e.clone(), v.clone());
        Ok(v)
    }

    fn direct_walk(&self, e: &Expr, at: &At) -> Result<Option<BigFloat>, EvalError> {
        let p = self.wp();
        let v = match e {
            Expr::Num(v) => from_rational(v, p),
            Expr::Const(Constant::Pi) => bignum::pi(p),
            Expr::Const(Constant::E) => bignum::exp(&BigFloat::from_word(1, p), p),
            Expr::Sym(s) => self.sym(s, at)?,
            Expr::Add(ts) => {
                let mut acc = BigFloat::from_word(0, p);
                for t in ts {
                    let Some(v) = self.direct(t, at)? else { return Ok(None) };
                    acc = acc.add(&v, p, RM);
                }
                acc
            }
            Expr::Mul(fs) => {
                let mut acc = BigFloat::from_word(1, p);
                for f in fs {
                    let Some(v) = self.direct(f, at)? else { return Ok(None) };
                    acc = acc.mul(&v, p, RM);
                }
                acc
            }
            Expr::Pow(b, x) => {
                let Some(bv) = self.direct(b, at)? else { return Ok(None) };
                let Some(xv) = self.direct(x, at)? else { return Ok(None) };
                pow_direct(&bv, &xv, p, self.precision, e)?
            }
            Expr::Exp(a) => {
                let Some(v) = self.direct(a, at)? else { return Ok(None) };
                bignum::exp(&v, p)
            }
            Expr::Ln(k, a) => {
                let Some(mut v) = self.direct(a, at)? else {
                    return Ok(None);
                };
                for _ in 0..*k {
                    if v.is_zero() || v.is_negative() {
                        return Err(EvalError::Domain(format!("logarithm of a non-positive value in {e}")));
                    }
                    v = bignum::ln(&v, p);
                }
                v
            }
            Expr::Abs(a) => {
                let Some(v) = self.direct(a, at)? else { return Ok(None) };
                v.abs()
            }
            Expr::Factorial(a) => {
                let m = self.integer_of(a, at, "a factorial argument")?;
                if m.is_negative() {
                    return Err(EvalError::Domain("factorial of a negative integer".into()));
                }
                match m.to_u64() {
                    Some(k) if k <= DIRECT_FACTORIAL_LIMIT => from_bigint(&exact_factorial(k), p),
                    _ => return Ok(None),
                }
            }
            Expr::Sin(a) => {
                let Some(v) = self.direct(a, at)? else { return Ok(None) };
                bignum::sin(&v, p)
            }
            Expr::Cos(a) => {
                let Some(v) = self.direct(a, at)? else { return Ok(None) };
                bignum::cos(&v, p)
            }
            Expr::AltSign(a) => {
                let k = self.integer_of(a, at, "an alternating-sign exponent")?;
                BigFloat::from_i64(if k.is_odd() { -1 } else { 1 }, p)
            }
            Expr::Binom(a, k) => {
                let Some(v) = self.direct(a, at)? else { return Ok(None) };
                binom_real(&v, *k, p)
            }
        };
        if !is_finite(&v) {
            return Ok(None);
        }
        Ok(Some(v))
    }
}

fn pow_direct(b: &BigFloat, x: &BigFloat, p: usize, precision: usize, e: &Expr) -> Result<BigFloat, EvalError> {
    if b.is_zero() {
        if x.is_positive() && !x.is_zero() {
            return Ok(BigFloat::from_word(0, p));
        }
        return Err(EvalError::DivisionByZero);
    }
    if let Some(k) = bignum::near_integer(x, precision / 2) {
        if let Some(k) = k.to_i64() {
            if k.unsigned_abs() < (1u64 << 32) {
                let m = b.abs().powi(k.unsigned_abs() as usize, p, RM);
                let m = if k < 0 { m.reciprocal(p, RM) } else { m };
                let odd = k.is_odd() && b.is_negative();
                return Ok(if odd { m.neg() } else { m });
            }
        }
    }
    if b.is_negative() {
        return Err(EvalError::Domain(format!(
            "non-integer power of a negative value in {e}"
        )));
    }
    if bignum::to_f64(x) == 0.5 {
        return Ok(b.sqrt(p, RM));
    }
    Ok(bignum::pow(b, x, p))
}

fn binom_real(v: &BigFloat, k: u32, p: usize) -> BigFloat {
    let mut acc = BigFloat::from_word(1, p);
    for j in 0..k {
        let f = v.sub(&BigFloat::from_word(j as u64, p), p, RM);
        acc = acc.mul(&f, p, RM).div(&BigFloat::from_word(j as u64 + 1, p), p, RM);
    }
    acc
}

fn exact_factorial(m: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=m {
        acc *= i;
    }
    acc
}

/// Even-index Bernoulli numbers `B_0, B_2, B_4, ...` (Akiyama–Tanigawa).
static BERNOULLI_EVEN: Lazy<Vec<BigRational>> = Lazy::new(|| {
    let n_max = 2 * (MAX_STIRLING_TERMS + 2);
    let mut a: Vec<BigRational> = Vec::with_capacity(n_max + 1);
    let mut out = Vec::new();
    for m in 0..=n_max {
        a.push(BigRational::new(BigInt::one(), BigInt::from(m as u64 + 1)));
        for j in (1..=m).rev() {
            let diff = a[j - 1].clone() - a[j].clone();
            a[j - 1] = diff * BigRational::from_integer(BigInt::from(j as u64));
        }
        if m % 2 == 0 {
            out.push(a[0].clone());
        }
    }
    out
});

thread_local! {
    static STIRLING: std::cell::RefCell<HashMap<usize, std::rc::Rc<(BigFloat, Vec<BigFloat>)>>> =
        std::cell::RefCell::new(HashMap::new());
}

/// `ln(2 pi)` and `B_2k / (2k (2k-1))` for `k = 1..=MAX_STIRLING_TERMS` at `p` bits.
fn stirling_constants(p: usize) -> std::rc::Rc<(BigFloat, Vec<BigFloat>)> {
    STIRLING.with(|c| {
        c.borrow_mut()
            .entry(p)
            .or_insert_with(|| {
                let two_pi = bignum::pi(p).mul(&BigFloat::from_word(2, p), p, RM);
                let coefs = (1..=MAX_STIRLING_TERMS)
                    .map(|k| {
                        let denom = BigInt::from(2 * k as u64) * BigInt::from(2 * k as u64 - 1);
                        from_rational(&(BERNOULLI_EVEN[k].clone() / BigRational::from_integer(denom)), p)
                    })
                    .collect();
                std::rc::Rc::new((bignum::ln(&two_pi, p), coefs))
            })
            .clone()
    })
}

/// `ln m!` to working precision `p`.
///
/// Exact product for small `m`. Beyond that, the Stirling series
/// `m ln m - m + ln(2 pi m)/2 + sum B_2k / (2k (2k-1) m^(2k-1))`, truncated
/// where the first omitted term (which bounds the remainder) is below
/// `2^-p` relative.
pub fn ln_factorial(m: &BigInt, p: usize) -> Result<BigFloat, EvalError> {
    if let Some(k) = m.to_u64() {
        if k <= factorial_exact_limit(p) {
            return Ok(bignum::ln(&from_bigint(&exact_factorial(k), p), p));
        }
    }
    let mf = from_bigint(m, p);
    let ln_m = bignum::ln(&mf, p);
    let consts = stirling_constants(p);
    let (ln_two_pi, coefs) = (&consts.0, &consts.1);
    let mut s = mf.mul(&ln_m, p, RM).sub(&mf, p, RM);
    let half_ln = ln_two_pi.add(&ln_m, p, RM).div(&BigFloat::from_word(2, p), p, RM);
    s = s.add(&half_ln, p, RM);
    let m2 = mf.mul(&mf, p, RM);
    let mut m_pow = mf.clone(); // m^(2k-1)
    let tol_exp = s.exponent().unwrap_or(0) - p as i32;
    for coef in coefs.iter() {
        let term = coef.div(&m_pow, p, RM);
        if term.is_zero() || term.exponent().map(|x| x < tol_exp).unwrap_or(true) {
            // This term and everything after it is below the target: the
            // remainder after the previous term is bounded by it.
            return Ok(s);
        }
        s = s.add(&term, p, RM);
        m_pow = m_pow.mul(&m2, p, RM);
    }
    // Not certified within the term budget; multiply out when feasible.
    match m.to_u64() {
        Some(k) if k <= 1_000_000 => {
            let mut acc = BigFloat::from_word(1, p);
            for i in 2..=k {
                acc = acc.mul(&BigFloat::from_word(i, p), p, RM);
            }
            Ok(bignum::ln(&acc, p))
        }
        _ => Err(EvalError::Overflow(format!("ln({m}!) at {p} bits"))),
    }
}

/// `eval_log` with `e`'s own index variable.
pub fn eval_log(e: &Expr, at: &Point, precision: usize) -> Result<BigValue, EvalError> {
    Evaluator::for_expr(e, precision).eval_log(e, at)
}

/// Plain high-precision value of `e` at `at`.
pub fn eval_real(e: &Expr, at: &Point, precision: usize) -> Result<BigFloat, EvalError> {
    Evaluator::for_expr(e, precision).eval_real(e, at)
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn lnv(s: &str, at: i64) -> f64 {
        eval_log(&parse(s).unwrap(), &Point::from(at), 128).unwrap().ln_f64()
    }

    #[test]
    fn exact_laws() {
        assert!((lnv("1/2^n", 10) + 10.0 * std::f64::consts::LN_2).abs() < 1e-14);
        let v = eval_log(&parse("(n^3+n)/(5*n^3+n^2+27)").unwrap(), &Point::from(1_000_000), 128).unwrap();
        assert!((v.to_f64() - 0.2).abs() < 1e-6);
    }

    #[test]
    fn factorial_over_power_matches_exact_product() {
        let v = eval_log(&parse("n!/n^n").unwrap(), &Point::from(100), 128).unwrap();
        // Oracle: exact rational n!/n^n, converted once.
        let exact = BigRational::new(exact_factorial(100), num_traits::pow(BigInt::from(100), 100));
        let want = bignum::ln(&from_rational(&exact, 256), 256);
        let err = bignum::to_f64(&v.log_mag.sub(&want, 256, RM)).abs();
        assert!(err < 2f64.powi(-60) * bignum::to_f64(&want).abs(), "err {err}");
    }

    #[test]
    fn stirling_agrees_with_product() {
        for m in [90u64, 200, 1001, 1500, 4000] {
            let st = ln_factorial(&BigInt::from(m), 256).unwrap();
            let ex = bignum::ln(&from_bigint(&exact_factorial(m), 320), 256);
            let rel = bignum::rel_diff(&st, &ex, 256);
            assert!(rel < 1e-70, "m={m} rel={rel}");
        }
    }

    #[test]
    fn huge_arguments_stay_finite() {
        let e = parse("(4*n)!*(1103+26390*n)/((n!)^4*396^(4*n))").unwrap();
        let v = eval_log(&e, &Point::from(1_000_000_000_000i64), 128).unwrap();
        assert_eq!(v.sign, 1);
        // Leading behaviour is (256/396^4)^n, about -1.84e13 in the log.
        let l = v.ln_f64();
        assert!(l < -1.8e13 && l > -1.9e13, "{l}");
    }

    #[test]
    fn direct_and_log_paths_agree() {
        for s in [
            "1/n^2",
            "(-1)^n/sqrt(n)",
            "n!/(2*n)!",
            "ln(n)/n^2",
            "binom(n, 3)/2^n",
            "(3+sin(n))/n^2",
        ] {
            let e = parse(s).unwrap();
            let ev = Evaluator::for_expr(&e, 128);
            let at = Point::from(37);
            let d = ev.eval_real(&e, &at).unwrap();
            let l = ev.eval_log(&e, &at).unwrap().to_real();
            assert!(bignum::rel_diff(&l, &d, 192) < 1e-30, "{s}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            eval_log(&parse("ln(1 - n)").unwrap(), &Point::from(3), 64),
            Err(EvalError::Domain(_))
        ));
        assert!(matches!(
            eval_log(&parse("1/(n-3)").unwrap(), &Point::from(3), 64),
            Err(EvalError::DivisionByZero)
        ));
    }
}

//! Canonicalizing constructors behind the `Expr` builders.

use super::{q, Expr, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Integer powers whose result would exceed this many bits stay symbolic.
const MAX_FOLD_BITS: u64 = 20_000;
/// Trial division bound for prime factorization of literals.
const FACTOR_LIMIT: u64 = 1 << 40;
const MAX_FOLD_FACTORIAL: u64 = 300;

pub(super) fn add(terms: Vec<Expr>) -> Expr {
    let mut flat = Vec::with_capacity(terms.len());
    for t in terms {
        match t {
            Expr::Add(inner) => flat.extend(inner),
            other => flat.push(other),
        }
    }
    let mut constant = Q::zero();
    let mut groups: BTreeMap<Expr, Q> = BTreeMap::new();
    for t in flat {
        match t {
            Expr::Num(v) => constant += v,
            other => {
                let (c, rest) = other.coeff_and_rest();
                *groups.entry(rest).or_insert_with(Q::zero) += c;
            }
        }
    }
    let mut out = Vec::with_capacity(groups.len() + 1);
    if !constant.is_zero() {
        out.push(Expr::Num(constant));
    }
    for (rest, c) in groups {
        if c.is_zero() {
            continue;
        }
        out.push(scale(c, rest));
    }
    // Scaling can expose nested sums only if `rest` was a sum, which grouping
    // never produces, so one pass suffices.
    match out.len() {
        0 => Expr::zero(),
        1 => out.pop().unwrap(),
        _ => {
            out.sort();
            Expr::Add(out)
        }
    }
}

/// `c * rest` where `rest` carries no rational coefficient.
fn scale(c: Q, rest: Expr) -> Expr {
    if c.is_one() {
        return rest;
    }
    if rest.is_one() {
        return Expr::Num(c);
    }
    let mut fs = vec![Expr::Num(c)];
    match rest {
        Expr::Mul(inner) => fs.extend(inner),
        other => fs.push(other),
    }
    Expr::Mul(fs)
}

pub(super) fn mul(factors: Vec<Expr>) -> Expr {
    let mut pending = factors;
    let mut coeff = Q::one();
    // base -> summed exponent
    let mut powers: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
    let mut exp_args: Vec<Expr> = Vec::new();
    let mut alt_args: Vec<Expr> = Vec::new();
    let mut sums: Vec<Expr> = Vec::new();
    for _round in 0..6 {
        if pending.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for f in pending.drain(..) {
            match f {
                Expr::Num(v) => {
                    if v.is_zero() {
                        return Expr::zero();
                    }
                    coeff *= v;
                }
                Expr::Mul(inner) => next.extend(inner),
                Expr::Exp(a) => exp_args.push(*a),
                Expr::AltSign(a) => alt_args.push(*a),
                Expr::Pow(b, e) => powers.entry(*b).or_default().push(*e),
                Expr::Add(_) => sums.push(f),
                other => powers.entry(other).or_default().push(Expr::one()),
            }
        }
        // Re-combine bases; results that fold to numbers or products are fed back.
        let mut regrouped: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
        for (base, exps) in std::mem::take(&mut powers) {
            let total = if exps.len() == 1 {
                exps.into_iter().next().unwrap()
            } else {
                add(exps)
            };
            let combined = pow(base.clone(), total.clone());
            match combined {
                Expr::Pow(b, e) => regrouped.entry(*b).or_default().push(*e),
                Expr::Num(_) | Expr::Mul(_) | Expr::Exp(_) | Expr::AltSign(_) => next.push(combined),
                Expr::Add(_) => sums.push(combined),
                other => regrouped.entry(other).or_default().push(Expr::one()),
            }
        }
        if !exp_args.is_empty() {
            let e = exp(add(std::mem::take(&mut exp_args)));
            match e {
                Expr::Exp(a) => exp_args.push(*a),
                other => next.push(other),
            }
        }
        if alt_args.len() > 1 {
            let a = alt_sign(add(std::mem::take(&mut alt_args)));
            match a {
                Expr::AltSign(x) => alt_args.push(*x),
                other => next.push(other),
            }
        }
        powers = regrouped;
        pending = next;
    }
    let mut out: Vec<Expr> = Vec::new();
    for (base, exps) in powers {
        let total = add(exps);
        if total.is_zero() {
            continue;
        }
        if total.is_one() {
            out.push(base);
        } else {
            out.push(Expr::Pow(Box::new(base), Box::new(total)));
        }
    }
    if !exp_args.is_empty() {
        out.push(Expr::Exp(Box::new(add(exp_args))));
    }
    for a in alt_args {
        out.push(alt_sign(a));
    }
    out.extend(sums);
    // A lone sum with a rational coefficient distributes.
    if out.len() == 1 && !coeff.is_one() {
        if let Expr::Add(ts) = &out[0] {
            let c = coeff.clone();
            return add(ts
                .iter()
                .map(|t| {
                    let (tc, rest) = t.coeff_and_rest();
                    scale(tc * c.clone(), rest)
                })
                .collect());
        }
    }
    out.sort();
    if !coeff.is_one() {
        out.insert(0, Expr::Num(coeff));
    }
    match out.len() {
        0 => Expr::one(),
        1 => out.pop().unwrap(),
        _ => Expr::Mul(out),
    }
}

pub(super) fn pow(base: Expr, exponent: Expr) -> Expr {
    if exponent.is_zero() {
        return Expr::one();
    }
    if exponent.is_one() {
        return base;
    }
    match (&base, &exponent) {
        (Expr::Num(b), Expr::Num(e)) => return pow_num(b, e),
        (Expr::Num(b), _) => {
            if b.is_one() {
                return Expr::one();
            }
            if b.is_zero() {
                return Expr::Pow(Box::new(base), Box::new(exponent));
            }
            if b.is_negative() {
                let alt = alt_sign(exponent.clone());
                let mag = pow(Expr::Num(-b.clone()), exponent.clone());
                return mul(vec![alt, mag]);
            }
            if let Some(parts) = factor_rational(b) {
                if parts.len() > 1 || parts.first().map(|(_, k)| *k != 1).unwrap_or(false) {
                    return mul(parts
                        .into_iter()
                        .map(|(p, k)| {
                            Expr::Pow(
                                Box::new(Expr::Num(Q::from_integer(p))),
                                Box::new(mul(vec![Expr::int(k), exponent.clone()])),
                            )
                        })
                        .collect());
                }
            }
            return Expr::Pow(Box::new(base), Box::new(exponent));
        }
        (Expr::Const(super::Constant::E), _) => return exp(exponent),
        (Expr::Exp(a), _) => return exp(mul(vec![(**a).clone(), exponent])),
        (Expr::Pow(b, e1), _) => {
            if is_integer_num(&exponent) || b.is_structurally_positive() {
                return pow((**b).clone(), mul(vec![(**e1).clone(), exponent]));
            }
        }
        (Expr::Mul(fs), _) => {
            if is_integer_num(&exponent) || fs.iter().all(|f| f.is_structurally_positive()) {
                return mul(fs.iter().map(|f| pow(f.clone(), exponent.clone())).collect());
            }
            // Pull out a positive rational coefficient.
            if let Some(Expr::Num(c)) = fs.first() {
                if c.is_positive() && exponent.is_num() {
                    let rest = mul(fs[1..].to_vec());
                    return mul(vec![
                        pow(Expr::Num(c.clone()), exponent.clone()),
                        Expr::Pow(Box::new(rest), Box::new(exponent)),
                    ]);
                }
            }
        }
        (Expr::AltSign(a), Expr::Num(k)) if k.is_integer() => {
            return alt_sign(mul(vec![(**a).clone(), exponent.clone()]));
        }
        (Expr::Abs(a), Expr::Num(k)) if k.is_integer() && k.to_integer().is_even() => {
            return pow((**a).clone(), exponent);
        }
        _ => {}
    }
    Expr::Pow(Box::new(base), Box::new(exponent))
}

fn is_integer_num(e: &Expr) -> bool {
    matches!(e, Expr::Num(v) if v.is_integer())
}

fn pow_num(b: &Q, e: &Q) -> Expr {
    if b.is_zero() {
        if e.is_positive() {
            return Expr::zero();
        }
        return Expr::Pow(Box::new(Expr::Num(b.clone())), Box::new(Expr::Num(e.clone())));
    }
    if b.is_one() {
        return Expr::one();
    }
    if e.is_integer() {
        let k = e.to_integer();
        let bits = b.numer().bits().max(b.denom().bits());
        if let Some(k64) = k.to_i64() {
            if bits.saturating_mul(k64.unsigned_abs()) <= MAX_FOLD_BITS {
                let r = rational_powi(b, k64);
                return Expr::Num(r);
            }
        }
        return Expr::Pow(Box::new(Expr::Num(b.clone())), Box::new(Expr::Num(e.clone())));
    }
    if b.is_negative() {
        if e.denom().is_odd() {
            // Real odd root of a negative number.
            let mag = pow_num(&-b.clone(), e);
            let sign = if e.numer().is_odd() { -1 } else { 1 };
            return mul(vec![Expr::int(sign), mag]);
        }
        return Expr::Pow(Box::new(Expr::Num(b.clone())), Box::new(Expr::Num(e.clone())));
    }
    // b > 0, e non-integer: split into prime powers with exponents in [0, 1).
    let Some(parts) = factor_rational(b) else {
        return Expr::Pow(Box::new(Expr::Num(b.clone())), Box::new(Expr::Num(e.clone())));
    };
    let mut coeff = Q::one();
    let mut by_exp: BTreeMap<Q, Q> = BTreeMap::new();
    for (p, k) in parts {
        let total = e.clone() * q(k);
        let whole = total.floor();
        let frac = total.clone() - whole.clone();
        let pq = Q::from_integer(p.clone());
        coeff *= rational_powi(&pq, whole.to_integer().to_i64().unwrap_or(0));
        if !frac.is_zero() {
            *by_exp.entry(frac).or_insert_with(Q::one) *= pq;
        }
    }
    let mut fs = vec![Expr::Num(coeff)];
    for (frac, base) in by_exp {
        // Distinct primes sharing an exponent are kept as separate factors so
        // the decomposition stays canonical.
        let Some(ps) = factor_rational(&base) else {
            continue;
        };
        for (p, k) in ps {
            fs.push(Expr::Pow(
                Box::new(Expr::Num(Q::from_integer(p))),
                Box::new(Expr::Num(frac.clone() * q(k))),
            ));
        }
    }
    let mut coeff = Q::one();
    let mut rest = Vec::new();
    for f in fs {
        match f {
            Expr::Num(v) => coeff *= v,
            other => rest.push(other),
        }
    }
    rest.sort();
    if !coeff.is_one() {
        rest.insert(0, Expr::Num(coeff));
    }
    match rest.len() {
        0 => Expr::one(),
        1 => rest.pop().unwrap(),
        _ => Expr::Mul(rest),
    }
}

fn rational_powi(b: &Q, k: i64) -> Q {
    let n = num_traits::pow::pow(b.numer().clone(), k.unsigned_abs() as usize);
    let d = num_traits::pow::pow(b.denom().clone(), k.unsigned_abs() as usize);
    if k >= 0 {
        Q::new(n, d)
    } else {
        Q::new(d, n)
    }
}

/// Prime factorization of a positive rational as `(prime, signed exponent)`.
pub(crate) fn factor_rational(r: &Q) -> Option<Vec<(BigInt, i64)>> {
    if !r.is_positive() {
        return None;
    }
    let mut out: BTreeMap<BigInt, i64> = BTreeMap::new();
    for (v, sign) in [(r.numer(), 1i64), (r.denom(), -1i64)] {
        let v = v.to_u64()?;
        if v >= FACTOR_LIMIT {
            return None;
        }
        for (p, k) in factor_u64(v) {
            *out.entry(BigInt::from(p)).or_insert(0) += sign * k as i64;
        }
    }
    Some(out.into_iter().filter(|(_, k)| *k != 0).collect())
}

fn factor_u64(mut v: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= v {
        let mut k = 0;
        while v.is_multiple_of(p) {
            v /= p;
            k += 1;
        }
        if k > 0 {
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if v > 1 {
        out.push((v, 1));
    }
    out
}

pub(super) fn exp(a: Expr) -> Expr {
    if a.is_zero() {
        return Expr::one();
    }
    let mut powers = Vec::new();
    let mut rest = Vec::new();
    for t in a.terms() {
        let (c, body) = t.coeff_and_rest();
        match body {
            Expr::Ln(k, x) => {
                let inner = if k == 1 { *x } else { Expr::Ln(k - 1, x) };
                powers.push(pow(inner, Expr::Num(c)));
            }
            _ => rest.push(t),
        }
    }
    if powers.is_empty() {
        return Expr::Exp(Box::new(a));
    }
    if !rest.is_empty() {
        powers.push(Expr::Exp(Box::new(add(rest))));
    }
    mul(powers)
}

pub(super) fn ln(k: u32, a: Expr) -> Expr {
    let mut cur = a;
    for _ in 0..k {
        cur = ln1(cur);
    }
    cur
}

fn ln1(a: Expr) -> Expr {
    match a {
        Expr::Num(ref v) => {
            if v.is_one() {
                return Expr::zero();
            }
            if let Some(parts) = factor_rational(v) {
                if parts.len() > 1 || parts.first().map(|(_, k)| *k != 1).unwrap_or(false) {
                    return add(parts
                        .into_iter()
                        .map(|(p, k)| mul(vec![Expr::int(k), Expr::Ln(1, Box::new(Expr::Num(Q::from_integer(p))))]))
                        .collect());
                }
            }
            Expr::Ln(1, Box::new(a))
        }
        Expr::Exp(x) => *x,
        Expr::Const(super::Constant::E) => Expr::one(),
        Expr::Ln(j, x) => Expr::Ln(j + 1, x),
        Expr::Pow(ref b, ref e) if b.is_structurally_positive() => mul(vec![(**e).clone(), ln1((**b).clone())]),
        Expr::Mul(ref fs) if fs.iter().all(|f| f.is_structurally_positive()) => {
            add(fs.iter().map(|f| ln1(f.clone())).collect())
        }
        other => Expr::Ln(1, Box::new(other)),
    }
}

pub(super) fn abs(a: Expr) -> Expr {
    match a {
        Expr::Num(v) => Expr::Num(v.abs()),
        Expr::Abs(_) => a,
        Expr::AltSign(_) => Expr::one(),
        Expr::Mul(fs) => mul(fs.into_iter().map(abs).collect()),
        other if other.is_structurally_positive() => other,
        other => Expr::Abs(Box::new(other)),
    }
}

pub(super) fn factorial(a: Expr) -> Expr {
    if let Expr::Num(v) = &a {
        if v.is_integer() && !v.is_negative() {
            if let Some(m) = v.to_integer().to_u64() {
                if m <= MAX_FOLD_FACTORIAL {
                    let mut acc = BigInt::one();
                    for i in 2..=m {
                        acc *= i;
                    }
                    return Expr::Num(Q::from_integer(acc));
                }
            }
        }
    }
    Expr::Factorial(Box::new(a))
}

pub(super) fn binom(a: Expr, k: u32) -> Expr {
    if k == 0 {
        return Expr::one();
    }
    if k == 1 {
        return a;
    }
    if let Expr::Num(v) = &a {
        let mut acc = Q::one();
        for j in 0..k {
            acc = acc * (v.clone() - q(j as i64)) / q(j as i64 + 1);
        }
        return Expr::Num(acc);
    }
    Expr::Binom(Box::new(a), k)
}

pub(super) fn sin(a: Expr) -> Expr {
    if a.is_zero() {
        return Expr::zero();
    }
    Expr::Sin(Box::new(a))
}

pub(super) fn cos(a: Expr) -> Expr {
    if a.is_zero() {
        return Expr::one();
    }
    Expr::Cos(Box::new(a))
}

/// `(-1)^a`, reduced by parity when `a` is an integer polynomial in a
/// single symbol.
pub(super) fn alt_sign(a: Expr) -> Expr {
    if let Expr::Num(v) = &a {
        if v.is_integer() {
            return if v.to_integer().is_even() {
                Expr::one()
            } else {
                Expr::int(-1)
            };
        }
        return Expr::AltSign(Box::new(a));
    }
    match parity(&a) {
        Some(Parity::Even) => Expr::one(),
        Some(Parity::Odd) => Expr::int(-1),
        Some(Parity::Follows { var, flip }) => {
            let base = Expr::AltSign(Box::new(Expr::Sym(var)));
            if flip {
                Expr::Mul(vec![Expr::int(-1), base])
            } else {
                base
            }
        }
        None => Expr::AltSign(Box::new(a)),
    }
}

enum Parity {
    Even,
    Odd,
    /// Same parity as the symbol, or the opposite one when `flip`.
    Follows {
        var: String,
        flip: bool,
    },
}

fn parity(a: &Expr) -> Option<Parity> {
    let syms = a.free_symbols();
    if syms.len() != 1 {
        return None;
    }
    let var = syms.into_iter().next().unwrap();
    // 2^f and f! are even once the index is large enough.
    if let Expr::Pow(b, _) = a {
        if let Expr::Num(v) = &**b {
            if v.is_integer() && v.to_integer().is_even() && !v.is_zero() {
                return Some(Parity::Even);
            }
        }
    }
    if matches!(a, Expr::Factorial(_)) {
        return Some(Parity::Even);
    }
    if !is_integer_polynomial(a) {
        return None;
    }
    let at0 = eval_poly_mod2(a, &var, 0)?;
    let at1 = eval_poly_mod2(a, &var, 1)?;
    Some(match (at0, at1) {
        (0, 0) => Parity::Even,
        (1, 1) => Parity::Odd,
        (0, 1) => Parity::Follows { var, flip: false },
        _ => Parity::Follows { var, flip: true },
    })
}

fn is_integer_polynomial(a: &Expr) -> bool {
    match a {
        Expr::Num(v) => v.is_integer(),
        Expr::Sym(_) => true,
        Expr::Add(v) | Expr::Mul(v) => v.iter().all(is_integer_polynomial),
        Expr::Pow(b, e) => {
            is_integer_polynomial(b) && matches!(&**e, Expr::Num(k) if k.is_integer() && k.is_positive())
        }
        _ => false,
    }
}

fn eval_poly_mod2(a: &Expr, var: &str, at: i64) -> Option<i64> {
    let v = eval_poly(a, var, at)?;
    Some(v.mod_floor(&BigInt::from(2)).to_i64().unwrap_or(0))
}

fn eval_poly(a: &Expr, var: &str, at: i64) -> Option<BigInt> {
    Some(match a {
        Expr::Num(v) => v.to_integer(),
        Expr::Sym(s) if s == var => BigInt::from(at),
        Expr::Add(v) => v.iter().map(|t| eval_poly(t, var, at)).sum::<Option<BigInt>>()?,
        Expr::Mul(v) => v.iter().map(|t| eval_poly(t, var, at)).product::<Option<BigInt>>()?,
        Expr::Pow(b, e) => {
            let k = e.as_num()?.to_integer().to_usize()?;
            num_traits::pow::pow(eval_poly(b, var, at)?, k)
        }
        _ => return None,
    })
}

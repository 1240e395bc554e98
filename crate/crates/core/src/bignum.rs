//! Thin helpers over `astro_float::BigFloat`: conversions to and from exact
//! integers and rationals, f64 extraction, and decimal formatting.

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign, Word};
use num_bigint::{BigInt, Sign as IntSign};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::cell::RefCell;

/// Rounding mode used for every operation in the crate.
pub const RM: RoundingMode = RoundingMode::ToEven;

/// Default working precision in bits.
pub const DEFAULT_PRECISION: usize = 256;

/// Fresh constants cache. `Consts` memoizes pi/e/ln2 internally, so callers
/// keep one per evaluation pass.
pub fn consts() -> Consts {
    Consts::new().expect("allocating astro-float constants cache")
}

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(consts());
}

/// Runs `f` with this thread's constants cache. Not re-entrant.
pub fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

pub fn ln(x: &BigFloat, p: usize) -> BigFloat {
    with_consts(|cc| x.ln(p, RM, cc))
}

pub fn exp(x: &BigFloat, p: usize) -> BigFloat {
    with_consts(|cc| x.exp(p, RM, cc))
}

pub fn sin(x: &BigFloat, p: usize) -> BigFloat {
    with_consts(|cc| x.sin(p, RM, cc))
}

pub fn cos(x: &BigFloat, p: usize) -> BigFloat {
    with_consts(|cc| x.cos(p, RM, cc))
}

/// `x^y` for `x > 0`, as `exp(y ln x)` with guard bits.
///
/// The library's own `pow` retries forever when the result is exactly
/// representable, e.g. `16^(1/4)`.
pub fn pow(x: &BigFloat, y: &BigFloat, p: usize) -> BigFloat {
    let wp = p + 64;
    let l = ln(x, wp).mul(y, wp, RM);
    let mut r = exp(&l, wp);
    r.set_precision(p, RM).expect("precision in range");
    r
}

pub fn pi(p: usize) -> BigFloat {
    with_consts(|cc| cc.pi(p, RM))
}

/// Nearest integer when `x` is within `2^-tol_bits` (relative) of one.
pub fn near_integer(x: &BigFloat, tol_bits: usize) -> Option<BigInt> {
    if !is_finite(x) {
        return None;
    }
    let half = BigFloat::from_f64(0.5, 64);
    let p = x.precision().unwrap_or(64).max(64) + 8;
    let r = x.add(&half, p, RM).floor();
    let d = x.sub(&r, p, RM).abs();
    let scale = x.abs().max(&BigFloat::from_word(1, 64));
    let mut tol = scale;
    tol.set_exponent(tol.exponent().unwrap_or(0) - tol_bits as i32);
    if d.cmp(&tol).map(|c| c <= 0).unwrap_or(false) {
        to_bigint(&r)
    } else {
        None
    }
}

pub fn from_bigint(i: &BigInt, p: usize) -> BigFloat {
    if i.is_zero() {
        return BigFloat::from_word(0, p);
    }
    let (sign, digits) = i.to_u64_digits();
    let words: Vec<Word> = digits.iter().map(|&d| d as Word).collect();
    let e = (words.len() * Word::BITS as usize) as i32;
    let s = if sign == IntSign::Minus { Sign::Neg } else { Sign::Pos };
    let mut x = BigFloat::from_words(&words, s, e);
    // from_words keeps the full mantissa; round to the requested precision.
    if x.precision().map(|q| q > p).unwrap_or(false) {
        let _ = x.set_precision(p, RM);
    }
    x
}

pub fn from_i64(i: i64, p: usize) -> BigFloat {
    BigFloat::from_i64(i, p)
}

pub fn from_rational(q: &BigRational, p: usize) -> BigFloat {
    let n = from_bigint(q.numer(), p + 8);
    if q.denom() == &BigInt::from(1) {
        let mut n = n;
        let _ = n.set_precision(p, RM);
        return n;
    }
    let d = from_bigint(q.denom(), p + 8);
    n.div(&d, p, RM)
}

/// Nearest f64 (truncated mantissa). Infinite when out of range.
pub fn to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if x.is_zero() {
        return 0.0;
    }
    let Some((m, _, s, e, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    let top = *m.last().unwrap_or(&0) as u64;
    let second = if m.len() > 1 { m[m.len() - 2] as u64 } else { 0 };
    let e = e as i64;
    let mag = if e > 1100 {
        f64::INFINITY
    } else if e < -1100 {
        0.0
    } else {
        let hi = top as f64 * 2f64.powi((e - 64) as i32);
        let lo = second as f64 * 2f64.powi((e - 128).max(-1100) as i32);
        hi + lo
    };
    if s == Sign::Neg {
        -mag
    } else {
        mag
    }
}

/// Exact integer value, if `x` is a finite integer.
pub fn to_bigint(x: &BigFloat) -> Option<BigInt> {
    if x.is_nan() || x.is_inf() {
        return None;
    }
    if x.is_zero() {
        return Some(BigInt::zero());
    }
    if !x.is_int() {
        return None;
    }
    let (m, _, s, e, _) = x.as_raw_parts()?;
    let bits = (m.len() * Word::BITS as usize) as i64;
    let digits: Vec<u64> = m.iter().map(|&w| w as u64).collect();
    let mut v = BigInt::from_slice(
        IntSign::Plus,
        &digits
            .iter()
            .flat_map(|d| [(*d & 0xffff_ffff) as u32, (*d >> 32) as u32])
            .collect::<Vec<u32>>(),
    );
    let shift = e as i64 - bits;
    if shift >= 0 {
        v <<= shift as usize;
    } else {
        v >>= (-shift) as usize;
    }
    if s == Sign::Neg {
        v = -v;
    }
    Some(v)
}

pub fn is_negative(x: &BigFloat) -> bool {
    x.is_negative() && !x.is_zero()
}

pub fn is_finite(x: &BigFloat) -> bool {
    !(x.is_nan() || x.is_inf())
}

/// Decimal rendering with `digits` significant digits, e.g. `1.041020e-8`.
pub fn format_sig(x: &BigFloat, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_inf_pos() {
        return "inf".into();
    }
    if x.is_inf_neg() {
        return "-inf".into();
    }
    if x.is_zero() {
        return "0".into();
    }
    let mut cc = consts();
    let s = match x.format(Radix::Dec, RM, &mut cc) {
        Ok(s) => s,
        Err(_) => return format!("{:e}", to_f64(x)),
    };
    round_decimal_string(&s, digits)
}

/// Rounds astro-float's `d.ddddde±x` style output to `digits` significant digits.
fn round_decimal_string(s: &str, digits: usize) -> String {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (mant, exp) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i64>().unwrap_or(0)),
        None => (body, 0),
    };
    let point = mant.find('.').unwrap_or(mant.len()) as i64;
    let raw: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let lead = raw.find(|c: char| c != '0').unwrap_or(raw.len());
    if lead == raw.len() {
        return "0".into();
    }
    let sig: Vec<u8> = raw[lead..].bytes().map(|b| b - b'0').collect();
    let mut dec_exp = point - lead as i64 - 1 + exp;
    let mut kept: Vec<u8> = sig.iter().take(digits.max(1)).copied().collect();
    if sig.len() > kept.len() && sig[kept.len()] >= 5 {
        let mut i = kept.len();
        loop {
            if i == 0 {
                kept.insert(0, 1);
                kept.pop();
                dec_exp += 1;
                break;
            }
            i -= 1;
            if kept[i] == 9 {
                kept[i] = 0;
            } else {
                kept[i] += 1;
                break;
            }
        }
    }
    while kept.len() > 1 && *kept.last().unwrap() == 0 {
        kept.pop();
    }
    let digits_str: String = kept.iter().map(|d| (b'0' + d) as char).collect();
    let mut out = String::from(if neg { "-" } else { "" });
    if (-5..digits.max(1) as i64).contains(&dec_exp) {
        // Positional, like `%g`.
        if dec_exp < 0 {
            out.push_str("0.");
            out.push_str(&"0".repeat((-dec_exp - 1) as usize));
            out.push_str(&digits_str);
        } else {
            let int_len = dec_exp as usize + 1;
            if digits_str.len() <= int_len {
                out.push_str(&digits_str);
                out.push_str(&"0".repeat(int_len - digits_str.len()));
            } else {
                out.push_str(&digits_str[..int_len]);
                out.push('.');
                out.push_str(&digits_str[int_len..]);
            }
        }
        return out;
    }
    out.push_str(&digits_str[..1]);
    if digits_str.len() > 1 {
        out.push('.');
        out.push_str(&digits_str[1..]);
    }
    out.push_str(&format!("e{dec_exp}"));
    out
}

/// `|a - b| / |b|` as f64, for tolerance checks.
pub fn rel_diff(a: &BigFloat, b: &BigFloat, p: usize) -> f64 {
    let d = a.sub(b, p, RM);
    if b.is_zero() {
        return to_f64(&d).abs();
    }
    to_f64(&d.div(b, p, RM)).abs()
}

pub fn abs_f(x: &BigFloat) -> BigFloat {
    x.abs()
}

pub fn signum_i8(x: &BigFloat) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_negative() {
        -1
    } else {
        1
    }
}

pub fn bigint_abs(i: &BigInt) -> BigInt {
    i.abs()
}

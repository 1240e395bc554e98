//! Radius and interval of convergence of `sum a(n) x^n`.
//!
//! The radius is `1 / lim |a(n)|^(1/n)`, read off the log-expansion of
//! `|a(n)|` divided by `n`. Endpoints are separate series handed to
//! [`crate::convergence::auto`].

use crate::asymptotics::{log_form, series_limit, var_of, with_orders, AsymError, Limit, Mono};
use crate::bignum;
use crate::convergence::{auto_with, split_alternating, Options, Outcome, Verdict};
use crate::expr::{eval_real, q, Expr, Point, Q};
use serde::Serialize;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PowerSeriesError {
    #[error("unsupported coefficient: {0}")]
    Unsupported(#[from] AsymError),
    #[error("radius is {0}; the interval needs a finite nonzero radius")]
    Degenerate(Radius),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Radius {
    Zero,
    Finite {
        value: Expr,
        /// False when the value is outside rationals, roots and powers of `e`.
        exact: bool,
    },
    Infinite,
}

impl Radius {
    pub fn value(&self) -> Option<&Expr> {
        match self {
            Radius::Finite { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Radius::Zero => 0.0,
            Radius::Infinite => f64::INFINITY,
            Radius::Finite { value, .. } => approx(value).map(|v| bignum::to_f64(&v)).unwrap_or(f64::NAN),
        }
    }
}

fn approx(e: &Expr) -> Option<astro_float::BigFloat> {
    eval_real(e, &Point::from(1), 128).ok()
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radius::Zero => f.write_str("0"),
            Radius::Infinite => f.write_str("inf"),
            Radius::Finite { value, exact: true } => write!(f, "{value}"),
            Radius::Finite { value, exact: false } => match approx(value) {
                Some(v) => write!(f, "{value} ~ {}", bignum::format_sig(&v, 20)),
                None => write!(f, "{value}"),
            },
        }
    }
}

impl Serialize for Radius {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bracket {
    Open,
    Closed,
    /// The endpoint series was not decided.
    Unknown,
}

impl Bracket {
    fn of(v: &Verdict) -> Bracket {
        match v.outcome {
            Outcome::Converges => Bracket::Closed,
            Outcome::Diverges => Bracket::Open,
            Outcome::Inconclusive => Bracket::Unknown,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub left: Expr,
    pub right: Expr,
    pub left_bracket: Bracket,
    pub right_bracket: Bracket,
}

impl fmt::Display for Interval {
    /// `[2, 8)`; an undecided end prints as `?`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = match self.left_bracket {
            Bracket::Open => "(",
            Bracket::Closed => "[",
            Bracket::Unknown => "?",
        };
        let r = match self.right_bracket {
            Bracket::Open => ")",
            Bracket::Closed => "]",
            Bracket::Unknown => "?",
        };
        write!(f, "{l}{}, {}{r}", self.left, self.right)
    }
}

#[derive(Clone, Debug)]
pub struct RadiusResult {
    pub radius: Radius,
    pub center: Q,
    pub endpoint_left: Verdict,
    pub endpoint_right: Verdict,
    pub interval: Interval,
}

impl fmt::Display for RadiusResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r = {}, interval {}", self.radius, self.interval)
    }
}

fn closed_form(e: &Expr) -> bool {
    match e {
        Expr::Num(_) | Expr::Const(crate::expr::Constant::E) => true,
        Expr::Pow(b, x) => x.is_num() && closed_form(b),
        Expr::Exp(x) => x.is_num(),
        Expr::Mul(fs) => fs.iter().all(closed_form),
        _ => false,
    }
}

/// `|a|`, with an alternating sign factor removed.
fn magnitude(a: &Expr) -> Expr {
    split_alternating(a).unwrap_or_else(|| a.clone())
}

pub fn radius(a: &Expr) -> Result<Radius, PowerSeriesError> {
    let b = magnitude(a);
    let var = var_of(&b);
    let lim = with_orders(&var, |ctx| {
        let lf = log_form(&b, ctx)?;
        series_limit(&lf.l.mul_mono(&Mono::n_pow(q(-1))))
    })?;
    Ok(match lim {
        Limit::PlusInfinity => Radius::Zero,
        Limit::MinusInfinity => Radius::Infinite,
        Limit::Finite(c) => {
            let value = Expr::exp(Expr::neg(c));
            Radius::Finite {
                exact: closed_form(&value),
                value,
            }
        }
    })
}

/// Terms of the series at the endpoints `center - r` and `center + r`.
pub fn endpoint_terms(a: &Expr, r: &Expr) -> (Expr, Expr) {
    let var = var_of(a);
    let n = Expr::sym(&var);
    let right = a.clone() * Expr::pow(r.clone(), n.clone());
    let left = Expr::alt_sign(n) * right.clone();
    (left, right)
}

pub fn interval(a: &Expr, center: &Q) -> Result<RadiusResult, PowerSeriesError> {
    interval_with(a, center, &Options::default())
}

pub fn interval_with(a: &Expr, center: &Q, opts: &Options) -> Result<RadiusResult, PowerSeriesError> {
    let radius = radius(a)?;
    let r = match &radius {
        Radius::Finite { value, .. } => value.clone(),
        other => return Err(PowerSeriesError::Degenerate(other.clone())),
    };
    let (left, right) = endpoint_terms(a, &r);
    let (endpoint_left, endpoint_right) = rayon::join(|| auto_with(&left, opts), || auto_with(&right, opts));
    let c = Expr::num(center.clone());
    let interval = Interval {
        left: c.clone() - r.clone(),
        right: c + r,
        left_bracket: Bracket::of(&endpoint_left),
        right_bracket: Bracket::of(&endpoint_right),
    };
    Ok(RadiusResult {
        radius,
        center: center.clone(),
        endpoint_left,
        endpoint_right,
        interval,
    })
}

/// Radii of `n a(n)`, `a(n)` and `a(n)/(n+1)` agree.
pub fn termwise_radius_invariance(a: &Expr) -> Result<bool, PowerSeriesError> {
    let var = var_of(a);
    let n = Expr::sym(&var);
    let base = radius(a)?;
    let diff = radius(&(n.clone() * a.clone()))?;
    let int = radius(&(a.clone() / (n + Expr::one())))?;
    Ok(base == diff && base == int)
}

//! Truncated asymptotic series in log-monomials.
//!
//! A monomial is `n^e0 (ln n)^e1 (ln_2 n)^e2 ...` with rational exponents;
//! these are totally ordered by growth (lexicographic on the exponent
//! vector). A [`Series`] is a finite sum of such monomials with index-free
//! coefficients, listed from the largest down, plus an optional `O(m)`
//! remainder.

use crate::expr::{Expr, Q};
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Exponent vector of a log-monomial; index 0 is `n`, index `k` is `ln_k n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Mono(Vec<Q>);

impl Mono {
    pub fn one() -> Mono {
        Mono(Vec::new())
    }

    pub fn from_exps(v: Vec<Q>) -> Mono {
        let mut m = Mono(v);
        m.trim();
        m
    }

    /// `(ln_k n)^e`, with `ln_0 n = n`.
    pub fn unit(k: usize, e: Q) -> Mono {
        let mut v = vec![Q::zero(); k + 1];
        v[k] = e;
        Mono::from_exps(v)
    }

    pub fn n_pow(e: Q) -> Mono {
        Mono::unit(0, e)
    }

    /// `ln_k n` itself.
    pub fn log(k: usize) -> Mono {
        Mono::unit(k, Q::one())
    }

    /// `1/L_w = 1/(n ln n ... ln_w n)`.
    pub fn inv_log_product(w: usize) -> Mono {
        Mono::from_exps(vec![-Q::one(); w + 1])
    }

    fn trim(&mut self) {
        while self.0.last().map(|x| x.is_zero()).unwrap_or(false) {
            self.0.pop();
        }
    }

    pub fn exps(&self) -> &[Q] {
        &self.0
    }

    pub fn exp_at(&self, k: usize) -> Q {
        self.0.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        let len = self.0.len().max(o.0.len());
        Mono::from_exps((0..len).map(|i| self.exp_at(i) + o.exp_at(i)).collect())
    }

    pub fn pow(&self, q: &Q) -> Mono {
        Mono::from_exps(self.0.iter().map(|e| e * q).collect())
    }

    pub fn inv(&self) -> Mono {
        self.pow(&-Q::one())
    }

    pub fn div(&self, o: &Mono) -> Mono {
        self.mul(&o.inv())
    }

    /// Tends to infinity.
    pub fn is_growing(&self) -> bool {
        *self > Mono::one()
    }

    /// Tends to zero.
    pub fn is_decaying(&self) -> bool {
        *self < Mono::one()
    }

    /// `Some(k)` when this is exactly `ln_k n` with `k >= 1`, whose
    /// exponential is again a monomial.
    pub fn as_log_level(&self) -> Option<usize> {
        let k = self.0.len().checked_sub(1)?;
        if k >= 1 && self.0[k].is_one() && self.0[..k].iter().all(|e| e.is_zero()) {
            Some(k)
        } else {
            None
        }
    }

    pub fn to_expr(&self, var: &str) -> Expr {
        let n = Expr::sym(var);
        Expr::mul(
            self.0
                .iter()
                .enumerate()
                .filter(|(_, e)| !e.is_zero())
                .map(|(k, e)| Expr::powq(Expr::lnk(k as u32, n.clone()), e.clone()))
                .collect(),
        )
    }
}

impl Ord for Mono {
    fn cmp(&self, o: &Mono) -> Ordering {
        let len = self.0.len().max(o.0.len());
        for i in 0..len {
            match self.exp_at(i).cmp(&o.exp_at(i)) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, o: &Mono) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr("n"))
    }
}

/// Truncation settings shared by one expansion.
#[derive(Clone, Debug)]
pub struct Ctx {
    pub var: String,
    /// Relative truncation order: expansions stop below `n^-order`.
    pub order: i64,
    pub max_terms: usize,
    /// Deepest admissible `ln_k`.
    pub max_log_depth: usize,
}

impl Ctx {
    pub fn new(var: &str) -> Ctx {
        Ctx {
            var: var.to_string(),
            order: 4,
            max_terms: 24,
            max_log_depth: 10,
        }
    }

    pub fn with_order(&self, order: i64) -> Ctx {
        Ctx {
            order,
            max_terms: self.max_terms.max(order as usize * 6),
            ..self.clone()
        }
    }

    pub fn floor(&self) -> Mono {
        Mono::n_pow(Q::from_integer((-self.order).into()))
    }
}

/// Coefficient expression size past which a term is folded into the remainder.
const MAX_COEF_SIZE: usize = 160;

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    /// Strictly decreasing monomials with nonzero coefficients.
    pub terms: Vec<(Mono, Expr)>,
    /// `O(err)` remainder; every listed term is strictly above it.
    pub err: Option<Mono>,
}

/// Leading behaviour of a series.
#[derive(Clone, Debug, PartialEq)]
pub enum Lead<'a> {
    /// Exactly zero.
    Zero,
    /// Only a remainder is known.
    Unknown(&'a Mono),
    Term(&'a Mono, &'a Expr),
}

impl Series {
    pub fn zero() -> Series {
        Series {
            terms: Vec::new(),
            err: None,
        }
    }

    pub fn constant(c: Expr) -> Series {
        Series::term(Mono::one(), c)
    }

    pub fn term(m: Mono, c: Expr) -> Series {
        Series::from_parts(vec![(m, c)], None, usize::MAX)
    }

    pub fn big_o(m: Mono) -> Series {
        Series {
            terms: Vec::new(),
            err: Some(m),
        }
    }

    pub fn from_parts(terms: Vec<(Mono, Expr)>, err: Option<Mono>, max_terms: usize) -> Series {
        let mut s = Series { terms, err };
        s.tidy(max_terms);
        s
    }

    fn tidy(&mut self, max_terms: usize) {
        self.terms.sort_by(|a, b| b.0.cmp(&a.0));
        let mut merged: Vec<(Mono, Expr)> = Vec::with_capacity(self.terms.len());
        for (m, c) in self.terms.drain(..) {
            match merged.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = Expr::add(vec![lc.clone(), c]),
                _ => merged.push((m, c)),
            }
        }
        merged.retain(|(m, c)| !c.is_zero() && self.err.as_ref().map(|e| m > e).unwrap_or(true));
        // Coefficients that have grown too large become part of the remainder.
        if let Some(i) = merged.iter().position(|(_, c)| c.size() > MAX_COEF_SIZE) {
            let cut = merged[i].0.clone();
            merged.truncate(i);
            if self.err.as_ref().map(|e| cut > *e).unwrap_or(true) {
                self.err = Some(cut);
            }
        }
        merged.retain(|(_, c)| !numerically_zero(c));
        if merged.len() > max_terms {
            let cut = merged[max_terms].0.clone();
            merged.truncate(max_terms);
            self.err = Some(match self.err.take() {
                Some(e) if e > cut => e,
                _ => cut,
            });
        }
        self.terms = merged;
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.err.is_none()
    }

    pub fn lead(&self) -> Lead<'_> {
        match (self.terms.first(), &self.err) {
            (Some((m, c)), _) => Lead::Term(m, c),
            (None, Some(e)) => Lead::Unknown(e),
            (None, None) => Lead::Zero,
        }
    }

    /// Largest monomial that is either a term or the remainder.
    pub fn top(&self) -> Option<&Mono> {
        match self.lead() {
            Lead::Term(m, _) => Some(m),
            Lead::Unknown(m) => Some(m),
            Lead::Zero => None,
        }
    }

    pub fn add(&self, o: &Series, ctx: &Ctx) -> Series {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        Series::from_parts(terms, max_err(&self.err, &o.err), ctx.max_terms)
    }

    pub fn neg(&self) -> Series {
        Series {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), Expr::neg(c.clone())))
                .collect(),
            err: self.err.clone(),
        }
    }

    pub fn sub(&self, o: &Series, ctx: &Ctx) -> Series {
        self.add(&o.neg(), ctx)
    }

    pub fn scale(&self, c: &Expr) -> Series {
        if c.is_zero() {
            return Series::zero();
        }
        Series::from_parts(
            self.terms
                .iter()
                .map(|(m, x)| (m.clone(), Expr::mul(vec![x.clone(), c.clone()])))
                .collect(),
            self.err.clone(),
            usize::MAX,
        )
    }

    pub fn mul_mono(&self, m: &Mono) -> Series {
        Series {
            terms: self.terms.iter().map(|(t, c)| (t.mul(m), c.clone())).collect(),
            err: self.err.as_ref().map(|e| e.mul(m)),
        }
    }

    pub fn mul(&self, o: &Series, ctx: &Ctx) -> Series {
        let mut terms = Vec::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                terms.push((m1.mul(m2), Expr::mul(vec![c1.clone(), c2.clone()])));
            }
        }
        let mut err: Option<Mono> = None;
        let bump = |err: &mut Option<Mono>, m: Mono| {
            if err.as_ref().map(|e| m > *e).unwrap_or(true) {
                *err = Some(m);
            }
        };
        if let Some(e1) = &self.err {
            if let Some(t) = o.top() {
                bump(&mut err, e1.mul(t));
            }
        }
        if let Some(e2) = &o.err {
            if let Some(t) = self.top() {
                bump(&mut err, e2.mul(t));
            }
        }
        Series::from_parts(terms, err, ctx.max_terms)
    }

    /// Drops everything below `floor`, recording it as the remainder.
    pub fn truncate_below(&self, floor: &Mono) -> Series {
        if self.terms.iter().all(|(m, _)| m > floor) {
            return self.clone();
        }
        let terms = self.terms.iter().filter(|(m, _)| m > floor).cloned().collect();
        let err = max_err(&self.err, &Some(floor.clone()));
        Series { terms, err }
    }

    /// Coefficient of the constant monomial, if it is determined.
    pub fn constant_term(&self) -> Option<Expr> {
        if self.err.as_ref().map(|e| *e >= Mono::one()).unwrap_or(false) {
            return None;
        }
        Some(
            self.terms
                .iter()
                .find(|(m, _)| m.is_one())
                .map(|(_, c)| c.clone())
                .unwrap_or_else(Expr::zero),
        )
    }

    /// Splits into (growing part, constant, decaying part).
    pub fn split(&self) -> (Series, Option<Expr>, Series) {
        let growing = Series {
            terms: self.terms.iter().filter(|(m, _)| m.is_growing()).cloned().collect(),
            err: self.err.clone().filter(|e| e.is_growing()),
        };
        let small = Series {
            terms: self.terms.iter().filter(|(m, _)| m.is_decaying()).cloned().collect(),
            err: self.err.clone().filter(|e| e.is_decaying()),
        };
        (growing, self.constant_term(), small)
    }

    /// Terms whose monomial is at least `m`.
    pub fn above(&self, m: &Mono) -> Vec<(Mono, Expr)> {
        self.terms.iter().filter(|(t, _)| t >= m).cloned().collect()
    }

    pub fn to_expr(&self, var: &str) -> Expr {
        Expr::add(
            self.terms
                .iter()
                .map(|(m, c)| Expr::mul(vec![c.clone(), m.to_expr(var)]))
                .collect(),
        )
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() && self.err.is_none() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if m.is_one() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "({c})*{m}")?;
            }
        }
        if let Some(e) = &self.err {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "O({e})")?;
        }
        Ok(())
    }
}

fn max_err(a: &Option<Mono>, b: &Option<Mono>) -> Option<Mono> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if x >= y { x.clone() } else { y.clone() }),
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (None, None) => None,
    }
}

/// Symbolic constants that simplify to zero only numerically, e.g.
/// `ln(6) - ln(2) - ln(3)` in a non-canonical arrangement.
fn numerically_zero(c: &Expr) -> bool {
    if c.is_num() || !c.free_symbols().is_empty() {
        return false;
    }
    matches!(crate::asymptotics::coef_sign(c), Some(0))
}

/// `sum_j a_j u^j` for a decaying `u`, truncated at relative order
/// `ctx.order` and at most `max_j` powers.
pub fn compose_small<F>(u: &Series, coeff: F, ctx: &Ctx, max_j: usize) -> Series
where
    F: Fn(usize) -> Expr,
{
    let floor = ctx.floor();
    let mut acc = Series::constant(coeff(0));
    if u.is_exact_zero() {
        return acc;
    }
    let lead_u = u.top().cloned().unwrap_or_else(Mono::one);
    let mut power = Series::constant(Expr::one());
    let mut j = 0usize;
    loop {
        j += 1;
        let next_mono = lead_u.pow(&Q::from_integer((j as i64).into()));
        if next_mono <= floor || j > max_j {
            // Everything from u^j on is O(lead_u^j).
            let tail = if next_mono > floor { next_mono } else { floor.clone() };
            acc = acc.add(&Series::big_o(tail), ctx);
            break;
        }
        power = power.mul(u, ctx).truncate_below(&floor);
        let c = coeff(j);
        if !c.is_zero() {
            acc = acc.add(&power.scale(&c), ctx);
        }
    }
    acc
}

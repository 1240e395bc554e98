//! Term expressions in one index variable.
//!
//! `Expr` values are kept in a canonical form: every constructor in this
//! module normalizes its result, so structural equality is meaningful.
//! Subtraction, division, negation and square roots have no node of their
//! own; they lower to `Add`, `Mul` and `Pow`:
//!
//! * `a - b`   becomes `Add[a, Mul[-1, b]]`
//! * `a / b`   becomes `Mul[a, Pow(b, -1)]`
//! * `-a`      becomes `Mul[-1, a]`
//! * `sqrt(a)` becomes `Pow(a, 1/2)`
//!
//! Associative chains are flattened and sorted, like terms and like bases
//! are merged, and `(-1)^k` is stored as [`Expr::AltSign`].

mod diff;
mod display;
mod eval;
mod normalize;
mod parse;

pub use diff::{derivative, DiffError};
pub use eval::{eval_log, eval_real, ln_factorial, BigValue, EvalError, Evaluator, Point};
pub use parse::{parse, parse_with, ParseError, ParseOptions};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constant {
    E,
    Pi,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    /// Exact rational literal (integers included).
    Num(Q),
    Const(Constant),
    /// The index variable or a bound parameter such as a power-series `x`.
    Sym(String),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    /// `k` nested natural logarithms, `k >= 1`.
    Ln(u32, Box<Expr>),
    Abs(Box<Expr>),
    Factorial(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    /// `(-1)^arg` for integer-valued `arg`.
    AltSign(Box<Expr>),
    /// `binom(arg, k)` with a literal `k`.
    Binom(Box<Expr>, u32),
}

impl Expr {
    pub fn num(v: Q) -> Expr {
        Expr::Num(v)
    }

    pub fn int(v: i64) -> Expr {
        Expr::Num(q(v))
    }

    pub fn rational(n: i64, d: i64) -> Expr {
        Expr::Num(qr(n, d))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn sym(name: &str) -> Expr {
        Expr::Sym(name.to_string())
    }

    pub fn e() -> Expr {
        Expr::exp(Expr::one())
    }

    pub fn pi() -> Expr {
        Expr::Const(Constant::Pi)
    }

    pub fn add(terms: Vec<Expr>) -> Expr {
        normalize::add(terms)
    }

    pub fn mul(factors: Vec<Expr>) -> Expr {
        normalize::mul(factors)
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::add(vec![a, Expr::neg(b)])
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::mul(vec![Expr::int(-1), a])
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::mul(vec![a, Expr::pow(b, Expr::int(-1))])
    }

    pub fn recip(a: Expr) -> Expr {
        Expr::pow(a, Expr::int(-1))
    }

    pub fn pow(base: Expr, exponent: Expr) -> Expr {
        normalize::pow(base, exponent)
    }

    pub fn powq(base: Expr, exponent: Q) -> Expr {
        normalize::pow(base, Expr::Num(exponent))
    }

    pub fn powi(base: Expr, exponent: i64) -> Expr {
        normalize::pow(base, Expr::int(exponent))
    }

    pub fn sqrt(a: Expr) -> Expr {
        Expr::pow(a, Expr::rational(1, 2))
    }

    pub fn exp(a: Expr) -> Expr {
        normalize::exp(a)
    }

    pub fn ln(a: Expr) -> Expr {
        normalize::ln(1, a)
    }

    pub fn lnk(k: u32, a: Expr) -> Expr {
        if k == 0 {
            a
        } else {
            normalize::ln(k, a)
        }
    }

    pub fn abs(a: Expr) -> Expr {
        normalize::abs(a)
    }

    pub fn factorial(a: Expr) -> Expr {
        normalize::factorial(a)
    }

    pub fn sin(a: Expr) -> Expr {
        normalize::sin(a)
    }

    pub fn cos(a: Expr) -> Expr {
        normalize::cos(a)
    }

    pub fn alt_sign(a: Expr) -> Expr {
        normalize::alt_sign(a)
    }

    pub fn binom(a: Expr, k: u32) -> Expr {
        normalize::binom(a, k)
    }

    /// `L_w = n * ln n * ... * ln_w n`; `L_{-1}` is 1.
    pub fn log_product(var: &str, w: i64) -> Expr {
        let n = Expr::sym(var);
        Expr::mul((0..=w).map(|k| Expr::lnk(k as u32, n.clone())).collect())
    }

    /// Rebuilds the tree through the canonicalizing constructors.
    pub fn normalize(&self) -> Expr {
        self.map_children(|c| c.normalize())
    }

    /// Capture-free substitution of `var` by `replacement`, renormalized.
    pub fn substitute(&self, var: &str, replacement: &Expr) -> Expr {
        match self {
            Expr::Sym(s) if s == var => replacement.clone(),
            _ => self.map_children(|c| c.substitute(var, replacement)),
        }
    }

    /// Applies `f` to every direct child and rebuilds with the smart constructors.
    pub fn map_children<F: FnMut(&Expr) -> Expr>(&self, mut f: F) -> Expr {
        match self {
            Expr::Num(_) | Expr::Sym(_) => self.clone(),
            Expr::Const(Constant::E) => Expr::e(),
            Expr::Const(_) => self.clone(),
            Expr::Add(ts) => Expr::add(ts.iter().map(f).collect()),
            Expr::Mul(fs) => Expr::mul(fs.iter().map(f).collect()),
            Expr::Pow(b, e) => Expr::pow(f(b), f(e)),
            Expr::Exp(a) => Expr::exp(f(a)),
            Expr::Ln(k, a) => Expr::lnk(*k, f(a)),
            Expr::Abs(a) => Expr::abs(f(a)),
            Expr::Factorial(a) => Expr::factorial(f(a)),
            Expr::Sin(a) => Expr::sin(f(a)),
            Expr::Cos(a) => Expr::cos(f(a)),
            Expr::AltSign(a) => Expr::alt_sign(f(a)),
            Expr::Binom(a, k) => Expr::binom(f(a), *k),
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Num(_) | Expr::Sym(_) | Expr::Const(_) => vec![],
            Expr::Add(v) | Expr::Mul(v) => v.iter().collect(),
            Expr::Pow(b, e) => vec![b, e],
            Expr::Exp(a)
            | Expr::Ln(_, a)
            | Expr::Abs(a)
            | Expr::Factorial(a)
            | Expr::Sin(a)
            | Expr::Cos(a)
            | Expr::AltSign(a)
            | Expr::Binom(a, _) => vec![a],
        }
    }

    pub fn free_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        if let Expr::Sym(s) = self {
            out.insert(s.clone());
        }
        for c in self.children() {
            c.collect_symbols(out);
        }
    }

    pub fn contains_sym(&self, var: &str) -> bool {
        match self {
            Expr::Sym(s) => s == var,
            _ => self.children().iter().any(|c| c.contains_sym(var)),
        }
    }

    /// The index variable: the single free symbol, or `n` when there is none.
    pub fn index_var(&self) -> Option<String> {
        let syms = self.free_symbols();
        match syms.len() {
            0 => Some("n".to_string()),
            1 => syms.into_iter().next(),
            _ => None,
        }
    }

    pub fn contains(&self, pred: &dyn Fn(&Expr) -> bool) -> bool {
        pred(self) || self.children().iter().any(|c| c.contains(pred))
    }

    pub fn has_alt_sign(&self) -> bool {
        self.contains(&|e| matches!(e, Expr::AltSign(_)))
    }

    pub fn as_num(&self) -> Option<&Q> {
        match self {
            Expr::Num(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(v) if v.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Num(v) if v.is_one())
    }

    pub fn is_num(&self) -> bool {
        matches!(self, Expr::Num(_))
    }

    /// Splits off the rational coefficient: `3*n^2` gives `(3, n^2)`.
    pub fn coeff_and_rest(&self) -> (Q, Expr) {
        match self {
            Expr::Num(v) => (v.clone(), Expr::one()),
            Expr::Mul(fs) => match fs.first() {
                Some(Expr::Num(c)) => (c.clone(), Expr::mul(fs[1..].to_vec())),
                _ => (Q::one(), self.clone()),
            },
            _ => (Q::one(), self.clone()),
        }
    }

    /// Factors of a product (a non-product is its own single factor).
    pub fn factors(&self) -> Vec<Expr> {
        match self {
            Expr::Mul(fs) => fs.clone(),
            _ => vec![self.clone()],
        }
    }

    pub fn terms(&self) -> Vec<Expr> {
        match self {
            Expr::Add(ts) => ts.clone(),
            _ => vec![self.clone()],
        }
    }

    /// True when a leading rational coefficient is negative.
    pub fn has_negative_coeff(&self) -> bool {
        self.coeff_and_rest().0.is_negative()
    }

    /// Syntactic positivity for all admissible values of the symbols
    /// (symbols are taken to be positive).
    pub fn is_structurally_positive(&self) -> bool {
        match self {
            Expr::Num(v) => v.is_positive(),
            Expr::Const(_) | Expr::Sym(_) | Expr::Exp(_) | Expr::Factorial(_) => true,
            Expr::Pow(b, _) => b.is_structurally_positive(),
            Expr::Mul(fs) => fs.iter().all(|f| f.is_structurally_positive()),
            Expr::Add(ts) => ts.iter().all(|t| t.is_structurally_positive()),
            _ => false,
        }
    }

    /// Integer-valued whenever `var` takes integer values.
    pub fn is_integer_shaped(&self, var: &str) -> bool {
        match self {
            Expr::Num(v) => v.is_integer(),
            Expr::Sym(s) => s == var,
            Expr::Add(v) | Expr::Mul(v) => v.iter().all(|x| x.is_integer_shaped(var)),
            Expr::Pow(b, e) => {
                b.is_integer_shaped(var) && matches!(&**e, Expr::Num(k) if k.is_integer() && !k.is_negative())
            }
            Expr::Factorial(_) | Expr::Binom(_, _) | Expr::AltSign(_) => true,
            Expr::Abs(a) => a.is_integer_shaped(var),
            _ => false,
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }
}

impl From<i64> for Expr {
    fn from(v: i64) -> Self {
        Expr::int(v)
    }
}

impl From<Q> for Expr {
    fn from(v: Q) -> Self {
        Expr::Num(v)
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add(vec![self, rhs])
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul(vec![self, rhs])
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::div(self, rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn lowering_of_sub_div_neg() {
        let n = Expr::sym("n");
        assert_eq!(p("n - 1"), Expr::Add(vec![Expr::int(-1), n.clone()]));
        assert_eq!(p("1/n^2"), Expr::Pow(Box::new(n.clone()), Box::new(Expr::int(-2))));
        assert_eq!(p("-n"), Expr::Mul(vec![Expr::int(-1), n.clone()]));
        assert_eq!(p("sqrt(n)"), Expr::Pow(Box::new(n), Box::new(Expr::rational(1, 2))));
    }

    #[test]
    fn like_terms_and_bases_merge() {
        assert_eq!(p("n + n + 2*n"), p("4*n"));
        assert_eq!(p("n*n^2/n^3"), Expr::one());
        assert_eq!(p("ln(n) - ln(n)"), Expr::zero());
        assert_eq!(p("2*(n+1)"), p("2*n + 2"));
    }

    #[test]
    fn substitution_examples() {
        let two_n = p("2^n");
        assert_eq!(p("1/n").substitute("n", &two_n), p("1/2^n"));
        let s = p("1/(n*ln(n))").substitute("n", &two_n);
        assert_eq!(s, p("1/(2^n*n*ln(2))"));
        let a = p("n!/(2*n)!");
        assert_eq!(a.substitute("n", &Expr::sym("n")), a);
    }

    #[test]
    fn log_product_shapes() {
        assert_eq!(Expr::log_product("n", -1), Expr::one());
        assert_eq!(Expr::log_product("n", 0), Expr::sym("n"));
        assert_eq!(Expr::log_product("n", 1), p("n*ln(n)"));
    }
}

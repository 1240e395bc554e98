//! Printing in the input grammar, so `parse(&e.to_string()) == e`.

use super::{Constant, Expr, Q};
use num_traits::{One, Signed};
use std::fmt;

/// Binding strength of the printed form, loosest first.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Sum,
    Product,
    Unary,
    Power,
    Atom,
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self).0)
    }
}

fn wrap(s: (String, Prec), at_least: Prec) -> String {
    if s.1 >= at_least {
        s.0
    } else {
        format!("({})", s.0)
    }
}

fn render(e: &Expr) -> (String, Prec) {
    match e {
        Expr::Num(v) => render_num(v),
        Expr::Const(Constant::Pi) => ("pi".into(), Prec::Atom),
        Expr::Const(Constant::E) => ("e".into(), Prec::Atom),
        Expr::Sym(s) => (s.clone(), Prec::Atom),
        Expr::Add(ts) => render_sum(ts),
        Expr::Mul(_) | Expr::Pow(..) => render_product(e),
        Expr::Exp(a) if a.is_one() => ("e".into(), Prec::Atom),
        Expr::Exp(a) => (format!("exp({})", render(a).0), Prec::Atom),
        Expr::Ln(1, a) => (format!("ln({})", render(a).0), Prec::Atom),
        Expr::Ln(k, a) => (format!("lnk({k}, {})", render(a).0), Prec::Atom),
        Expr::Abs(a) => (format!("abs({})", render(a).0), Prec::Atom),
        Expr::Sin(a) => (format!("sin({})", render(a).0), Prec::Atom),
        Expr::Cos(a) => (format!("cos({})", render(a).0), Prec::Atom),
        Expr::Binom(a, k) => (format!("binom({}, {k})", render(a).0), Prec::Atom),
        // `n!` is a postfix form; wrapping everything else keeps `(2*n)!` intact.
        Expr::Factorial(a) => (format!("{}!", wrap(render(a), Prec::Atom)), Prec::Power),
        Expr::AltSign(a) => (format!("(-1)^{}", wrap(render(a), Prec::Atom)), Prec::Power),
    }
}

fn render_num(v: &Q) -> (String, Prec) {
    if v.is_integer() {
        let s = v.numer().to_string();
        if v.is_negative() {
            (s, Prec::Unary)
        } else {
            (s, Prec::Atom)
        }
    } else {
        (format!("{}/{}", v.numer(), v.denom()), Prec::Product)
    }
}

fn render_sum(ts: &[Expr]) -> (String, Prec) {
    let mut out = String::new();
    // Highest-order terms first reads naturally: `n^2 + 3*n + 1`.
    for (i, t) in ts.iter().rev().enumerate() {
        let (c, _) = t.coeff_and_rest();
        if i == 0 {
            out.push_str(&render(t).0);
        } else if c.is_negative() {
            out.push_str(" - ");
            out.push_str(&wrap(render(&Expr::neg(t.clone())), Prec::Product));
        } else {
            out.push_str(" + ");
            out.push_str(&wrap(render(t), Prec::Product));
        }
    }
    (out, Prec::Sum)
}

fn render_product(e: &Expr) -> (String, Prec) {
    let mut coeff = Q::one();
    let mut num: Vec<Expr> = Vec::new();
    let mut den: Vec<Expr> = Vec::new();
    for f in e.factors() {
        match f {
            Expr::Num(v) => coeff *= v,
            Expr::Pow(b, x) if x.has_negative_coeff() => {
                // `0^(-1/2)` would collapse to `1/0` once inverted.
                let d = Expr::pow((*b).clone(), Expr::neg((*x).clone()));
                if d.is_num() {
                    num.push(Expr::Pow(b, x));
                } else {
                    den.push(d);
                }
            }
            other => num.push(other),
        }
    }
    let negative = coeff.is_negative();
    let coeff = coeff.abs();
    let mut top: Vec<String> = Vec::new();
    if !coeff.numer().is_one() || num.is_empty() {
        top.push(coeff.numer().to_string());
    }
    // Alternating signs read best in front.
    num.sort_by_key(|f| !matches!(f, Expr::AltSign(_)));
    for f in &num {
        top.push(wrap(render_factor(f), Prec::Power));
    }
    let mut bottom: Vec<String> = Vec::new();
    if !coeff.denom().is_one() {
        bottom.push(coeff.denom().to_string());
    }
    for f in &den {
        bottom.push(wrap(render_factor(f), Prec::Power));
    }
    if negative && top[0].starts_with('(') {
        // A leading `-` binds to the first factor and would distribute over a sum.
        match top.iter().position(|t| !t.starts_with('(')) {
            Some(i) => {
                let t = top.remove(i);
                top.insert(0, t);
            }
            None => top.insert(0, "1".into()),
        }
    }
    let mut s = top.join("*");
    if !bottom.is_empty() {
        s.push('/');
        if bottom.len() == 1 {
            s.push_str(&bottom[0]);
        } else if bottom.len() == 2 && !coeff.denom().is_one() && matches!(den[0], Expr::Add(_)) {
            // `2*(n + 1)` would parse back as the sum `2*n + 2`.
            s.push_str(&format!("{}/{}", bottom[0], bottom[1]));
        } else {
            s.push_str(&format!("({})", bottom.join("*")));
        }
    }
    let single = top.len() == 1 && bottom.is_empty();
    if negative {
        let prec = if single { Prec::Unary } else { Prec::Product };
        return (format!("-{s}"), prec);
    }
    if single {
        let r = render_factor(&num.first().cloned().unwrap_or(Expr::Num(coeff)));
        return r;
    }
    (s, Prec::Product)
}

/// A single factor with a non-negative exponent.
fn render_factor(f: &Expr) -> (String, Prec) {
    match f {
        Expr::Pow(b, x) => {
            if let Expr::Num(v) = &**x {
                if *v == super::qr(1, 2) {
                    return (format!("sqrt({})", render(b).0), Prec::Atom);
                }
            }
            let base = wrap(render(b), Prec::Atom);
            let exp = match &**x {
                Expr::Num(v) if v.is_integer() && !v.is_negative() => v.numer().to_string(),
                Expr::Sym(s) => s.clone(),
                other => format!("({})", render(other).0),
            };
            (format!("{base}^{exp}"), Prec::Power)
        }
        Expr::Mul(_) => render_product(f),
        other => render(other),
    }
}

impl serde::Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;

    fn round(s: &str) -> String {
        parse(s).unwrap().to_string()
    }

    #[test]
    fn readable_output() {
        assert_eq!(round("1/n^2"), "1/n^2");
        assert_eq!(round("n^2 - 3*n"), "n^2 - 3*n");
        assert_eq!(round("(-1)^n/n"), "(-1)^n/n");
        assert_eq!(round("n!/(2*n)!"), "n!/(2*n)!");
        assert_eq!(round("1/(n*ln(n))"), "1/(n*ln(n))");
        assert_eq!(round("lnk(2, n)"), "lnk(2, n)");
        assert_eq!(round("sqrt(n)"), "sqrt(n)");
        assert_eq!(round("exp(-n)"), "exp(-n)");
        assert_eq!(round("e"), "e");
        assert_eq!(round("-n"), "-n");
        assert_eq!(round("3/4"), "3/4");
    }

    #[test]
    fn round_trips() {
        for s in [
            "1/n^2",
            "(3+sin(n))/n^2",
            "n!/(2*n)!",
            "(4*n)!*(1103+26390*n)/((n!)^4*396^(4*n))",
            "(-1)^n/(sqrt(n)-(-1)^n)",
            "1/2^sqrt(n)",
            "3^sqrt(n)/n",
            "(1+1/n)^(n^2)",
            "n^(-3/2) - 2/n",
            "-(n+1)/(n-1)",
            "binom(n, 2)*x^n",
            "abs(sin(1/n))/n",
            "exp(-n^2)*n",
            "1/sqrt(3)",
            "(-2)^n/n",
            "pi*e^2",
            "-1/2",
            "(n!)^2",
        ] {
            let opts = super::super::ParseOptions {
                var: Some("n".into()),
                params: vec!["x".into()],
            };
            let e = super::super::parse_with(s, &opts).unwrap();
            let back = super::super::parse_with(&e.to_string(), &opts).unwrap();
            assert_eq!(back, e, "{s} printed as {e}");
        }
    }
}

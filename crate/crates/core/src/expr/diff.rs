//! Symbolic derivative with respect to the index variable.

use super::Expr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiffError {
    #[error("expression is constant in `{0}`")]
    ConstantSequence(String),
    #[error("no derivative rule for {0}")]
    Unsupported(String),
}

/// `d e / d var`. Errors when the result is identically zero.
pub fn derivative(e: &Expr, var: &str) -> Result<Expr, DiffError> {
    let d = d(e, var)?;
    if d.is_zero() {
        return Err(DiffError::ConstantSequence(var.to_string()));
    }
    Ok(d)
}

fn d(e: &Expr, var: &str) -> Result<Expr, DiffError> {
    if !e.contains_sym(var) {
        return Ok(Expr::zero());
    }
    Ok(match e {
        Expr::Sym(_) => Expr::one(),
        Expr::Add(ts) => Expr::add(ts.iter().map(|t| d(t, var)).collect::<Result<_, _>>()?),
        Expr::Mul(fs) => {
            let mut terms = Vec::new();
            for i in 0..fs.len() {
                let di = d(&fs[i], var)?;
                if di.is_zero() {
                    continue;
                }
                let mut parts = fs.clone();
                parts[i] = di;
                terms.push(Expr::mul(parts));
            }
            Expr::add(terms)
        }
        Expr::Pow(b, x) => {
            let (b, x) = ((**b).clone(), (**x).clone());
            if !x.contains_sym(var) {
                Expr::mul(vec![x.clone(), Expr::pow(b.clone(), x - Expr::one()), d(&b, var)?])
            } else if !b.contains_sym(var) {
                Expr::mul(vec![Expr::ln(b.clone()), Expr::pow(b, x.clone()), d(&x, var)?])
            } else {
                let inner = Expr::mul(vec![d(&x, var)?, Expr::ln(b.clone())])
                    + Expr::mul(vec![x.clone(), d(&b, var)?, Expr::recip(b.clone())]);
                Expr::mul(vec![Expr::pow(b, x), inner])
            }
        }
        Expr::Exp(a) => Expr::mul(vec![Expr::exp((**a).clone()), d(a, var)?]),
        Expr::Ln(k, a) => {
            // (ln_k a)' = a' / (a * ln a * ... * ln_{k-1} a)
            let mut fs = vec![d(a, var)?];
            for j in 0..*k {
                fs.push(Expr::recip(Expr::lnk(j, (**a).clone())));
            }
            Expr::mul(fs)
        }
        Expr::Abs(a) => Expr::mul(vec![d(a, var)?, (**a).clone(), Expr::recip(e.clone())]),
        Expr::Sin(a) => Expr::mul(vec![Expr::cos((**a).clone()), d(a, var)?]),
        Expr::Cos(a) => Expr::mul(vec![Expr::int(-1), Expr::sin((**a).clone()), d(a, var)?]),
        Expr::Binom(a, k) => {
            let mut fs = vec![Expr::Num(super::Q::new(1.into(), factorial_u32(*k)))];
            for j in 0..*k {
                fs.push((**a).clone() - Expr::int(j as i64));
            }
            d(&Expr::mul(fs), var)?
        }
        Expr::Factorial(_) | Expr::AltSign(_) => {
            return Err(DiffError::Unsupported(e.to_string()));
        }
        Expr::Num(_) | Expr::Const(_) => Expr::zero(),
    })
}

fn factorial_u32(k: u32) -> num_bigint::BigInt {
    (1..=k as u64).fold(num_bigint::BigInt::from(1), |acc, i| acc * i)
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn dd(s: &str) -> Expr {
        derivative(&parse(s).unwrap(), "n").unwrap()
    }

    #[test]
    fn textbook_rules() {
        assert_eq!(dd("n^2"), parse("2*n").unwrap());
        assert_eq!(dd("sqrt(2*n)"), parse("1/sqrt(2*n)").unwrap());
        assert_eq!(dd("lnk(3, n)"), parse("1/(n*ln(n)*lnk(2, n))").unwrap());
        assert_eq!(dd("exp(n^2)"), parse("2*n*exp(n^2)").unwrap());
        assert_eq!(dd("2^n"), parse("ln(2)*2^n").unwrap());
    }

    #[test]
    fn constants_are_rejected() {
        assert!(matches!(
            derivative(&parse("7").unwrap(), "n"),
            Err(DiffError::ConstantSequence(_))
        ));
        assert!(matches!(
            derivative(&parse("n!").unwrap(), "n"),
            Err(DiffError::Unsupported(_))
        ));
    }
}

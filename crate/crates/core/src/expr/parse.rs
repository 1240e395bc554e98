//! Recursive-descent parser for term expressions.
//!
//! ```text
//! expr    := term (("+"|"-") term)* ;
//! term    := unary (("*"|"/") unary)* ;
//! unary   := "-" unary | postfix ;
//! postfix := atom ("!" | "^" unary)* ;
//! atom    := NUMBER | "e" | "pi" | IDENT | "(" expr ")" | FUNC "(" expr ("," expr)* ")" ;
//! ```

use super::{Expr, Q};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

const FUNCS: &[&str] = &["ln", "lnk", "exp", "sqrt", "abs", "sin", "cos", "binom"];
/// Literal exponents beyond this are rejected instead of folded.
const MAX_LN_DEPTH: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: found {found}, expected {}", .expected.join(" or "))]
    Syntax {
        position: usize,
        found: String,
        expected: Vec<String>,
    },
    #[error("unknown identifier `{name}` at position {position} (index variable is `{var}`)")]
    UnknownIdentifier { position: usize, name: String, var: String },
    #[error("factorial of a non-integer-valued argument at position {position}")]
    NonIntegerFactorial { position: usize },
    #[error("`{func}` at position {position} takes {expected}")]
    Arity {
        position: usize,
        func: String,
        expected: String,
    },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. }
            | ParseError::UnknownIdentifier { position, .. }
            | ParseError::NonIntegerFactorial { position }
            | ParseError::Arity { position, .. } => *position,
        }
    }
}

/// Controls which identifiers are accepted.
///
/// With `var: None` the index variable is inferred from the first free
/// identifier in the text (or `n` when there is none).
#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    pub var: Option<String>,
    /// Extra bound symbols, e.g. the `x` of a power series.
    pub params: Vec<String>,
}

impl ParseOptions {
    pub fn with_var(var: &str) -> Self {
        ParseOptions {
            var: Some(var.to_string()),
            params: Vec::new(),
        }
    }
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    parse_with(text, &ParseOptions::default())
}

pub fn parse_with(text: &str, opts: &ParseOptions) -> Result<Expr, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        var: opts.var.clone(),
        params: opts.params.clone(),
    };
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        _ => Err(p.unexpected(&["operator", "end of input"])),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(v) => format!("number `{v}`"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::End => "end of input".to_string(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (at, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|(_, c)| c).collect();
            out.push((Tok::Int(s.parse().unwrap()), at));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|(_, c)| c).collect();
            out.push((Tok::Ident(s), at));
        } else if "+-*/^!(),".contains(c) {
            out.push((Tok::Op(c), at));
            i += 1;
        } else {
            return Err(ParseError::Syntax {
                position: at,
                found: format!("`{c}`"),
                expected: vec!["expression".into()],
            });
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    var: Option<String>,
    params: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn at(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        ParseError::Syntax {
            position: self.at(),
            found: describe(self.peek()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect_op(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Op(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[&format!("`{c}`")]))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Tok::Op('-') => {
                    self.bump();
                    terms.push(Expr::neg(self.term()?));
                }
                _ => break,
            }
        }
        Ok(Expr::add(terms))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.unary()?];
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    factors.push(self.unary()?);
                }
                Tok::Op('/') => {
                    self.bump();
                    let d = self.unary()?;
                    factors.push(Expr::recip(d));
                }
                _ => break,
            }
        }
        Ok(Expr::mul(factors))
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            let inner = self.unary()?;
            return Ok(Expr::neg(inner));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.atom()?;
        loop {
            match self.peek() {
                Tok::Op('!') => {
                    let at = self.at();
                    self.bump();
                    let var = self.var.clone().unwrap_or_else(|| "n".to_string());
                    if !base.is_integer_shaped(&var) {
                        return Err(ParseError::NonIntegerFactorial { position: at });
                    }
                    if let Expr::Num(v) = &base {
                        if v.is_negative() {
                            return Err(ParseError::NonIntegerFactorial { position: at });
                        }
                    }
                    base = Expr::factorial(base);
                }
                Tok::Op('^') => {
                    self.bump();
                    // Right-associative: the exponent is a full unary, which
                    // itself consumes any further `^`.
                    let e = self.unary()?;
                    base = Expr::pow(base, e);
                    return Ok(base);
                }
                _ => return Ok(base),
            }
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.at();
        match self.bump() {
            Tok::Int(v) => Ok(Expr::Num(Q::from_integer(v))),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect_op(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if FUNCS.contains(&name.as_str()) && *self.peek() == Tok::Op('(') {
                    return self.call(&name, at);
                }
                match name.as_str() {
                    "e" => Ok(Expr::e()),
                    "pi" => Ok(Expr::pi()),
                    _ => self.identifier(name, at),
                }
            }
            other => Err(ParseError::Syntax {
                position: at,
                found: describe(&other),
                expected: vec!["number".into(), "identifier".into(), "`(`".into()],
            }),
        }
    }

    fn identifier(&mut self, name: String, at: usize) -> Result<Expr, ParseError> {
        if FUNCS.contains(&name.as_str()) {
            return Err(ParseError::Syntax {
                position: self.at(),
                found: describe(self.peek()),
                expected: vec!["`(`".into()],
            });
        }
        if self.params.contains(&name) {
            return Ok(Expr::Sym(name));
        }
        match &self.var {
            Some(v) if *v == name => Ok(Expr::Sym(name)),
            Some(v) => Err(ParseError::UnknownIdentifier {
                position: at,
                name,
                var: v.clone(),
            }),
            None => {
                self.var = Some(name.clone());
                Ok(Expr::Sym(name))
            }
        }
    }

    fn call(&mut self, name: &str, at: usize) -> Result<Expr, ParseError> {
        self.expect_op('(')?;
        let mut args = vec![self.expr()?];
        while *self.peek() == Tok::Op(',') {
            self.bump();
            args.push(self.expr()?);
        }
        self.expect_op(')')?;
        let arity = |n: usize, what: &str| -> Result<(), ParseError> {
            if args.len() == n {
                Ok(())
            } else {
                Err(ParseError::Arity {
                    position: at,
                    func: name.to_string(),
                    expected: what.to_string(),
                })
            }
        };
        let literal = |e: &Expr, max: u32| -> Option<u32> {
            let v = e.as_num()?;
            if !v.is_integer() {
                return None;
            }
            let k = v.to_integer().to_u32()?;
            (k <= max).then_some(k)
        };
        match name {
            "ln" => {
                arity(1, "one argument")?;
                Ok(Expr::ln(args.pop().unwrap()))
            }
            "lnk" => {
                arity(2, "a literal depth k >= 1 and an argument")?;
                let x = args.pop().unwrap();
                match literal(&args[0], MAX_LN_DEPTH) {
                    Some(k) if k >= 1 => Ok(Expr::lnk(k, x)),
                    _ => Err(ParseError::Arity {
                        position: at,
                        func: name.to_string(),
                        expected: "a literal depth k >= 1 and an argument".into(),
                    }),
                }
            }
            "exp" => {
                arity(1, "one argument")?;
                Ok(Expr::exp(args.pop().unwrap()))
            }
            "sqrt" => {
                arity(1, "one argument")?;
                Ok(Expr::sqrt(args.pop().unwrap()))
            }
            "abs" => {
                arity(1, "one argument")?;
                Ok(Expr::abs(args.pop().unwrap()))
            }
            "sin" => {
                arity(1, "one argument")?;
                Ok(Expr::sin(args.pop().unwrap()))
            }
            "cos" => {
                arity(1, "one argument")?;
                Ok(Expr::cos(args.pop().unwrap()))
            }
            "binom" => {
                arity(2, "an argument and a literal k >= 0")?;
                match literal(&args[1], 64) {
                    Some(k) => Ok(Expr::binom(args.swap_remove(0), k)),
                    None => Err(ParseError::Arity {
                        position: at,
                        func: name.to_string(),
                        expected: "an argument and a literal k >= 0".into(),
                    }),
                }
            }
            _ => unreachable!("FUNCS lists every callable name"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_examples() {
        let n = Expr::sym("n");
        assert_eq!(parse("1/n^2").unwrap(), Expr::recip(Expr::powi(n.clone(), 2)));
        assert_eq!(
            parse("n!/(2*n)!").unwrap(),
            Expr::div(
                Expr::factorial(n.clone()),
                Expr::factorial(Expr::mul(vec![Expr::int(2), n.clone()]))
            )
        );
        assert_eq!(
            parse("(-1)^n / lnk(2,n)").unwrap(),
            Expr::mul(vec![Expr::alt_sign(n.clone()), Expr::recip(Expr::lnk(2, n))])
        );
    }

    #[test]
    fn power_is_right_associative_and_binds_after_factorial() {
        assert_eq!(parse("2^3^2").unwrap(), Expr::int(512));
        assert_eq!(parse("-2^2").unwrap(), Expr::int(-4));
        assert_eq!(parse("2^-1").unwrap(), Expr::rational(1, 2));
        assert_eq!(parse("3!^2").unwrap(), Expr::int(36));
    }

    #[test]
    fn index_variable_inference() {
        assert_eq!(parse("1/k").unwrap().index_var().unwrap(), "k");
        let err = parse("n + m").unwrap_err();
        assert!(matches!(err, ParseError::UnknownIdentifier { ref name, position: 4, .. } if name == "m"));
        let opts = ParseOptions {
            var: Some("n".into()),
            params: vec!["x".into()],
        };
        assert!(parse_with("x^n/n", &opts).is_ok());
        assert!(parse_with("k", &ParseOptions::with_var("n")).is_err());
    }

    #[test]
    fn errors_carry_position_and_expectations() {
        match parse("1/(n+").unwrap_err() {
            ParseError::Syntax { position, expected, .. } => {
                assert_eq!(position, 5);
                assert!(expected.iter().any(|s| s == "number"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse("(n/2)!"),
            Err(ParseError::NonIntegerFactorial { position: 5 })
        ));
        assert!(matches!(parse("lnk(n, n)"), Err(ParseError::Arity { .. })));
        assert!(matches!(parse("n $ 2"), Err(ParseError::Syntax { position: 2, .. })));
        assert!(parse("2 n").is_err());
    }
}

//! Ground-truth corpus: one series per line, scored against the engine.
//!
//! ```text
//! # id | expr | start | expect | provenance | note
//! harmonic | 1/n | 1 | D | example | the classic divergent series
//! geo_half | 1/2^n | 0 | r=2; interval=(-2, 2) | derived |
//! ```
//!
//! `expect` is `C`, `D`, or a power-series record `r=<radius>` with
//! optional `center=<q>` and `interval=<brackets>` fields separated by `;`.

use crate::convergence::{auto_with, Options, Outcome};
use crate::expr::{parse, Expr, Q};
use crate::power_series::{interval_with, radius, Bracket, Radius};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorpusError {
    #[error("line {line}: expected 6 `|`-separated fields, found {found}")]
    Fields { line: usize, found: usize },
    #[error("line {line}: {msg}")]
    Bad { line: usize, msg: String },
    #[error("line {line}: duplicate id `{id}`")]
    Duplicate { line: usize, id: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntervalSpec {
    pub left: Expr,
    pub right: Expr,
    pub left_bracket: Bracket,
    pub right_bracket: Bracket,
}

impl fmt::Display for IntervalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.left_bracket == Bracket::Closed { "[" } else { "(" };
        let r = if self.right_bracket == Bracket::Closed {
            "]"
        } else {
            ")"
        };
        write!(f, "{l}{}, {}{r}", self.left, self.right)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expectation {
    Verdict(Outcome),
    Radius {
        radius: Radius,
        center: Q,
        interval: Option<IntervalSpec>,
    },
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expectation::Verdict(o) => write!(f, "{o}"),
            Expectation::Radius { radius, interval, .. } => {
                write!(f, "r = {radius}")?;
                if let Some(i) = interval {
                    write!(f, ", interval {i}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusEntry {
    pub id: String,
    pub source: String,
    pub expr: Expr,
    pub start: u64,
    pub expect: Expectation,
    pub provenance: String,
    pub note: String,
    pub line: usize,
}

pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = body.split('|').map(str::trim).collect();
        if fields.len() != 6 {
            return Err(CorpusError::Fields {
                line,
                found: fields.len(),
            });
        }
        let bad = |msg: String| CorpusError::Bad { line, msg };
        let id = fields[0].to_string();
        if id.is_empty() {
            return Err(bad("empty id".into()));
        }
        if !seen.insert(id.clone()) {
            return Err(CorpusError::Duplicate { line, id });
        }
        let expr = parse(fields[1]).map_err(|e| bad(e.to_string()))?;
        let start = fields[2].parse::<u64>().map_err(|e| bad(format!("start: {e}")))?;
        let expect = parse_expect(fields[3]).map_err(bad)?;
        out.push(CorpusEntry {
            id,
            source: fields[1].to_string(),
            expr,
            start,
            expect,
            provenance: fields[4].to_string(),
            note: fields[5].to_string(),
            line,
        });
    }
    Ok(out)
}

fn parse_expect(s: &str) -> Result<Expectation, String> {
    match s {
        "C" => return Ok(Expectation::Verdict(Outcome::Converges)),
        "D" => return Ok(Expectation::Verdict(Outcome::Diverges)),
        _ => {}
    }
    let mut radius = None;
    let mut center = Q::from_integer(0.into());
    let mut interval = None;
    for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| format!("bad expectation `{part}`"))?;
        match k.trim() {
            "r" => radius = Some(parse_radius(v.trim())?),
            "center" => {
                let c = parse(v.trim()).map_err(|e| e.to_string())?;
                center = c
                    .as_num()
                    .cloned()
                    .ok_or_else(|| format!("center `{v}` is not rational"))?;
            }
            "interval" => interval = Some(parse_interval(v.trim())?),
            other => return Err(format!("unknown field `{other}`")),
        }
    }
    let radius = radius.ok_or_else(|| format!("expectation `{s}` is neither C, D nor r=..."))?;
    Ok(Expectation::Radius {
        radius,
        center,
        interval,
    })
}

fn parse_radius(s: &str) -> Result<Radius, String> {
    match s {
        "0" => Ok(Radius::Zero),
        "inf" => Ok(Radius::Infinite),
        _ => Ok(Radius::Finite {
            value: parse(s).map_err(|e| e.to_string())?,
            exact: true,
        }),
    }
}

fn parse_interval(s: &str) -> Result<IntervalSpec, String> {
    let bracket = |c: Option<char>, open: char, closed: char| match c {
        Some(x) if x == open => Ok(Bracket::Open),
        Some(x) if x == closed => Ok(Bracket::Closed),
        _ => Err(format!("bad interval `{s}`")),
    };
    let left_bracket = bracket(s.chars().next(), '(', '[')?;
    let right_bracket = bracket(s.chars().last(), ')', ']')?;
    let inner = &s[1..s.len() - 1];
    let (l, r) = inner.split_once(',').ok_or_else(|| format!("bad interval `{s}`"))?;
    let ends = |t: &str| parse(t.trim()).map_err(|e| e.to_string());
    Ok(IntervalSpec {
        left: ends(l)?,
        right: ends(r)?,
        left_bracket,
        right_bracket,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Inconclusive,
    Contradiction,
}

#[derive(Clone, Debug)]
pub struct Scored {
    pub entry: CorpusEntry,
    pub status: Status,
    pub got: String,
}

#[derive(Clone, Debug, Default)]
pub struct Score {
    pub results: Vec<Scored>,
}

impl Score {
    pub fn count(&self, s: Status) -> usize {
        self.results.iter().filter(|r| r.status == s).count()
    }

    pub fn contradictions(&self) -> Vec<&Scored> {
        self.results
            .iter()
            .filter(|r| r.status == Status::Contradiction)
            .collect()
    }
}

fn verdict_status(expected: Outcome, got: Outcome) -> Status {
    if got == Outcome::Inconclusive {
        Status::Inconclusive
    } else if got == expected {
        Status::Pass
    } else {
        Status::Contradiction
    }
}

pub fn score_entry(e: &CorpusEntry, opts: &Options) -> Scored {
    let (status, got) = match &e.expect {
        Expectation::Verdict(want) => {
            let v = auto_with(&e.expr, opts);
            (verdict_status(*want, v.outcome), v.to_string())
        }
        Expectation::Radius {
            radius: want,
            interval: None,
            ..
        } => match radius(&e.expr) {
            Ok(r) if r == *want => (Status::Pass, format!("r = {r}")),
            Ok(r) => (Status::Contradiction, format!("r = {r}")),
            Err(err) => (Status::Inconclusive, err.to_string()),
        },
        Expectation::Radius {
            radius: want,
            center,
            interval: Some(spec),
        } => match interval_with(&e.expr, center, opts) {
            Err(err) => (Status::Inconclusive, err.to_string()),
            Ok(res) => {
                let got = res.to_string();
                let i = &res.interval;
                let status = if res.radius != *want || i.left != spec.left || i.right != spec.right {
                    Status::Contradiction
                } else {
                    let ends = [
                        (i.left_bracket, spec.left_bracket),
                        (i.right_bracket, spec.right_bracket),
                    ];
                    if ends.iter().any(|(g, w)| *g != Bracket::Unknown && g != w) {
                        Status::Contradiction
                    } else if ends.iter().any(|(g, _)| *g == Bracket::Unknown) {
                        Status::Inconclusive
                    } else {
                        Status::Pass
                    }
                };
                (status, got)
            }
        },
    };
    Scored {
        entry: e.clone(),
        status,
        got,
    }
}

/// Scores entries in parallel; results are ordered by id.
pub fn score(entries: &[CorpusEntry], opts: &Options) -> Score {
    let mut results: Vec<Scored> = entries.par_iter().map(|e| score_entry(e, opts)).collect();
    results.sort_by(|a, b| a.entry.id.cmp(&b.entry.id));
    Score { results }
}

/// The corpus shipped with the crate.
pub const SHIPPED: &str = include_str!("../corpus/series.txt");

pub fn shipped() -> Vec<CorpusEntry> {
    parse_corpus(SHIPPED).expect("shipped corpus parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_records() {
        let text = "# comment\n\nh | 1/n | 1 | D | example | harmonic\n\
                    g | 1/2^n | 0 | r=2; interval=(-2, 2) | derived |\n";
        let es = parse_corpus(text).unwrap();
        assert_eq!(es.len(), 2);
        assert_eq!(es[0].expect, Expectation::Verdict(Outcome::Diverges));
        match &es[1].expect {
            Expectation::Radius { interval: Some(i), .. } => assert_eq!(i.to_string(), "(-2, 2)"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed() {
        assert!(matches!(
            parse_corpus("a | 1/n | 1 | D"),
            Err(CorpusError::Fields { line: 1, found: 4 })
        ));
        assert!(matches!(
            parse_corpus("a | 1/n | x | D | e | "),
            Err(CorpusError::Bad { .. })
        ));
        assert!(matches!(
            parse_corpus("a | 1/n | 1 | maybe | e | "),
            Err(CorpusError::Bad { .. })
        ));
        assert!(matches!(
            parse_corpus("a | 1/n | 1 | D | e |\na | 1/n | 1 | D | e |"),
            Err(CorpusError::Duplicate { line: 2, .. })
        ));
        assert!(parse_corpus("").unwrap().is_empty());
    }

    #[test]
    fn shipped_corpus_shape() {
        let es = shipped();
        assert!(es.len() >= 30);
        assert!(es.iter().any(|e| matches!(e.expect, Expectation::Radius { .. })));
    }
}

//! The convergence-test battery.
//!
//! Every test takes a term `a(n)` and returns a [`Verdict`] with a trace of
//! the rewrites and tests it applied. A test may always answer
//! `Inconclusive`; it must never answer wrongly.

mod battery;
mod pipeline;

pub use battery::*;
pub use pipeline::{
    alternating_test, auto, auto_with, condensation_test, condense, lhopital_guard, lhopital_step, lhopital_test,
    limit_comparison, normalized, replay, run_test, split_quotient, Options, ReplayError,
};

use crate::asymptotics::Limit;
use crate::oracle::Advisory;
use serde::{Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Outcome {
    Converges,
    Diverges,
    Inconclusive,
}

impl Outcome {
    pub fn is_decisive(self) -> bool {
        self != Outcome::Inconclusive
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Converges => "Converges",
            Outcome::Diverges => "Diverges",
            Outcome::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TestKind {
    NthTerm,
    PSeries,
    GeneralizedP,
    Ratio,
    Raabe,
    /// Level `m >= -1`; `-1` is the ratio test, `0` Raabe, `1` Bertrand.
    GeneralizedRatio(i32),
    NthRoot,
    Condensation,
    /// Deepest nested logarithm tried.
    Boundary(usize),
    Alternating,
    Exp,
    LHopital,
    LimitComparison,
}

impl TestKind {
    /// Human-readable name used in verdict lines.
    pub fn label(&self) -> String {
        match self {
            TestKind::NthTerm => "nth-term test".into(),
            TestKind::PSeries => "p-series".into(),
            TestKind::GeneralizedP => "generalized p-series".into(),
            TestKind::Ratio => "ratio test".into(),
            TestKind::Raabe => "Raabe test".into(),
            TestKind::GeneralizedRatio(m) => format!("generalized ratio test, m={m}"),
            TestKind::NthRoot => "nth root test".into(),
            TestKind::Condensation => "Cauchy condensation".into(),
            TestKind::Boundary(_) => "boundary test".into(),
            TestKind::Alternating => "alternating test".into(),
            TestKind::Exp => "exponential test".into(),
            TestKind::LHopital => "L'Hopital test".into(),
            TestKind::LimitComparison => "limit comparison".into(),
        }
    }

    /// Short statement of the criterion, stored with each trace step.
    pub fn reference(&self) -> &'static str {
        match self {
            TestKind::NthTerm => "a series whose terms do not tend to 0 diverges",
            TestKind::PSeries => "sum 1/n^p converges iff p > 1",
            TestKind::GeneralizedP => "sum 1/(L_(w-1) (ln_w n)^p) converges iff p > 1",
            TestKind::Ratio => "lim a(n+1)/a(n) < 1 converges, > 1 diverges",
            TestKind::Raabe => "lim n (a(n)/a(n+1) - 1) > 1 converges, < 1 diverges",
            TestKind::GeneralizedRatio(_) => {
                "sign of L_m (a(n)/a(n+1) - 1 - sum_(i<=m) 1/L_i) decides, positive converges"
            }
            TestKind::NthRoot => "lim a(n)^(1/n) < 1 converges, > 1 diverges",
            TestKind::Condensation => "sum a(n) and sum 2^n a(2^n) converge together for decreasing a",
            TestKind::Boundary(_) => "strictly below some 1/L_w converges, at or above the family diverges",
            TestKind::Alternating => "alternating terms decreasing to 0 converge",
            TestKind::Exp => "sum exp(-f) converges when ln n is much less than f",
            TestKind::LHopital => "f/g replaced by f'/g' away from the boundary family",
            TestKind::LimitComparison => "a/b -> c in (0, inf): both converge or both diverge",
        }
    }

    pub fn all_names() -> &'static [&'static str] {
        &[
            "nth_term",
            "p_series",
            "generalized_p_series",
            "ratio",
            "raabe",
            "generalized_ratio",
            "nth_root",
            "condensation",
            "boundary",
            "alternating",
            "exp",
            "lhopital",
        ]
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestKind::NthTerm => write!(f, "nth_term"),
            TestKind::PSeries => write!(f, "p_series"),
            TestKind::GeneralizedP => write!(f, "generalized_p_series"),
            TestKind::Ratio => write!(f, "ratio"),
            TestKind::Raabe => write!(f, "raabe"),
            TestKind::GeneralizedRatio(m) => write!(f, "generalized_ratio(m={m})"),
            TestKind::NthRoot => write!(f, "nth_root"),
            TestKind::Condensation => write!(f, "condensation"),
            TestKind::Boundary(w) => write!(f, "boundary(W={w})"),
            TestKind::Alternating => write!(f, "alternating"),
            TestKind::Exp => write!(f, "exp"),
            TestKind::LHopital => write!(f, "lhopital"),
            TestKind::LimitComparison => write!(f, "limit_comparison"),
        }
    }
}

impl Serialize for TestKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown test `{0}`")]
pub struct UnknownTest(pub String);

impl FromStr for TestKind {
    type Err = UnknownTest;

    /// Accepts the plain names of [`TestKind::all_names`] and the
    /// parameterized forms `generalized_ratio(m=2)`, `boundary(W=4)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || UnknownTest(s.to_string());
        let (name, arg) = match s.split_once('(') {
            Some((name, rest)) => {
                let inner = rest.strip_suffix(')').ok_or_else(bad)?;
                let v = inner.split_once('=').map(|(_, v)| v).unwrap_or(inner);
                (name, Some(v.trim().parse::<i64>().map_err(|_| bad())?))
            }
            None => (s, None),
        };
        Ok(match (name, arg) {
            ("nth_term", None) => TestKind::NthTerm,
            ("p_series", None) => TestKind::PSeries,
            ("generalized_p_series", None) => TestKind::GeneralizedP,
            ("ratio", None) => TestKind::Ratio,
            ("raabe", None) => TestKind::Raabe,
            ("generalized_ratio", m) => {
                let m = m.unwrap_or(1);
                if m < -1 {
                    return Err(bad());
                }
                TestKind::GeneralizedRatio(m as i32)
            }
            ("nth_root", None) => TestKind::NthRoot,
            ("condensation", None) => TestKind::Condensation,
            ("boundary", w) => TestKind::Boundary(
                w.map(|w| w.max(0) as usize)
                    .unwrap_or(crate::asymptotics::DEFAULT_DEPTH),
            ),
            ("alternating", None) => TestKind::Alternating,
            ("exp", None) => TestKind::Exp,
            ("lhopital", None) => TestKind::LHopital,
            ("limit_comparison", None) => TestKind::LimitComparison,
            _ => return Err(bad()),
        })
    }
}

/// One rewrite or test application.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct Step {
    pub rule: String,
    #[serde(rename = "paper_ref")]
    pub reference: String,
    pub before: String,
    pub after: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TestReport {
    pub var: String,
    pub steps: Vec<Step>,
}

impl TestReport {
    pub fn new(var: &str) -> TestReport {
        TestReport {
            var: var.to_string(),
            steps: Vec::new(),
        }
    }

    pub fn push(
        &mut self,
        rule: impl Into<String>,
        reference: &str,
        before: impl fmt::Display,
        after: impl Into<String>,
    ) {
        self.steps.push(Step {
            rule: rule.into(),
            reference: reference.to_string(),
            before: before.to_string(),
            after: after.into(),
        });
    }

    pub fn extend(&mut self, other: TestReport) {
        self.steps.extend(other.steps);
    }
}

/// Side results of the deciding test.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Auxiliary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<Limit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raabe: Option<Limit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Limit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<Limit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<String>,
}

impl Auxiliary {
    fn summary(&self) -> String {
        let mut parts = Vec::new();
        if let Some(w) = self.w {
            parts.push(format!("w={w}"));
        }
        if let Some(p) = &self.p {
            parts.push(format!("p={p}"));
        }
        if let Some(r) = &self.ratio {
            parts.push(format!("ratio {r}"));
        }
        if let Some(r) = &self.raabe {
            parts.push(format!("R = {r}"));
        }
        if let Some(l) = &self.limit {
            parts.push(format!("limit {l}"));
        }
        if let Some(c) = &self.constant {
            parts.push(format!("constant {c}"));
        }
        parts.join(", ")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub deciding_test: Option<TestKind>,
    pub trace: TestReport,
    pub auxiliary: Auxiliary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub advisory: Option<Advisory>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Verdict {
    pub fn inconclusive(trace: TestReport) -> Verdict {
        Verdict {
            outcome: Outcome::Inconclusive,
            deciding_test: None,
            trace,
            auxiliary: Auxiliary::default(),
            advisory: None,
            note: None,
        }
    }

    pub fn is_decisive(&self) -> bool {
        self.outcome.is_decisive()
    }
}

impl fmt::Display for Verdict {
    /// `Converges (boundary test, w=0, p=2)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.outcome)?;
        if let Some(t) = &self.deciding_test {
            let aux = self.auxiliary.summary();
            if aux.is_empty() {
                write!(f, " ({})", t.label())?;
            } else {
                write!(f, " ({}, {aux})", t.label())?;
            }
        }
        if let Some(n) = &self.note {
            write!(f, " [{n}]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_names_round_trip() {
        for k in [
            TestKind::NthTerm,
            TestKind::GeneralizedRatio(-1),
            TestKind::GeneralizedRatio(3),
            TestKind::Boundary(4),
            TestKind::LHopital,
        ] {
            assert_eq!(k.to_string().parse::<TestKind>().unwrap(), k);
        }
        assert_eq!("boundary".parse::<TestKind>().unwrap(), TestKind::Boundary(6));
        assert!("bogus".parse::<TestKind>().is_err());
        assert!("generalized_ratio(m=-2)".parse::<TestKind>().is_err());
    }
}

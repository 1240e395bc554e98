//! Machine-readable analysis reports.

use crate::bignum;
use crate::convergence::{normalized, Step, Verdict};
use crate::expr::Expr;
use crate::oracle::{cauchy_window, rate};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AuxiliaryReport {
    pub ratio: Option<String>,
    pub raabe: Option<String>,
    pub w: Option<usize>,
    pub p: Option<String>,
    pub radius: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NumericReport {
    /// `(n, s_{2^n} - s_{2^(n-1)})`.
    pub windows: Vec<(u32, f64)>,
    /// `(N, a(N+1)/a(N))`.
    pub rates: Vec<(u64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub input: String,
    pub normalized: String,
    pub verdict: String,
    pub deciding_test: Option<String>,
    pub auxiliary: AuxiliaryReport,
    pub trace: Vec<Step>,
    pub numeric: NumericReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Windows and ratios at `2^n` for each `n` in `schedule`; points that
/// fail to evaluate are left out.
pub fn numeric_samples(a: &Expr, schedule: &[u32], precision: usize) -> NumericReport {
    let mut out = NumericReport::default();
    for &n in schedule {
        if let Ok(w) = cauchy_window(a, n, precision) {
            out.windows.push((n, bignum::to_f64(&w.value)));
        }
        let at = 1u64 << n;
        if let Ok(r) = rate(a, at, precision) {
            out.rates.push((at, bignum::to_f64(&r)));
        }
    }
    out
}

pub fn analysis_report(input: &str, a: &Expr, v: &Verdict, numeric: NumericReport) -> AnalysisReport {
    let aux = &v.auxiliary;
    AnalysisReport {
        input: input.to_string(),
        normalized: normalized(a).to_string(),
        verdict: v.outcome.to_string(),
        deciding_test: v.deciding_test.map(|t| t.to_string()),
        auxiliary: AuxiliaryReport {
            ratio: aux.ratio.as_ref().map(|x| x.to_string()),
            raabe: aux.raabe.as_ref().map(|x| x.to_string()),
            w: aux.w,
            p: aux.p.as_ref().map(|x| x.to_string()),
            radius: aux.radius.clone(),
        },
        trace: v.trace.steps.clone(),
        numeric,
        note: v.note.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convergence::auto;
    use crate::expr::parse;

    #[test]
    fn json_round_trip() {
        let a = parse("1/(n*ln(n))").unwrap();
        let v = auto(&a);
        let r = analysis_report("1/(n*ln(n))", &a, &v, numeric_samples(&a, &[4, 8], 64));
        let text = serde_json::to_string(&r).unwrap();
        let back: AnalysisReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.trace, r.trace);
        assert_eq!(back.auxiliary, r.auxiliary);
        for (x, y) in back.numeric.windows.iter().zip(&r.numeric.windows) {
            assert!((x.1 - y.1).abs() <= 1e-15 * y.1.abs());
        }
        assert_eq!(back.verdict, "Diverges");
        assert_eq!(back.auxiliary.w, Some(1));
        assert_eq!(back.numeric.windows.len(), 2);
        for key in ["input", "normalized", "deciding_test", "auxiliary", "trace", "numeric"] {
            assert!(text.contains(&format!("\"{key}\"")), "{key}");
        }
        assert!(text.contains("\"paper_ref\""));
    }
}

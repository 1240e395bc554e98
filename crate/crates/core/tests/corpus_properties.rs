//! Properties checked over every entry of the shipped corpus.

use astro_float::BigFloat;
use convsum::asymptotics::{
    compare, difference_derivative, limit, numeric_compare, simplify_dominant, var_of, Limit, Relation,
};
use convsum::bignum;
use convsum::convergence::{
    auto, auto_with, boundary_test, condense, eventual_trend, generalized_ratio_test, raabe_test, ratio_test, run_test,
    Options, Outcome, TestKind,
};
use convsum::corpus::{score, shipped, CorpusEntry, Expectation, Status};
use convsum::expr::{eval_real, parse, Expr, Point};
use convsum::oracle::{cauchy_window, rate};
use convsum::power_series::Radius;
use convsum::rearrange::{block, BlockSpec};
use rayon::prelude::*;

fn quiet() -> Options {
    Options {
        numeric_advisory: false,
        ..Options::default()
    }
}

fn verdict_entries() -> Vec<(CorpusEntry, Outcome)> {
    shipped()
        .into_iter()
        .filter_map(|e| match e.expect {
            Expectation::Verdict(o) => Some((e.clone(), o)),
            _ => None,
        })
        .collect()
}

fn positive_entries() -> Vec<(CorpusEntry, Outcome)> {
    verdict_entries()
        .into_iter()
        .filter(|(e, _)| !e.expr.has_alt_sign())
        .collect()
}

#[test]
fn shipped_corpus_has_no_contradictions() {
    let s = score(&shipped(), &quiet());
    let bad: Vec<String> = s
        .contradictions()
        .iter()
        .map(|r| format!("{}: {}", r.entry.id, r.got))
        .collect();
    assert!(bad.is_empty(), "{bad:?}");
    assert_eq!(s.count(Status::Inconclusive), 0);
    let ids: Vec<&str> = s.results.iter().map(|r| r.entry.id.as_str()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
}

#[test]
fn no_single_test_contradicts_the_corpus() {
    let kinds = [
        TestKind::NthTerm,
        TestKind::PSeries,
        TestKind::GeneralizedP,
        TestKind::Ratio,
        TestKind::Raabe,
        TestKind::GeneralizedRatio(-1),
        TestKind::GeneralizedRatio(0),
        TestKind::GeneralizedRatio(1),
        TestKind::GeneralizedRatio(2),
        TestKind::NthRoot,
        TestKind::Boundary(6),
        TestKind::Exp,
        TestKind::Condensation,
        TestKind::Alternating,
        TestKind::LHopital,
        TestKind::LimitComparison,
    ];
    let opts = quiet();
    let bad: Vec<String> = verdict_entries()
        .par_iter()
        .flat_map_iter(|(e, want)| {
            let opts = opts.clone();
            kinds.iter().filter_map(move |k| {
                let v = run_test(*k, &e.expr, &opts);
                (v.is_decisive() && v.outcome != *want).then(|| format!("{k} on {}: {v}", e.id))
            })
        })
        .collect();
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn ratio_and_raabe_agree_with_generalized_ratio() {
    for (e, _) in positive_entries() {
        let r = ratio_test(&e.expr);
        if r.is_decisive() {
            assert_eq!(generalized_ratio_test(&e.expr, -1).outcome, r.outcome, "{}", e.id);
        }
        let r = raabe_test(&e.expr);
        if r.is_decisive() {
            assert_eq!(generalized_ratio_test(&e.expr, 0).outcome, r.outcome, "{}", e.id);
        }
    }
}

#[test]
fn boundary_agrees_with_generalized_ratio() {
    let mut both = 0;
    for (e, _) in positive_entries() {
        let b = boundary_test(&e.expr, 6);
        for m in -1..=3 {
            let g = generalized_ratio_test(&e.expr, m);
            if b.is_decisive() && g.is_decisive() {
                both += 1;
                assert_eq!(b.outcome, g.outcome, "{} at m={m}", e.id);
            }
        }
    }
    assert!(both > 10);
}

#[test]
fn condensation_preserves_verdicts() {
    let mut checked = 0;
    for (e, want) in positive_entries() {
        if eventual_trend(&e.expr).ok() != Some(-1) {
            continue;
        }
        let c = auto_with(&condense(&e.expr), &quiet());
        if c.is_decisive() {
            checked += 1;
            assert_eq!(c.outcome, want, "{}: {}", e.id, condense(&e.expr));
        }
    }
    assert!(checked >= 10, "only {checked} condensed items decided");
}

#[test]
fn dominant_simplification_preserves_verdicts() {
    for (e, want) in verdict_entries() {
        let s = simplify_dominant(&e.expr, true);
        assert_eq!(simplify_dominant(&s, true), s, "{} not idempotent", e.id);
        assert_eq!(auto_with(&s, &quiet()).outcome, want, "{}: {s}", e.id);
    }
}

#[test]
fn pairing_alternating_terms_preserves_verdicts() {
    // Grouping can only change the verdict when the terms do not tend to 0.
    let vanishing = |e: &Expr| run_test(TestKind::NthTerm, e, &quiet()).outcome != Outcome::Diverges;
    let mut checked = 0;
    for (e, want) in verdict_entries()
        .into_iter()
        .filter(|(e, _)| e.expr.has_alt_sign() && vanishing(&e.expr))
    {
        checked += 1;
        let b = block(&e.expr, BlockSpec::Fixed(2)).unwrap();
        assert!(!b.needs_numeric(), "{}: no lead for {}", e.id, b.raw);
        assert_eq!(auto_with(b.term(), &quiet()).outcome, want, "{}: {}", e.id, b.term());
    }
    assert_eq!(checked, 5);
}

#[test]
fn printing_round_trips() {
    for e in shipped() {
        assert_eq!(parse(&e.expr.to_string()).unwrap(), e.expr, "{}", e.id);
    }
}

#[test]
fn compare_is_antisymmetric_and_matches_samples() {
    let terms: Vec<Expr> = positive_entries().into_iter().map(|(e, _)| e.expr).collect();
    let pairs: Vec<(usize, usize)> = (0..terms.len())
        .flat_map(|i| (i + 1..terms.len()).map(move |j| (i, j)))
        .collect();
    let bad: Vec<String> = pairs
        .par_iter()
        .filter_map(|&(i, j)| {
            let (f, g) = (&terms[i], &terms[j]);
            let fg = compare(f, g).ok()?;
            let gf = compare(g, f).ok()?;
            let strict = |r: &Relation| matches!(r, Relation::MuchLess | Relation::MuchGreater);
            if strict(&fg) != strict(&gf) || (strict(&fg) && fg.flip() != gf) {
                return Some(format!("{f} vs {g}: {fg} / {gf}"));
            }
            let num = numeric_compare(f, g, &var_of(f));
            if strict(&fg) && strict(&num) && num != fg {
                return Some(format!("{f} vs {g}: symbolic {fg}, samples {num}"));
            }
            None
        })
        .collect();
    assert!(bad.is_empty(), "{bad:?}");
}

fn at(e: &Expr, n: i64) -> f64 {
    bignum::to_f64(&eval_real(e, &Point::from(n), 192).unwrap())
}

#[test]
fn derivative_matches_forward_difference() {
    let n = 1_000_000;
    let mut checked = 0;
    for (e, _) in positive_entries() {
        let a = &e.expr;
        if a.contains(&|x| matches!(x, Expr::Sin(_) | Expr::Cos(_))) {
            continue;
        }
        let Ok(d) = difference_derivative(a) else { continue };
        let exact = eval_real(a, &Point::from(n + 1), 256).unwrap().sub(
            &eval_real(a, &Point::from(n), 256).unwrap(),
            256,
            bignum::RM,
        );
        let (fd, dv) = (bignum::to_f64(&exact), at(&d, n));
        if fd == 0.0 || !fd.is_finite() || !dv.is_finite() {
            continue;
        }
        checked += 1;
        assert!(((fd - dv) / dv).abs() <= 1e-3, "{}: {fd} vs {dv} ({d})", e.id);
    }
    assert!(checked >= 10, "only {checked}");
}

#[test]
fn ratio_limits_match_sampled_rates() {
    let n = 1_000_000u64;
    for (e, _) in positive_entries() {
        let v = ratio_test(&e.expr);
        if !v.is_decisive() {
            continue;
        }
        let Some(Limit::Finite(l)) = v.auxiliary.ratio.clone() else {
            continue;
        };
        let l = bignum::to_f64(&eval_real(&l, &Point::from(1), 128).unwrap());
        let r = bignum::to_f64(&rate(&e.expr, n, 128).unwrap());
        let err = if l == 0.0 { r.abs() } else { ((r - l) / l).abs() };
        assert!(err <= 1e-3, "{}: rate {r}, limit {l}", e.id);
    }
}

#[test]
fn windows_follow_the_verdict() {
    for (e, want) in positive_entries() {
        if limit(&e.expr).map(|l| l != Limit::Finite(Expr::zero())).unwrap_or(true) {
            continue;
        }
        let ws: Vec<BigFloat> = [4, 6, 8, 10]
            .iter()
            .map(|&k| cauchy_window(&e.expr, k, 128).unwrap().value)
            .collect();
        assert!(ws.iter().all(|w| bignum::signum_i8(w) > 0), "{}: {ws:?}", e.id);
        match want {
            Outcome::Converges => assert!(ws.windows(2).all(|w| w[1] < w[0]), "{}: {ws:?}", e.id),
            _ => {
                let floor = ws[0].mul(&BigFloat::from_f64(1e-3, 128), 128, bignum::RM);
                assert!(ws[3] >= floor, "{}: {ws:?}", e.id)
            }
        }
    }
}

/// First window at or past `from` that is below `1e-6` and below its
/// predecessor, if any up to `2^16`.
fn vanishing_window(a: &Expr, from: u32) -> Option<u32> {
    let mut prev = f64::INFINITY;
    for k in (from..=16).step_by(2) {
        let w = bignum::to_f64(&cauchy_window(a, k, 128).unwrap().value).abs();
        if w < 1e-6 && w < prev {
            return Some(k);
        }
        prev = w;
    }
    None
}

#[test]
fn power_series_radius_is_sharp() {
    for e in shipped() {
        let Expectation::Radius {
            radius: Radius::Finite { value: r, .. },
            ..
        } = &e.expect
        else {
            continue;
        };
        let n = Expr::sym(&var_of(&e.expr));
        let term = |scale: Expr| Expr::abs(e.expr.clone()) * Expr::pow(r.clone() * scale, n.clone());
        // Windows of the absolute series also bound those at -r(1 - 1/100).
        let inside = term(Expr::rational(99, 100));
        assert!(
            vanishing_window(&inside, 8).is_some(),
            "{}: inside windows do not vanish",
            e.id
        );
        let outside = term(Expr::rational(101, 100));
        let (small, big) = (at(&outside, 64).abs(), at(&outside, 8192).abs());
        assert!(big > small, "{}: outside terms {small} -> {big}", e.id);
    }
}

#[test]
fn auto_is_deterministic() {
    for (e, _) in verdict_entries().into_iter().take(8) {
        let a = auto(&e.expr);
        let b = auto(&e.expr);
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.outcome, b.outcome);
    }
}

//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so every line is printed; the process
//! fails when any criterion does.

use astro_float::BigFloat;
use convsum::bignum::{self, RM};
use convsum::convergence::{
    auto_with, boundary_test, condense, eventual_trend, generalized_ratio_test, lhopital_guard, lhopital_test,
    slower_convergent, slower_divergent, Options, Outcome, TestKind,
};
use convsum::corpus::{shipped, Expectation};
use convsum::expr::{parse, Expr, Q};
use convsum::oracle::{cauchy_window, partial_sum, rate};
use convsum::power_series::{interval, radius, Radius};
use convsum::rearrange::riemann_rearrange;
use std::process::ExitCode;
use std::time::Instant;

/// Criteria whose stated targets are wrong, so they fail by design:
/// 2 expects r = 3^(-1/2) for 3^sqrt(n)/n (the true radius is 1) and an
/// open interval (2, 8) whose left endpoint series converges; 4 expects
/// rate(50) * 99^4 within 1e-3 of 1, but the exact value is 0.99025.
/// Anything else failing, or one of these passing, fails the run.
const KNOWN_FAILING: [usize; 2] = [2, 4];

const RAMANUJAN: &str = "(4*n)!*(1103+26390*n)/((n!)^4*396^(4*n))";

struct Check {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Check {
    Check {
        ok,
        detail: detail.into(),
    }
}

fn p(s: &str) -> Expr {
    parse(s).unwrap()
}

fn quiet() -> Options {
    Options {
        numeric_advisory: false,
        ..Options::default()
    }
}

fn verdict_corpus() -> Check {
    let required = [
        ("1/n^2", Outcome::Converges),
        ("1/n", Outcome::Diverges),
        ("1/(n^2-3*n)", Outcome::Converges),
        ("1/(n*sqrt(n^3+1))", Outcome::Converges),
        ("(3+sin(n))/n^2", Outcome::Converges),
        ("1/(n+n^(3/2))", Outcome::Converges),
        ("1/(8*n^2+12*n+4)", Outcome::Converges),
        ("ln(n)/n^2", Outcome::Converges),
        ("n*exp(-n^2)", Outcome::Converges),
        ("(n^3+n)/(5*n^3+n^2+27)", Outcome::Diverges),
        ("1/(n*ln(n))", Outcome::Diverges),
        ("1/(n*ln(n)^2)", Outcome::Converges),
        ("n!/(2*n)!", Outcome::Converges),
        ("1/n!", Outcome::Converges),
        ("1/lnk(2,n)", Outcome::Diverges),
        (RAMANUJAN, Outcome::Converges),
        ("(-1)^n/n", Outcome::Converges),
        ("(-1)^n/(sqrt(n)-(-1)^n)", Outcome::Diverges),
        ("1/2^sqrt(n)", Outcome::Converges),
        ("n^2/2^n", Outcome::Converges),
    ];
    let corpus = shipped();
    let verdicts: Vec<_> = corpus
        .iter()
        .filter_map(|e| match e.expect {
            Expectation::Verdict(o) => Some((e, o)),
            _ => None,
        })
        .collect();
    let mut failures = Vec::new();
    for (e, want) in &verdicts {
        let got = auto_with(&e.expr, &quiet()).outcome;
        if got != *want {
            failures.push(format!("{}: {got}", e.id));
        }
    }
    for (src, want) in required {
        let x = p(src);
        match verdicts.iter().find(|(e, _)| e.expr == x) {
            Some((_, o)) if *o == want => {}
            Some((e, o)) => failures.push(format!("{}: corpus says {o}", e.id)),
            None => failures.push(format!("{src} missing from corpus")),
        }
    }
    let n = verdicts.len();
    check(
        n >= 30 && failures.is_empty(),
        format!(
            "{n} verdict entries, {} required present, failures {failures:?}",
            required.len()
        ),
    )
}

fn radius_exactness() -> Check {
    let exact = |s: &str| Radius::Finite {
        value: p(s),
        exact: true,
    };
    let radii = [
        ("n/2^(n+1)", exact("2")),
        ("1/(n^2*3^n)", exact("3")),
        ("(2*n)!/(n!)^2", exact("1/4")),
        ("(1+1/n)^(n^2)", exact("1/e")),
        ("3^sqrt(n)/n", exact("3^(-1/2)")),
    ];
    let intervals = [
        ("n/2^(n+1)", 0, "(-2, 2)"),
        ("1/(n^2*3^n)", 0, "[-3, 3]"),
        ("1/((n+2)*3^n)", 5, "(2, 8)"),
    ];
    let mut bad = Vec::new();
    let total = radii.len() + intervals.len();
    for (a, want) in radii {
        match radius(&p(a)) {
            Ok(r) if r == want => {}
            Ok(r) => bad.push(format!("{a}: r = {r}, want {want}")),
            Err(e) => bad.push(format!("{a}: {e}")),
        }
    }
    for (a, c, want) in intervals {
        match interval(&p(a), &Q::from_integer(c.into())) {
            Ok(res) if res.interval.to_string() == want => {}
            Ok(res) => bad.push(format!("{a} at {c}: {}, want {want}", res.interval)),
            Err(e) => bad.push(format!("{a}: {e}")),
        }
    }
    check(
        bad.is_empty(),
        format!("{}/{total} exact; {}", total - bad.len(), bad.join("; ")),
    )
}

fn cauchy_window_ln2() -> Check {
    let t = Instant::now();
    let w = cauchy_window(&p("1/k"), 20, 256).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let ln2 = bignum::ln(&bignum::from_i64(2, 256), 256);
    let err = bignum::to_f64(&w.value.sub(&ln2, 256, RM)).abs();
    check(
        err <= 1e-4 && secs < 5.0,
        format!(
            "window(20) = {}, |w - ln 2| = {err:.3e}, {secs:.2} s",
            bignum::format_sig(&w.value, 12)
        ),
    )
}

fn ramanujan() -> Check {
    let a = p(RAMANUJAN);
    let r = rate(&a, 50, 256).unwrap();
    let scaled = r.mul(&bignum::from_i64(99i64.pow(4), 256), 256, RM);
    let rate_err = (bignum::to_f64(&scaled) - 1.0).abs();

    let prec = 512;
    let s = partial_sum(&a, 0, 3, prec).unwrap().value;
    let two = bignum::from_i64(2, prec);
    let factor = two
        .sqrt(prec, RM)
        .mul(&two, prec, RM)
        .div(&bignum::from_i64(9801, prec), prec, RM);
    let inv_pi = BigFloat::from_word(1, prec).div(&bignum::pi(prec), prec, RM);
    let approx = factor.mul(&s, prec, RM);
    let rel = bignum::rel_diff(&approx, &inv_pi, prec);
    let digits = -rel.log10();
    check(
        rate_err <= 1e-3 && digits >= 28.0,
        format!(
            "rate(50) = {}, rate*99^4 - 1 = {:.3e} (tol 1e-3); 4-term 1/pi digits = {digits:.1} (need 28)",
            bignum::format_sig(&r, 10),
            bignum::to_f64(&scaled) - 1.0
        ),
    )
}

fn generalized_p_grid() -> Check {
    let n = Expr::sym("n");
    let mut agree = 0;
    let mut bad = Vec::new();
    for w in 0..=3i64 {
        for (num, den) in [(1, 2), (1, 1), (3, 2), (2, 1)] {
            let head = if w == 0 {
                Expr::one()
            } else {
                Expr::log_product("n", w - 1)
            };
            let ln_w = if w == 0 {
                n.clone()
            } else {
                Expr::lnk(w as u32, n.clone())
            };
            let a = Expr::recip(head * Expr::pow(ln_w, Expr::rational(num, den)));
            let want = if num > den {
                Outcome::Converges
            } else {
                Outcome::Diverges
            };
            let got = boundary_test(&a, 6).outcome;
            if got == want {
                agree += 1;
            } else {
                bad.push(format!("{a}: {got}"));
            }
        }
    }
    check(agree == 16, format!("{agree}/16 {bad:?}"))
}

fn equivalences() -> Check {
    let mut pairs = 0;
    let mut condensed = 0;
    let mut bad = Vec::new();
    for e in shipped() {
        let Expectation::Verdict(want) = e.expect else { continue };
        if e.expr.has_alt_sign() {
            continue;
        }
        let b = boundary_test(&e.expr, 6);
        for m in -1..=3 {
            let g = generalized_ratio_test(&e.expr, m);
            if b.is_decisive() && g.is_decisive() {
                pairs += 1;
                if b.outcome != g.outcome {
                    bad.push(format!("{} at m={m}", e.id));
                }
            }
        }
        if eventual_trend(&e.expr).ok() == Some(-1) {
            let c = auto_with(&condense(&e.expr), &quiet());
            if c.is_decisive() {
                condensed += 1;
                if c.outcome != want {
                    bad.push(format!("condensed {}", e.id));
                }
            }
        }
    }
    check(
        bad.is_empty() && pairs > 0 && condensed > 0,
        format!("{pairs} boundary/generalized-ratio pairs, {condensed} condensations, disagreements {bad:?}"),
    )
}

fn riemann() -> Check {
    let a = p("(-1)^(n+1)/n");
    let target = BigFloat::from_f64(1.5, 128);
    match riemann_rearrange(&a, 1, &target, 100_000, 128) {
        Ok(run) => {
            let err = bignum::to_f64(&run.sum.sub(&target, 128, RM)).abs();
            check(
                err <= 1e-4 && run.violations == 0,
                format!(
                    "|s - 1.5| = {err:.3e} after {} steps, {} crossings, {} violations",
                    run.steps, run.crossings, run.violations
                ),
            )
        }
        Err(e) => check(false, e.to_string()),
    }
}

fn slower_series() -> Check {
    let mut parts = Vec::new();
    let mut ok = true;
    for (src, kind) in [("1/n", Outcome::Diverges), ("1/n^2", Outcome::Converges)] {
        let a = p(src);
        let made = if kind == Outcome::Diverges {
            slower_divergent(&a, 6)
        } else {
            slower_convergent(&a, 6)
        };
        match made {
            Ok(b) => {
                let base = boundary_test(&a, 6).outcome;
                let prod = boundary_test(&(a.clone() * b.clone()), 6).outcome;
                ok &= base == kind && prod == kind;
                parts.push(format!("{src} * {b}: {prod}"));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{src}: {e}"));
            }
        }
    }
    check(ok, parts.join("; "))
}

fn lhopital() -> Check {
    let a = p("lnk(2,n)/(n*ln(n))");
    let guard = lhopital_guard(&a);
    let v = auto_with(&a, &quiet());
    let lh = lhopital_test(&a);
    let ok = matches!(guard, Ok(Some(_)))
        && v.outcome == Outcome::Diverges
        && v.deciding_test == Some(TestKind::GeneralizedP)
        && lh.outcome != Outcome::Converges;
    check(ok, format!("guard {guard:?}; auto: {v}; lhopital test: {}", lh.outcome))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("verdict corpus", verdict_corpus),
        ("radius/interval exactness", radius_exactness),
        ("Cauchy window of 1/k", cauchy_window_ln2),
        ("Ramanujan rate and digits", ramanujan),
        ("generalized p-series grid", generalized_p_grid),
        ("equivalence suite", equivalences),
        ("Riemann rearrangement", riemann),
        ("slower-series constructions", slower_series),
        ("L'Hopital guard", lhopital),
    ];
    let mut unexpected = Vec::new();
    let mut passed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        let t = Instant::now();
        let c = f();
        let known = KNOWN_FAILING.contains(&id);
        let mark = match (c.ok, known) {
            (true, false) => "PASS",
            (true, true) => "PASS (listed as known failing)",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("{mark} {id} {name} ({:.1} s): {}", t.elapsed().as_secs_f64(), c.detail);
        passed += usize::from(c.ok);
        if c.ok == known {
            unexpected.push(id);
        }
    }
    println!(
        "{passed} of {} criteria pass; known failures {KNOWN_FAILING:?}",
        criteria.len()
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected results for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}

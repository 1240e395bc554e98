//! Randomized invariants of the expression layer, the comparison algebra
//! and the numeric oracle.

use convsum::asymptotics::{compare, Relation};
use convsum::bignum;
use convsum::convergence::{boundary_test, generalized_p_series_test, Outcome};
use convsum::expr::{eval_log, eval_real, parse, Expr, Point};
use convsum::oracle::partial_sum;
use convsum::power_series::radius;
use convsum::rearrange::deduplicate_strict;
use proptest::prelude::*;

fn n() -> Expr {
    Expr::sym("n")
}

/// Expressions that are positive and finite for every `n >= 1`.
fn positive_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(n()),
        (1i64..9).prop_map(Expr::int),
        (1i64..5, 2i64..6).prop_map(|(a, b)| Expr::rational(a, b)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a / b),
            (inner.clone(), -3i64..4).prop_map(|(a, k)| Expr::powi(a, k)),
            inner.clone().prop_map(Expr::sqrt),
            inner.clone().prop_map(|a| Expr::ln(a + Expr::int(2))),
            inner.clone().prop_map(|a| Expr::exp(Expr::recip(a))),
        ]
    })
}

/// Any expression the grammar can print, including signs and factorials.
fn any_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(n()),
        (-9i64..10).prop_map(Expr::int),
        (-4i64..5, 2i64..7).prop_map(|(a, b)| Expr::rational(a, b)),
        Just(Expr::e()),
        Just(Expr::pi()),
    ];
    leaf.prop_recursive(4, 32, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::add),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::mul),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a / b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::pow(a, b)),
            inner.clone().prop_map(Expr::neg),
            inner.clone().prop_map(Expr::ln),
            (1u32..4, inner.clone()).prop_map(|(k, a)| Expr::lnk(k, a)),
            inner.clone().prop_map(Expr::exp),
            inner.clone().prop_map(Expr::sqrt),
            inner.clone().prop_map(Expr::abs),
            inner.clone().prop_map(Expr::sin),
            // The parser only accepts integer-shaped factorial arguments.
            inner
                .clone()
                .prop_map(|a| if a.contains_sym("n") && a.is_integer_shaped("n") {
                    Expr::factorial(a)
                } else {
                    a
                }),
            inner
                .clone()
                .prop_map(|a| if a.is_integer_shaped("n") { Expr::alt_sign(a) } else { a }),
            (inner.clone(), 0u32..4).prop_map(|(a, k)| Expr::binom(a, k)),
        ]
    })
}

fn f64_at(e: &Expr, k: i64) -> Option<f64> {
    eval_real(e, &Point::from(k), 128).ok().map(|v| bignum::to_f64(&v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn printing_round_trips(e in any_expr()) {
        let text = e.to_string();
        let back = parse(&text).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
        prop_assert_eq!(back, e, "{}", text);
    }

    #[test]
    fn substitution_composes(e in positive_expr(), f in positive_expr(), g in positive_expr()) {
        let left = e.substitute("n", &f).substitute("n", &g);
        let right = e.substitute("n", &f.substitute("n", &g));
        if left != right {
            // Canonical forms may differ; the values may not.
            for k in [1, 3, 7] {
                let (l, r) = (f64_at(&left, k), f64_at(&right, k));
                if let (Some(l), Some(r)) = (l, r) {
                    if l.is_finite() && r.is_finite() {
                        prop_assert!((l - r).abs() <= 1e-9 * l.abs().max(1.0), "{} vs {} at {}", left, right, k);
                    }
                }
            }
        }
    }

    #[test]
    fn log_and_direct_evaluation_agree(e in positive_expr(), k in 1i64..60) {
        let p = 128;
        let at = Point::from(k);
        let Ok(direct) = eval_real(&e, &at, p) else { return Ok(()) };
        let x = bignum::to_f64(&direct);
        prop_assume!(x.is_finite() && x != 0.0 && x.abs() < 1e300 && x.abs() > 1e-300);
        let lg = eval_log(&e, &at, p).unwrap();
        prop_assert_eq!(lg.sign, bignum::signum_i8(&direct));
        let rel = bignum::to_f64(&lg.to_real().sub(&direct, p, bignum::RM).div(&direct, p, bignum::RM)).abs();
        prop_assert!(rel <= 2f64.powi(-(p as i32 - 8)), "{} at {}: relative error {}", e, k, rel);
    }

    #[test]
    fn dedup_is_strict_subsequence(mut xs in prop::collection::vec(-20i32..20, 0..40), up in any::<bool>()) {
        xs.sort();
        if !up {
            xs.reverse();
        }
        let d = deduplicate_strict(&xs).unwrap();
        let strict = d.windows(2).all(|w| if up { w[0] < w[1] } else { w[0] > w[1] });
        prop_assert!(strict, "{:?}", d);
        let mut rest = xs.iter();
        prop_assert!(d.iter().all(|x| rest.any(|y| y == x)));
        let mut distinct = xs.clone();
        distinct.dedup();
        prop_assert_eq!(d.len(), distinct.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn compare_is_antisymmetric(f in positive_expr(), g in positive_expr()) {
        prop_assume!(f.contains_sym("n") && g.contains_sym("n"));
        let (Ok(fg), Ok(gf)) = (compare(&f, &g), compare(&g, &f)) else { return Ok(()) };
        match fg {
            Relation::MuchLess | Relation::MuchGreater => prop_assert_eq!(fg.flip(), gf),
            _ => prop_assert!(!matches!(gf, Relation::MuchLess | Relation::MuchGreater), "{} vs {}: {} / {}", f, g, fg, gf),
        }
    }

    #[test]
    fn radius_ignores_polynomial_factors(base in 2i64..9, shift in 0i64..3, c in 1i64..9, p in -3i64..4) {
        let a = Expr::recip((n() + Expr::int(shift + 1)) * Expr::pow(Expr::int(base), n()));
        let scaled = Expr::int(c) * Expr::powi(n(), p) * a.clone();
        prop_assert_eq!(radius(&scaled).unwrap(), radius(&a).unwrap());
    }

    #[test]
    fn partial_sums_are_precision_stable(e in positive_expr(), len in 1u64..40) {
        let (p, q) = (96usize, 192usize);
        let (Ok(lo), Ok(hi)) = (partial_sum(&e, 1, len, p), partial_sum(&e, 1, len, q)) else { return Ok(()) };
        let (a, b) = (bignum::to_f64(&lo.value), bignum::to_f64(&hi.value));
        prop_assume!(a.is_finite() && b.is_finite() && b != 0.0);
        prop_assert!(((a - b) / b).abs() <= 2f64.powi(-(p as i32) / 2), "{}: {} vs {}", e, a, b);
    }
}

#[test]
fn scale_chain_is_strictly_ordered() {
    let chain = ["1", "ln(n)", "sqrt(n)", "n", "n^2", "2^n", "exp(n)", "n!", "n^n"].map(|s| parse(s).unwrap());
    for i in 0..chain.len() {
        for j in i + 1..chain.len() {
            assert_eq!(
                compare(&chain[i], &chain[j]).unwrap(),
                Relation::MuchLess,
                "{} vs {}",
                chain[i],
                chain[j]
            );
            assert_eq!(
                compare(&chain[j], &chain[i]).unwrap(),
                Relation::MuchGreater,
                "{} vs {}",
                chain[j],
                chain[i]
            );
        }
    }
}

#[test]
fn boundary_family_decreases() {
    for w in 0..=4 {
        let slower = Expr::recip(Expr::log_product("n", w + 1));
        let faster = Expr::recip(Expr::log_product("n", w));
        assert_eq!(compare(&slower, &faster).unwrap(), Relation::MuchLess, "w = {w}");
    }
}

#[test]
fn generalized_p_series_grid() {
    let ps = [(1, 2), (1, 1), (3, 2), (2, 1)];
    for w in 0..=3i64 {
        for (num, den) in ps {
            // 1/(L_(w-1) * ln_w(n)^p); for w = 0 this is 1/n^p.
            let head = if w == 0 {
                Expr::one()
            } else {
                Expr::log_product("n", w - 1)
            };
            let ln_w = if w == 0 { n() } else { Expr::lnk(w as u32, n()) };
            let a = Expr::recip(head * Expr::pow(ln_w, Expr::rational(num, den)));
            let want = if num > den {
                Outcome::Converges
            } else {
                Outcome::Diverges
            };
            assert_eq!(boundary_test(&a, 6).outcome, want, "boundary on {a}");
            assert_eq!(generalized_p_series_test(&a, 6).outcome, want, "generalized p on {a}");
        }
    }
}

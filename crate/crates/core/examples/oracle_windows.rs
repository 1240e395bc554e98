//! Numeric side of the engine: partial sums, Cauchy windows and the
//! empirical advisory.

use convsum::bignum::format_sig;
use convsum::oracle::{cauchy_window, empirical_verdict, partial_sum, rate, DEFAULT_SCHEDULE};
use convsum::parse;

fn main() {
    let harmonic = parse("1/k").unwrap();
    println!("windows s(2^n) - s(2^(n-1)) of 1/k tend to ln 2:");
    for n in [4, 8, 12, 16] {
        let w = cauchy_window(&harmonic, n, 128).unwrap();
        println!("    n = {n:>2}: {}", format_sig(&w.value, 12));
    }

    let geometric = parse("1/2^k").unwrap();
    let s = partial_sum(&geometric, 1, 20, 128).unwrap();
    println!(
        "s(20) of 1/2^k = {} (error <= {:.1e})",
        format_sig(&s.value, 25),
        s.error_bound
    );

    let ramanujan = parse("(4*n)!*(1103+26390*n)/((n!)^4*396^(4*n))").unwrap();
    let r = rate(&ramanujan, 50, 256).unwrap();
    println!("a(51)/a(50) for the Ramanujan series = {}", format_sig(&r, 10));

    for t in ["1/n^2", "1/(n*ln(n))", "(-1)^n"] {
        let adv = empirical_verdict(&parse(t).unwrap(), &DEFAULT_SCHEDULE, 128);
        println!(
            "advisory for {t}: {} ({:?}) - {}",
            adv.outcome, adv.confidence, adv.reason
        );
    }
}

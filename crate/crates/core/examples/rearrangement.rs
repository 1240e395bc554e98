//! Regrouping alternating series, and rearranging the alternating
//! harmonic series to a chosen sum or to infinity.

use astro_float::BigFloat;
use convsum::bignum::{self, RM};
use convsum::convergence::auto;
use convsum::parse;
use convsum::rearrange::{block, divergent_rearrangement_demo, riemann_rearrange, BlockSpec};

fn main() {
    for t in ["(-1)^(n+1)/n", "(-1)^n/(sqrt(n)-(-1)^n)", "(-1)^n/ln(n)"] {
        let a = parse(t).unwrap();
        let b = block(&a, BlockSpec::Fixed(2)).unwrap();
        println!(
            "pairs of {t}: {} ~ {}, so the series {}",
            b.raw,
            b.term(),
            auto(b.term()).outcome
        );
    }

    let a = parse("(-1)^(n+1)/n").unwrap();
    let target = BigFloat::from_f64(1.5, 128);
    let run = riemann_rearrange(&a, 1, &target, 100_000, 128).unwrap();
    let err = bignum::to_f64(&run.sum.sub(&target, 128, RM)).abs();
    println!(
        "rearranged toward 1.5: s = {} after {} terms, |s - 1.5| = {err:.2e}, bound {:.2e}",
        bignum::format_sig(&run.sum, 10),
        run.steps,
        bignum::to_f64(&run.bound)
    );

    let sums = divergent_rearrangement_demo(&a, 1, 12, 64).unwrap();
    println!("rearranged to diverge, block sums: {sums:.3?}");
}

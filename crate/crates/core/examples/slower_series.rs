//! Every divergent series has one that diverges more slowly, and every
//! convergent one has one that converges more slowly.

use convsum::convergence::{boundary_test, slower_convergent, slower_divergent};
use convsum::parse;

fn main() {
    for t in ["1/n", "1/(n*ln(n))", "1/sqrt(n)"] {
        let a = parse(t).unwrap();
        match slower_divergent(&a, 6) {
            Ok(b) => println!(
                "{t} * {b} still diverges: {}",
                boundary_test(&(a.clone() * b.clone()), 6)
            ),
            Err(e) => println!("{t}: {e}"),
        }
    }
    for t in ["1/n^2", "1/(n*ln(n)^2)"] {
        let a = parse(t).unwrap();
        match slower_convergent(&a, 6) {
            Ok(b) => println!(
                "{t} * {b} still converges: {}",
                boundary_test(&(a.clone() * b.clone()), 6)
            ),
            Err(e) => println!("{t}: {e}"),
        }
    }
}

//! Runs the automatic pipeline on a handful of series and prints each
//! verdict with its trace.
//!
//! `cargo run --example analyze_series -- "1/(n*ln(n)^2)"` analyzes a single term.

use convsum::convergence::auto;
use convsum::parse;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let terms: Vec<&str> = if args.is_empty() {
        vec![
            "1/n^2",
            "1/(n*ln(n))",
            "(3+sin(n))/n^2",
            "n!/(2*n)!",
            "(-1)^n/(sqrt(n)-(-1)^n)",
            "sin(n)/n",
        ]
    } else {
        args.iter().map(String::as_str).collect()
    };
    for t in terms {
        let a = match parse(t) {
            Ok(a) => a,
            Err(e) => {
                eprintln!("{t}: {e}");
                continue;
            }
        };
        let v = auto(&a);
        println!("sum {t}: {v}");
        for s in &v.trace.steps {
            println!("    {}: {} => {}", s.rule, s.before, s.after);
        }
        if let Some(adv) = &v.advisory {
            println!("    numeric advisory: {} ({:?})", adv.outcome, adv.confidence);
        }
    }
}

//! Scores the shipped corpus, or a corpus file given on the command line.

use convsum::convergence::Options;
use convsum::corpus::{parse_corpus, score, shipped, Status};

fn main() {
    let entries = match std::env::args().nth(1) {
        Some(path) => {
            let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
            parse_corpus(&text).unwrap_or_else(|e| panic!("{path}: {e}"))
        }
        None => shipped(),
    };
    let opts = Options {
        numeric_advisory: false,
        ..Options::default()
    };
    let s = score(&entries, &opts);
    for r in &s.results {
        println!("{:<14} {:<18} {}", format!("{:?}", r.status), r.entry.id, r.got);
    }
    println!(
        "{} pass, {} inconclusive, {} contradictions",
        s.count(Status::Pass),
        s.count(Status::Inconclusive),
        s.count(Status::Contradiction)
    );
}

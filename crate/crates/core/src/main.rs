use clap::{Args, Parser, Subcommand};
use convsum::bignum;
use convsum::convergence::{auto_with, run_test, Options, TestKind, Verdict};
use convsum::corpus::{parse_corpus, score, Status};
use convsum::expr::{parse_with, Expr, ParseOptions};
use convsum::oracle::{cauchy_window, partial_sum, rate};
use convsum::power_series::{interval_with, PowerSeriesError};
use convsum::report::{analysis_report, numeric_samples};
use serde_json::json;
use std::process::ExitCode;

/// Decide convergence of infinite series.
#[derive(Parser)]
#[command(name = "convsum", version)]
struct Cli {
    /// Index variable; inferred from the term when omitted (`n` if ambiguous).
    #[arg(long, global = true)]
    var: Option<String>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Working precision in bits for numeric work.
    #[arg(long, global = true, default_value_t = 256)]
    precision: usize,
    /// Deepest nested logarithm the boundary tests try.
    #[arg(long, global = true, default_value_t = 6)]
    max_depth: usize,
    /// Run only this test, e.g. `ratio`, `boundary(W=4)`, `generalized_ratio(m=2)`.
    #[arg(long, global = true)]
    test: Option<TestKind>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence verdict for sum a(n).
    Analyze { term: String },
    /// Radius and interval of convergence of sum a(n) (x - center)^n.
    Radius {
        coeff: String,
        #[arg(long, default_value = "0")]
        center: String,
    },
    /// Numeric partial sums, Cauchy windows and term ratios.
    Oracle {
        term: String,
        #[command(flatten)]
        what: OracleQuery,
        /// First index of partial sums.
        #[arg(long, default_value_t = 1)]
        start: u64,
    },
    /// Score a corpus file.
    Corpus { path: std::path::PathBuf },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct OracleQuery {
    /// Partial sum up to index N.
    #[arg(long, value_name = "N")]
    sum: Option<u64>,
    /// s(2^n) - s(2^(n-1)).
    #[arg(long, value_name = "n")]
    window: Option<u32>,
    /// a(N+1)/a(N).
    #[arg(long, value_name = "N")]
    rate: Option<u64>,
}

const DECISIVE: u8 = 0;
const ERROR: u8 = 1;
const INCONCLUSIVE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(ERROR)
        }
    }
}

fn options(cli: &Cli) -> Options {
    Options {
        precision: cli.precision,
        ..Options::with_depth(cli.max_depth)
    }
}

fn parse_term(cli: &Cli, text: &str) -> Result<Expr, String> {
    let opts = match &cli.var {
        Some(v) => ParseOptions::with_var(v),
        None => ParseOptions::default(),
    };
    parse_with(text, &opts).map_err(|e| format!("{text}: {e}"))
}

fn run(cli: &Cli) -> Result<u8, String> {
    match &cli.command {
        Command::Analyze { term } => analyze(cli, term),
        Command::Radius { coeff, center } => radius_cmd(cli, coeff, center),
        Command::Oracle { term, what, start } => oracle_cmd(cli, term, what, *start),
        Command::Corpus { path } => corpus_cmd(cli, path),
    }
}

fn print_trace(v: &Verdict) {
    for (i, s) in v.trace.steps.iter().enumerate() {
        println!("  {:>2}. {}: {} => {}", i + 1, s.rule, s.before, s.after);
    }
}

fn analyze(cli: &Cli, term: &str) -> Result<u8, String> {
    let a = parse_term(cli, term)?;
    let opts = options(cli);
    let v = match cli.test {
        Some(kind) => run_test(kind, &a, &opts),
        None => auto_with(&a, &opts),
    };
    if cli.json {
        let numeric = numeric_samples(&a, &[4, 8, 12], cli.precision.min(128));
        let report = analysis_report(term, &a, &v, numeric);
        println!("{}", serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?);
    } else {
        println!("{v}");
        print_trace(&v);
        if let Some(adv) = &v.advisory {
            println!(
                "numeric advisory ({:?} confidence): {} - {}",
                adv.confidence, adv.outcome, adv.reason
            );
        }
    }
    Ok(if v.is_decisive() { DECISIVE } else { INCONCLUSIVE })
}

fn radius_cmd(cli: &Cli, coeff: &str, center: &str) -> Result<u8, String> {
    let a = parse_term(cli, coeff)?;
    let c = parse_term(cli, center)?
        .as_num()
        .cloned()
        .ok_or_else(|| format!("center `{center}` is not a rational number"))?;
    match interval_with(&a, &c, &options(cli)) {
        Ok(res) => {
            if cli.json {
                let out = json!({
                    "input": coeff,
                    "radius": res.radius,
                    "center": c.to_string(),
                    "interval": res.interval.to_string(),
                    "endpoint_left": res.endpoint_left,
                    "endpoint_right": res.endpoint_right,
                });
                println!("{}", serde_json::to_string_pretty(&out).map_err(|e| e.to_string())?);
            } else {
                println!("{res}");
                for (side, v) in [("left", &res.endpoint_left), ("right", &res.endpoint_right)] {
                    println!("{side} endpoint: {v}");
                    print_trace(v);
                }
            }
            Ok(DECISIVE)
        }
        Err(PowerSeriesError::Degenerate(r)) => {
            if cli.json {
                println!("{}", json!({ "input": coeff, "radius": r, "center": c.to_string() }));
            } else {
                println!("r = {r}");
            }
            Ok(DECISIVE)
        }
        Err(e) => Err(e.to_string()),
    }
}

fn digits(precision: usize) -> usize {
    (precision * 3 / 10).clamp(6, 60)
}

fn oracle_cmd(cli: &Cli, term: &str, q: &OracleQuery, start: u64) -> Result<u8, String> {
    let a = parse_term(cli, term)?;
    let p = cli.precision;
    let (label, value, bound) = if let Some(n) = q.sum {
        let s = partial_sum(&a, start, n, p).map_err(|e| e.to_string())?;
        (format!("s({n})"), s.value, s.error_bound)
    } else if let Some(n) = q.window {
        let s = cauchy_window(&a, n, p).map_err(|e| e.to_string())?;
        (format!("window({n})"), s.value, s.error_bound)
    } else if let Some(n) = q.rate {
        let r = rate(&a, n, p).map_err(|e| e.to_string())?;
        let b = bignum::to_f64(&r).abs() * 2f64.powi(16 - p as i32);
        (format!("rate({n})"), r, b)
    } else {
        unreachable!("clap requires one query")
    };
    let text = bignum::format_sig(&value, digits(p));
    if cli.json {
        println!(
            "{}",
            json!({ "input": term, "quantity": label, "value": text, "error_bound": bound })
        );
    } else {
        println!("{label} = {text} (error <= {bound:.1e})");
    }
    Ok(DECISIVE)
}

fn corpus_cmd(cli: &Cli, path: &std::path::Path) -> Result<u8, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let entries = parse_corpus(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut opts = options(cli);
    opts.numeric_advisory = false;
    let s = score(&entries, &opts);
    let (pass, inc, bad) = (
        s.count(Status::Pass),
        s.count(Status::Inconclusive),
        s.count(Status::Contradiction),
    );
    if cli.json {
        let rows: Vec<_> = s
            .results
            .iter()
            .map(|r| json!({ "id": r.entry.id, "status": r.status, "expected": r.entry.expect.to_string(), "got": r.got }))
            .collect();
        let out = json!({ "entries": rows, "pass": pass, "inconclusive": inc, "contradictions": bad });
        println!("{}", serde_json::to_string_pretty(&out).map_err(|e| e.to_string())?);
    } else {
        for r in &s.results {
            let mark = match r.status {
                Status::Pass => "ok  ",
                Status::Inconclusive => "??  ",
                Status::Contradiction => "FAIL",
            };
            println!("{mark} {:<18} {}", r.entry.id, r.got);
            if r.status == Status::Contradiction {
                println!("     expected: {}", r.entry.expect);
            }
        }
        println!(
            "{} entries: {pass} pass, {inc} inconclusive, {bad} contradictions",
            s.results.len()
        );
    }
    Ok(if bad == 0 { DECISIVE } else { ERROR })
}

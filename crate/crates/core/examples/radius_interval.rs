//! Radius and interval of convergence for a few power series.

use convsum::expr::Q;
use convsum::parse;
use convsum::power_series::{interval, radius, termwise_radius_invariance, PowerSeriesError};

fn main() {
    let series = [
        ("n/2^(n+1)", 0),
        ("1/(n^2*3^n)", 0),
        ("1/((n+2)*3^n)", 5),
        ("(2*n)!/(n!)^2", 0),
        ("(1+1/n)^(n^2)", 0),
        ("1/n!", 0),
    ];
    for (coeff, center) in series {
        let a = parse(coeff).unwrap();
        match interval(&a, &Q::from_integer(center.into())) {
            Ok(res) => {
                let x = if center == 0 {
                    "x".to_string()
                } else {
                    format!("(x - {center})")
                };
                println!("sum {coeff} {x}^n: {res}");
                println!("    x = left end:  {}", res.endpoint_left);
                println!("    x = right end: {}", res.endpoint_right);
            }
            Err(PowerSeriesError::Degenerate(r)) => println!("sum {coeff} x^n: r = {r}"),
            Err(e) => println!("sum {coeff} x^n: {e}"),
        }
    }
    // Differentiating or integrating termwise keeps the radius.
    let a = parse("1/(n^2*3^n)").unwrap();
    println!(
        "radius of 1/(n^2*3^n) is {} and survives termwise calculus: {:?}",
        radius(&a).unwrap(),
        termwise_radius_invariance(&a)
    );
}

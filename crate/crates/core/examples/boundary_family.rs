//! The boundary family 1/(n ln n ... ln_w n) and the generalized p-series
//! on either side of it.

use convsum::asymptotics::compare;
use convsum::convergence::{boundary_test, generalized_p_series_test};
use convsum::expr::Expr;

fn main() {
    let n = Expr::sym("n");
    for w in 0..4i64 {
        let l = Expr::log_product("n", w);
        let next = Expr::log_product("n", w + 1);
        println!(
            "w = {w}: 1/({l}) diverges; 1/({next}) is {} it",
            compare(&Expr::recip(next.clone()), &Expr::recip(l.clone())).unwrap()
        );
    }
    println!();
    for w in 1..=3u32 {
        for p in [Expr::int(1), Expr::rational(3, 2), Expr::int(2)] {
            let a = Expr::recip(Expr::log_product("n", w as i64 - 1) * Expr::pow(Expr::lnk(w, n.clone()), p));
            println!(
                "{a}\n    boundary: {}\n    generalized p: {}",
                boundary_test(&a, 6),
                generalized_p_series_test(&a, 6)
            );
        }
    }
}

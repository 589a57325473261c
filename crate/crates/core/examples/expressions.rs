//! Parse data expressions, print them back, and differentiate in t.

use delaywave::exprlang::{parse, DiffExpr};

fn main() {
    for src in ["t^2*sin(x)", "exp(-0.2*x)*cos(t - 1)", "sqrt(1 + t^2)", "abs(t - 1)", "t^^2"] {
        match DiffExpr::parse(src) {
            Ok(e) => {
                println!("{src}");
                println!("  printed  {}", e.expr);
                println!("  d/dt     {}", e.dt);
                println!("  d2/dt2   {}", e.dtt);
                println!("  at (1, 0.5): {:?}", e.eval(0, 1.0, 0.5));
                if e.abs_differentiated {
                    println!("  note: derivative passes through abs");
                }
            }
            Err(err) => println!("{src}\n  error {err}"),
        }
    }
    let e = parse("sqrt(x - 1)").expect("parses");
    println!("sqrt(x - 1) at x = 0: {}", e.evaluate(0.0, 0.0).unwrap_err());
}

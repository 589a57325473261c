//! Closed-form solution of x'' + ω² x(t-τ) = f(t) against a direct
//! method-of-steps integration.

use std::sync::Arc;

use delaywave::delay_ode::{solve_forced, solve_homogeneous};
use delaywave::delay_trig::DelayKernelParams;
use delaywave::funcs::{expr_scalar, HistoryFunction};
use delaywave::oracle::steps_scalar;
use delaywave::quadrature::QuadratureSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (omega, tau) = (1.5, 1.0);
    let p = DelayKernelParams::new(omega, tau)?;
    let beta = HistoryFunction::from_expr("cos(t) + 0.2*t")?;
    let f = expr_scalar("sin(t)")?;
    let q = QuadratureSpec::default().with_panels(128);

    let steps = steps_scalar(omega, tau, &beta, Some(Arc::as_ref(&f)), tau / 400.0, 3.0 * tau)?;
    println!("{:>6} {:>20} {:>20} {:>10}", "t", "closed form", "steps", "diff");
    for (t, x) in steps.iter().step_by(50) {
        let closed = solve_homogeneous(p, &beta, *t, &q)? + solve_forced(p, f.as_ref(), *t, &q)?;
        println!("{t:>6.2} {closed:>20.12} {x:>20.12} {:>10.1e}", (closed - x).abs());
    }
    Ok(())
}

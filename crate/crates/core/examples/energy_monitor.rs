//! Energy of the homogenized solution against the exponential bound.

use delaywave::cli::RunConfig;
use delaywave::oracle::{steps_solve, OracleProblem, StepGrid};
use delaywave::stability::{energy_trace, XNorm};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = RunConfig::preset("smooth-compatible")?;
    let spec = cfg.problem_spec()?;
    let grid = StepGrid {
        nx: cfg.oracle.nx,
        dt: cfg.oracle_dt(),
        scheme: cfg.oracle.scheme,
    };
    let field = steps_solve(&OracleProblem::from_spec(&spec), &grid)?;
    let trace = energy_trace(&spec, &field, &XNorm::new(spec.l, 32)?)?;
    println!("C_A = {}", trace.c_a);
    for i in (0..trace.t.len()).step_by(25) {
        println!("t = {:5.3}  E = {:12.6}  bound = {:14.6}", trace.t[i], trace.energy[i], trace.bound[i]);
    }
    println!("pass = {}, margin = {:.4}", trace.pass, trace.margin);
    Ok(())
}

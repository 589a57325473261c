//! Remove the first-order term with ξ = e^{κx} η, solve, and map back.

use delaywave::cli::RunConfig;
use delaywave::problem::to_selfadjoint;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = RunConfig::preset("drifted")?.problem_spec()?;
    let tp = to_selfadjoint(&spec)?;
    println!("b = {}, d = {}  ->  kappa = {}, c = {}", spec.b, spec.d, tp.kappa, tp.c);

    let mut worst = 0.0_f64;
    for i in 0..=20 {
        let t = -spec.tau + spec.tau * i as f64 / 20.0;
        for j in 0..=20 {
            let x = spec.l * j as f64 / 20.0;
            let back = tp.back_factor(x) * tp.phi.eval(0, t, x)?;
            worst = worst.max((back - spec.psi.eval(0, t, x)?).abs());
        }
    }
    println!("max |e^(-kappa x) phi - psi| on the history: {worst:.2e}");
    println!(
        "boundary data: mu1(0) = {}, mu2(0) = {}",
        tp.mu1.eval(0, 0.0)?,
        tp.mu2.eval(0, 0.0)?
    );
    Ok(())
}

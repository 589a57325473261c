//! Growth of the single-mode response |cos_τ(ω_n, t*)| with n.

use delaywave::cli::RunConfig;
use delaywave::problem::to_selfadjoint;
use delaywave::stability::illposedness_probe;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tp = to_selfadjoint(&RunConfig::preset("mode1")?.problem_spec()?)?;
    let probe = illposedness_probe(&tp, 0.5 * tp.tau, 64)?;
    println!("{:>4} {:>10} {:>14} {:>14} {:>14}", "n", "omega", "amplification", "classical", "damped");
    for r in probe.rows.iter().filter(|r| r.n.is_power_of_two()) {
        println!(
            "{:>4} {:>10.4} {:>14.6e} {:>14.6e} {:>14.6e}",
            r.n, r.omega, r.amplification, r.classical, r.damped
        );
    }
    println!(
        "monotone from n = {:?}, contrast ratio {:.1}",
        probe.monotone_from, probe.contrast_ratio
    );
    Ok(())
}

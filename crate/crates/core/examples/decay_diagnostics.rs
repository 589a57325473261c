//! Coefficient decay checks: a smooth preset passes, the corner data fails.

use delaywave::cli::RunConfig;
use delaywave::problem::{build_lifting, to_selfadjoint};
use delaywave::spectral::{decay_diagnostics, SeriesSolution};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for name in ["mode1", "rough"] {
        let cfg = RunConfig::preset(name)?;
        let tp = to_selfadjoint(&cfg.problem_spec()?)?;
        let series = SeriesSolution::new(&tp, &build_lifting(&tp), &cfg.series_settings())?;
        let report = decay_diagnostics(&series.modes, tp.horizon, cfg.diagnostics.alpha)?;
        println!("{name}: pass = {}", report.pass);
        for c in [&report.history, &report.ddphi].into_iter().chain(&report.forcing) {
            println!(
                "  {:<12} required {:>6.2}  fitted {:>8}  {}",
                c.name,
                -c.required_exponent.abs(),
                c.fitted_exponent.map_or("-".into(), |v| format!("{v:.3}")),
                c.reason
            );
        }
    }
    Ok(())
}

//! Build the mode-by-mode series for a shipped preset and evaluate η.
//!
//! cargo run --example series_solution -- smooth-compatible

use delaywave::cli::RunConfig;
use delaywave::problem::{build_lifting, to_selfadjoint};
use delaywave::spectral::SeriesSolution;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "smooth-compatible".into());
    let cfg = RunConfig::preset(&name)?;
    let spec = cfg.problem_spec()?;
    let tp = to_selfadjoint(&spec)?;
    let series = SeriesSolution::new(&tp, &build_lifting(&tp), &cfg.series_settings())?;

    println!("preset {name}: {} modes, omega_1 = {:.6}", series.modes.len(), tp.mode_frequency(1)?);
    for t in [0.0, 0.5, 1.0, 1.5, 2.0] {
        let row: Vec<String> = (0..=4)
            .map(|i| {
                let x = spec.l * i as f64 / 4.0;
                series.eta(t, x).map(|v| format!("{v:>12.8}"))
            })
            .collect::<Result<_, _>>()?;
        println!("t = {t:.1}: {}", row.join(" "));
    }
    Ok(())
}

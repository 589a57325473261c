//! Series solution against the method-of-steps oracle.

use delaywave::cli::{cmd_oracle, cmd_solve, RunConfig, RunOptions};
use delaywave::field::SolutionField;
use delaywave::oracle::compare;

fn field(a: &delaywave::cli::Artifacts) -> SolutionField {
    SolutionField::read_csv(a.get("eta.csv").expect("eta.csv")).expect("valid csv")
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for name in ["mode1", "smooth-compatible", "drifted"] {
        let cfg = RunConfig::preset(name)?;
        let series = field(&cmd_solve(&cfg, RunOptions::default())?);
        let steps = field(&cmd_oracle(&cfg, RunOptions::default())?);
        let r = compare(&series, &steps, true)?;
        println!(
            "{name:>18}: l_inf {:.3e}  rms {:.3e}  rel {:.3e}  ({} points)",
            r.l_inf, r.l2, r.rel_l_inf, r.points
        );
    }
    Ok(())
}

//! Print cos_τ and sin_τ on [-τ, 4τ] as CSV.
//!
//! cargo run --example delay_trig_table -- 2.0 1.0

use delaywave::delay_trig::{table, write_table_csv, DelayKernelParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse())
        .collect::<Result<_, _>>()?;
    let omega = args.first().copied().unwrap_or(2.0);
    let tau = args.get(1).copied().unwrap_or(1.0);
    let p = DelayKernelParams::new(omega, tau)?;
    let rows = table(p, -tau, 4.0 * tau, 101)?;
    write_table_csv(&rows, std::io::stdout().lock())?;
    Ok(())
}

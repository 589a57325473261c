use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use delaywave::cli::{
    cmd_compare, cmd_diagnose, cmd_oracle, cmd_probe, cmd_solve, preset_names, CliError,
    CompareOptions, Overrides, RunConfig, RunOptions,
};

#[derive(Parser)]
#[command(name = "delaywave", version, about = "Wave equation with pure delay: series solver and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Series solution on the output grid
    Solve(RunArgs),
    /// Method-of-steps reference solution
    Oracle(RunArgs),
    /// Difference between two runs
    Compare(CompareArgs),
    /// Mode amplification table and energy monitor
    Probe(RunArgs),
    /// Coefficient decay checks
    Diagnose(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Shipped configuration by name
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    allow_incompatible: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// Run directory or eta.csv
    a: PathBuf,
    /// Run directory or eta.csv
    b: PathBuf,
    /// Compare on the coarser grid when the grids differ
    #[arg(long)]
    resample: bool,
    /// Exit with failure when l_inf exceeds this
    #[arg(long)]
    tol: Option<f64>,
    /// Also write compare.json here
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => RunConfig::load(path)?,
            (None, Some(name)) => RunConfig::preset(name)?,
            (None, None) => {
                return Err(CliError::Config(format!(
                    "one of --config or --preset is required (presets: {})",
                    preset_names().join(", ")
                )))
            }
        };
        cfg.apply(&Overrides {
            out: self.out.clone(),
            modes: self.modes,
            dt: self.dt,
            nx: self.nx,
            alpha: self.alpha,
        });
        Ok(cfg)
    }

    fn options(&self) -> RunOptions {
        RunOptions {
            allow_incompatible: self.allow_incompatible,
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("DELAYWAVE_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (args, cmd): (&RunArgs, fn(&RunConfig, RunOptions) -> _) = match &cli.command {
        Command::Compare(c) => {
            let (report, artifacts) = cmd_compare(
                &c.a,
                &c.b,
                CompareOptions {
                    resample: c.resample,
                    tol: c.tol,
                },
            )?;
            println!(
                "l_inf = {:e}  l2 = {:e}  rel_l_inf = {:e}  points = {}",
                report.l_inf, report.l2, report.rel_l_inf, report.points
            );
            if let Some(dir) = &c.out {
                artifacts.write_to(dir)?;
            }
            return Ok(());
        }
        Command::Solve(a) => (a, cmd_solve),
        Command::Oracle(a) => (a, cmd_oracle),
        Command::Probe(a) => (a, cmd_probe),
        Command::Diagnose(a) => (a, |cfg, _| cmd_diagnose(cfg)),
    };
    let cfg = args.config()?;
    let artifacts = cmd(&cfg, args.options())?;
    let dir = cfg.output_dir();
    for path in artifacts.write_to(&dir)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    configure_threads();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

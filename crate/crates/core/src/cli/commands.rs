use std::path::Path;

use serde_json::{json, Value};

use crate::field::{delay_time_grid, interior_x_grid, fmt_f64, SolutionField};
use crate::oracle::{compare, steps_solve, CompareReport, OracleProblem, StepGrid};
use crate::problem::{
    build_lifting, check_compatibility, to_selfadjoint, CompatibilityReport, ProblemSpec,
    TransformedProblem,
};
use crate::spectral::{decay_diagnostics, DecayReport, SeriesSolution, MIN_FIT_MODES};
use crate::stability::{energy_trace, illposedness_probe, XNorm};

use super::config::{Formulation, RunConfig};
use super::output::Artifacts;
use super::CliError;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub allow_incompatible: bool,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CompareOptions {
    pub resample: bool,
    /// Fail when `l_inf` exceeds this.
    pub tol: Option<f64>,
}

fn json_bytes(v: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("report serializes");
    out.push(b'\n');
    out
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> Result<(), csv::Error>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    f(&mut buf).map_err(|e| CliError::Output(e.to_string()))?;
    Ok(buf)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

/// Problem, compatibility, and transformed problem shared by every command.
struct Prepared {
    spec: ProblemSpec,
    compat: CompatibilityReport,
    tp: TransformedProblem,
    warnings: Vec<String>,
}

fn prepare(cfg: &RunConfig, opts: RunOptions) -> Result<Prepared, CliError> {
    let spec = cfg.problem_spec()?;
    let compat = check_compatibility(&spec, cfg.diagnostics.compat_tol)?;
    let mut warnings = Vec::new();
    if !compat.pass {
        if !opts.allow_incompatible {
            return Err(CliError::Incompatible(compat));
        }
        warnings.push(format!(
            "history does not match boundary data (left {:e}, right {:e})",
            compat.max_violation_left, compat.max_violation_right
        ));
    }
    let tp = to_selfadjoint(&spec)?;
    tp.mode_frequency(1)?;
    Ok(Prepared {
        spec,
        compat,
        tp,
        warnings,
    })
}

fn config_value(cfg: &RunConfig) -> Value {
    let mut v = to_value(cfg);
    // the output location must not change the report
    if let Value::Object(m) = &mut v {
        m.remove("output");
    }
    v
}

fn problem_value(p: &Prepared) -> Value {
    json!({
        "l": p.spec.l,
        "tau": p.spec.tau,
        "horizon": p.spec.horizon,
        "intervals": p.spec.intervals(),
        "kappa": p.tp.kappa,
        "c": p.tp.c,
        "omega_1": p.tp.mode_frequency(1).ok(),
    })
}

fn field_value(f: &SolutionField) -> Value {
    json!({
        "method": f.meta.method,
        "quadrature": f.meta.quadrature,
        "truncation_n": f.truncation_n,
        "nt": f.nt(),
        "nx": f.nx(),
        "t_range": [f.t_grid[0], f.t_grid[f.nt() - 1]],
        "max_abs": f.max_abs(),
        "warnings": f.meta.warnings,
    })
}

fn build_series(cfg: &RunConfig, p: &Prepared) -> Result<SeriesSolution, CliError> {
    let lifted = build_lifting(&p.tp);
    Ok(SeriesSolution::new(&p.tp, &lifted, &cfg.series_settings())?)
}

fn decay_for(
    cfg: &RunConfig,
    series: &SeriesSolution,
    notes: &mut Vec<String>,
) -> Result<Option<DecayReport>, CliError> {
    if series.modes.len() < MIN_FIT_MODES {
        notes.push(format!(
            "decay diagnostics skipped: {} modes, need {MIN_FIT_MODES}",
            series.modes.len()
        ));
        return Ok(None);
    }
    Ok(Some(decay_diagnostics(
        &series.modes,
        series.tp.horizon,
        cfg.diagnostics.alpha,
    )?))
}

/// Series solution: `eta.csv`, `modes.csv`, `report.json`.
pub fn cmd_solve(cfg: &RunConfig, opts: RunOptions) -> Result<Artifacts, CliError> {
    let prep = prepare(cfg, opts)?;
    let series = build_series(cfg, &prep)?;
    let ts = delay_time_grid(prep.spec.tau, cfg.solver.t_samples_per_tau, prep.spec.horizon);
    let xs = interior_x_grid(prep.spec.l, cfg.solver.nx);
    let field = series.assemble(&ts, &xs, false)?;
    let mut notes = Vec::new();
    let decay = decay_for(cfg, &series, &mut notes)?;
    let horizon = *ts.last().unwrap();
    let final_coeffs = series.coefficients_at(horizon)?;
    let modes_csv = csv_bytes(|buf| {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(buf);
        w.write_record(["n", "omega_n", "history_magnitude", "ddphi_max", "abs_coefficient_final"])?;
        for (m, c) in series.modes.iter().zip(&final_coeffs) {
            w.write_record([
                m.n.to_string(),
                fmt_f64(m.omega_n),
                fmt_f64(m.phi_minus_tau.abs() + m.dphi_minus_tau.abs()),
                fmt_f64(m.ddphi.max_abs()),
                fmt_f64(c.abs()),
            ])?;
        }
        w.flush()?;
        Ok(())
    })?;
    let eta = field_csv(&field)?;
    let mut warnings = prep.warnings.clone();
    warnings.extend(field.meta.warnings.iter().cloned());
    warnings.extend(notes);
    let report = json!({
        "command": "solve",
        "config": config_value(cfg),
        "problem": problem_value(&prep),
        "compatibility": to_value(&prep.compat),
        "field": field_value(&field),
        "tail_estimate": field.meta.tail_estimate,
        "decay": decay.as_ref().map(to_value),
        "warnings": warnings,
    });
    let mut out = Artifacts::default();
    out.add("eta.csv", eta);
    out.add("modes.csv", modes_csv);
    out.add("report.json", json_bytes(&report));
    Ok(out)
}

fn oracle_field(cfg: &RunConfig, p: &Prepared) -> Result<SolutionField, CliError> {
    let problem = match cfg.oracle.formulation {
        Formulation::Raw => OracleProblem::from_spec(&p.spec),
        Formulation::Transformed => OracleProblem::from_transformed(&p.tp, false),
    };
    let grid = StepGrid {
        nx: cfg.oracle.nx,
        dt: cfg.oracle_dt(),
        scheme: cfg.oracle.scheme,
    };
    Ok(steps_solve(&problem, &grid)?)
}

fn field_csv(field: &SolutionField) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    field
        .write_csv(&mut buf)
        .map_err(|e| CliError::Output(e.to_string()))?;
    Ok(buf)
}

/// Method-of-steps solution: `eta.csv`, `report.json`.
pub fn cmd_oracle(cfg: &RunConfig, opts: RunOptions) -> Result<Artifacts, CliError> {
    let prep = prepare(cfg, opts)?;
    let field = oracle_field(cfg, &prep)?;
    let mut warnings = prep.warnings.clone();
    warnings.extend(field.meta.warnings.iter().cloned());
    let report = json!({
        "command": "oracle",
        "config": config_value(cfg),
        "problem": problem_value(&prep),
        "compatibility": to_value(&prep.compat),
        "field": field_value(&field),
        "warnings": warnings,
    });
    let mut out = Artifacts::default();
    out.add("eta.csv", field_csv(&field)?);
    out.add("report.json", json_bytes(&report));
    Ok(out)
}

/// Load `eta.csv` from a run directory.
pub fn read_run(dir: &Path) -> Result<SolutionField, CliError> {
    let path = if dir.is_dir() { dir.join("eta.csv") } else { dir.to_path_buf() };
    let file = std::fs::File::open(&path).map_err(|source| CliError::Io {
        context: format!("opening {}", path.display()),
        source,
    })?;
    SolutionField::read_csv(file)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Difference between two runs: `compare.json`.
pub fn cmd_compare(
    a: &Path,
    b: &Path,
    opts: CompareOptions,
) -> Result<(CompareReport, Artifacts), CliError> {
    let fa = read_run(a)?;
    let fb = read_run(b)?;
    let report = compare(&fa, &fb, opts.resample)?;
    let v = json!({
        "command": "compare",
        "a": a.display().to_string(),
        "b": b.display().to_string(),
        "tolerance": opts.tol,
        "result": to_value(&report),
    });
    if let Some(tol) = opts.tol {
        if !(report.l_inf <= tol) {
            return Err(CliError::Tolerance {
                l_inf: report.l_inf,
                tol,
            });
        }
    }
    let mut out = Artifacts::default();
    out.add("compare.json", json_bytes(&v));
    Ok((report, out))
}

/// Mode amplification table and energy monitor: `probe.csv`,
/// `energy.csv`, `report.json`.
pub fn cmd_probe(cfg: &RunConfig, opts: RunOptions) -> Result<Artifacts, CliError> {
    let prep = prepare(cfg, opts)?;
    let probe = illposedness_probe(&prep.tp, cfg.t_star(), cfg.diagnostics.probe_modes)?;
    let field = oracle_field(cfg, &prep)?;
    let norm = XNorm::new(prep.spec.l, cfg.diagnostics.x_norm_modes)?;
    let energy = energy_trace(&prep.spec, &field, &norm)?;
    let amp_max = probe.rows.iter().map(|r| r.amplification).fold(0.0, f64::max);
    let report = json!({
        "command": "probe",
        "config": config_value(cfg),
        "problem": problem_value(&prep),
        "probe": {
            "t_star": probe.t_star,
            "modes": probe.rows.len(),
            "monotone_from": probe.monotone_from,
            "truncated": probe.truncated,
            "contrast_ratio": probe.contrast_ratio,
            "max_amplification": amp_max,
        },
        "energy": {
            "c_a": energy.c_a,
            "pass": energy.pass,
            "margin": energy.margin,
            "source": field.meta.method,
            "samples": energy.t.len(),
        },
        "warnings": prep.warnings,
    });
    let mut out = Artifacts::default();
    out.add("probe.csv", csv_bytes(|b| probe.write_csv(b))?);
    out.add("energy.csv", csv_bytes(|b| energy.write_csv(b))?);
    out.add("report.json", json_bytes(&report));
    Ok(out)
}

/// Coefficient decay checks: `decay.csv`, `report.json`. Incompatible
/// data is reported rather than rejected.
pub fn cmd_diagnose(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let prep = prepare(
        cfg,
        RunOptions {
            allow_incompatible: true,
        },
    )?;
    let series = build_series(cfg, &prep)?;
    let decay = decay_diagnostics(&series.modes, series.tp.horizon, cfg.diagnostics.alpha)?;
    let decay_csv = csv_bytes(|buf| {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(buf);
        let mut header = vec!["n".to_string(), "history".into(), "ddphi".into()];
        header.extend((1..=decay.m).map(|k| format!("forcing_{k}")));
        w.write_record(&header)?;
        for i in 0..decay.history_magnitudes.len() {
            let mut row = vec![
                (i + 1).to_string(),
                fmt_f64(decay.history_magnitudes[i]),
                fmt_f64(decay.ddphi_magnitudes[i]),
            ];
            row.extend(decay.forcing_magnitudes.iter().map(|f| fmt_f64(f[i])));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    })?;
    let report = json!({
        "command": "diagnose",
        "config": config_value(cfg),
        "problem": problem_value(&prep),
        "compatibility": to_value(&prep.compat),
        "decay": to_value(&decay),
        "pass": decay.pass && prep.compat.pass,
        "warnings": prep.warnings,
    });
    let mut out = Artifacts::default();
    out.add("decay.csv", decay_csv);
    out.add("report.json", json_bytes(&report));
    Ok(out)
}

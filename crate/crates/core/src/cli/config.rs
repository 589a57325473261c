//! Run configuration: TOML sections, shipped presets, and overrides.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::exprlang::{DiffExpr, Var};
use crate::oracle::SpatialScheme;
use crate::problem::{ProblemSpec, DEFAULT_COMPAT_TOL};
use crate::quadrature::{QuadratureRule, QuadratureSpec, MIN_PANELS};
use crate::spectral::{SeriesSettings, DEFAULT_HISTORY_DEGREE, DEFAULT_MODES};
use crate::stability::MIN_NORM_MODES;

use super::CliError;

pub const PRESETS: &[(&str, &str)] = &[
    ("zero", include_str!("../../presets/zero.toml")),
    ("mode1", include_str!("../../presets/mode1.toml")),
    ("smooth-compatible", include_str!("../../presets/smooth-compatible.toml")),
    ("drifted", include_str!("../../presets/drifted.toml")),
    ("rough", include_str!("../../presets/rough.toml")),
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

/// A number, or a constant expression such as `"pi"` or `"2*pi"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Value(f64),
    Expr(String),
}

impl Number {
    pub fn resolve(&self, field: &str) -> Result<f64, CliError> {
        match self {
            Number::Value(v) => Ok(*v),
            Number::Expr(s) => {
                let e = crate::exprlang::parse(s).map_err(|err| CliError::Expression {
                    field: field.to_string(),
                    source: err,
                })?;
                if e.depends_on(Var::T) || e.depends_on(Var::X) {
                    return Err(CliError::Config(format!(
                        "{field}: '{s}' must be a constant expression"
                    )));
                }
                e.evaluate(0.0, 0.0)
                    .map_err(|err| CliError::Config(format!("{field}: {err}")))
            }
        }
    }
}

fn zero() -> String {
    "0".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub a: f64,
    #[serde(default)]
    pub b: f64,
    #[serde(default)]
    pub d: f64,
    pub l: Number,
    pub tau: f64,
    pub horizon: f64,
    pub psi: String,
    #[serde(default = "zero")]
    pub theta1: String,
    #[serde(default = "zero")]
    pub theta2: String,
    #[serde(default = "zero")]
    pub g: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub modes: usize,
    pub rule: QuadratureRule,
    pub panels: usize,
    pub history_degree: usize,
    pub t_samples_per_tau: usize,
    /// Interior points of the output grid `x_i = i l/(nx+1)`.
    pub nx: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_tolerance: Option<f64>,
}

impl Default for SolverSection {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self {
            modes: DEFAULT_MODES,
            rule: q.rule,
            panels: q.panels,
            history_degree: DEFAULT_HISTORY_DEGREE,
            t_samples_per_tau: 20,
            nx: 127,
            tail_tolerance: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formulation {
    /// Integrate the equation as given.
    Raw,
    /// Integrate the substituted equation and map back.
    Transformed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSection {
    /// Defaults to `τ/200`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub nx: usize,
    pub scheme: SpatialScheme,
    pub formulation: Formulation,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self {
            dt: None,
            nx: 127,
            scheme: SpatialScheme::Central,
            formulation: Formulation::Raw,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsSection {
    pub alpha: f64,
    pub x_norm_modes: usize,
    /// Defaults to `τ/2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_star: Option<f64>,
    pub probe_modes: usize,
    pub compat_tol: f64,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            x_norm_modes: 32,
            t_star: None,
            probe_modes: 64,
            compat_tol: DEFAULT_COMPAT_TOL,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub oracle: OracleSection,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub modes: Option<usize>,
    pub dt: Option<f64>,
    pub nx: Option<usize>,
    pub alpha: Option<f64>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn preset(name: &str) -> Result<Self, CliError> {
        let (_, text) = PRESETS.iter().find(|(n, _)| *n == name).ok_or_else(|| {
            CliError::Config(format!(
                "unknown preset '{name}' (available: {})",
                preset_names().join(", ")
            ))
        })?;
        Self::from_toml(text)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(dir) = &o.out {
            self.output.dir = Some(dir.clone());
        }
        if let Some(n) = o.modes {
            self.solver.modes = n;
        }
        if let Some(dt) = o.dt {
            self.oracle.dt = Some(dt);
        }
        if let Some(nx) = o.nx {
            self.solver.nx = nx;
            self.oracle.nx = nx;
        }
        if let Some(a) = o.alpha {
            self.diagnostics.alpha = a;
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output.dir.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        QuadratureSpec {
            rule: self.solver.rule,
            panels: self.solver.panels,
            tolerance: None,
        }
    }

    pub fn series_settings(&self) -> SeriesSettings {
        SeriesSettings {
            modes: self.solver.modes,
            quadrature: self.quadrature(),
            history_degree: self.solver.history_degree,
            tail_tolerance: self.solver.tail_tolerance,
        }
    }

    /// Parse every expression and check numeric ranges, then build the problem.
    pub fn problem_spec(&self) -> Result<ProblemSpec, CliError> {
        let p = &self.problem;
        let field = |name: &str, src: &str| -> Result<Arc<DiffExpr>, CliError> {
            DiffExpr::parse(src)
                .map(Arc::new)
                .map_err(|source| CliError::Expression {
                    field: format!("problem.{name}"),
                    source,
                })
        };
        let scalar = |name: &str, src: &str| -> Result<Arc<DiffExpr>, CliError> {
            let e = field(name, src)?;
            if e.expr.depends_on(Var::X) {
                return Err(CliError::Config(format!(
                    "problem.{name}: boundary data must not depend on x"
                )));
            }
            Ok(e)
        };
        let psi = field("psi", &p.psi)?;
        let g = field("g", &p.g)?;
        let theta1 = scalar("theta1", &p.theta1)?;
        let theta2 = scalar("theta2", &p.theta2)?;
        self.check_ranges()?;
        let spec = ProblemSpec {
            a: p.a,
            b: p.b,
            d: p.d,
            l: p.l.resolve("problem.l")?,
            tau: p.tau,
            horizon: p.horizon,
            psi,
            theta1,
            theta2,
            g,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn check_ranges(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let s = &self.solver;
        if s.modes == 0 {
            return bad("solver.modes must be at least 1".into());
        }
        if s.panels < MIN_PANELS {
            return bad(format!("solver.panels must be at least {MIN_PANELS}"));
        }
        if s.history_degree < 2 {
            return bad("solver.history_degree must be at least 2".into());
        }
        if s.t_samples_per_tau == 0 {
            return bad("solver.t_samples_per_tau must be at least 1".into());
        }
        if s.nx == 0 {
            return bad("solver.nx must be at least 1".into());
        }
        if let Some(dt) = self.oracle.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("oracle.dt must be positive, got {dt}"));
            }
        }
        let dg = &self.diagnostics;
        if !(dg.alpha >= 0.0 && dg.alpha.is_finite()) {
            return bad(format!("diagnostics.alpha must be non-negative, got {}", dg.alpha));
        }
        if dg.x_norm_modes < MIN_NORM_MODES {
            return bad(format!(
                "diagnostics.x_norm_modes must be at least {MIN_NORM_MODES}"
            ));
        }
        if dg.probe_modes == 0 {
            return bad("diagnostics.probe_modes must be at least 1".into());
        }
        if !(dg.compat_tol >= 0.0) {
            return bad("diagnostics.compat_tol must be non-negative".into());
        }
        Ok(())
    }

    pub fn oracle_dt(&self) -> f64 {
        self.oracle.dt.unwrap_or(self.problem.tau / 200.0)
    }

    pub fn t_star(&self) -> f64 {
        self.diagnostics.t_star.unwrap_or(0.5 * self.problem.tau)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse_and_build() {
        for name in preset_names() {
            let cfg = RunConfig::preset(name).unwrap();
            cfg.problem_spec().unwrap();
        }
        let cfg = RunConfig::preset("mode1").unwrap();
        assert_eq!(cfg.problem_spec().unwrap().l, std::f64::consts::PI);
        assert_eq!(cfg.solver.t_samples_per_tau, 20);
    }

    #[test]
    fn bad_configs() {
        assert!(RunConfig::preset("nope").is_err());
        let text = "[problem]\na = 1\nl = 1\ntau = 1\nhorizon = 1\npsi = \"t^^2\"\n";
        let err = RunConfig::from_toml(text).unwrap().problem_spec().unwrap_err();
        assert!(err.to_string().contains("1:3"), "{err}");
        let text = "[problem]\na = 1\nl = \"x\"\ntau = 1\nhorizon = 1\npsi = \"0\"\n";
        assert!(RunConfig::from_toml(text).unwrap().problem_spec().is_err());
        let text = "[problem]\na = 1\nl = 1\ntau = 1\nhorizon = 1\npsi = \"0\"\ntheta1 = \"x\"\n";
        assert!(RunConfig::from_toml(text).unwrap().problem_spec().is_err());
        assert!(RunConfig::from_toml("[problem]\nbogus = 1\n").is_err());
    }

    #[test]
    fn overrides_win() {
        let mut cfg = RunConfig::preset("zero").unwrap();
        cfg.apply(&Overrides {
            modes: Some(8),
            nx: Some(31),
            dt: Some(0.01),
            ..Default::default()
        });
        assert_eq!(cfg.solver.modes, 8);
        assert_eq!((cfg.solver.nx, cfg.oracle.nx), (31, 31));
        assert_eq!(cfg.oracle_dt(), 0.01);
    }
}

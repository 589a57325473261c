//! Fourier sine series solution of the transformed problem.
//!
//! With `Φ = φ - G` and `F` from [`crate::problem::build_lifting`], the
//! solution is
//!
//! ```text
//! ξ(t,x) = Σ_n T_n(t) sin(πnx/l) + G(t,x)
//! T̈_n(t) + ω_n² T_n(t-τ) = F_n(t),   T_n = Φ_n on [-τ, 0]
//! ```
//!
//! where `Φ_n`, `F_n` are sine coefficients. Each `T_n` is evaluated with
//! [`crate::delay_ode::solve_mode`] from `Φ_n(-τ)`, `Φ̇_n(-τ)`, `Φ̈_n` and
//! `F_n`; the last two are sampled at Chebyshev-Lobatto nodes (one panel
//! per delay interval) and interpolated.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::delay_ode::{solve_mode_checked, ModeData, OdeError};
use crate::delay_trig::{DelayKernelParams, DelayTrigError};
use crate::field::{FieldMeta, SolutionField};
use crate::funcs::{FieldFn, FuncError};
use crate::interp::{lobatto_nodes, ChebPanel, PiecewiseCheb};
use crate::problem::{intervals, LiftedData, ProblemError, TransformedProblem};
use crate::quadrature::QuadratureSpec;

pub const DEFAULT_MODES: usize = 40;
pub const DEFAULT_HISTORY_DEGREE: usize = 24;
/// Minimum number of modes for an exponent fit.
pub const MIN_FIT_MODES: usize = 8;
/// Magnitudes below this fraction of the largest one are treated as zero.
pub const NOISE_FLOOR: f64 = 1e-11;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("at least one mode is required")]
    NoModes,
    #[error("decay fits need at least {MIN_FIT_MODES} modes, got {0}")]
    TooFewModes(usize),
    #[error("sine coefficients at t = {t}: {source}")]
    Coefficients { t: f64, source: FuncError },
    #[error("mode {n}: {source}")]
    Mode { n: usize, source: OdeError },
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Trig(#[from] DelayTrigError),
    #[error(transparent)]
    Data(#[from] FuncError),
}

/// `sin(πnx/l)`, exactly 0 at both ends.
pub fn sine_mode(n: usize, x: f64, l: f64) -> f64 {
    if x == 0.0 || x == l {
        0.0
    } else {
        (std::f64::consts::PI * n as f64 * x / l).sin()
    }
}

/// Quadrature nodes on `[0, l]` with the sine basis tabulated at each.
#[derive(Debug, Clone)]
pub struct SineBasis {
    pub l: f64,
    pub modes: usize,
    nodes: Vec<(f64, f64)>,
    table: Vec<f64>,
}

impl SineBasis {
    /// Panels: the configured count, but at least `8N`.
    pub fn new(l: f64, modes: usize, q: &QuadratureSpec) -> Self {
        let panels = q.panels.max(8 * modes);
        let nodes = q.nodes(0.0, l, panels);
        let mut table = Vec::with_capacity(nodes.len() * modes);
        for &(x, w) in &nodes {
            for n in 1..=modes {
                table.push(2.0 / l * w * sine_mode(n, x, l));
            }
        }
        Self {
            l,
            modes,
            nodes,
            table,
        }
    }

    /// `(2/l) ∫₀ˡ f(s) sin(πns/l) ds` for `n = 1..=N`.
    pub fn coefficients<E>(
        &self,
        mut f: impl FnMut(f64) -> Result<f64, E>,
    ) -> Result<Vec<f64>, E> {
        let mut out = vec![0.0; self.modes];
        for (i, &(x, _)) in self.nodes.iter().enumerate() {
            let v = f(x)?;
            if v == 0.0 {
                continue;
            }
            let row = &self.table[i * self.modes..(i + 1) * self.modes];
            for (o, s) in out.iter_mut().zip(row) {
                *o += v * s;
            }
        }
        Ok(out)
    }
}

pub fn sine_coefficients<E>(
    f: impl FnMut(f64) -> Result<f64, E>,
    l: f64,
    modes: usize,
    q: &QuadratureSpec,
) -> Result<Vec<f64>, E> {
    SineBasis::new(l, modes, q).coefficients(f)
}

/// `Σ_n c_n sin(πnx/l)`.
pub fn synthesize(coeffs: &[f64], x: f64, l: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c * sine_mode(k + 1, x, l))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesSettings {
    pub modes: usize,
    pub quadrature: QuadratureSpec,
    /// Chebyshev degree per delay interval for `Φ̈_n` and `F_n`.
    pub history_degree: usize,
    /// Warn when the estimated series tail exceeds this.
    pub tail_tolerance: Option<f64>,
}

impl Default for SeriesSettings {
    fn default() -> Self {
        Self {
            modes: DEFAULT_MODES,
            quadrature: QuadratureSpec::default(),
            history_degree: DEFAULT_HISTORY_DEGREE,
            tail_tolerance: None,
        }
    }
}

/// Fourier data and solved coefficient of one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSolution {
    pub n: usize,
    pub omega_n: f64,
    pub tau: f64,
    pub phi_minus_tau: f64,
    pub dphi_minus_tau: f64,
    /// `Φ̈_n` on `[-τ, 0]`.
    pub ddphi: PiecewiseCheb,
    /// `F_n` on `[0, T]`.
    pub forcing: PiecewiseCheb,
    pub quadrature: QuadratureSpec,
}

impl ModeSolution {
    pub fn params(&self) -> DelayKernelParams {
        DelayKernelParams::new(self.omega_n, self.tau).expect("validated at construction")
    }

    pub fn ddphi_samples(&self) -> Vec<(f64, f64)> {
        self.ddphi.samples()
    }

    pub fn forcing_samples(&self) -> Vec<(f64, f64)> {
        self.forcing.samples()
    }

    pub fn is_trivial(&self) -> bool {
        self.phi_minus_tau == 0.0
            && self.dphi_minus_tau == 0.0
            && self.ddphi.max_abs() == 0.0
            && self.forcing.max_abs() == 0.0
    }

    fn breaks(&self) -> Vec<f64> {
        let mut b = self.ddphi.breaks();
        b.extend(self.forcing.breaks());
        b
    }

    /// `T_n(t)` with quadrature warnings.
    pub fn solve_checked(&self, t: f64) -> Result<(f64, Vec<String>), OdeError> {
        if self.is_trivial() {
            return Ok((0.0, Vec::new()));
        }
        let breaks = self.breaks();
        let has_forcing = self.forcing.max_abs() != 0.0;
        let data = ModeData {
            phi_minus_tau: self.phi_minus_tau,
            dphi_minus_tau: self.dphi_minus_tau,
            ddphi: &self.ddphi,
            forcing: has_forcing.then_some(&self.forcing as _),
            breaks: &breaks,
        };
        let out = solve_mode_checked(self.params(), &data, t, &self.quadrature)?;
        Ok((out.value, out.warnings))
    }

    pub fn t_n(&self, t: f64) -> Result<f64, OdeError> {
        Ok(self.solve_checked(t)?.0)
    }
}

fn sample_panels(
    basis: &SineBasis,
    field: &dyn FieldFn,
    order: u8,
    panels: &[(f64, f64)],
    degree: usize,
) -> Result<Vec<PiecewiseCheb>, SpectralError> {
    // per panel, per node: coefficient vector over modes
    let per_panel: Vec<Vec<Vec<f64>>> = panels
        .iter()
        .map(|&(a, b)| {
            lobatto_nodes(a, b, degree)
                .par_iter()
                .map(|&t| {
                    basis
                        .coefficients(|x| field.eval(order, t, x))
                        .map_err(|source| SpectralError::Coefficients { t, source })
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    Ok((0..basis.modes)
        .map(|k| PiecewiseCheb {
            panels: panels
                .iter()
                .zip(&per_panel)
                .map(|(&(a, b), nodes)| ChebPanel::new(a, b, nodes.iter().map(|c| c[k]).collect()))
                .collect(),
        })
        .collect())
}

/// Compute Fourier data for modes `1..=settings.modes`.
pub fn build_modes(
    tp: &TransformedProblem,
    lifted: &LiftedData,
    settings: &SeriesSettings,
) -> Result<Vec<ModeSolution>, SpectralError> {
    let n_modes = settings.modes;
    if n_modes == 0 {
        return Err(SpectralError::NoModes);
    }
    settings
        .quadrature
        .validate()
        .map_err(|e| SpectralError::Data(FuncError::Other(e.to_string())))?;
    let omegas = (1..=n_modes)
        .map(|n| tp.mode_frequency(n))
        .collect::<Result<Vec<_>, _>>()?;
    let tau = tp.tau;
    let basis = SineBasis::new(tp.l, n_modes, &settings.quadrature);
    let phi = lifted.big_phi.as_ref();
    let at = |order: u8| {
        basis
            .coefficients(|x| phi.eval(order, -tau, x))
            .map_err(|source| SpectralError::Coefficients { t: -tau, source })
    };
    let phi0 = at(0)?;
    let dphi0 = at(1)?;
    let degree = settings.history_degree.max(2);
    let ddphi = sample_panels(&basis, phi, 2, &[(-tau, 0.0)], degree)?;
    let m = tp.intervals();
    let f_panels: Vec<(f64, f64)> = (1..=m)
        .map(|k| ((k - 1) as f64 * tau, (k as f64 * tau).min(tp.horizon)))
        .filter(|(a, b)| b > a)
        .collect();
    let forcing = sample_panels(&basis, lifted.big_f.as_ref(), 0, &f_panels, degree)?;
    let out = omegas
        .into_iter()
        .zip(ddphi)
        .zip(forcing)
        .enumerate()
        .map(|(k, ((omega_n, ddphi), forcing))| {
            DelayKernelParams::new(omega_n, tau)?;
            Ok(ModeSolution {
                n: k + 1,
                omega_n,
                tau,
                phi_minus_tau: phi0[k],
                dphi_minus_tau: dphi0[k],
                ddphi,
                forcing,
                quadrature: settings.quadrature,
            })
        })
        .collect::<Result<Vec<_>, SpectralError>>()?;
    Ok(out)
}

/// Data of the single mode `n`.
pub fn build_mode(
    tp: &TransformedProblem,
    lifted: &LiftedData,
    n: usize,
    settings: &SeriesSettings,
) -> Result<ModeSolution, SpectralError> {
    if n == 0 {
        return Err(SpectralError::Problem(ProblemError::ModeIndex));
    }
    let s = SeriesSettings {
        modes: n,
        ..*settings
    };
    Ok(build_modes(tp, lifted, &s)?.pop().expect("n ≥ 1 modes"))
}

/// A solved truncated series.
#[derive(Clone)]
pub struct SeriesSolution {
    pub tp: TransformedProblem,
    pub lifted: LiftedData,
    pub modes: Vec<ModeSolution>,
    pub settings: SeriesSettings,
}

impl SeriesSolution {
    pub fn new(
        tp: &TransformedProblem,
        lifted: &LiftedData,
        settings: &SeriesSettings,
    ) -> Result<Self, SpectralError> {
        Ok(Self {
            tp: tp.clone(),
            lifted: lifted.clone(),
            modes: build_modes(tp, lifted, settings)?,
            settings: *settings,
        })
    }

    /// `T_n(t)` for every time in `ts`; rows are modes. Parallel over modes.
    pub fn coefficient_table(&self, ts: &[f64]) -> Result<(Vec<Vec<f64>>, Vec<String>), SpectralError> {
        let rows: Vec<(Vec<f64>, Vec<String>)> = self
            .modes
            .par_iter()
            .map(|m| {
                let mut vals = Vec::with_capacity(ts.len());
                let mut warns = Vec::new();
                for &t in ts {
                    let (v, w) = m
                        .solve_checked(t)
                        .map_err(|source| SpectralError::Mode { n: m.n, source })?;
                    vals.push(v);
                    for msg in w {
                        if !warns.contains(&msg) {
                            warns.push(msg);
                        }
                    }
                }
                Ok((vals, warns))
            })
            .collect::<Result<_, SpectralError>>()?;
        let mut warnings = Vec::new();
        let mut table = Vec::with_capacity(rows.len());
        for (n, (vals, w)) in rows.into_iter().enumerate() {
            for msg in w {
                warnings.push(format!("mode {}: {msg}", n + 1));
            }
            table.push(vals);
        }
        Ok((table, warnings))
    }

    pub fn coefficients_at(&self, t: f64) -> Result<Vec<f64>, SpectralError> {
        let (table, _) = self.coefficient_table(&[t])?;
        Ok(table.into_iter().map(|r| r[0]).collect())
    }

    /// `ξ(t, x)`.
    pub fn xi(&self, t: f64, x: f64) -> Result<f64, SpectralError> {
        let c = self.coefficients_at(t)?;
        Ok(synthesize(&c, x, self.tp.l) + self.lifted.big_g.eval(0, t, x)?)
    }

    /// `η(t, x) = e^{-κx} ξ(t, x)`.
    pub fn eta(&self, t: f64, x: f64) -> Result<f64, SpectralError> {
        Ok(self.tp.back_factor(x) * self.xi(t, x)?)
    }

    /// Evaluate `η` (or `ξ` when `transformed`) on a grid.
    pub fn assemble(
        &self,
        t_grid: &[f64],
        x_grid: &[f64],
        transformed: bool,
    ) -> Result<SolutionField, SpectralError> {
        assemble_solution(self, t_grid, x_grid, transformed)
    }
}

/// Sum the series on a grid and undo the substitution.
pub fn assemble_solution(
    series: &SeriesSolution,
    t_grid: &[f64],
    x_grid: &[f64],
    transformed: bool,
) -> Result<SolutionField, SpectralError> {
    if series.modes.is_empty() {
        return Err(SpectralError::NoModes);
    }
    let l = series.tp.l;
    let (table, mut warnings) = series.coefficient_table(t_grid)?;
    let n_modes = series.modes.len();
    let sines: Vec<Vec<f64>> = x_grid
        .iter()
        .map(|&x| (1..=n_modes).map(|n| sine_mode(n, x, l)).collect())
        .collect();
    let back: Vec<f64> = x_grid
        .iter()
        .map(|&x| if transformed { 1.0 } else { series.tp.back_factor(x) })
        .collect();
    let back_max = back.iter().fold(0.0_f64, |m, v| m.max(*v));
    let mut values = Vec::with_capacity(t_grid.len() * x_grid.len());
    let mut tail = Vec::with_capacity(t_grid.len());
    for (i, &t) in t_grid.iter().enumerate() {
        for (j, &x) in x_grid.iter().enumerate() {
            let mut s = 0.0;
            for k in 0..n_modes {
                s += table[k][i] * sines[j][k];
            }
            let xi = s + series.lifted.big_g.eval(0, t, x)?;
            values.push(back[j] * xi);
        }
        let last = table[n_modes - 1][i].abs();
        let prev = if n_modes > 1 {
            table[n_modes - 2][i].abs()
        } else {
            0.0
        };
        tail.push(back_max * (last + prev));
    }
    if let Some(tol) = series.settings.tail_tolerance {
        let worst = tail.iter().cloned().fold(0.0_f64, f64::max);
        if worst > tol {
            warnings.push(format!(
                "series tail estimate {worst:e} exceeds tolerance {tol:e}; increase modes"
            ));
        }
    }
    let mut field = SolutionField::new(t_grid.to_vec(), x_grid.to_vec(), values)
        .map_err(|e| SpectralError::Data(FuncError::Other(e.to_string())))?;
    field.truncation_n = Some(n_modes);
    field.meta = FieldMeta {
        method: if transformed { "series-xi" } else { "series" }.to_string(),
        quadrature: Some(series.settings.quadrature),
        warnings,
        tail_estimate: tail,
    };
    Ok(field)
}

/// One decay condition: fitted algebraic rate against the required one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayCondition {
    pub name: String,
    pub required_exponent: f64,
    pub fitted_exponent: Option<f64>,
    pub fit_stderr: Option<f64>,
    pub modes_used: usize,
    pub pass: bool,
    pub reason: String,
}

/// Least-squares fit of `ln|c_n|` against `ln n` over modes above the
/// noise floor. Passes when the slope is at most `-required` within two
/// standard errors, or when fewer than three modes rise above the floor.
pub fn decay_from_magnitudes(
    name: &str,
    magnitudes: &[f64],
    required: f64,
    floor: f64,
) -> DecayCondition {
    let pts: Vec<(f64, f64)> = magnitudes
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > floor && m > 0.0)
        .map(|(k, &m)| (((k + 1) as f64).ln(), m.ln()))
        .collect();
    let mut cond = DecayCondition {
        name: name.to_string(),
        required_exponent: -required,
        fitted_exponent: None,
        fit_stderr: None,
        modes_used: pts.len(),
        pass: true,
        reason: String::new(),
    };
    if pts.len() < 3 {
        cond.reason = format!(
            "{} mode(s) above the noise floor; coefficients vanish beyond them",
            pts.len()
        );
        return cond;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let se = if pts.len() > 2 {
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    cond.fitted_exponent = Some(slope);
    cond.fit_stderr = Some(se);
    cond.pass = slope - 2.0 * se <= -required;
    cond.reason = if cond.pass {
        format!("fitted exponent {slope:.3} ≤ {:.3} within fit error", -required)
    } else {
        format!("fitted exponent {slope:.3} > {:.3}", -required)
    };
    cond
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    /// `⌈T/τ⌉`.
    pub m: usize,
    pub alpha: f64,
    /// `|Φ_n(-τ)| + |Φ̇_n(-τ)|`.
    pub history_magnitudes: Vec<f64>,
    /// `max_{[-τ,0]} |Φ̈_n|`.
    pub ddphi_magnitudes: Vec<f64>,
    /// Per `k = 1..=m`, `max |F_n|` over `[(k-1)τ, min{kτ, T}]`.
    pub forcing_magnitudes: Vec<Vec<f64>>,
    pub history: DecayCondition,
    pub ddphi: DecayCondition,
    pub forcing: Vec<DecayCondition>,
    pub pass: bool,
    pub notes: Vec<String>,
}

pub fn decay_diagnostics(
    modes: &[ModeSolution],
    horizon: f64,
    alpha: f64,
) -> Result<DecayReport, SpectralError> {
    if modes.len() < MIN_FIT_MODES {
        return Err(SpectralError::TooFewModes(modes.len()));
    }
    let tau = modes[0].tau;
    let m = intervals(horizon, tau);
    let hist: Vec<f64> = modes
        .iter()
        .map(|md| md.phi_minus_tau.abs() + md.dphi_minus_tau.abs())
        .collect();
    let dd: Vec<f64> = modes.iter().map(|md| md.ddphi.max_abs()).collect();
    let forcing: Vec<Vec<f64>> = (1..=m)
        .map(|k| {
            let lo = (k - 1) as f64 * tau;
            let hi = (k as f64 * tau).min(horizon);
            modes.iter().map(|md| md.forcing.max_abs_on(lo, hi)).collect()
        })
        .collect();
    let global = hist
        .iter()
        .chain(&dd)
        .chain(forcing.iter().flatten())
        .fold(0.0_f64, |a, b| a.max(*b));
    let floor = NOISE_FLOOR * global;
    let req_m = (2 * m + 3) as f64 + alpha;
    let history = decay_from_magnitudes("history", &hist, req_m, floor);
    let ddphi = decay_from_magnitudes("history_second_derivative", &dd, req_m, floor);
    let forcing_conds: Vec<DecayCondition> = forcing
        .iter()
        .enumerate()
        .map(|(i, mags)| {
            let k = i + 1;
            decay_from_magnitudes(
                &format!("forcing_k{k}"),
                mags,
                (2 * k + 3) as f64 + alpha,
                floor,
            )
        })
        .collect();
    let pass = history.pass && ddphi.pass && forcing_conds.iter().all(|c| c.pass);
    Ok(DecayReport {
        m,
        alpha,
        history_magnitudes: hist,
        ddphi_magnitudes: dd,
        forcing_magnitudes: forcing,
        history,
        ddphi,
        forcing: forcing_conds,
        pass,
        notes: vec![
            "forcing windows end at min{kτ, T}".to_string(),
            format!(
                "magnitudes below {NOISE_FLOOR:e} of the largest data coefficient are treated as zero"
            ),
        ],
    })
}

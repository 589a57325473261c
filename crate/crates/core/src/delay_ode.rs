//! Closed-form solutions of the pure-delay oscillator
//! `ẍ(t) + ω² x(t-τ) = f(t)`.
//!
//! With history `x = β` on `[-τ, 0]`:
//!
//! ```text
//! x(t) = β(-τ) cos_τ(ω,t) + β̇(-τ)/ω sin_τ(ω,t) + 1/ω ∫_{-τ}^{0} sin_τ(ω, t-τ-s) β̈(s) ds
//!      + 1/ω ∫_{0}^{t} sin_τ(ω, t-τ-s) f(s) ds
//! ```
//!
//! The integrands are piecewise polynomials in `s` with joins where
//! `t-τ-s` crosses a node, so every integral is split there.

use thiserror::Error;

use crate::delay_trig::{
    delay_cos, delay_sin, eval_segment, segment_index, DelayKernelParams, DelayTrigError,
    DelayTrigFn,
};
use crate::funcs::{FuncError, HistoryFunction, ScalarFn};
use crate::quadrature::{split_interval, Piece, QuadratureError, QuadratureSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("formula requires ω > 0")]
    ZeroFrequency,
    #[error(transparent)]
    Trig(#[from] DelayTrigError),
    #[error(transparent)]
    Data(#[from] FuncError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// A value plus any quadrature warnings raised while computing it.
#[derive(Debug, Clone, PartialEq)]
pub struct Checked {
    pub value: f64,
    pub warnings: Vec<String>,
}

fn require_positive(p: DelayKernelParams) -> Result<(), OdeError> {
    if p.omega() > 0.0 {
        Ok(())
    } else {
        Err(OdeError::ZeroFrequency)
    }
}

/// Pieces of `[lo, hi]` on which `s ↦ sin_τ(ω, t-τ-s)` is one polynomial.
/// `extra` adds joins of the other factor.
fn kernel_pieces(p: DelayKernelParams, t: f64, lo: f64, hi: f64, extra: &[f64]) -> Vec<Piece> {
    let tau = p.tau();
    // joins at s = t - jτ, covering the range of j that can land in [lo, hi]
    let j_lo = ((t - hi) / tau).floor() as i64 - 1;
    let j_hi = ((t - lo) / tau).ceil() as i64 + 1;
    let mut breaks: Vec<f64> = (j_lo..=j_hi).map(|j| t - j as f64 * tau).collect();
    breaks.extend_from_slice(extra);
    split_interval(lo, hi, &breaks)
}

/// `∫_{lo}^{hi} sin_τ(ω, t-τ-s) h(s) ds` with the kernel's joins honored.
fn kernel_integral(
    p: DelayKernelParams,
    t: f64,
    lo: f64,
    hi: f64,
    extra: &[f64],
    h: &dyn ScalarFn,
    h_order: u8,
    q: &QuadratureSpec,
    warnings: &mut Vec<String>,
) -> Result<f64, OdeError> {
    // the kernel vanishes once t-τ-s < -τ, i.e. for s > t
    let hi = hi.min(t);
    if hi <= lo {
        return Ok(0.0);
    }
    let pieces = kernel_pieces(p, t, lo, hi, extra);
    let tau = p.tau();
    let outcome = q.integrate_pieces_checked(&pieces, |pc, s| -> Result<f64, OdeError> {
        // segment from the piece midpoint, so nodes on piece ends are unambiguous
        let seg = segment_index(t - tau - pc.mid(), tau)?;
        let k = eval_segment(p, DelayTrigFn::Sin, seg, t - tau - s, 0)?;
        Ok(k * h.eval(h_order, s)?)
    })?;
    if let Some(w) = outcome.warning {
        warnings.push(w);
    }
    Ok(outcome.value)
}

/// Homogeneous solution with history `β`, plus quadrature warnings.
pub fn solve_homogeneous_checked(
    p: DelayKernelParams,
    beta: &HistoryFunction,
    t: f64,
    q: &QuadratureSpec,
) -> Result<Checked, OdeError> {
    require_positive(p)?;
    q.validate()?;
    let tau = p.tau();
    let omega = p.omega();
    let b0 = beta.value(-tau)?;
    let b1 = beta.first_derivative(-tau)?;
    let mut warnings = Vec::new();
    let integral = kernel_integral(p, t, -tau, 0.0, &[], beta.as_scalar(), 2, q, &mut warnings)?;
    let value = b0 * delay_cos(p, t)? + (b1 * delay_sin(p, t)? + integral) / omega;
    Ok(Checked { value, warnings })
}

pub fn solve_homogeneous(
    p: DelayKernelParams,
    beta: &HistoryFunction,
    t: f64,
    q: &QuadratureSpec,
) -> Result<f64, OdeError> {
    Ok(solve_homogeneous_checked(p, beta, t, q)?.value)
}

/// Response to forcing `f` from zero history; 0 for `t ≤ 0`.
pub fn solve_forced(
    p: DelayKernelParams,
    f: &dyn ScalarFn,
    t: f64,
    q: &QuadratureSpec,
) -> Result<f64, OdeError> {
    solve_forced_with_breaks(p, f, &[], t, q, &mut Vec::new())
}

/// As [`solve_forced`], with extra joins where `f` itself is only piecewise
/// smooth.
pub fn solve_forced_with_breaks(
    p: DelayKernelParams,
    f: &dyn ScalarFn,
    f_breaks: &[f64],
    t: f64,
    q: &QuadratureSpec,
    warnings: &mut Vec<String>,
) -> Result<f64, OdeError> {
    require_positive(p)?;
    q.validate()?;
    if t <= 0.0 {
        return Ok(0.0);
    }
    let integral = kernel_integral(p, t, 0.0, t, f_breaks, f, 0, q, warnings)?;
    Ok(integral / p.omega())
}

/// One Fourier mode: history data `Φ(-τ)`, `Φ̇(-τ)`, `Φ̈` on `[-τ, 0]`,
/// and forcing `F` on `[0, t]`.
pub struct ModeData<'a> {
    pub phi_minus_tau: f64,
    pub dphi_minus_tau: f64,
    pub ddphi: &'a dyn ScalarFn,
    pub forcing: Option<&'a dyn ScalarFn>,
    /// Joins of `ddphi` and `forcing` (e.g. interpolation panel ends).
    pub breaks: &'a [f64],
}

/// `T(t)` for one mode: homogeneous part from the history data plus the
/// forced response.
pub fn solve_mode(
    p: DelayKernelParams,
    mode: &ModeData<'_>,
    t: f64,
    q: &QuadratureSpec,
) -> Result<f64, OdeError> {
    Ok(solve_mode_checked(p, mode, t, q)?.value)
}

pub fn solve_mode_checked(
    p: DelayKernelParams,
    mode: &ModeData<'_>,
    t: f64,
    q: &QuadratureSpec,
) -> Result<Checked, OdeError> {
    require_positive(p)?;
    q.validate()?;
    let tau = p.tau();
    let omega = p.omega();
    let mut warnings = Vec::new();
    let hist = kernel_integral(p, t, -tau, 0.0, mode.breaks, mode.ddphi, 0, q, &mut warnings)?;
    let mut value = mode.phi_minus_tau * delay_cos(p, t)?
        + (mode.dphi_minus_tau * delay_sin(p, t)? + hist) / omega;
    if let Some(f) = mode.forcing {
        value += solve_forced_with_breaks(p, f, mode.breaks, t, q, &mut warnings)?;
    }
    Ok(Checked { value, warnings })
}

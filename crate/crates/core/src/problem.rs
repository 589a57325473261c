//! The initial-boundary value problem
//!
//! ```text
//! η_tt(t,x) = a² η_xx(t-τ,x) + b η_x(t-τ,x) + d η(t-τ,x) + g(t,x),   0 < t ≤ T, 0 < x < l
//! η(t,0) = θ₁(t),  η(t,l) = θ₂(t)
//! η(t,x) = ψ(t,x),  -τ ≤ t ≤ 0
//! ```
//!
//! and its reduction to `ξ_tt = a² ξ_xx(t-τ) + c ξ(t-τ) + f` by
//! `ξ = e^{κx} η` with `κ = b/(2a²)` and `c = d - b²/(4a²)`, followed by
//! the affine boundary lifting `G`.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::funcs::{FieldFn, FuncError, ScalarFn, SharedField, SharedScalar};

pub const DEFAULT_COMPAT_TOL: f64 = 1e-9;

/// Minimum number of time samples used by [`check_compatibility`].
pub const COMPAT_SAMPLES: usize = 101;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error(
        "oscillation condition violated; series construction inapplicable \
         ((πa/l)² = {lhs} must exceed c = {c})"
    )]
    OscillationViolated { lhs: f64, c: f64 },
    #[error("mode index must be at least 1")]
    ModeIndex,
    #[error(transparent)]
    Data(#[from] FuncError),
}

/// Coefficients, geometry and data of one problem.
#[derive(Clone)]
pub struct ProblemSpec {
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub l: f64,
    pub tau: f64,
    pub horizon: f64,
    pub psi: SharedField,
    pub theta1: SharedScalar,
    pub theta2: SharedScalar,
    pub g: SharedField,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("d", &self.d)
            .field("l", &self.l)
            .field("tau", &self.tau)
            .field("horizon", &self.horizon)
            .finish_non_exhaustive()
    }
}

fn positive(name: &'static str, value: f64) -> Result<(), ProblemError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ProblemError::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}

fn finite(name: &'static str, value: f64) -> Result<(), ProblemError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ProblemError::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        })
    }
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<(), ProblemError> {
        positive("a", self.a)?;
        finite("b", self.b)?;
        finite("d", self.d)?;
        positive("l", self.l)?;
        positive("tau", self.tau)?;
        positive("horizon", self.horizon)?;
        Ok(())
    }

    /// Number of delay intervals needed to reach the horizon, `⌈T/τ⌉`.
    pub fn intervals(&self) -> usize {
        intervals(self.horizon, self.tau)
    }
}

pub(crate) fn intervals(horizon: f64, tau: f64) -> usize {
    let r = horizon / tau;
    // tolerate rounding in T/τ for horizons that are whole multiples
    let k = (r - 1e-12 * r.max(1.0)).ceil();
    (k as usize).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompatibilityReport {
    pub max_violation_left: f64,
    pub max_violation_right: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Compare `ψ(t,0)` with `θ₁(t)` and `ψ(t,l)` with `θ₂(t)` on
/// `samples.max(101)` uniform points of `[-τ, 0]`.
pub fn check_compatibility_with(
    spec: &ProblemSpec,
    tol: f64,
    samples: usize,
) -> Result<CompatibilityReport, ProblemError> {
    let n = samples.max(COMPAT_SAMPLES);
    let (mut left, mut right) = (0.0_f64, 0.0_f64);
    for i in 0..n {
        let t = -spec.tau + spec.tau * i as f64 / (n - 1) as f64;
        left = left.max((spec.psi.eval(0, t, 0.0)? - spec.theta1.eval(0, t)?).abs());
        right = right.max((spec.psi.eval(0, t, spec.l)? - spec.theta2.eval(0, t)?).abs());
    }
    Ok(CompatibilityReport {
        max_violation_left: left,
        max_violation_right: right,
        tol,
        pass: left <= tol && right <= tol,
    })
}

pub fn check_compatibility(
    spec: &ProblemSpec,
    tol: f64,
) -> Result<CompatibilityReport, ProblemError> {
    check_compatibility_with(spec, tol, COMPAT_SAMPLES)
}

/// `e^{κx} · inner(t, x)`.
struct ExpWeighted {
    inner: SharedField,
    kappa: f64,
}

impl FieldFn for ExpWeighted {
    fn eval(&self, order: u8, t: f64, x: f64) -> Result<f64, FuncError> {
        if self.kappa == 0.0 {
            return self.inner.eval(order, t, x);
        }
        Ok((self.kappa * x).exp() * self.inner.eval(order, t, x)?)
    }
}

struct Scaled {
    inner: SharedScalar,
    factor: f64,
}

impl ScalarFn for Scaled {
    fn eval(&self, order: u8, t: f64) -> Result<f64, FuncError> {
        Ok(self.factor * self.inner.eval(order, t)?)
    }
}

/// The self-adjoint form `ξ_tt = a² ξ_xx(t-τ) + c ξ(t-τ) + f`.
#[derive(Clone)]
pub struct TransformedProblem {
    pub a: f64,
    pub l: f64,
    pub tau: f64,
    pub horizon: f64,
    /// `b/(2a²)`; `ξ = e^{κx} η`.
    pub kappa: f64,
    pub c: f64,
    pub mu1: SharedScalar,
    pub mu2: SharedScalar,
    pub phi: SharedField,
    pub f: SharedField,
}

impl std::fmt::Debug for TransformedProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransformedProblem")
            .field("a", &self.a)
            .field("l", &self.l)
            .field("tau", &self.tau)
            .field("horizon", &self.horizon)
            .field("kappa", &self.kappa)
            .field("c", &self.c)
            .finish_non_exhaustive()
    }
}

impl TransformedProblem {
    /// Multiplier taking `ξ` back to `η`: `e^{-κx}`.
    pub fn back_factor(&self, x: f64) -> f64 {
        if self.kappa == 0.0 {
            1.0
        } else {
            (-self.kappa * x).exp()
        }
    }

    pub fn mode_frequency(&self, n: usize) -> Result<f64, ProblemError> {
        mode_frequency(self.c, self.l, self.a, n)
    }

    pub fn intervals(&self) -> usize {
        intervals(self.horizon, self.tau)
    }
}

pub fn to_selfadjoint(spec: &ProblemSpec) -> Result<TransformedProblem, ProblemError> {
    spec.validate()?;
    let a2 = spec.a * spec.a;
    let kappa = spec.b / (2.0 * a2);
    let c = spec.d - spec.b * spec.b / (4.0 * a2);
    let weigh = |inner: &SharedField| -> SharedField {
        if kappa == 0.0 {
            inner.clone()
        } else {
            Arc::new(ExpWeighted {
                inner: inner.clone(),
                kappa,
            })
        }
    };
    let mu2: SharedScalar = if kappa == 0.0 {
        spec.theta2.clone()
    } else {
        Arc::new(Scaled {
            inner: spec.theta2.clone(),
            factor: (kappa * spec.l).exp(),
        })
    };
    Ok(TransformedProblem {
        a: spec.a,
        l: spec.l,
        tau: spec.tau,
        horizon: spec.horizon,
        kappa,
        c,
        mu1: spec.theta1.clone(),
        mu2,
        phi: weigh(&spec.psi),
        f: weigh(&spec.g),
    })
}

/// `ω_n = sqrt((πna/l)² - c)`.
pub fn mode_frequency(c: f64, l: f64, a: f64, n: usize) -> Result<f64, ProblemError> {
    if n == 0 {
        return Err(ProblemError::ModeIndex);
    }
    let base = (std::f64::consts::PI * a / l).powi(2);
    if base <= c {
        return Err(ProblemError::OscillationViolated { lhs: base, c });
    }
    let k = std::f64::consts::PI * n as f64 * a / l;
    Ok((k * k - c).sqrt())
}

/// Affine interpolation of two boundary functions,
/// `G(t,x) = μ₁(t) + (x/l)(μ₂(t) - μ₁(t))`.
#[derive(Clone)]
pub struct Lifting {
    pub mu1: SharedScalar,
    pub mu2: SharedScalar,
    pub l: f64,
}

impl FieldFn for Lifting {
    fn eval(&self, order: u8, t: f64, x: f64) -> Result<f64, FuncError> {
        let m1 = self.mu1.eval(order, t)?;
        let m2 = self.mu2.eval(order, t)?;
        if x == self.l {
            return Ok(m2);
        }
        Ok(m1 + (x / self.l) * (m2 - m1))
    }
}

impl Lifting {
    /// `∂G/∂x`, constant in `x`.
    pub fn slope(&self, order: u8, t: f64) -> Result<f64, FuncError> {
        Ok((self.mu2.eval(order, t)? - self.mu1.eval(order, t)?) / self.l)
    }
}

struct Difference {
    lhs: SharedField,
    rhs: SharedField,
}

impl FieldFn for Difference {
    fn eval(&self, order: u8, t: f64, x: f64) -> Result<f64, FuncError> {
        Ok(self.lhs.eval(order, t, x)? - self.rhs.eval(order, t, x)?)
    }
}

/// `F = f + c·G(t-τ, x) - G_tt(t, x)`. Only values (order 0) are defined.
struct EffectiveForcing {
    f: SharedField,
    lifting: Lifting,
    c: f64,
    tau: f64,
}

impl FieldFn for EffectiveForcing {
    fn eval(&self, order: u8, t: f64, x: f64) -> Result<f64, FuncError> {
        if order != 0 {
            return Err(FuncError::Order(order));
        }
        let delayed = if self.c == 0.0 {
            0.0
        } else {
            self.c * self.lifting.eval(0, t - self.tau, x)?
        };
        Ok(self.f.eval(0, t, x)? + delayed - self.lifting.eval(2, t, x)?)
    }
}

/// Lifting `G`, homogenized history `Φ = φ - G` and effective forcing `F`.
#[derive(Clone)]
pub struct LiftedData {
    pub lifting: Lifting,
    pub big_g: SharedField,
    pub big_phi: SharedField,
    pub big_f: SharedField,
}

pub fn build_lifting(tp: &TransformedProblem) -> LiftedData {
    let lifting = Lifting {
        mu1: tp.mu1.clone(),
        mu2: tp.mu2.clone(),
        l: tp.l,
    };
    let big_g: SharedField = Arc::new(lifting.clone());
    let big_phi: SharedField = Arc::new(Difference {
        lhs: tp.phi.clone(),
        rhs: big_g.clone(),
    });
    let big_f: SharedField = Arc::new(EffectiveForcing {
        f: tp.f.clone(),
        lifting: lifting.clone(),
        c: tp.c,
        tau: tp.tau,
    });
    LiftedData {
        lifting,
        big_g,
        big_phi,
        big_f,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcs::{expr_field, expr_scalar, field_fn, zero_field, zero_scalar, Constant};

    fn spec(a: f64, b: f64, d: f64, l: f64) -> ProblemSpec {
        ProblemSpec {
            a,
            b,
            d,
            l,
            tau: 1.0,
            horizon: 2.0,
            psi: zero_field(),
            theta1: zero_scalar(),
            theta2: zero_scalar(),
            g: zero_field(),
        }
    }

    #[test]
    fn compatibility_examples() {
        let mut s = spec(1.0, 0.0, 0.0, 2.0);
        s.psi = expr_field("sin(pi*x/2)").unwrap();
        let r = check_compatibility(&s, 1e-9).unwrap();
        assert!(r.pass);
        assert!(r.max_violation_left == 0.0 && r.max_violation_right < 1e-15);

        s.psi = Arc::new(Constant(1.0));
        let r = check_compatibility(&s, 1e-9).unwrap();
        assert!(!r.pass);
        assert_eq!(r.max_violation_left, 1.0);

        s.theta2 = expr_scalar("1 + t^2").unwrap();
        s.psi = expr_field("x/2*(1 + t^2)").unwrap();
        assert!(check_compatibility(&s, 1e-9).unwrap().pass);
    }

    #[test]
    fn effective_reaction() {
        let tp = to_selfadjoint(&spec(1.0, 2.0, 3.0, 1.0)).unwrap();
        assert_eq!(tp.c, 2.0);
        let tp = to_selfadjoint(&spec(1.5, 0.0, -0.7, 1.0)).unwrap();
        assert_eq!(tp.c, -0.7);
        assert_eq!(tp.kappa, 0.0);
    }

    #[test]
    fn zero_drift_is_identity() {
        let mut s = spec(1.0, 0.0, 0.4, 1.0);
        s.psi = expr_field("t*x + 1").unwrap();
        s.theta2 = expr_scalar("cos(t)").unwrap();
        let tp = to_selfadjoint(&s).unwrap();
        assert_eq!(tp.phi.eval(0, -0.5, 0.3).unwrap(), -0.5 * 0.3 + 1.0);
        assert_eq!(tp.mu2.eval(2, 0.2).unwrap(), -(0.2f64.cos()));
        assert_eq!(tp.back_factor(0.7), 1.0);
    }

    #[test]
    fn round_trip_restores_history() {
        let mut s = spec(0.8, -1.3, 0.2, 2.5);
        s.psi = expr_field("exp(t)*(1 + x^2)").unwrap();
        let tp = to_selfadjoint(&s).unwrap();
        for i in 0..=10 {
            let x = 2.5 * i as f64 / 10.0;
            let back = tp.back_factor(x) * tp.phi.eval(0, -0.3, x).unwrap();
            let psi = s.psi.eval(0, -0.3, x).unwrap();
            assert!((back - psi).abs() <= 1e-14 * psi.abs());
        }
    }

    #[test]
    fn substitution_removes_first_derivative() {
        // a²∂ₓₓ(e^{βx}ξ) + b∂ₓ(e^{βx}ξ) + d e^{βx}ξ = e^{βx}(a²ξ'' + cξ) with e^{βx} the back factor
        let (a, b, d) = (0.9, 0.6, -0.4);
        let tp = to_selfadjoint(&spec(a, b, d, 1.0)).unwrap();
        let xi = |x: f64| (2.0 * x).sin() + x * x * x;
        let eta = |x: f64| tp.back_factor(x) * xi(x);
        let h = 1e-3;
        for i in 1..10 {
            let x = i as f64 / 10.0;
            let d1 = |f: &dyn Fn(f64) -> f64| {
                (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
            };
            let d2 = |f: &dyn Fn(f64) -> f64| {
                (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h)
                    - f(x + 2.0 * h))
                    / (12.0 * h * h)
            };
            let lhs = a * a * d2(&eta) + b * d1(&eta) + d * eta(x);
            let rhs = tp.back_factor(x) * (a * a * d2(&xi) + tp.c * xi(x));
            assert!((lhs - rhs).abs() < 1e-9, "x = {x}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn lifting_examples() {
        let mut s = spec(1.0, 0.0, 2.0, 1.0);
        s.theta1 = Arc::new(Constant(1.0));
        s.theta2 = Arc::new(Constant(1.0));
        let tp = to_selfadjoint(&s).unwrap();
        let lifted = build_lifting(&tp);
        assert_eq!(lifted.big_f.eval(0, 0.7, 0.3).unwrap(), 2.0);

        let s = spec(1.0, 0.0, 0.0, 1.0);
        let lifted = build_lifting(&to_selfadjoint(&s).unwrap());
        assert_eq!(lifted.big_g.eval(0, 0.3, 0.4).unwrap(), 0.0);

        let mut s = spec(1.0, 0.0, 0.0, 3.0);
        s.theta1 = expr_scalar("sin(t) + 0.1").unwrap();
        s.theta2 = expr_scalar("t^2 - 7").unwrap();
        s.psi = field_fn(|t, x| t * x);
        let tp = to_selfadjoint(&s).unwrap();
        let lifted = build_lifting(&tp);
        for t in [-1.0, -0.3, 0.0, 1.7] {
            assert_eq!(lifted.big_g.eval(0, t, 0.0).unwrap(), tp.mu1.eval(0, t).unwrap());
            assert_eq!(lifted.big_g.eval(0, t, 3.0).unwrap(), tp.mu2.eval(0, t).unwrap());
        }
    }

    #[test]
    fn mode_frequencies() {
        let pi = std::f64::consts::PI;
        assert_eq!(mode_frequency(0.0, pi, 1.0, 1).unwrap(), 1.0);
        assert!((mode_frequency(0.0, pi, 1.0, 3).unwrap() - 3.0).abs() < 1e-15);
        assert!(matches!(
            mode_frequency(1.0, pi, 1.0, 1),
            Err(ProblemError::OscillationViolated { .. })
        ));
        let mut prev = 0.0;
        for n in 1..200 {
            let w = mode_frequency(0.9, pi, 1.0, n).unwrap();
            assert!(w > prev);
            prev = w;
        }
    }

    #[test]
    fn interval_count() {
        assert_eq!(intervals(2.0, 1.0), 2);
        assert_eq!(intervals(2.0000001, 1.0), 3);
        assert_eq!(intervals(0.3, 1.0), 1);
        assert_eq!(intervals(0.6, 0.2), 3);
    }
}

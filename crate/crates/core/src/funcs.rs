//! Data functions with time derivatives up to order 2.
//!
//! Every data function in a problem (history, boundary values, forcing) is
//! consumed through [`ScalarFn`] or [`FieldFn`]. Expressions supply exact
//! symbolic derivatives; plain closures fall back to central differences
//! with step [`FD_STEP`].

use std::sync::Arc;

use thiserror::Error;

use crate::exprlang::{DiffExpr, EvalError, ParseError};

pub const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FuncError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("time derivative of order {0} unavailable")]
    Order(u8),
    #[error("non-finite value {value} at t = {t}, x = {x}")]
    NonFinite { value: f64, t: f64, x: f64 },
    #[error("{0}")]
    Other(String),
}

/// A function of `t`.
pub trait ScalarFn: Send + Sync {
    fn eval(&self, order: u8, t: f64) -> Result<f64, FuncError>;
}

/// A function of `(t, x)`; `order` counts derivatives in `t`.
pub trait FieldFn: Send + Sync {
    fn eval(&self, order: u8, t: f64, x: f64) -> Result<f64, FuncError>;
}

pub type SharedScalar = Arc<dyn ScalarFn>;
pub type SharedField = Arc<dyn FieldFn>;

fn finite(value: f64, t: f64, x: f64) -> Result<f64, FuncError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(FuncError::NonFinite { value, t, x })
    }
}

/// Central differences of `f` in `t`.
fn fd<F>(f: F, order: u8, t: f64) -> Result<f64, FuncError>
where
    F: Fn(f64) -> Result<f64, FuncError>,
{
    let h = FD_STEP;
    match order {
        0 => f(t),
        1 => Ok((f(t + h)? - f(t - h)?) / (2.0 * h)),
        2 => Ok((f(t + h)? - 2.0 * f(t)? + f(t - h)?) / (h * h)),
        o => Err(FuncError::Order(o)),
    }
}

impl ScalarFn for DiffExpr {
    fn eval(&self, order: u8, t: f64) -> Result<f64, FuncError> {
        Ok(DiffExpr::eval(self, order, t, 0.0)?)
    }
}

impl FieldFn for DiffExpr {
    fn eval(&self, order: u8, t: f64, x: f64) -> Result<f64, FuncError> {
        Ok(DiffExpr::eval(self, order, t, x)?)
    }
}

pub fn expr_scalar(source: &str) -> Result<SharedScalar, ParseError> {
    Ok(Arc::new(DiffExpr::parse(source)?))
}

pub fn expr_field(source: &str) -> Result<SharedField, ParseError> {
    Ok(Arc::new(DiffExpr::parse(source)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub f64);

impl ScalarFn for Constant {
    fn eval(&self, order: u8, _t: f64) -> Result<f64, FuncError> {
        Ok(if order == 0 { self.0 } else { 0.0 })
    }
}

impl FieldFn for Constant {
    fn eval(&self, order: u8, _t: f64, _x: f64) -> Result<f64, FuncError> {
        Ok(if order == 0 { self.0 } else { 0.0 })
    }
}

pub fn zero_scalar() -> SharedScalar {
    Arc::new(Constant(0.0))
}

pub fn zero_field() -> SharedField {
    Arc::new(Constant(0.0))
}

/// Closure `t ↦ f(t)`, derivatives by finite differences.
pub struct ScalarClosure<F>(pub F);

impl<F: Fn(f64) -> f64 + Send + Sync> ScalarFn for ScalarClosure<F> {
    fn eval(&self, order: u8, t: f64) -> Result<f64, FuncError> {
        fd(|s| finite((self.0)(s), s, 0.0), order, t)
    }
}

/// Closure `(order, t) ↦ f^(order)(t)` with caller-supplied derivatives.
pub struct ScalarDerivs<F>(pub F);

impl<F: Fn(u8, f64) -> f64 + Send + Sync> ScalarFn for ScalarDerivs<F> {
    fn eval(&self, order: u8, t: f64) -> Result<f64, FuncError> {
        if order > 2 {
            return Err(FuncError::Order(order));
        }
        finite((self.0)(order, t), t, 0.0)
    }
}

/// Closure `(t, x) ↦ f(t, x)`, time derivatives by finite differences.
pub struct FieldClosure<F>(pub F);

impl<F: Fn(f64, f64) -> f64 + Send + Sync> FieldFn for FieldClosure<F> {
    fn eval(&self, order: u8, t: f64, x: f64) -> Result<f64, FuncError> {
        fd(|s| finite((self.0)(s, x), s, x), order, t)
    }
}

/// Closure `(order, t, x)` with caller-supplied time derivatives.
pub struct FieldDerivs<F>(pub F);

impl<F: Fn(u8, f64, f64) -> f64 + Send + Sync> FieldFn for FieldDerivs<F> {
    fn eval(&self, order: u8, t: f64, x: f64) -> Result<f64, FuncError> {
        if order > 2 {
            return Err(FuncError::Order(order));
        }
        finite((self.0)(order, t, x), t, x)
    }
}

pub fn scalar_fn<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> SharedScalar {
    Arc::new(ScalarClosure(f))
}

pub fn scalar_fn_exact<F: Fn(u8, f64) -> f64 + Send + Sync + 'static>(f: F) -> SharedScalar {
    Arc::new(ScalarDerivs(f))
}

pub fn field_fn<F: Fn(f64, f64) -> f64 + Send + Sync + 'static>(f: F) -> SharedField {
    Arc::new(FieldClosure(f))
}

pub fn field_fn_exact<F: Fn(u8, f64, f64) -> f64 + Send + Sync + 'static>(f: F) -> SharedField {
    Arc::new(FieldDerivs(f))
}

/// A field frozen at one `x`, seen as a function of `t`.
pub struct AtPoint {
    pub field: SharedField,
    pub x: f64,
}

impl ScalarFn for AtPoint {
    fn eval(&self, order: u8, t: f64) -> Result<f64, FuncError> {
        self.field.eval(order, t, self.x)
    }
}

/// Twice differentiable history `β` on `[-τ, 0]`.
#[derive(Clone)]
pub struct HistoryFunction {
    inner: SharedScalar,
}

impl std::fmt::Debug for HistoryFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("HistoryFunction")
    }
}

impl HistoryFunction {
    pub fn new(inner: SharedScalar) -> Self {
        Self { inner }
    }

    pub fn from_expr(source: &str) -> Result<Self, ParseError> {
        Ok(Self::new(expr_scalar(source)?))
    }

    pub fn from_fn<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Self::new(scalar_fn(f))
    }

    pub fn value(&self, s: f64) -> Result<f64, FuncError> {
        self.inner.eval(0, s)
    }

    pub fn first_derivative(&self, s: f64) -> Result<f64, FuncError> {
        self.inner.eval(1, s)
    }

    pub fn second_derivative(&self, s: f64) -> Result<f64, FuncError> {
        self.inner.eval(2, s)
    }

    pub fn as_scalar(&self) -> &dyn ScalarFn {
        self.inner.as_ref()
    }

    /// Check finiteness on `[-τ, 0]` and that the derivatives match
    /// central differences of the lower order to `tol` (relative to the
    /// local scale) on a probe grid of 33 points.
    pub fn validate(&self, tau: f64, tol: f64) -> Result<(), FuncError> {
        let h = 1e-4 * tau;
        for i in 0..=32 {
            // stay h away from the ends so differences remain inside
            let s = -tau + h + (tau - 2.0 * h) * i as f64 / 32.0;
            for order in 0..2u8 {
                let lo = self.inner.eval(order, s - h)?;
                let hi = self.inner.eval(order, s + h)?;
                let fd = (hi - lo) / (2.0 * h);
                let exact = self.inner.eval(order + 1, s)?;
                let scale = 1.0_f64.max(exact.abs()).max(lo.abs().max(hi.abs()) / tau);
                if (fd - exact).abs() > tol * scale {
                    return Err(FuncError::Other(format!(
                        "history derivative of order {} inconsistent at s = {s}: {exact} vs difference {fd}",
                        order + 1
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_derivatives_by_differences() {
        let f = scalar_fn(|t| t.sin());
        assert!((f.eval(1, 0.3).unwrap() - 0.3f64.cos()).abs() < 1e-9);
        assert!((f.eval(2, 0.3).unwrap() + 0.3f64.sin()).abs() < 1e-5);
        assert!(f.eval(3, 0.3).is_err());
    }

    #[test]
    fn expression_history_validates() {
        let h = HistoryFunction::from_expr("cos(2*t) + t^3").unwrap();
        h.validate(1.0, 1e-6).unwrap();
        assert_eq!(h.second_derivative(0.0).unwrap(), -4.0);
    }

    #[test]
    fn inconsistent_history_rejected() {
        let bad = HistoryFunction::new(scalar_fn_exact(|order, t| match order {
            0 => t * t,
            1 => 3.0 * t,
            _ => 2.0,
        }));
        assert!(bad.validate(1.0, 1e-6).is_err());
    }

    #[test]
    fn non_finite_values_are_errors() {
        let f = field_fn(|t, _| 1.0 / t);
        assert!(matches!(
            f.eval(0, 0.0, 0.5),
            Err(FuncError::NonFinite { .. })
        ));
    }
}

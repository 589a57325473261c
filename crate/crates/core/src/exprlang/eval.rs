use thiserror::Error;

use super::{BinOp, Expr, Func, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalErrorKind {
    DivisionByZero,
    NegativeSqrt,
    NonPositiveLog,
    /// Negative base with a non-integer exponent.
    ComplexPower,
    Overflow,
    UnsupportedOrder(u8),
}

/// Evaluation failure with the printed subexpression that caused it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}: in `{subexpr}`", describe(.kind))]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub subexpr: String,
}

fn describe(kind: &EvalErrorKind) -> String {
    match kind {
        EvalErrorKind::DivisionByZero => "division by zero".into(),
        EvalErrorKind::NegativeSqrt => "square root of a negative number".into(),
        EvalErrorKind::NonPositiveLog => "logarithm of a non-positive number".into(),
        EvalErrorKind::ComplexPower => "negative base raised to a non-integer power".into(),
        EvalErrorKind::Overflow => "non-finite result".into(),
        EvalErrorKind::UnsupportedOrder(o) => format!("time derivative of order {o} unavailable"),
    }
}

impl EvalError {
    fn new(kind: EvalErrorKind, e: &Expr) -> Self {
        Self {
            kind,
            subexpr: e.to_string(),
        }
    }

    pub(crate) fn unsupported_order(order: u8) -> Self {
        Self {
            kind: EvalErrorKind::UnsupportedOrder(order),
            subexpr: String::new(),
        }
    }
}

pub(super) fn evaluate(e: &Expr, t: f64, x: f64) -> Result<f64, EvalError> {
    let v = match e {
        Expr::Num(v) => *v,
        Expr::Var(Var::T) => t,
        Expr::Var(Var::X) => x,
        Expr::Const(c) => c.value(),
        Expr::Neg(a) => -evaluate(a, t, x)?,
        Expr::Binary(op, a, b) => {
            let u = evaluate(a, t, x)?;
            let w = evaluate(b, t, x)?;
            match op {
                BinOp::Add => u + w,
                BinOp::Sub => u - w,
                BinOp::Mul => u * w,
                BinOp::Div => {
                    if w == 0.0 {
                        return Err(EvalError::new(EvalErrorKind::DivisionByZero, e));
                    }
                    u / w
                }
                BinOp::Pow => {
                    if u < 0.0 && w.fract() != 0.0 {
                        return Err(EvalError::new(EvalErrorKind::ComplexPower, e));
                    }
                    if u == 0.0 && w < 0.0 {
                        return Err(EvalError::new(EvalErrorKind::DivisionByZero, e));
                    }
                    if w.fract() == 0.0 && w.abs() <= i32::MAX as f64 {
                        u.powi(w as i32)
                    } else {
                        u.powf(w)
                    }
                }
            }
        }
        Expr::Call(func, a) => {
            let u = evaluate(a, t, x)?;
            match func {
                Func::Sin => u.sin(),
                Func::Cos => u.cos(),
                Func::Exp => u.exp(),
                Func::Tanh => u.tanh(),
                Func::Abs => u.abs(),
                Func::Sign => {
                    if u > 0.0 {
                        1.0
                    } else if u < 0.0 {
                        -1.0
                    } else {
                        0.0
                    }
                }
                Func::Sqrt => {
                    if u < 0.0 {
                        return Err(EvalError::new(EvalErrorKind::NegativeSqrt, e));
                    }
                    u.sqrt()
                }
                Func::Ln => {
                    if u <= 0.0 {
                        return Err(EvalError::new(EvalErrorKind::NonPositiveLog, e));
                    }
                    u.ln()
                }
            }
        }
    };
    if !v.is_finite() {
        return Err(EvalError::new(EvalErrorKind::Overflow, e));
    }
    Ok(v)
}

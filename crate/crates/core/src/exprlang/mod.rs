//! Arithmetic expressions in `t` and `x` with symbolic time derivatives.
//!
//! Data functions (history, boundary values, forcing) are written in this
//! small language in run configurations. The grammar, lowest precedence
//! first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          (right-associative)
//! primary := number | 't' | 'x' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | exp | sqrt | tanh | abs | ln | sign
//! ```
//!
//! `-x^2` is `-(x^2)` and `2^3^2` is `2^(3^2)`.

mod diff;
mod eval;
mod parse;

use std::fmt;
use std::sync::Arc;

pub use diff::differentiate_t;
pub use eval::{EvalError, EvalErrorKind};
pub use parse::{parse, ParseError, ParseErrorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    T,
    X,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constant {
    Pi,
    E,
}

impl Constant {
    pub fn value(self) -> f64 {
        match self {
            Constant::Pi => std::f64::consts::PI,
            Constant::E => std::f64::consts::E,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Tanh,
    Abs,
    Ln,
    Sign,
}

impl Func {
    pub const ALL: [Func; 8] = [
        Func::Sin,
        Func::Cos,
        Func::Exp,
        Func::Sqrt,
        Func::Tanh,
        Func::Abs,
        Func::Ln,
        Func::Sign,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Tanh => "tanh",
            Func::Abs => "abs",
            Func::Ln => "ln",
            Func::Sign => "sign",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Expression tree. Immutable once built; cheap to share behind `Arc`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Const(Constant),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn depends_on(&self, v: Var) -> bool {
        match self {
            Expr::Num(_) | Expr::Const(_) => false,
            Expr::Var(w) => *w == v,
            Expr::Neg(a) | Expr::Call(_, a) => a.depends_on(v),
            Expr::Binary(_, a, b) => a.depends_on(v) || b.depends_on(v),
        }
    }

    pub fn contains_func(&self, f: Func) -> bool {
        match self {
            Expr::Num(_) | Expr::Const(_) | Expr::Var(_) => false,
            Expr::Neg(a) => a.contains_func(f),
            Expr::Call(g, a) => *g == f || a.contains_func(f),
            Expr::Binary(_, a, b) => a.contains_func(f) || b.contains_func(f),
        }
    }

    pub fn evaluate(&self, t: f64, x: f64) -> Result<f64, EvalError> {
        eval::evaluate(self, t, x)
    }

    // precedence used by the printer: binary ops as above, unary minus 3,
    // atoms 5
    fn print_precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Neg(_) => 3,
            _ => 5,
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => {
                if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) {
                    write!(f, "(-{})", -v)
                } else {
                    write!(f, "{v}")
                }
            }
            Expr::Var(Var::T) => f.write_str("t"),
            Expr::Var(Var::X) => f.write_str("x"),
            Expr::Const(Constant::Pi) => f.write_str("pi"),
            Expr::Const(Constant::E) => f.write_str("e"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_operand(f, a, a.print_precedence() < 3)
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Binary(BinOp::Pow, a, b) => {
                // base must be an atom; exponent may be any unary-level term
                write_operand(f, a, a.print_precedence() < 5)?;
                f.write_str("^")?;
                write_operand(f, b, b.print_precedence() < 3)
            }
            Expr::Binary(op, a, b) => {
                let p = op.precedence();
                write_operand(f, a, a.print_precedence() < p)?;
                write!(f, " {} ", op.symbol())?;
                write_operand(f, b, b.print_precedence() <= p)
            }
        }
    }
}

/// An expression bundled with its first and second symbolic `t`-derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffExpr {
    pub source: String,
    pub expr: Arc<Expr>,
    pub dt: Arc<Expr>,
    pub dtt: Arc<Expr>,
    /// Set when a derivative passed through `abs`, so the derivative
    /// contains `sign(..)` and is undefined where its argument vanishes.
    pub abs_differentiated: bool,
}

impl DiffExpr {
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        let expr = parse(source)?;
        Ok(Self::from_expr(source, expr))
    }

    pub fn from_expr(source: &str, expr: Expr) -> Self {
        let (dt, abs_differentiated) = diff::d_dt_flagged(&expr);
        let dtt = differentiate_t(&dt, 1);
        Self {
            source: source.to_string(),
            expr: Arc::new(expr),
            dt: Arc::new(dt),
            dtt: Arc::new(dtt),
            abs_differentiated,
        }
    }

    /// The expression (order 0) or one of its time derivatives.
    pub fn derivative(&self, order: u8) -> Option<&Expr> {
        match order {
            0 => Some(&self.expr),
            1 => Some(&self.dt),
            2 => Some(&self.dtt),
            _ => None,
        }
    }

    pub fn eval(&self, order: u8, t: f64, x: f64) -> Result<f64, EvalError> {
        match self.derivative(order) {
            Some(e) => e.evaluate(t, x),
            None => Err(EvalError::unsupported_order(order)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printer_inserts_only_needed_parentheses() {
        let cases = [
            ("1+2*3", "1 + 2 * 3"),
            ("(1+2)*3", "(1 + 2) * 3"),
            ("-x^2", "-x^2"),
            ("(-x)^2", "(-x)^2"),
            ("2^3^2", "2^3^2"),
            ("(2^3)^2", "(2^3)^2"),
            ("a", ""),
        ];
        for (src, want) in cases {
            match parse(src) {
                Ok(e) => assert_eq!(e.to_string(), want),
                Err(_) => assert_eq!(want, ""),
            }
        }
        assert_eq!(parse("1-(2-3)").unwrap().to_string(), "1 - (2 - 3)");
        assert_eq!(parse("2^-t").unwrap().to_string(), "2^-t");
        assert_eq!(parse("sin(pi*x/2)").unwrap().to_string(), "sin(pi * x / 2)");
    }

    #[test]
    fn diff_expr_flags_abs() {
        let d = DiffExpr::parse("abs(t - 1)").unwrap();
        assert!(d.abs_differentiated);
        assert_eq!(d.eval(1, 2.0, 0.0).unwrap(), 1.0);
        let d = DiffExpr::parse("abs(x)*t").unwrap();
        assert!(!d.abs_differentiated);
        assert!(d.eval(3, 0.0, 0.0).is_err());
    }
}

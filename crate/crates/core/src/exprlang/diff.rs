//! Symbolic differentiation in `t` with light simplification.

use super::{BinOp, Constant, Expr, Func, Var};

fn num(v: f64) -> Expr {
    Expr::Num(v)
}

fn as_num(e: &Expr) -> Option<f64> {
    match e {
        Expr::Num(v) => Some(*v),
        _ => None,
    }
}

fn is_zero(e: &Expr) -> bool {
    as_num(e) == Some(0.0)
}

fn is_one(e: &Expr) -> bool {
    as_num(e) == Some(1.0)
}

pub(crate) fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(v) if v == 0.0 => num(0.0),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

pub(crate) fn add(a: Expr, b: Expr) -> Expr {
    match (as_num(&a), as_num(&b)) {
        (Some(x), Some(y)) => num(x + y),
        (Some(x), _) if x == 0.0 => b,
        (_, Some(y)) if y == 0.0 => a,
        _ => Expr::Binary(BinOp::Add, Box::new(a), Box::new(b)),
    }
}

pub(crate) fn sub(a: Expr, b: Expr) -> Expr {
    match (as_num(&a), as_num(&b)) {
        (Some(x), Some(y)) => num(x - y),
        (Some(x), _) if x == 0.0 => neg(b),
        (_, Some(y)) if y == 0.0 => a,
        _ => Expr::Binary(BinOp::Sub, Box::new(a), Box::new(b)),
    }
}

pub(crate) fn mul(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) || is_zero(&b) {
        return num(0.0);
    }
    match (as_num(&a), as_num(&b)) {
        (Some(x), Some(y)) => num(x * y),
        (Some(x), _) if x == 1.0 => b,
        (_, Some(y)) if y == 1.0 => a,
        (Some(x), _) if x == -1.0 => neg(b),
        (_, Some(y)) if y == -1.0 => neg(a),
        _ => Expr::Binary(BinOp::Mul, Box::new(a), Box::new(b)),
    }
}

pub(crate) fn div(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        return num(0.0);
    }
    if is_one(&b) {
        return a;
    }
    match (as_num(&a), as_num(&b)) {
        (Some(x), Some(y)) if y != 0.0 => num(x / y),
        _ => Expr::Binary(BinOp::Div, Box::new(a), Box::new(b)),
    }
}

pub(crate) fn pow(a: Expr, b: Expr) -> Expr {
    match as_num(&b) {
        Some(y) if y == 0.0 => num(1.0),
        Some(y) if y == 1.0 => a,
        _ => Expr::Binary(BinOp::Pow, Box::new(a), Box::new(b)),
    }
}

fn call(f: Func, a: Expr) -> Expr {
    Expr::Call(f, Box::new(a))
}

/// `d^order/dt^order e` for `order ∈ {0, 1, 2, ...}`.
pub fn differentiate_t(e: &Expr, order: u8) -> Expr {
    let mut out = e.clone();
    for _ in 0..order {
        out = d_dt(&out, &mut false);
    }
    out
}

/// First derivative, also reporting whether the `abs` rule fired on a
/// time-dependent argument.
pub(crate) fn d_dt_flagged(e: &Expr) -> (Expr, bool) {
    let mut flag = false;
    let d = d_dt(e, &mut flag);
    (d, flag)
}

fn d_dt(e: &Expr, abs_used: &mut bool) -> Expr {
    if !e.depends_on(Var::T) {
        return num(0.0);
    }
    match e {
        Expr::Num(_) | Expr::Const(_) | Expr::Var(Var::X) => num(0.0),
        Expr::Var(Var::T) => num(1.0),
        Expr::Neg(a) => neg(d_dt(a, abs_used)),
        Expr::Binary(op, a, b) => {
            let (u, v) = (a.as_ref().clone(), b.as_ref().clone());
            match op {
                BinOp::Add => add(d_dt(a, abs_used), d_dt(b, abs_used)),
                BinOp::Sub => sub(d_dt(a, abs_used), d_dt(b, abs_used)),
                BinOp::Mul => add(
                    mul(d_dt(a, abs_used), v),
                    mul(u, d_dt(b, abs_used)),
                ),
                BinOp::Div => {
                    let du = d_dt(a, abs_used);
                    let dv = d_dt(b, abs_used);
                    if is_zero(&dv) {
                        div(du, v)
                    } else {
                        div(
                            sub(mul(du, v.clone()), mul(u, dv)),
                            pow(v, num(2.0)),
                        )
                    }
                }
                BinOp::Pow => {
                    let du = d_dt(a, abs_used);
                    if !b.depends_on(Var::T) {
                        // v u^(v-1) u'
                        let vm1 = match as_num(&v) {
                            Some(y) => num(y - 1.0),
                            None => sub(v.clone(), num(1.0)),
                        };
                        mul(mul(v, pow(u, vm1)), du)
                    } else {
                        // u^v (v' ln u + v u'/u)
                        let dv = d_dt(b, abs_used);
                        let ln_u = if matches!(u, Expr::Const(Constant::E)) {
                            num(1.0)
                        } else {
                            call(Func::Ln, u.clone())
                        };
                        let inner = add(mul(dv, ln_u), div(mul(v.clone(), du), u.clone()));
                        mul(pow(u, v), inner)
                    }
                }
            }
        }
        Expr::Call(f, a) => {
            let u = a.as_ref().clone();
            let du = d_dt(a, abs_used);
            let outer = match f {
                Func::Sin => call(Func::Cos, u),
                Func::Cos => neg(call(Func::Sin, u)),
                Func::Exp => call(Func::Exp, u),
                Func::Sqrt => div(num(0.5), call(Func::Sqrt, u)),
                Func::Tanh => sub(num(1.0), pow(call(Func::Tanh, u), num(2.0))),
                Func::Ln => div(num(1.0), u),
                Func::Abs => {
                    *abs_used = true;
                    call(Func::Sign, u)
                }
                Func::Sign => num(0.0),
            };
            mul(outer, du)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprlang::parse;

    fn d(src: &str, order: u8) -> Expr {
        differentiate_t(&parse(src).unwrap(), order)
    }

    #[test]
    fn product_with_x_only_factor() {
        let e = d("t^2*sin(x)", 1);
        assert_eq!(e.to_string(), "2 * t * sin(x)");
        for (t, x) in [(0.3, 1.2), (-2.0, 0.1)] {
            let v = e.evaluate(t, x).unwrap();
            assert!((v - 2.0 * t * x.sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn second_derivative_of_sine() {
        let e = d("sin(3*t)", 2);
        for t in [0.0, 0.4, 1.7] {
            let v = e.evaluate(t, 0.0).unwrap();
            assert!((v + 9.0 * (3.0 * t).sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn constants_in_t_vanish() {
        assert_eq!(d("x", 1), Expr::Num(0.0));
        assert_eq!(d("sin(x)*exp(x)", 2), Expr::Num(0.0));
        assert_eq!(d("t", 2), Expr::Num(0.0));
        assert_eq!(d("t", 1), Expr::Num(1.0));
    }

    #[test]
    fn time_dependent_exponent() {
        let e = d("2^t", 1);
        let v = e.evaluate(1.5, 0.0).unwrap();
        assert!((v - 2f64.powf(1.5) * 2f64.ln()).abs() < 1e-14);
        let e = d("e^(2*t)", 1);
        assert!((e.evaluate(0.5, 0.0).unwrap() - 2.0 * 1f64.exp()).abs() < 1e-14);
        let e = d("t^t", 1);
        let v = e.evaluate(2.0, 0.0).unwrap();
        assert!((v - 4.0 * (2f64.ln() + 1.0)).abs() < 1e-13);
    }

    #[test]
    fn abs_rule_is_flagged() {
        let (_, used) = d_dt_flagged(&parse("abs(t)*x").unwrap());
        assert!(used);
        let (_, used) = d_dt_flagged(&parse("abs(x)*t").unwrap());
        assert!(!used);
    }
}

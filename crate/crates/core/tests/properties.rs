use std::convert::Infallible;

use proptest::prelude::*;

use delaywave::delay_ode::solve_forced;
use delaywave::delay_trig::{
    delay_cos, delay_sin, delay_trig_derivative, eval_segment, DelayKernelParams, DelayTrigFn,
    SegmentIndex,
};
use delaywave::exprlang::{differentiate_t, parse, BinOp, Constant, Expr, Func, Var};
use delaywave::funcs::scalar_fn_exact;
use delaywave::quadrature::QuadratureSpec;
use delaywave::spectral::{synthesize, SineBasis};
use delaywave::stability::XNorm;

fn bx(e: Expr) -> Box<Expr> {
    Box::new(e)
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (1u32..40).prop_map(|k| Expr::Num(k as f64 / 8.0)),
        Just(Expr::Var(Var::T)),
        Just(Expr::Var(Var::X)),
        Just(Expr::Const(Constant::Pi)),
        Just(Expr::Const(Constant::E)),
    ]
}

/// Expressions that stay smooth and moderate on the sampled box.
fn smooth_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(6, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Expr::Neg(bx(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Binary(BinOp::Add, bx(a), bx(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Binary(BinOp::Sub, bx(a), bx(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Binary(BinOp::Mul, bx(a), bx(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| {
                // a / (2 + sin(b))
                let den = Expr::Binary(
                    BinOp::Add,
                    bx(Expr::Num(2.0)),
                    bx(Expr::Call(Func::Sin, bx(b))),
                );
                Expr::Binary(BinOp::Div, bx(a), bx(den))
            }),
            (inner.clone(), 2u32..4).prop_map(|(a, k)| {
                Expr::Binary(BinOp::Pow, bx(Expr::Call(Func::Tanh, bx(a))), bx(Expr::Num(k as f64)))
            }),
            inner.clone().prop_map(|a| Expr::Call(Func::Sin, bx(a))),
            inner.clone().prop_map(|a| Expr::Call(Func::Cos, bx(a))),
            inner.clone().prop_map(|a| Expr::Call(Func::Tanh, bx(a))),
            inner.clone().prop_map(|a| Expr::Call(Func::Exp, bx(Expr::Call(Func::Sin, bx(a))))),
            inner.clone().prop_map(|a| {
                let arg = Expr::Binary(
                    BinOp::Add,
                    bx(Expr::Num(1.0)),
                    bx(Expr::Binary(BinOp::Pow, bx(a), bx(Expr::Num(2.0)))),
                );
                Expr::Call(Func::Sqrt, bx(arg))
            }),
            inner.prop_map(|a| {
                let arg = Expr::Binary(BinOp::Add, bx(Expr::Num(2.0)), bx(Expr::Call(Func::Cos, bx(a))));
                Expr::Call(Func::Ln, bx(arg))
            }),
        ]
    })
}

/// Anything the grammar can express, for print/parse round trips.
fn any_expr() -> impl Strategy<Value = Expr> {
    let ops = prop_oneof![
        Just(BinOp::Add),
        Just(BinOp::Sub),
        Just(BinOp::Mul),
        Just(BinOp::Div),
        Just(BinOp::Pow),
    ];
    let funcs = proptest::sample::select(Func::ALL.to_vec());
    leaf().prop_recursive(6, 64, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Expr::Neg(bx(a))),
            (ops.clone(), inner.clone(), inner.clone()).prop_map(|(op, a, b)| Expr::Binary(op, bx(a), bx(b))),
            (funcs.clone(), inner).prop_map(|(f, a)| Expr::Call(f, bx(a))),
        ]
    })
}

fn fd(e: &Expr, t: f64, x: f64, h: f64) -> Option<f64> {
    let p = e.evaluate(t + h, x).ok()?;
    let m = e.evaluate(t - h, x).ok()?;
    Some((p - m) / (2.0 * h))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn symbolic_derivatives_match_differences(e in smooth_expr(), t in -1.0f64..2.0, x in 0.0f64..3.0) {
        let d1 = differentiate_t(&e, 1);
        let d2 = differentiate_t(&e, 2);
        let f = e.evaluate(t, x).unwrap();
        let v1 = d1.evaluate(t, x).unwrap();
        let v2 = d2.evaluate(t, x).unwrap();
        let h = 1e-5;
        let fd1 = fd(&e, t, x, h).unwrap();
        let fd2 = fd(&d1, t, x, h).unwrap();
        let scale1 = 1f64.max(v1.abs()).max(f.abs());
        let scale2 = 1f64.max(v2.abs()).max(v1.abs());
        prop_assert!((v1 - fd1).abs() <= 1e-6 * scale1, "{e}: {v1} vs {fd1}");
        prop_assert!((v2 - fd2).abs() <= 1e-6 * scale2, "{e}: {v2} vs {fd2}");
    }

    #[test]
    fn print_parse_round_trip(e in any_expr()) {
        let printed = e.to_string();
        let back = parse(&printed).unwrap();
        prop_assert_eq!(&back, &e, "printed as {}", printed);
        prop_assert_eq!(back.to_string(), printed);
    }

    #[test]
    fn delay_trig_nodes_are_continuous(omega in 0.2f64..4.0, tau in 0.2f64..2.0, k in 0i64..7) {
        let p = DelayKernelParams::new(omega, tau).unwrap();
        let node = k as f64 * tau;
        for which in [DelayTrigFn::Cos, DelayTrigFn::Sin] {
            let left = eval_segment(p, which, SegmentIndex::from(k), node, 0).unwrap();
            let right = eval_segment(p, which, SegmentIndex::from(k + 1), node, 0).unwrap();
            prop_assert!((left - right).abs() <= 1e-11 * left.abs().max(1.0));
        }
    }

    #[test]
    fn delay_trig_derivative_identities(omega in 0.2f64..4.0, tau in 0.2f64..2.0, s in 0.05f64..0.95, k in -1i64..5) {
        let p = DelayKernelParams::new(omega, tau).unwrap();
        let t = (k as f64 + s) * tau;
        let ds = delay_trig_derivative(p, t, DelayTrigFn::Sin, 1).unwrap();
        let dc = delay_trig_derivative(p, t, DelayTrigFn::Cos, 1).unwrap();
        let c = delay_cos(p, t).unwrap();
        let s_lag = delay_sin(p, t - tau).unwrap();
        prop_assert!((ds - omega * c).abs() <= 1e-10 * c.abs().max(1.0) * omega);
        if t >= 0.0 {
            prop_assert!((dc + omega * s_lag).abs() <= 1e-10 * s_lag.abs().max(1.0) * omega);
        }
    }

    #[test]
    fn forced_response_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, t in 0.0f64..3.0) {
        let p = DelayKernelParams::new(1.3, 0.8).unwrap();
        let q = QuadratureSpec::default();
        let f = scalar_fn_exact(|_, s: f64| s.cos());
        let g = scalar_fn_exact(|_, s: f64| 1.0 + s * s);
        let h = scalar_fn_exact(move |_, s: f64| a * s.cos() + b * (1.0 + s * s));
        let lhs = solve_forced(p, h.as_ref(), t, &q).unwrap();
        let rhs = a * solve_forced(p, f.as_ref(), t, &q).unwrap() + b * solve_forced(p, g.as_ref(), t, &q).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn sine_analysis_inverts_synthesis(coeffs in proptest::collection::vec(-1.0f64..1.0, 1..24), l in 0.5f64..4.0) {
        let basis = SineBasis::new(l, coeffs.len(), &QuadratureSpec::default());
        let got = basis.coefficients(|x| Ok::<_, Infallible>(synthesize(&coeffs, x, l))).unwrap();
        for (a, b) in got.iter().zip(&coeffs) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn x_norm_dominates_l2(coeffs in proptest::collection::vec(-5.0f64..5.0, 16..40), l in 0.5f64..4.0) {
        let norm = XNorm::new(l, coeffs.len()).unwrap();
        let l2: f64 = coeffs.iter().map(|c| c * c).sum();
        let x2 = norm.norm_sq(&coeffs);
        prop_assert!(x2 >= l2);
        prop_assert!(x2 <= norm.weight(1) * l2 * (1.0 + 1e-12));
    }
}

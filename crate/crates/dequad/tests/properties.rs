//! Property tests for the transform identities and the expression
//! front-end.

use proptest::prelude::*;

use dequad::expr::{self, Ast, BinOp, Constant, Func};
use dequad::{node, phi, phi_prime};

proptest! {
    #[test]
    fn phi_is_odd(t in -6.0f64..6.0) {
        let sum = (phi(t) + phi(-t)).abs();
        prop_assert!(sum <= 4.0 * f64::EPSILON * phi(t).abs().max(1.0));
    }

    #[test]
    fn phi_prime_is_even(t in -6.0f64..6.0) {
        prop_assert_eq!(phi_prime(t).to_bits(), phi_prime(-t).to_bits());
    }

    #[test]
    fn phi_stays_inside_the_open_interval_modulo_saturation(t in proptest::num::f64::NORMAL) {
        let x = phi(t);
        prop_assert!((-1.0..=1.0).contains(&x));
        prop_assert!(phi_prime(t) >= 0.0);
    }

    #[test]
    fn phi_prime_matches_central_difference(t in -2.2f64..2.2) {
        let delta = 1e-5;
        let fd = (phi(t + delta) - phi(t - delta)) / (2.0 * delta);
        let w = phi_prime(t);
        prop_assert!((fd - w).abs() <= 1e-6 * w + f64::EPSILON / (2.0 * delta));
    }

    #[test]
    fn one_minus_x2_completes_x_squared(t in -2.5f64..2.5) {
        let n = node(1, t.abs().max(1e-9));
        if n.one_minus_x2 >= 1e-8 {
            prop_assert!((n.one_minus_x2 + n.x * n.x - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn parser_is_total(src in "\\PC{0,60}") {
        // any input either parses or reports an error; no panic, no hang
        let _ = expr::parse(&src);
    }

    #[test]
    fn parser_never_panics_on_expression_like_input(
        src in "[0-9xpie+*/^() .\\-]{0,40}"
    ) {
        let _ = expr::parse(&src);
    }
}

fn arb_ast() -> impl Strategy<Value = Ast> {
    let leaf = prop_oneof![
        (0.0f64..100.0).prop_map(Ast::Number),
        Just(Ast::Variable),
        Just(Ast::Constant(Constant::Pi)),
        Just(Ast::Constant(Constant::E)),
    ];
    leaf.prop_recursive(5, 64, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Ast::Neg(Box::new(a))),
            (inner.clone(), inner.clone(), arb_binop())
                .prop_map(|(a, b, op)| Ast::Binary(op, Box::new(a), Box::new(b))),
            (inner, arb_func()).prop_map(|(a, f)| Ast::Call(f, Box::new(a))),
        ]
    })
}

fn arb_binop() -> impl Strategy<Value = BinOp> {
    prop_oneof![
        Just(BinOp::Add),
        Just(BinOp::Sub),
        Just(BinOp::Mul),
        Just(BinOp::Div),
        Just(BinOp::Pow),
    ]
}

fn arb_func() -> impl Strategy<Value = Func> {
    prop_oneof![
        Just(Func::Sin),
        Just(Func::Cos),
        Just(Func::Tan),
        Just(Func::Exp),
        Just(Func::Log),
        Just(Func::Sqrt),
        Just(Func::Sinh),
        Just(Func::Cosh),
        Just(Func::Tanh),
        Just(Func::Abs),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn printing_round_trips_evaluation(ast in arb_ast(), xs in proptest::collection::vec(-10.0f64..10.0, 10)) {
        let printed = ast.to_string();
        let reparsed = expr::parse(&printed)
            .unwrap_or_else(|e| panic!("printed form must reparse: {printed:?}: {e}"));
        for x in xs {
            let a = expr::eval(&ast, x);
            let b = expr::eval(&reparsed, x);
            prop_assert!(
                a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()),
                "mismatch at x={}: {} vs {} for {:?}",
                x, a, b, printed
            );
        }
    }
}

mod common;

use proptest::prelude::*;

use common::{expr, grid_root_count, poly};
use cyclescope::dynamics::{return_map, DynamicsError, Options};
use cyclescope::symbolic::sturm::SturmSequence;
use cyclescope::symbolic::{parse, Antiderivative};
use cyclescope::system::EquationSpec;
use cyclescope::theorems::{check_existence_poly, check_nonexistence, Overall};
use cyclescope::transforms::LienardImage;

fn leaf() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("x".to_string()),
        (-5i32..=5).prop_map(|n| n.to_string()),
        (1i32..=5, 2i32..=7).prop_map(|(a, b)| format!("{a}/{b}")),
    ]
}

/// Sums, products, small powers and `exp` of a polynomial-sized argument.
fn smooth() -> impl Strategy<Value = String> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) + ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) - ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
            (inner.clone(), 0u32..=3).prop_map(|(a, k)| format!("({a})^{k}")),
            inner.prop_map(|a| format!("exp(-({a})^2/4)")),
        ]
    })
}

/// `smooth` plus quotients by a positive denominator.
fn with_division() -> impl Strategy<Value = String> {
    prop_oneof![
        smooth(),
        (smooth(), smooth()).prop_map(|(a, b)| format!("({a})/(1 + ({b})^2)")),
    ]
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

fn int_poly() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-5i64..=5, 1..=7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn print_parse_round_trip(s in with_division(), x in -2.0f64..2.0) {
        let e = parse(&s).unwrap();
        let printed = e.to_string();
        let again = parse(&printed).unwrap();
        prop_assert_eq!(again.to_string(), printed);
        let (a, b) = (e.eval(x), again.eval(x));
        prop_assert!(close(a, b, 1e-12) || (a.is_nan() && b.is_nan()), "{} vs {}", a, b);
    }

    #[test]
    fn derivative_matches_central_difference(s in with_division(), x in -2.0f64..2.0) {
        let e = parse(&s).unwrap();
        let f = |t: f64| e.eval(t);
        let h = 1e-5;
        let fd = (f(x + h) - f(x - h)) / (2.0 * h);
        let d = e.differentiate().eval(x);
        prop_assume!(f(x).abs() < 1e6 && fd.is_finite());
        // The difference quotient itself carries an O(h^2 f''') error.
        prop_assert!(close(d, fd, 1e-4), "{}: {} vs {}", s, d, fd);
    }

    #[test]
    fn antiderivative_undoes_derivative(s in smooth(), x in -2.0f64..2.0) {
        let e = parse(&s).unwrap();
        prop_assume!(e.eval(x).abs() < 1e6);
        let back = Antiderivative::of(&e.differentiate()).eval(x);
        let want = e.eval(x) - e.eval(0.0);
        prop_assert!(close(back, want, 1e-8), "{}: {} vs {}", s, back, want);
    }

    #[test]
    fn divergence_is_trace_of_jacobian(
        cs in prop::collection::vec(int_poly(), 2..=4),
        x in -2.0f64..2.0,
        y in -2.0f64..2.0,
    ) {
        let mut cs = cs;
        if cs.last().unwrap().iter().all(|&c| c == 0) {
            cs.last_mut().unwrap()[0] = 1;
        }
        let spec = EquationSpec::from_expressions(cs.iter().map(|c| expr(c)).collect()).unwrap();
        let h = 1e-6;
        let dfx = (spec.field(x + h, y).0 - spec.field(x - h, y).0) / (2.0 * h);
        let dgy = (spec.field(x, y + h).1 - spec.field(x, y - h).1) / (2.0 * h);
        prop_assert!(close(spec.divergence(x, y), dfx + dgy, 1e-6));
    }

    #[test]
    fn transform_round_trip(
        f1 in int_poly(),
        f2 in prop::collection::vec(-1i64..=1, 1..=3),
        u in -2.0f64..2.0,
        v in -2.0f64..2.0,
    ) {
        let mut f2 = f2;
        if f2.iter().all(|&c| c == 0) {
            f2[0] = 1;
        }
        let spec = EquationSpec::from_expressions(vec![expr(&[0, 1]), expr(&f1), expr(&f2)]).unwrap();
        let img = LienardImage::new(&spec).unwrap();
        let (x, y) = img.forward(u, v).unwrap();
        let (a, b) = img.inverse(x, y).unwrap();
        prop_assert!(close(a, u, 1e-12) && close(b, v, 1e-9), "({}, {}) -> ({}, {})", u, v, a, b);
    }

    #[test]
    fn reports_are_deterministic(cs in prop::collection::vec(int_poly(), 2..=4)) {
        let mut cs = cs;
        if cs.last().unwrap().iter().all(|&c| c == 0) {
            cs.last_mut().unwrap()[0] = 1;
        }
        let build = || EquationSpec::from_expressions(cs.iter().map(|c| expr(c)).collect()).unwrap();
        prop_assert_eq!(check_nonexistence(&build()), check_nonexistence(&build()));
        let q = [poly(&cs[0]), poly(&cs[1])];
        prop_assume!(!q[0].is_zero() && !q[1].is_zero());
        let quad = cyclescope::system::Quadruple {
            p: q[0].clone(), q1: q[1].clone(), q2: q[0].clone(), r: q[1].clone(),
        };
        prop_assert_eq!(check_existence_poly(&quad), check_existence_poly(&quad));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sturm_counts_match_grid(c in int_poly()) {
        prop_assume!(c.iter().any(|&v| v != 0));
        prop_assert_eq!(SturmSequence::new(&poly(&c)).count_real(), grid_root_count(&c));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Whenever T1 applies, the return map has no fixed point on the grid.
    #[test]
    fn nonexistence_agrees_with_return_map(
        a in 1i64..=3,
        b in 0i64..=2,
        f2 in prop::collection::vec(-1i64..=1, 1..=3),
    ) {
        let mut f2 = f2;
        if f2.iter().all(|&c| c == 0) {
            f2[0] = -1;
        }
        let spec = EquationSpec::from_expressions(vec![
            expr(&[0, 1]),
            expr(&[a, 0, b]),
            expr(&f2),
        ]).unwrap();
        prop_assert_eq!(check_nonexistence(&spec).overall, Overall::Applies);
        let opts = Options::with_tol(1e-10);
        for k in 1..=4 {
            let y = 0.5 * k as f64;
            match return_map(&spec, y, &opts) {
                Ok(r) => prop_assert!(r.y1 < y, "R({}) = {}", y, r.y1),
                Err(DynamicsError::NoReturn { .. }) => {}
                Err(e) => prop_assert!(false, "{}", e),
            }
        }
    }
}

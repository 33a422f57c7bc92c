use serde::Serialize;

use super::EquationSpec;
use crate::symbolic::expr::Node;
use crate::symbolic::poly::Polynomial;
use crate::symbolic::signs::real_poles;
use crate::symbolic::sturm::positive_off_origin;
use crate::symbolic::Expression;
use crate::verdict::{Condition, Verdict};

/// Half-width of the window on which `|g'|` is bounded for A1.
pub const DEFAULT_LIPSCHITZ_WINDOW: f64 = 10.0;
const GRID: usize = 20_000;

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub a1: Condition,
    pub a2: Condition,
    pub b: Condition,
}

impl ValidationReport {
    pub fn conditions(&self) -> [&Condition; 3] {
        [&self.a1, &self.a2, &self.b]
    }

    pub fn verdict(&self) -> Verdict {
        self.a1.verdict.and(self.a2.verdict).and(self.b.verdict)
    }
}

fn has_division(e: &Expression) -> bool {
    match e.node() {
        Node::Rational(..) | Node::Float(_) | Node::X => false,
        Node::Div(..) => true,
        Node::Pow(_, n) if *n < 0 => true,
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) => has_division(a) || has_division(b),
        Node::Neg(a) | Node::Pow(a, _) | Node::Exp(a) => has_division(a),
    }
}

fn grid(w: f64) -> impl Iterator<Item = f64> {
    (0..=GRID).map(move |i| -w + 2.0 * w * i as f64 / GRID as f64)
}

fn check_a1(spec: &EquationSpec, w: f64) -> Condition {
    let dg = spec.g().differentiate();
    let mut max = 0.0f64;
    for x in grid(w) {
        match dg.try_eval(x) {
            Ok(v) if v.is_finite() => max = max.max(v.abs()),
            _ => {
                return Condition::new(
                    "A1",
                    Verdict::Fails,
                    format!("g' is unbounded near x = {x}"),
                )
            }
        }
    }
    Condition::new(
        "A1",
        Verdict::Holds,
        format!("max |g'| = {max:.6e} on [-{w}, {w}]"),
    )
}

fn check_a2(spec: &EquationSpec) -> Condition {
    let mut doubtful = Vec::new();
    for (l, c) in spec.coefficients().iter().enumerate() {
        match real_poles(c) {
            Some(p) if !p.is_empty() => {
                return Condition::new(
                    "A2",
                    Verdict::Fails,
                    format!("f_{l} has a real pole near x = {:.6}", p[0].approx()),
                )
            }
            Some(_) => {}
            None if has_division(c) => doubtful.push(l),
            None => {}
        }
    }
    if doubtful.is_empty() {
        Condition::new("A2", Verdict::Holds, "all coefficients are continuous on R")
    } else {
        Condition::new(
            "A2",
            Verdict::Indeterminate,
            format!("cannot exclude zero denominators in f_{doubtful:?}"),
        )
    }
}

fn check_b(spec: &EquationSpec, w: f64) -> Condition {
    let g = spec.g();
    if let Some(n) = g.to_exp_rational() {
        // sign(x g) = sign(x N D) since exp > 0
        let p = &(&Polynomial::x() * &n.rational.num) * &n.rational.den;
        return if positive_off_origin(&p) {
            Condition::new("B", Verdict::Holds, "x g(x) > 0 for all x != 0 (exact)")
        } else {
            Condition::new(
                "B",
                Verdict::Fails,
                "x g(x) <= 0 somewhere off the origin (exact)",
            )
        };
    }
    for x in grid(w) {
        if x == 0.0 {
            continue;
        }
        match g.try_eval(x) {
            Ok(v) if x * v > 0.0 => {}
            Ok(v) if v.is_finite() => {
                return Condition::new("B", Verdict::Fails, format!("x g(x) <= 0 at x = {x}"))
            }
            _ => {
                return Condition::new(
                    "B",
                    Verdict::Indeterminate,
                    format!("g undefined at x = {x}"),
                )
            }
        }
    }
    Condition::new(
        "B",
        Verdict::Indeterminate,
        format!("x g(x) > 0 on a {GRID}-point grid over [-{w}, {w}] only"),
    )
}

/// Hypotheses A1 (Lipschitz, via `|g'|` on `[-w, w]`), A2 (continuity) and
/// B (`x g(x) > 0` off the origin).
pub fn validate(spec: &EquationSpec, w: f64) -> ValidationReport {
    ValidationReport {
        a1: check_a1(spec, w),
        a2: check_a2(spec),
        b: check_b(spec, w),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(g: &str) -> Verdict {
        let s = EquationSpec::from_strs(&[g]).unwrap();
        validate(&s, DEFAULT_LIPSCHITZ_WINDOW).b.verdict
    }

    #[test]
    fn hypothesis_b() {
        assert_eq!(b("x"), Verdict::Holds);
        assert_eq!(b("x^3 - x"), Verdict::Fails);
        assert_eq!(b("x/((x/3)^6 + 1)"), Verdict::Holds);
        assert_eq!(b("x^3"), Verdict::Holds);
        assert_eq!(b("x^2"), Verdict::Fails);
        assert_eq!(b("x*exp(-x^2)"), Verdict::Holds);
    }

    #[test]
    fn continuity() {
        let s = EquationSpec::from_strs(&["x", "1/(x^2 - 2)"]).unwrap();
        let r = validate(&s, 10.0);
        assert_eq!(r.a2.verdict, Verdict::Fails);
        let s = EquationSpec::from_strs(&["x", "1/(x^2 + 2)"]).unwrap();
        assert_eq!(validate(&s, 10.0).a2.verdict, Verdict::Holds);
    }

    #[test]
    fn lipschitz_window() {
        let s = EquationSpec::from_strs(&["x^3"]).unwrap();
        let r = validate(&s, 10.0);
        assert_eq!(r.a1.verdict, Verdict::Holds);
        assert!(r.a1.evidence.contains("3.0"));
        assert_eq!(r.verdict(), Verdict::Holds);
    }
}

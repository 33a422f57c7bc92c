use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use super::{TheoremError, TheoremId, TheoremReport};
use crate::symbolic::asymptotic::{End, Limit, Tail};
use crate::symbolic::signs::{
    clearance_from_origin, global_sign, real_poles, real_zeros, DEFAULT_WINDOW,
};
use crate::symbolic::{Bound, ExpRational, Expression, SignSummary};
use crate::system::{validate, EquationSpec, DEFAULT_LIPSCHITZ_WINDOW};
use crate::verdict::{Condition, Verdict};

/// Abscissa standing in for `±∞` when a finite limit is estimated.
const FAR: f64 = 1e3;
const GRID: usize = 20_001;

fn end_name(end: End) -> &'static str {
    match end {
        End::NegInf => "-inf",
        End::PosInf => "+inf",
    }
}

/// Limit of the primitive of `e` at `end`.
fn primitive_limit(e: &ExpRational, end: End) -> Limit {
    Tail::of_exp_rational(e, end).integral().limit()
}

fn check_c(f1: &Expression) -> Condition {
    let v0 = f1.try_eval(0.0).unwrap_or(f64::NAN);
    let negative_at_zero = match f1.to_exp_rational() {
        Some(n) => n.sign_at_zero().map(|s| s < 0),
        None if v0 < -1e-12 => Some(true),
        None if v0 > 1e-12 => Some(false),
        None => None,
    };
    match negative_at_zero {
        Some(false) => {
            return Condition::new("C", Verdict::Fails, format!("f1(0) = {v0} is not negative"))
        }
        None => return Condition::new("C", Verdict::Indeterminate, "sign of f1(0) undecided"),
        Some(true) => {}
    }
    let delta = clearance_from_origin(f1, 1.0).map_or_else(
        || format!("f1(0) = {v0} < 0, δ by continuity"),
        |d| format!("δ = {d:.6}"),
    );
    // f1 <= 0 everywhere would make f1 one-signed and rule out cycles.
    let s = global_sign(f1);
    if s.is_nonpositive() == Some(true) {
        return Condition::new(
            "C",
            Verdict::Fails,
            format!("{delta}; f1 never positive: {}", s.describe()),
        );
    }
    let step = 2.0 * DEFAULT_WINDOW / (GRID - 1) as f64;
    let witness = (0..GRID)
        .map(|i| -DEFAULT_WINDOW + i as f64 * step)
        .find(|&x| f1.try_eval(x).is_ok_and(|v| v > 0.0));
    match witness {
        Some(x) => Condition::new("C", Verdict::Holds, format!("{delta}; f1({x:.6}) > 0")),
        None => Condition::new(
            "C",
            Verdict::Indeterminate,
            format!("{delta}; no point with f1 > 0 in [-{DEFAULT_WINDOW}, {DEFAULT_WINDOW}]"),
        ),
    }
}

fn check_d1(spec: &EquationSpec) -> Condition {
    let f1 = spec.coefficient(1);
    let Some(n) = f1.to_exp_rational() else {
        return Condition::new(
            "D1",
            Verdict::Indeterminate,
            "f1 is not of the form R exp(P)",
        );
    };
    let (lp, ln) = (
        primitive_limit(&n, End::PosInf),
        primitive_limit(&n, End::NegInf),
    );
    if lp == Limit::MinusInfinity || ln == Limit::PlusInfinity {
        return Condition::new(
            "D1",
            Verdict::Fails,
            format!("F1 -> {} at +inf, {} at -inf", lp.describe(), ln.describe()),
        );
    }
    if lp == Limit::Unknown || ln == Limit::Unknown {
        return Condition::new("D1", Verdict::Indeterminate, "tail of F1 undetermined");
    }
    let Some(zeros) = real_zeros(&f1) else {
        return Condition::new(
            "D1",
            Verdict::Indeterminate,
            "critical points of F1 unavailable",
        );
    };
    let big_f1 = spec.f1_primitive();
    // Extremes of F1 are at critical points or approached at the ends.
    let mut inf_pos = 0.0f64;
    let mut sup_neg = 0.0f64;
    for x in zeros.iter().map(|r| r.approx()) {
        if x > 0.0 {
            inf_pos = inf_pos.min(big_f1.eval(x));
        } else if x < 0.0 {
            sup_neg = sup_neg.max(big_f1.eval(x));
        }
    }
    if lp == Limit::Finite {
        inf_pos = inf_pos.min(big_f1.eval(FAR));
    }
    if ln == Limit::Finite {
        sup_neg = sup_neg.max(big_f1.eval(-FAR));
    }
    let c = 1.0 + (-inf_pos).max(sup_neg).max(0.0);
    Condition::new(
        "D1",
        Verdict::Holds,
        format!("c = {c:.6}; inf F1 on x>0 = {inf_pos:.6}, sup F1 on x<0 = {sup_neg:.6}"),
    )
}

fn check_d2(spec: &EquationSpec) -> Condition {
    let (Some(g), Some(f1)) = (
        spec.g().to_exp_rational(),
        spec.coefficient(1).to_exp_rational(),
    ) else {
        return Condition::new(
            "D2",
            Verdict::Indeterminate,
            "g or f1 is not of the form R exp(P)",
        );
    };
    let mut v = Verdict::Holds;
    let mut ev = Vec::new();
    for (end, sign) in [(End::PosInf, "+"), (End::NegInf, "-")] {
        let big_g = Tail::of_exp_rational(&g, end).integral();
        let big_f = Tail::of_exp_rational(&f1, end).integral();
        let t = if sign == "+" {
            big_g.add(&big_f)
        } else {
            big_g.sub(&big_f)
        };
        let lim = t.limit();
        v = v.and(match lim {
            Limit::PlusInfinity => Verdict::Holds,
            Limit::Unknown => Verdict::Indeterminate,
            _ => Verdict::Fails,
        });
        ev.push(format!(
            "G {sign} F1 -> {} at {}",
            lim.describe(),
            end_name(end)
        ));
    }
    Condition::new("D2", v, ev.join("; "))
}

fn check_d3(spec: &EquationSpec) -> Condition {
    let Some(f2) = spec.coefficient(2).to_exp_rational() else {
        return Condition::new(
            "D3",
            Verdict::Indeterminate,
            "f2 is not of the form R exp(P)",
        );
    };
    let (lp, ln) = (
        primitive_limit(&f2, End::PosInf),
        primitive_limit(&f2, End::NegInf),
    );
    let v = match (lp, ln) {
        (Limit::Finite, Limit::Finite) => Verdict::Holds,
        (Limit::Unknown, _) | (_, Limit::Unknown) => Verdict::Indeterminate,
        _ => Verdict::Fails,
    };
    let ev = if v == Verdict::Holds {
        let p = spec.f2_primitive();
        format!("l+ ≈ {:.6}, l- ≈ {:.6}", p.eval(FAR), p.eval(-FAR))
    } else {
        format!(
            "∫f2 -> {} at +inf, {} at -inf",
            lp.describe(),
            ln.describe()
        )
    };
    Condition::new("D3", v, ev)
}

/// Integer `Δ'` beyond every real zero and pole of `f2`.
fn delta_prime(f2: &Expression) -> Option<i64> {
    let mut roots = real_zeros(f2)?;
    roots.extend(real_poles(f2)?);
    let r = roots
        .iter()
        .map(|r| r.lo.abs().max(r.hi.abs()))
        .fold(0.0f64, |m, v| m.max(v.to_f64().unwrap_or(f64::INFINITY)));
    Some(r.floor() as i64 + 1)
}

/// One branch of E: `(E1, E2)` at `-∞` or `(E1', E2')` at `+∞`.
fn check_e_branch(spec: &EquationSpec, end: End, dp: i64) -> (Verdict, String) {
    let prime = if end == End::PosInf { "'" } else { "" };
    let f2e = spec.coefficient(2);
    let f2 = f2e.to_exp_rational().expect("checked by caller");
    let eps = BigRational::new(1.into(), 1024.into());
    let (lo, hi, want) = match end {
        End::NegInf => (
            Bound::NegInf,
            Bound::At(BigRational::from_integer((-dp).into()) + eps),
            SignSummary::EverywherePositive,
        ),
        End::PosInf => (
            Bound::At(BigRational::from_integer(dp.into()) - eps),
            Bound::PosInf,
            SignSummary::EverywhereNegative,
        ),
    };
    let s = f2.sign_on(&lo, &hi);
    let e1 = if s == want {
        Verdict::Holds
    } else {
        Verdict::Fails
    };
    let side = if end == End::PosInf {
        "x >= Δ'"
    } else {
        "x <= -Δ'"
    };
    let mut ev = format!("E1{prime}: f2 {s} for {side}");
    if e1 != Verdict::Holds {
        return (e1, ev);
    }
    let tails = spec
        .g()
        .neg()
        .div(&f2e)
        .to_exp_rational()
        .zip(spec.coefficient(1).to_exp_rational());
    let Some((q, f1)) = tails else {
        ev.push_str(&format!("; E2{prime}: -g/f2 is not of the form R exp(P)"));
        return (Verdict::Indeterminate, ev);
    };
    let Some(root) = Tail::of_exp_rational(&q, end).sqrt() else {
        ev.push_str(&format!("; E2{prime}: tail of sqrt(-g/f2) undetermined"));
        return (Verdict::Indeterminate, ev);
    };
    let big_f = Tail::of_exp_rational(&f1, end).integral();
    let (t, op) = match end {
        End::NegInf => (big_f.add(&root), "+"),
        End::PosInf => (big_f.sub(&root), "-"),
    };
    let lim = t.limit();
    let e2 = match (end, lim) {
        (_, Limit::Unknown) => Verdict::Indeterminate,
        (End::NegInf, Limit::PlusInfinity) | (End::PosInf, Limit::MinusInfinity) => Verdict::Fails,
        _ => Verdict::Holds,
    };
    let l = if lim == Limit::Finite {
        let x = if end == End::PosInf { FAR } else { -FAR };
        let sgn = if end == End::PosInf { -1.0 } else { 1.0 };
        let v = spec.f1_primitive().eval(x) + sgn * (-spec.g().eval(x) / f2e.eval(x)).sqrt();
        format!("≈ {v:.6}")
    } else {
        lim.describe().to_string()
    };
    let name = if end == End::PosInf { "L+" } else { "L-" };
    ev.push_str(&format!(
        "; E2{prime}: F1 {op} sqrt(-g/f2) -> {l} at {}, {name} = {l}",
        end_name(end)
    ));
    (e1.and(e2), ev)
}

fn check_e(spec: &EquationSpec) -> Condition {
    let f2 = spec.coefficient(2);
    if f2.to_exp_rational().is_none() {
        return Condition::new(
            "E",
            Verdict::Indeterminate,
            "f2 is not of the form R exp(P)",
        );
    }
    let Some(dp) = delta_prime(&f2) else {
        return Condition::new("E", Verdict::Indeterminate, "zeros of f2 unavailable");
    };
    let (vm, em) = check_e_branch(spec, End::NegInf, dp);
    let (vp, ep) = check_e_branch(spec, End::PosInf, dp);
    Condition::new("E", vm.or(vp), format!("Δ' = {dp}; {em}; {ep}"))
}

/// At least one periodic orbit for `n = 2` under C, D1–D3 and E.
pub fn check_existence_general(spec: &EquationSpec) -> Result<TheoremReport, TheoremError> {
    if spec.n() != 2 {
        return Err(TheoremError::Order(spec.n()));
    }
    let v = validate(spec, DEFAULT_LIPSCHITZ_WINDOW);
    let mut conditions: Vec<Condition> = v.conditions().into_iter().cloned().collect();
    conditions.push(check_c(&spec.coefficient(1)));
    conditions.push(check_d1(spec));
    conditions.push(check_d2(spec));
    conditions.push(check_d3(spec));
    conditions.push(check_e(spec));
    let mut notes = Vec::new();
    if spec.coefficient(2).to_polynomial().is_some() {
        notes.push(
            "f2 is a polynomial: D3 and E cannot hold together, since ∫f2 diverges unless f2 = 0"
                .to_string(),
        );
    }
    Ok(TheoremReport::new(TheoremId::T2, conditions, notes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theorems::Overall;

    fn report(cs: &[&str]) -> TheoremReport {
        check_existence_general(&EquationSpec::from_strs(cs).unwrap()).unwrap()
    }

    fn verdict(r: &TheoremReport, l: &str) -> Verdict {
        r.condition(l).unwrap().verdict
    }

    #[test]
    fn rational_f2_applies() {
        let r = report(&["x", "x^2 - 1", "-x/(1 + x^4)"]);
        assert_eq!(r.overall, Overall::Applies, "{r:#?}");
        assert!(r.condition("C").unwrap().evidence.contains("δ = 1.0"));
        let d1 = &r.condition("D1").unwrap().evidence;
        assert!(d1.contains("-0.666667"), "{d1}");
        let d3 = &r.condition("D3").unwrap().evidence;
        assert!(d3.contains("l+ ≈ -0.785"), "{d3}");
        assert!(r.condition("E").unwrap().evidence.contains("Δ' = 1"));
    }

    #[test]
    fn polynomial_f2() {
        let r = report(&["x", "x^2 - 1", "-x"]);
        assert_eq!(verdict(&r, "D3"), Verdict::Fails);
        assert_ne!(r.overall, Overall::Applies);
        assert!(r.notes[0].contains("D3 and E"));
    }

    #[test]
    fn positive_constant_damping() {
        let r = report(&["x", "1", "-x/(1 + x^4)"]);
        assert_eq!(verdict(&r, "C"), Verdict::Fails);
    }

    #[test]
    fn never_positive_damping() {
        let r = report(&["x", "-1 - x^2", "-x/(1 + x^4)"]);
        assert_eq!(verdict(&r, "C"), Verdict::Fails);
    }

    #[test]
    fn unbounded_below_primitive() {
        // F1 = x - x^3/3 -> -inf as x -> +inf.
        let r = report(&["x", "1 - x^2", "-x/(1 + x^4)"]);
        assert_eq!(verdict(&r, "C"), Verdict::Fails);
        assert_eq!(verdict(&r, "D1"), Verdict::Fails);
    }

    #[test]
    fn wrong_sign_tail_of_f2() {
        // f2 > 0 at +inf and < 0 at -inf: E1 and E1' both fail.
        let r = report(&["x", "x^2 - 1", "x/(1 + x^4)"]);
        assert_eq!(verdict(&r, "E"), Verdict::Fails);
    }

    #[test]
    fn order_is_checked() {
        let s = EquationSpec::from_strs(&["x", "x^2 - 1"]).unwrap();
        assert_eq!(check_existence_general(&s), Err(TheoremError::Order(1)));
    }
}

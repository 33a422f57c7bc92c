use super::{TheoremId, TheoremReport};
use crate::dynamics::massera_structure;
use crate::symbolic::signs::{clearance_from_origin, expression_sign, global_sign, DEFAULT_WINDOW};
use crate::symbolic::Bound;
use crate::system::{validate, EquationSpec, DEFAULT_LIPSCHITZ_WINDOW};
use crate::verdict::{Condition, Verdict};

/// Unique attracting cycle for `x'' + Σ f_{2l+1}(x) x'^{2l+1} + x = 0`.
pub fn check_massera(spec: &EquationSpec) -> TheoremReport {
    let structure = massera_structure(spec).and_then(|()| {
        if (3..=spec.n())
            .step_by(2)
            .any(|l| !spec.coefficient(l).is_identically_zero())
        {
            Ok(())
        } else {
            Err("N = 0: no f_{2l+1} with l >= 1".to_string())
        }
    });
    if let Err(why) = structure {
        let c = Condition::new(
            "structure",
            Verdict::Fails,
            format!("not of the generalized Massera form: {why}"),
        );
        return TheoremReport::new(TheoremId::T4, vec![c], Vec::new());
    }
    let mut conditions = vec![Condition::new(
        "structure",
        Verdict::Holds,
        "g = x, only odd powers of x'",
    )];
    let v = validate(spec, DEFAULT_LIPSCHITZ_WINDOW);
    conditions.push(v.a1.clone());
    conditions.push(v.a2.clone());

    let f1 = spec.coefficient(1);
    let at0 = match f1.to_exp_rational() {
        Some(n) => n.sign_at_zero(),
        None => f1.try_eval(0.0).ok().and_then(|v| {
            if v < -1e-12 {
                Some(-1)
            } else if v > 1e-12 {
                Some(1)
            } else {
                None
            }
        }),
    };
    conditions.push(match at0 {
        Some(s) if s < 0 => {
            let delta = clearance_from_origin(&f1, 1.0)
                .map_or("δ by continuity".to_string(), |d| format!("δ = {d:.6}"));
            Condition::new("L1", Verdict::Holds, format!("f1(0) < 0, {delta}"))
        }
        Some(_) => Condition::new("L1", Verdict::Fails, "f1(0) >= 0"),
        None => Condition::new("L1", Verdict::Indeterminate, "sign of f1(0) undecided"),
    });

    let odd: Vec<usize> = (1..=spec.n()).step_by(2).collect();
    let mut l2 = Verdict::Holds;
    let mut l2_ev = Vec::new();
    for &l in odd.iter().skip(1) {
        let s = global_sign(&spec.coefficient(l));
        l2 = l2.and(Verdict::from_option(s.is_nonnegative()));
        l2_ev.push(format!("f_{l}: {}", s.describe()));
    }
    conditions.push(Condition::new("L2", l2, l2_ev.join("; ")));

    let mut notes = Vec::new();
    for &l in &odd {
        let d = spec.coefficient(l).differentiate();
        let right = expression_sign(&d, &Bound::at(0), &Bound::PosInf, DEFAULT_WINDOW);
        let left = expression_sign(&d, &Bound::NegInf, &Bound::at(0), DEFAULT_WINDOW);
        let verdict = Verdict::from_option(right.is_nonnegative())
            .and(Verdict::from_option(left.is_nonpositive()));
        if verdict == Verdict::Fails && l == 1 {
            notes.push(
                "L3 is read globally: f1 must be monotone on the whole of x > 0 and x < 0"
                    .to_string(),
            );
        }
        conditions.push(Condition::new(
            format!("L3 f_{l}"),
            verdict,
            format!(
                "f_{l}' on x > 0: {}; on x < 0: {}",
                right.describe(),
                left.describe()
            ),
        ));
    }
    TheoremReport::new(TheoremId::T4, conditions, notes)
}

use super::{TheoremId, TheoremReport};
use crate::symbolic::signs::global_sign;
use crate::system::{validate, EquationSpec, DEFAULT_LIPSCHITZ_WINDOW};
use crate::verdict::{Condition, Verdict};

/// No periodic orbits when every odd-power coefficient keeps one sign.
pub fn check_nonexistence(spec: &EquationSpec) -> TheoremReport {
    let v = validate(spec, DEFAULT_LIPSCHITZ_WINDOW);
    let mut conditions: Vec<Condition> = v.conditions().into_iter().cloned().collect();
    let odd: Vec<usize> = (1..=spec.n()).step_by(2).collect();
    let present = odd
        .iter()
        .any(|&l| !spec.coefficient(l).is_identically_zero());
    conditions.push(if present {
        Condition::new("odd damping", Verdict::Holds, "some odd f_l is nonzero")
    } else {
        // Without odd terms the system is reversible under (y, t) -> (-y, -t).
        Condition::new(
            "odd damping",
            Verdict::Fails,
            "all odd f_l vanish, the system is reversible and the origin is a center",
        )
    });
    for l in odd {
        let s = global_sign(&spec.coefficient(l));
        conditions.push(Condition::new(
            format!("f_{l} one-signed"),
            Verdict::from_option(s.is_one_signed()),
            s.describe(),
        ));
    }
    TheoremReport::new(TheoremId::T1, conditions, Vec::new())
}

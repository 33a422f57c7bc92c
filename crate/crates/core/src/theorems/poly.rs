use num_traits::Signed;

use super::{TheoremId, TheoremReport};
use crate::symbolic::sturm::{sign_on_interval, Bound, SignSummary};
use crate::symbolic::Polynomial;
use crate::system::Quadruple;
use crate::verdict::{Condition, Verdict};

fn holds(b: bool) -> Verdict {
    if b {
        Verdict::Holds
    } else {
        Verdict::Fails
    }
}

/// Degree with `deg 0 = -∞`.
fn deg(p: &Polynomial) -> Option<i64> {
    p.degree().map(|d| d as i64)
}

fn show(d: Option<i64>) -> String {
    d.map_or("-inf".into(), |d| d.to_string())
}

/// Limit cycle for `p x'' + p q1 x' + q2 x'^2 + r = 0` under H1–H5.
pub fn check_existence_poly(q: &Quadruple) -> TheoremReport {
    let Quadruple { p, q1, q2, r } = q;

    let p_pos =
        sign_on_interval(p, &Bound::NegInf, &Bound::PosInf) == SignSummary::EverywherePositive;
    let q1_0 = q1.coeff(0);
    let xr = &Polynomial::x() * r;
    let xr_pos = crate::symbolic::sturm::positive_off_origin(&xr);
    let h1 = Condition::new(
        "H1",
        holds(p_pos && q1_0.is_negative() && xr_pos),
        format!("p > 0 everywhere: {p_pos}; q1(0) = {q1_0}; x r(x) > 0 off 0: {xr_pos}"),
    );

    let h2 = match q1.degree() {
        Some(d) => Condition::new(
            "H2",
            holds(d % 2 == 0 && q1.leading().is_positive()),
            format!("deg q1 = {d}, leading coefficient {}", q1.leading()),
        ),
        None => Condition::new("H2", Verdict::Fails, "q1 is zero"),
    };

    let (dp, dq1, dq2, dr) = (deg(p), deg(q1), deg(q2), deg(r));
    let h3_ok = match (dp, dq2) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(a), Some(b)) => a >= b + 2,
    };
    let h3 = Condition::new(
        "H3",
        holds(h3_ok),
        format!(
            "deg p = {} vs deg q2 + 2 = {}",
            show(dp),
            show(dq2.map(|d| d + 2))
        ),
    );

    let h4 = match dq2 {
        Some(d) if d % 2 == 1 => Condition::new(
            "H4",
            holds(q2.leading().is_negative()),
            format!("deg q2 = {d} is odd, leading coefficient {}", q2.leading()),
        ),
        _ => Condition::new(
            "H4",
            Verdict::Holds,
            format!("deg q2 = {} is not odd", show(dq2)),
        ),
    };

    let rhs = match (dq1, dq2) {
        (Some(a), Some(b)) => Some(2 * a + b + 1),
        _ => None,
    };
    let h5_ok = match (dr, rhs) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(a), Some(b)) => a <= b,
    };
    let h5 = Condition::new(
        "H5",
        holds(h5_ok),
        format!(
            "deg r = {} vs 2 deg q1 + deg q2 + 1 = {}",
            show(dr),
            show(rhs)
        ),
    );

    let mut notes = Vec::new();
    if q2.is_zero() || r.is_zero() || q1.is_zero() {
        notes.push("zero polynomials have degree -inf".to_string());
    }
    TheoremReport::new(TheoremId::T3, vec![h1, h2, h3, h4, h5], notes)
}

//! Sign determination for expressions.
//!
//! Exact (via the `R exp(P)` normal form and Sturm sequences) whenever the
//! expression normalises; otherwise a dense grid on a finite window, which
//! can only ever prove a sign change.

use num_rational::BigRational;
use num_traits::Signed;

use super::expr::Expression;
use super::poly::rat_to_f64;
use super::sturm::{isolate_roots, Bound, RealRoot, SignSummary};

/// Default half-width of the sampling window for non-normalisable input.
pub const DEFAULT_WINDOW: f64 = 100.0;
const GRID_POINTS: usize = 20_001;

#[derive(Debug, Clone, PartialEq)]
pub enum ExprSign {
    /// Decided exactly on the whole requested interval.
    Exact(SignSummary),
    /// Opposite signs observed at two sample points.
    ChangesAt { negative: f64, positive: f64 },
    /// Not decidable; the string says what was observed.
    Indeterminate(String),
}

impl ExprSign {
    pub fn is_nonnegative(&self) -> Option<bool> {
        match self {
            ExprSign::Exact(s) => Some(s.is_nonnegative()),
            ExprSign::ChangesAt { .. } => Some(false),
            ExprSign::Indeterminate(_) => None,
        }
    }

    pub fn is_nonpositive(&self) -> Option<bool> {
        match self {
            ExprSign::Exact(s) => Some(s.is_nonpositive()),
            ExprSign::ChangesAt { .. } => Some(false),
            ExprSign::Indeterminate(_) => None,
        }
    }

    pub fn is_one_signed(&self) -> Option<bool> {
        match self {
            ExprSign::Exact(s) => Some(s.is_one_signed()),
            ExprSign::ChangesAt { .. } => Some(false),
            ExprSign::Indeterminate(_) => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ExprSign::Exact(s) => format!("{s} (exact)"),
            ExprSign::ChangesAt { negative, positive } => {
                format!("changes-sign (f({negative:.6}) < 0 < f({positive:.6}))")
            }
            ExprSign::Indeterminate(why) => format!("indeterminate: {why}"),
        }
    }
}

fn bound_f64(b: &Bound, window: f64) -> f64 {
    match b {
        Bound::NegInf => -window,
        Bound::PosInf => window,
        Bound::At(r) => rat_to_f64(r),
    }
}

/// Sign of `e` on the open interval `(lo, hi)`.
pub fn expression_sign(e: &Expression, lo: &Bound, hi: &Bound, window: f64) -> ExprSign {
    if let Some(n) = e.to_exp_rational() {
        return ExprSign::Exact(n.sign_on(lo, hi));
    }
    let a = bound_f64(lo, window).max(-window);
    let b = bound_f64(hi, window).min(window);
    if a >= b {
        return ExprSign::Indeterminate("empty sampling window".into());
    }
    let mut neg = None;
    let mut pos = None;
    let mut bad = 0usize;
    for i in 1..GRID_POINTS {
        let x = a + (b - a) * i as f64 / GRID_POINTS as f64;
        match e.try_eval(x) {
            Ok(v) if v.is_finite() => {
                if v < 0.0 && neg.is_none() {
                    neg = Some(x);
                }
                if v > 0.0 && pos.is_none() {
                    pos = Some(x);
                }
            }
            _ => bad += 1,
        }
        if let (Some(n), Some(p)) = (neg, pos) {
            return ExprSign::ChangesAt {
                negative: n,
                positive: p,
            };
        }
    }
    let seen = match (neg, pos) {
        (None, None) => "zero",
        (Some(_), None) => "nonpositive",
        _ => "nonnegative",
    };
    let mut why = format!("{seen} on a {}-point grid over [{a}, {b}]", GRID_POINTS - 1);
    if bad > 0 {
        why.push_str(&format!(", {bad} samples undefined"));
    }
    ExprSign::Indeterminate(why)
}

/// Global sign with the default window.
pub fn global_sign(e: &Expression) -> ExprSign {
    expression_sign(e, &Bound::NegInf, &Bound::PosInf, DEFAULT_WINDOW)
}

/// Real zeros of the numerator of a normalisable expression.
pub fn real_zeros(e: &Expression) -> Option<Vec<RealRoot>> {
    let n = e.to_exp_rational()?;
    let w = BigRational::new(1.into(), (1u64 << 40).into());
    Some(isolate_roots(n.zero_polynomial(), &w))
}

/// Real poles of a normalisable expression.
pub fn real_poles(e: &Expression) -> Option<Vec<RealRoot>> {
    let n = e.to_exp_rational()?;
    let w = BigRational::new(1.into(), (1u64 << 40).into());
    Some(isolate_roots(&n.rational.den, &w))
}

/// Largest `δ` (up to `cap`) such that `e` has no zero or pole in
/// `0 < |x| < δ`, for normalisable `e`.
pub fn clearance_from_origin(e: &Expression, cap: f64) -> Option<f64> {
    let mut roots = real_zeros(e)?;
    roots.extend(real_poles(e)?);
    let mut d = cap;
    for r in roots {
        // Closest point of the isolating interval to 0.
        let near = if r.lo.is_positive() {
            rat_to_f64(&r.lo)
        } else if r.hi.is_negative() {
            -rat_to_f64(&r.hi)
        } else {
            0.0
        };
        if near > 0.0 {
            d = d.min(near);
        } else if r.approx() != 0.0 {
            d = d.min(r.approx().abs());
        }
    }
    Some(d)
}

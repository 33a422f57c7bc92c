//! Independent oracles: exact integer evaluation of integer polynomials on
//! the grid `k / 1024`, `|k / 1024| <= 50`, plus leading-term signs at `±∞`.

#![allow(dead_code)]

use rand::Rng;

use cyclescope::symbolic::{Expression, Polynomial};

pub const SCALE: i128 = 1024;
pub const REACH: i128 = 50 * SCALE;

/// `p(k / 1024) * 1024^deg` exactly; coefficients ascending.
pub fn eval_scaled(c: &[i64], k: i128) -> i128 {
    let d = c.len().saturating_sub(1) as u32;
    c.iter()
        .enumerate()
        .map(|(i, &ci)| ci as i128 * k.pow(i as u32) * SCALE.pow(d - i as u32))
        .sum()
}

pub fn trim(c: &[i64]) -> Vec<i64> {
    let mut v = c.to_vec();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

pub fn derivative(c: &[i64]) -> Vec<i64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &ci)| i as i64 * ci)
        .collect()
}

pub fn times_x(c: &[i64]) -> Vec<i64> {
    let mut v = vec![0];
    v.extend_from_slice(c);
    v
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Signs {
    pub pos: bool,
    pub neg: bool,
    pub zero: bool,
}

/// Signs seen on the grid over `keep(k)`, plus at whichever infinite ends
/// the predicate admits.
pub fn signs(c: &[i64], keep: impl Fn(i128) -> bool) -> Signs {
    let c = trim(c);
    let mut s = Signs::default();
    if c.is_empty() {
        s.zero = true;
        return s;
    }
    let mut note = |v: i128| {
        if v > 0 {
            s.pos = true
        } else if v < 0 {
            s.neg = true
        } else {
            s.zero = true
        }
    };
    for k in -REACH..=REACH {
        if keep(k) {
            note(eval_scaled(&c, k));
        }
    }
    let lead = *c.last().unwrap() as i128;
    let d = c.len() - 1;
    if keep(REACH + 1) {
        note(lead);
    }
    if keep(-REACH - 1) {
        note(if d % 2 == 0 { lead } else { -lead });
    }
    s
}

pub fn everywhere(_: i128) -> bool {
    true
}

/// Distinct real roots: exact zeros at grid points plus sign changes
/// between adjacent nonzero grid values.
pub fn grid_root_count(c: &[i64]) -> usize {
    let c = trim(c);
    let mut count = 0;
    let mut prev: Option<i128> = None;
    for k in -REACH..=REACH {
        let v = eval_scaled(&c, k);
        if v == 0 {
            count += 1;
        } else if let Some(p) = prev {
            if p != 0 && (p > 0) != (v > 0) {
                count += 1;
            }
        }
        prev = Some(v);
    }
    count
}

pub fn degree(c: &[i64]) -> Option<usize> {
    let c = trim(c);
    (!c.is_empty()).then(|| c.len() - 1)
}

pub fn lead(c: &[i64]) -> i64 {
    trim(c).last().copied().unwrap_or(0)
}

/// Degree at most `max_deg`, coefficients in `[-5, 5]`; nonzero when asked.
pub fn random_poly(rng: &mut impl Rng, max_deg: usize, nonzero: bool) -> Vec<i64> {
    loop {
        let d = rng.gen_range(0..=max_deg);
        let c: Vec<i64> = (0..=d).map(|_| rng.gen_range(-5..=5)).collect();
        let c = trim(&c);
        if !nonzero || !c.is_empty() {
            return c;
        }
    }
}

pub fn poly(c: &[i64]) -> Polynomial {
    Polynomial::from_ints(c)
}

pub fn expr(c: &[i64]) -> Expression {
    Expression::from_polynomial(&poly(c))
}

/// Symmetric Hausdorff distance between two polylines, points to segments.
pub fn hausdorff(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    fn seg(p: (f64, f64), s: (f64, f64), e: (f64, f64)) -> f64 {
        let (dx, dy) = (e.0 - s.0, e.1 - s.1);
        let l2 = dx * dx + dy * dy;
        let t = if l2 == 0.0 {
            0.0
        } else {
            (((p.0 - s.0) * dx + (p.1 - s.1) * dy) / l2).clamp(0.0, 1.0)
        };
        (p.0 - s.0 - t * dx).hypot(p.1 - s.1 - t * dy)
    }
    fn one_way(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
        a.iter()
            .map(|&p| {
                b.windows(2)
                    .map(|w| seg(p, w[0], w[1]))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
    one_way(a, b).max(one_way(b, a))
}

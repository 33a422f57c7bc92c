//! Zero-isocline branches `y±(x) = F_1(x) ± sqrt(-g(x)/f_2(x))` for `n = 2`.

use num_rational::BigRational;
use serde::Serialize;

use super::EquationSpec;
use crate::symbolic::sturm::{isolate_roots, sign_on_interval, Bound};
use crate::symbolic::Expression;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IsoclineError {
    #[error("isoclines need n = 2, got n = {0}")]
    WrongOrder(usize),
    #[error("f_2 is identically zero")]
    NoQuadraticTerm,
    #[error("empty range")]
    EmptyRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BranchSign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl BranchSign {
    pub fn factor(self) -> f64 {
        match self {
            BranchSign::Plus => 1.0,
            BranchSign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IsoclineBranch {
    pub sign: BranchSign,
    /// Domain `[lo, hi]`; an end where the radicand blows up is open.
    pub domain: (f64, f64),
    pub samples: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Isoclines {
    pub branches: Vec<IsoclineBranch>,
    /// Index of the leftmost branch lying above `y = F_1(x)`.
    pub plus_left: Option<usize>,
}

/// `-g/f_2`.
fn radicand(spec: &EquationSpec) -> Expression {
    spec.g().neg().div(&spec.coefficient(2))
}

/// Evaluate `y±` at `x`; `None` where the radicand is negative or undefined.
pub fn branch_value(spec: &EquationSpec, sign: BranchSign, x: f64) -> Option<f64> {
    let r = radicand(spec).try_eval(x).ok()?;
    if !(r >= 0.0) || !r.is_finite() {
        return None;
    }
    Some(spec.f1_primitive().eval(x) + sign.factor() * r.sqrt())
}

/// Subintervals of `[a, b]` on which the radicand is nonnegative.
fn admissible_intervals(rad: &Expression, a: f64, b: f64) -> Vec<(f64, f64)> {
    let mut cuts = vec![a, b];
    let normal = rad.to_exp_rational();
    if let Some(n) = &normal {
        let w = BigRational::new(1.into(), (1u64 << 45).into());
        let p = &n.rational.num * &n.rational.den;
        for r in isolate_roots(&p, &w) {
            let v = r.approx();
            if v > a && v < b {
                cuts.push(v);
            }
        }
    } else {
        // Locate sign changes (and singularities) on a grid, refined by bisection.
        const N: usize = 4000;
        let sgn = |x: f64| match rad.try_eval(x) {
            Ok(v) if v.is_finite() => v.signum() as i32,
            _ => 0,
        };
        let mut prev = a;
        for i in 1..=N {
            let x = a + (b - a) * i as f64 / N as f64;
            if sgn(prev) != sgn(x) {
                let (mut lo, mut hi) = (prev, x);
                let s = sgn(lo);
                for _ in 0..60 {
                    let m = 0.5 * (lo + hi);
                    if sgn(m) == s {
                        lo = m;
                    } else {
                        hi = m;
                    }
                }
                cuts.push(0.5 * (lo + hi));
            }
            prev = x;
        }
    }
    if a < 0.0 && b > 0.0 {
        cuts.push(0.0);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
    let mut out: Vec<(f64, f64)> = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let positive = match &normal {
            Some(n) => {
                let p = &n.rational.num * &n.rational.den;
                let s = sign_on_interval(&p, &bound(lo), &bound(hi));
                s.is_nonnegative() && s != crate::symbolic::SignSummary::IdenticallyZero
            }
            None => rad.eval(0.5 * (lo + hi)) > 0.0,
        };
        if positive {
            match out.last_mut() {
                // Merge across an isolated zero of the radicand.
                Some(last) if last.1 == lo && rad.eval(lo).is_finite() => last.1 = hi,
                _ => out.push((lo, hi)),
            }
        }
    }
    out
}

fn bound(x: f64) -> Bound {
    Bound::At(BigRational::from_float(x).expect("finite"))
}

fn sample_branch(
    spec: &EquationSpec,
    sign: BranchSign,
    lo: f64,
    hi: f64,
    scale: f64,
) -> Vec<(f64, f64)> {
    const BASE: usize = 200;
    const MAX_DEPTH: u32 = 10;
    let f = |x: f64| branch_value(spec, sign, x);
    let mut xs: Vec<f64> = (0..=BASE)
        .map(|i| lo + (hi - lo) * i as f64 / BASE as f64)
        .collect();
    // Geometric approach to each end, so vertical asymptotes are resolved.
    for k in 1..=40 {
        let h = (hi - lo) / BASE as f64 * 0.5f64.powi(k);
        xs.push(lo + h);
        xs.push(hi - h);
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut pts: Vec<(f64, f64)> = xs
        .into_iter()
        .filter_map(|x| f(x).filter(|y| y.abs() <= 1e6 * scale).map(|y| (x, y)))
        .collect();
    // Bisect where the polyline deviates from the curve.
    for _ in 0..MAX_DEPTH {
        let mut next = Vec::with_capacity(pts.len() * 2);
        let mut changed = false;
        for w in pts.windows(2) {
            next.push(w[0]);
            let m = 0.5 * (w[0].0 + w[1].0);
            if let Some(ym) = f(m) {
                let chord = 0.5 * (w[0].1 + w[1].1);
                let tol = 1e-3 * scale.max(ym.abs());
                if (ym - chord).abs() > tol && m > w[0].0 && m < w[1].0 {
                    next.push((m, ym));
                    changed = true;
                }
            }
        }
        next.push(*pts.last().unwrap());
        pts = next;
        if !changed {
            break;
        }
    }
    pts
}

/// Zero-isocline branches over `[a, b]`.
pub fn isoclines(spec: &EquationSpec, a: f64, b: f64) -> Result<Isoclines, IsoclineError> {
    if spec.n() != 2 {
        return Err(IsoclineError::WrongOrder(spec.n()));
    }
    if spec.coefficient(2).is_identically_zero() {
        return Err(IsoclineError::NoQuadraticTerm);
    }
    if !(a < b) {
        return Err(IsoclineError::EmptyRange);
    }
    let rad = radicand(spec);
    let scale = (b - a).max(1.0);
    let mut branches = Vec::new();
    for (lo, hi) in admissible_intervals(&rad, a, b) {
        for sign in [BranchSign::Plus, BranchSign::Minus] {
            let samples = sample_branch(spec, sign, lo, hi, scale);
            if samples.len() >= 2 {
                branches.push(IsoclineBranch {
                    sign,
                    domain: (lo, hi),
                    samples,
                });
            }
        }
    }
    let plus_left = branches
        .iter()
        .enumerate()
        .filter(|(_, br)| br.sign == BranchSign::Plus)
        .min_by(|x, y| x.1.domain.0.total_cmp(&y.1.domain.0))
        .map(|(i, _)| i);
    Ok(Isoclines {
        branches,
        plus_left,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_f2_gives_right_half() {
        let s = EquationSpec::from_strs(&["x", "0", "-1"]).unwrap();
        let iso = isoclines(&s, -3.0, 3.0).unwrap();
        assert_eq!(iso.branches.len(), 2);
        for br in &iso.branches {
            assert!(br.domain.0 >= 0.0);
            for &(x, y) in &br.samples {
                assert!((y - br.sign.factor() * x.sqrt()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn positive_f2_gives_left_half() {
        let s = EquationSpec::from_strs(&["x", "0", "1"]).unwrap();
        let iso = isoclines(&s, -3.0, 3.0).unwrap();
        assert!(iso.branches.iter().all(|b| b.domain.1 <= 0.0));
        assert!(iso.plus_left.is_some());
    }

    #[test]
    fn rejects_wrong_order() {
        let s = EquationSpec::from_strs(&["x", "1"]).unwrap();
        assert_eq!(
            isoclines(&s, -1.0, 1.0).unwrap_err(),
            IsoclineError::WrongOrder(1)
        );
    }
}

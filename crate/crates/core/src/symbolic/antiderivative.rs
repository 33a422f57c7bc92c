use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use super::expr::Expression;
use super::poly::Polynomial;
use super::quad::{integrate, QuadError};

/// Width of the cached cumulative panels.
const PANEL: f64 = 0.5;
/// Beyond this many panels the cumulative cache is bypassed.
const MAX_CACHED_PANELS: i64 = 20_000;

pub type Integrand = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Primitive `F(x) = ∫_0^x f`.
#[derive(Clone)]
pub enum Antiderivative {
    Exact(Polynomial),
    Numeric(Arc<NumericPrimitive>),
}

impl fmt::Debug for Antiderivative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exact(p) => write!(f, "Exact({p})"),
            Self::Numeric(_) => write!(f, "Numeric"),
        }
    }
}

pub struct NumericPrimitive {
    f: Integrand,
    tol: f64,
    /// Cumulative integral from 0 to `k * PANEL`, keyed by `k`.
    cache: RwLock<HashMap<i64, f64>>,
}

impl Antiderivative {
    /// Symbolic when `e` is a polynomial, otherwise quadrature-backed.
    pub fn of(e: &Expression) -> Self {
        match e.to_polynomial() {
            Some(p) => Self::Exact(p.integral()),
            None => {
                let e = e.clone();
                Self::numeric(Arc::new(move |x| e.eval(x)), 1e-13)
            }
        }
    }

    /// Quadrature primitive of an arbitrary integrand; `tol` is the absolute
    /// tolerance per cached panel.
    pub fn numeric(f: Integrand, tol: f64) -> Self {
        Self::Numeric(Arc::new(NumericPrimitive {
            f,
            tol,
            cache: RwLock::new(HashMap::from([(0, 0.0)])),
        }))
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        match self {
            Self::Exact(p) => Some(p),
            Self::Numeric(_) => None,
        }
    }

    pub fn try_eval(&self, x: f64) -> Result<f64, QuadError> {
        match self {
            Self::Exact(p) => Ok(p.eval(x)),
            Self::Numeric(n) => n.eval(x),
        }
    }

    /// As [`try_eval`](Self::try_eval) with failures mapped to NaN.
    pub fn eval(&self, x: f64) -> f64 {
        self.try_eval(x).unwrap_or(f64::NAN)
    }
}

impl NumericPrimitive {
    fn piece(&self, a: f64, b: f64) -> Result<f64, QuadError> {
        integrate(|s| (self.f)(s), a, b, self.tol, 1e-14).map(|q| q.value)
    }

    fn cumulative(&self, k: i64) -> Result<f64, QuadError> {
        if let Some(&v) = self.cache.read().unwrap().get(&k) {
            return Ok(v);
        }
        let step = k.signum();
        // Walk inward to the nearest cached node, then fill outward.
        let mut j = k;
        let mut base = loop {
            j -= step;
            if let Some(&v) = self.cache.read().unwrap().get(&j) {
                break v;
            }
        };
        let mut fresh = Vec::new();
        while j != k {
            let next = j + step;
            base += self.piece(j as f64 * PANEL, next as f64 * PANEL)?;
            fresh.push((next, base));
            j = next;
        }
        let mut w = self.cache.write().unwrap();
        for (i, v) in fresh {
            w.entry(i).or_insert(v);
        }
        Ok(base)
    }

    fn eval(&self, x: f64) -> Result<f64, QuadError> {
        if !x.is_finite() {
            return Err(QuadError::NonFinite(x));
        }
        let k = (x / PANEL).trunc() as i64;
        if k.abs() > MAX_CACHED_PANELS {
            return self.piece(0.0, x);
        }
        let base = self.cumulative(k)?;
        Ok(base + self.piece(k as f64 * PANEL, x)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse::parse;
    use crate::symbolic::poly::{rat, ratio};

    #[test]
    fn polynomial_primitive_is_exact() {
        let f = Antiderivative::of(&parse("x^2 - 1").unwrap());
        assert_eq!(
            f.as_polynomial().unwrap(),
            &Polynomial::new(vec![rat(0), rat(-1), rat(0), ratio(1, 3)])
        );
    }

    #[test]
    fn zero_primitive() {
        let f = Antiderivative::of(&parse("0").unwrap());
        assert_eq!(f.eval(3.7), 0.0);
    }

    #[test]
    fn gaussian_primitive_against_erf() {
        let f = Antiderivative::of(&parse("(x^2-1)*exp(-x^2)").unwrap());
        // ∫_0^x (s^2-1)e^{-s^2} ds = -x e^{-x^2}/2 - (√π/4) erf(x)
        for x in [1.0f64, -2.3, 0.2, 7.9, -0.74] {
            let want = -x * (-x * x).exp() / 2.0
                - std::f64::consts::PI.sqrt() / 4.0 * statrs::function::erf::erf(x);
            assert!((f.eval(x) - want).abs() < 1e-10, "x={x}");
        }
        assert!((f.eval(1.0) + 0.5573).abs() < 1e-4);
    }

    #[test]
    fn cache_is_order_independent() {
        let e = parse("exp(-x^2)*x^3").unwrap();
        let a = Antiderivative::of(&e);
        let b = Antiderivative::of(&e);
        let xs = [4.2, -3.1, 0.7, 2.25, -0.5];
        let va: Vec<f64> = xs.iter().map(|&x| a.eval(x)).collect();
        let vb: Vec<f64> = xs.iter().rev().map(|&x| b.eval(x)).collect();
        for (i, v) in va.iter().enumerate() {
            assert!((v - vb[xs.len() - 1 - i]).abs() < 1e-13);
        }
    }
}

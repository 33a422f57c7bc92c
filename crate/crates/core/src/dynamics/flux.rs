use std::f64::consts::PI;

use serde::Serialize;

use super::DynamicsError;
use crate::symbolic::{Antiderivative, Expression, Polynomial};
use crate::system::EquationSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FluxSign {
    /// Nonnegative everywhere and positive somewhere.
    Positive,
    Negative,
    Zero,
    Mixed,
}

#[derive(Debug, Clone, Serialize)]
pub struct FluxSummary {
    pub min: f64,
    pub max: f64,
    pub sign: FluxSign,
    /// `(x, y, flux)`.
    pub samples: Vec<(f64, f64, f64)>,
}

impl FluxSummary {
    fn from_samples(samples: Vec<(f64, f64, f64)>) -> Self {
        let min = samples.iter().map(|s| s.2).fold(f64::INFINITY, f64::min);
        let max = samples
            .iter()
            .map(|s| s.2)
            .fold(f64::NEG_INFINITY, f64::max);
        let sign = if min == 0.0 && max == 0.0 {
            FluxSign::Zero
        } else if min >= 0.0 {
            FluxSign::Positive
        } else if max <= 0.0 {
            FluxSign::Negative
        } else {
            FluxSign::Mixed
        };
        Self {
            min,
            max,
            sign,
            samples,
        }
    }
}

fn angles(samples: usize) -> impl Iterator<Item = (f64, f64)> {
    // Offset by half a step so no sample sits on an axis.
    (0..samples).map(move |k| (2.0 * PI * (k as f64 + 0.5) / samples as f64).sin_cos())
}

/// Point of `{y²/2 + G(x) = r²}` on the ray with direction `(c, s)`.
fn oval_point(g_prim: &Antiderivative, r: f64, s: f64, c: f64) -> Option<(f64, f64)> {
    let level = r * r;
    let h = |rho: f64| 0.5 * (rho * s).powi(2) + g_prim.eval(rho * c);
    let mut hi = if s.abs() > 1e-12 {
        2f64.sqrt() * r / s.abs()
    } else {
        r.max(1.0)
    };
    while !(h(hi) >= level) {
        hi *= 2.0;
        if hi > 1e8 || h(hi).is_nan() {
            return None;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        if h(m) < level {
            lo = m;
        } else {
            hi = m;
        }
    }
    let rho = 0.5 * (lo + hi);
    Some((rho * c, rho * s))
}

/// Flux `−g F_1 − y f_2 (y − F_1)²` of the Theorem-2 coordinate field
/// `(x, y = v + F_1)` through the oval `{y²/2 + G(x) = r²}`.
pub fn oval_flux(
    spec: &EquationSpec,
    r: f64,
    samples: usize,
) -> Result<FluxSummary, DynamicsError> {
    if spec.n() > 2 {
        return Err(DynamicsError::Structure(format!(
            "oval flux needs n <= 2, got n = {}",
            spec.n()
        )));
    }
    if !(r > 0.0) {
        return Err(DynamicsError::Radius(r));
    }
    let (g, f2) = (spec.g(), spec.coefficient(2));
    let (f1p, gp) = (spec.f1_primitive(), spec.g_primitive());
    let mut out = Vec::with_capacity(samples);
    for (s, c) in angles(samples) {
        let (x, y) = oval_point(gp, r, s, c).ok_or(DynamicsError::OpenOval(r))?;
        let big_f = f1p.eval(x);
        let flux = -g.eval(x) * big_f - y * f2.eval(x) * (y - big_f).powi(2);
        out.push((x, y, flux));
    }
    Ok(FluxSummary::from_samples(out))
}

/// `g(x) = x`, no even `f_l` with `l ≥ 2`, and some odd `f_l` nonzero.
pub(crate) fn massera_structure(spec: &EquationSpec) -> Result<(), String> {
    if spec.g().to_polynomial() != Some(Polynomial::x()) {
        return Err("g(x) is not exactly x".into());
    }
    for l in (2..=spec.n()).step_by(2) {
        if !spec.coefficient(l).is_identically_zero() {
            return Err(format!("even coefficient f_{l} is present"));
        }
    }
    if !(1..=spec.n())
        .step_by(2)
        .any(|l| !spec.coefficient(l).is_identically_zero())
    {
        return Err("no odd coefficient is present".into());
    }
    Ok(())
}

/// `α_r = −2y²(f_1 + Σ f_{2l+1} y^{2l})` on the circle of radius `r`.
pub fn massera_circle_flux(
    spec: &EquationSpec,
    r: f64,
    samples: usize,
) -> Result<FluxSummary, DynamicsError> {
    massera_structure(spec).map_err(DynamicsError::Structure)?;
    if !(r > 0.0) {
        return Err(DynamicsError::Radius(r));
    }
    let odd: Vec<Expression> = (1..=spec.n())
        .step_by(2)
        .map(|l| spec.coefficient(l))
        .collect();
    let out = angles(samples)
        .map(|(s, c)| {
            let (x, y) = (r * c, r * s);
            let y2 = y * y;
            let inner = odd.iter().rev().fold(0.0, |acc, f| acc * y2 + f.eval(x));
            (x, y, -2.0 * y2 * inner)
        })
        .collect();
    Ok(FluxSummary::from_samples(out))
}

/// `x ↦ −x F_1(x)`, the flux of the Liénard field through circles.
pub fn lienard_circle_flux(f1: &Expression) -> impl Fn(f64) -> f64 + Send + Sync {
    let prim = Antiderivative::of(f1);
    move |x| -x * prim.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig4() -> EquationSpec {
        EquationSpec::from_strs(&["x", "(x^2 - 1)*exp(-x^2)", "0", "x^2/(50*(x^2 + 1))"]).unwrap()
    }

    #[test]
    fn oval_flux_vanishes_without_damping() {
        let s = EquationSpec::from_strs(&["x"]).unwrap();
        let f = oval_flux(&s, 0.7, 200).unwrap();
        assert_eq!(f.sign, FluxSign::Zero);
        for &(x, y, _) in &f.samples {
            assert!((0.5 * y * y + 0.5 * x * x - 0.49).abs() < 1e-12);
        }
    }

    #[test]
    fn small_oval_repels() {
        // f_2 = O(x³) keeps the f_2 term below -g F_1 near the origin.
        let s = EquationSpec::from_strs(&["x", "x^2 - 1", "-x^3/(1 + x^4)"]).unwrap();
        let f = oval_flux(&s, 0.05, 1000).unwrap();
        assert!(f.min > 0.0, "{}", f.min);
        let big = oval_flux(&s, 3.0, 1000).unwrap();
        assert_eq!(big.sign, FluxSign::Mixed);
    }

    #[test]
    fn massera_circles() {
        let s = fig4();
        assert_eq!(
            massera_circle_flux(&s, 0.1, 720).unwrap().sign,
            FluxSign::Positive
        );
        // f_3(0) = 0, so near the y-axis f_1 ≈ -1 wins even at r = 10.
        let far = massera_circle_flux(&s, 10.0, 720).unwrap();
        assert_eq!(far.sign, FluxSign::Mixed);
        for &(x, _, a) in &far.samples {
            if x.abs() > 1.0 {
                assert!(a < 0.0);
            }
        }
        let lin = EquationSpec::from_strs(&["x", "x^2 - 1", "x"]).unwrap();
        assert!(massera_circle_flux(&lin, 1.0, 8).is_err());
    }

    #[test]
    fn lienard_flux_values() {
        let f = lienard_circle_flux(&crate::symbolic::parse("x").unwrap());
        assert_eq!(f(2.0), -4.0);
        let z = lienard_circle_flux(&Expression::zero());
        assert_eq!(z(3.0), 0.0);
        let m = lienard_circle_flux(&crate::symbolic::parse("(x^2 - 1)*exp(-x^2)").unwrap());
        assert!((m(1.0) - 0.55735).abs() < 1e-4);
    }
}

use serde::Serialize;

use super::{integrate, DynamicsError, Options, Section, Termination};
use crate::system::EquationSpec;

/// First return to the positive y-axis after one clockwise revolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Return {
    pub y0: f64,
    pub y1: f64,
    pub period: f64,
    /// `∮ div dt` along the arc.
    pub log_multiplier: f64,
}

fn return_options(base: &Options) -> Options {
    Options {
        section: Some(Section::PositiveYAxis),
        stop_at: 1,
        record: false,
        dense: false,
        ..base.clone()
    }
}

pub fn return_map(spec: &EquationSpec, y0: f64, opts: &Options) -> Result<Return, DynamicsError> {
    if !(y0 > 0.0) || !y0.is_finite() {
        return Err(DynamicsError::Start(y0));
    }
    let tr = integrate(spec, (0.0, y0), &return_options(opts))?;
    match tr.termination {
        Termination::SectionHit { t, y, .. } => Ok(Return {
            y0,
            y1: y,
            period: t,
            log_multiplier: tr.end().z,
        }),
        termination => Err(DynamicsError::NoReturn { y0, termination }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Attracting,
    Repelling,
    Nonhyperbolic,
}

impl Stability {
    pub fn classify(multiplier: f64, eps: f64) -> Self {
        if multiplier < 1.0 - eps {
            Stability::Attracting
        } else if multiplier > 1.0 + eps {
            Stability::Repelling
        } else {
            Stability::Nonhyperbolic
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleEstimate {
    pub y_star: f64,
    pub period: f64,
    pub closure_error: f64,
    pub multiplier: f64,
    pub stability: Stability,
}

#[derive(Debug, Clone)]
pub struct CycleOptions {
    pub integrator: Options,
    /// Bisection stops at this bracket width.
    pub bisect_width: f64,
    /// Secant stops when the update is below this.
    pub tol: f64,
    pub closure_tol: f64,
    pub eps_multiplier: f64,
}

impl Default for CycleOptions {
    fn default() -> Self {
        Self {
            integrator: Options::with_tol(1e-12),
            bisect_width: 1e-6,
            tol: 1e-10,
            closure_tol: 1e-8,
            eps_multiplier: 1e-3,
        }
    }
}

/// Fixed point of the return map in `bracket`.
pub fn find_cycle(
    spec: &EquationSpec,
    bracket: (f64, f64),
    opts: &CycleOptions,
) -> Result<CycleEstimate, DynamicsError> {
    let (mut a, mut b) = if bracket.0 <= bracket.1 {
        bracket
    } else {
        (bracket.1, bracket.0)
    };
    let d = |y: f64| return_map(spec, y, &opts.integrator).map(|r| r.y1 - y);
    let mut fa = d(a)?;
    let mut fb = d(b)?;
    if fa == 0.0 {
        b = a;
    } else if fb == 0.0 {
        a = b;
    } else if (fa < 0.0) == (fb < 0.0) {
        return Err(DynamicsError::Bracket {
            lo: a,
            hi: b,
            r_lo: fa,
            r_hi: fb,
        });
    }
    while b - a > opts.bisect_width {
        let m = 0.5 * (a + b);
        let fm = d(m)?;
        if fm == 0.0 {
            a = m;
            b = m;
            break;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    // Safeguarded secant (Illinois) inside the final bracket.
    let mut y = 0.5 * (a + b);
    let mut side = 0;
    for _ in 0..100 {
        if b - a <= opts.tol || fa == fb {
            break;
        }
        let mut c = b - fb * (b - a) / (fb - fa);
        if !(c > a && c < b) {
            c = 0.5 * (a + b);
        }
        let step = (c - y).abs();
        y = c;
        let fc = d(c)?;
        if fc == 0.0 || step < opts.tol {
            break;
        }
        if (fc < 0.0) == (fa < 0.0) {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    let r = return_map(spec, y, &opts.integrator)?;
    let closure_error = (r.y1 - y).abs();
    if closure_error > opts.closure_tol {
        return Err(DynamicsError::Closure(closure_error));
    }
    let multiplier = r.log_multiplier.exp();
    Ok(CycleEstimate {
        y_star: y,
        period: r.period,
        closure_error,
        multiplier,
        stability: Stability::classify(multiplier, opts.eps_multiplier),
    })
}

/// `samples` points of the cycle through `(0, y*)`, equally spaced in time.
pub fn cycle_orbit(
    spec: &EquationSpec,
    cycle: &CycleEstimate,
    samples: usize,
    opts: &Options,
) -> Result<Vec<(f64, f64)>, DynamicsError> {
    let o = Options {
        dense: true,
        ..return_options(opts)
    };
    let tr = integrate(spec, (0.0, cycle.y_star), &o)?;
    let period = match tr.termination {
        Termination::SectionHit { t, .. } => t,
        termination => {
            return Err(DynamicsError::NoReturn {
                y0: cycle.y_star,
                termination,
            })
        }
    };
    let n = samples.max(1);
    Ok((0..n)
        .map(|k| {
            let s = tr
                .eval_at(period * k as f64 / n as f64)
                .expect("time inside the recorded arc");
            (s[0], s[1])
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_return_is_identity() {
        let s = EquationSpec::from_strs(&["x"]).unwrap();
        for &y0 in &[0.1, 1.0, 4.0] {
            let r = return_map(&s, y0, &Options::with_tol(1e-11)).unwrap();
            assert!((r.y1 - y0).abs() < 1e-9 * y0.max(1.0));
            assert!((r.period - 2.0 * std::f64::consts::PI).abs() < 1e-8);
            assert_eq!(r.log_multiplier, 0.0);
        }
        assert!(matches!(
            return_map(&s, 0.0, &Options::default()),
            Err(DynamicsError::Start(_))
        ));
    }

    #[test]
    fn harmonic_bracket_is_rejected() {
        let s = EquationSpec::from_strs(&["x"]).unwrap();
        let e = find_cycle(&s, (1.0, 2.0), &CycleOptions::default()).unwrap_err();
        assert!(matches!(e, DynamicsError::Bracket { .. }), "{e}");
    }

    #[test]
    fn van_der_pol_amplitude() {
        let s = EquationSpec::from_strs(&["x", "(x^2 - 1)/10"]).unwrap();
        let c = find_cycle(&s, (0.5, 4.0), &CycleOptions::default()).unwrap();
        assert_eq!(c.stability, Stability::Attracting);
        assert!(c.closure_error < 1e-8);
        let orbit = cycle_orbit(&s, &c, 4096, &Options::with_tol(1e-12)).unwrap();
        let amp = orbit.iter().fold(0.0f64, |m, p| m.max(p.0.abs()));
        // Averaging gives amplitude 2 as the damping goes to zero.
        assert!((amp - 2.0).abs() < 0.04, "{amp}");
    }

    #[test]
    fn stability_bands() {
        assert_eq!(Stability::classify(0.5, 1e-3), Stability::Attracting);
        assert_eq!(Stability::classify(1.0005, 1e-3), Stability::Nonhyperbolic);
        assert_eq!(Stability::classify(1.01, 1e-3), Stability::Repelling);
    }
}

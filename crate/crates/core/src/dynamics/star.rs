use std::f64::consts::PI;

use serde::Serialize;

use super::{cycle_orbit, CycleEstimate, DynamicsError, Options};
use crate::system::EquationSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StarShape {
    pub star: bool,
    /// Consecutive polar angles where the winding stalls or reverses.
    pub witness: Option<(f64, f64)>,
}

/// Whether the closed polyline (last point joined to the first) has a
/// strictly monotone polar angle winding once around the origin.
pub fn star_shaped(points: &[(f64, f64)]) -> Result<StarShape, DynamicsError> {
    let rmin = points
        .iter()
        .map(|p| p.0.hypot(p.1))
        .fold(f64::INFINITY, f64::min);
    if points.len() < 3 || !(rmin >= 1e-8) {
        return Err(DynamicsError::Degenerate(if points.len() < 3 {
            0.0
        } else {
            rmin
        }));
    }
    let angle = |p: &(f64, f64)| p.1.atan2(p.0);
    let mut total = 0.0;
    let mut sign = 0.0;
    for k in 0..points.len() {
        let (p, q) = (&points[k], &points[(k + 1) % points.len()]);
        let mut d = angle(q) - angle(p);
        if d > PI {
            d -= 2.0 * PI;
        } else if d <= -PI {
            d += 2.0 * PI;
        }
        if sign == 0.0 {
            sign = d.signum();
        }
        if d == 0.0 || d.signum() != sign {
            return Ok(StarShape {
                star: false,
                witness: Some((angle(p), angle(q))),
            });
        }
        total += d;
    }
    let once = ((total.abs() / (2.0 * PI)) - 1.0).abs() < 1e-6;
    Ok(StarShape {
        star: once,
        witness: None,
    })
}

/// Resample a located cycle at `samples` points and test it.
pub fn star_shaped_cycle(
    spec: &EquationSpec,
    cycle: &CycleEstimate,
    samples: usize,
    opts: &Options,
) -> Result<StarShape, DynamicsError> {
    star_shaped(&cycle_orbit(spec, cycle, samples, opts)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_is_star() {
        let pts: Vec<_> = (0..64)
            .map(|k| {
                let t = -2.0 * PI * k as f64 / 64.0;
                (2.0 * t.cos(), 2.0 * t.sin())
            })
            .collect();
        assert_eq!(
            star_shaped(&pts).unwrap(),
            StarShape {
                star: true,
                witness: None
            }
        );
    }

    #[test]
    fn folded_polyline_has_witness() {
        // The angle backs up between the second and third points.
        let pts = [
            (1.0, 0.0),
            (0.0, 1.0),
            (0.5, 0.6),
            (-1.0, 0.2),
            (-1.0, -1.0),
            (1.0, -1.0),
        ];
        let s = star_shaped(&pts).unwrap();
        assert!(!s.star);
        let (a, b) = s.witness.unwrap();
        assert!(b < a);
    }

    #[test]
    fn tiny_cycle_is_degenerate() {
        let pts = [(1e-9, 0.0), (0.0, 1e-9), (-1e-9, 0.0)];
        assert!(matches!(
            star_shaped(&pts),
            Err(DynamicsError::Degenerate(_))
        ));
    }
}

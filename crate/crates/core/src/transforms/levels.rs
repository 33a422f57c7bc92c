//! Energy levels `{H = λ}` of the unperturbed Liénard system, pulled back
//! to the phase plane.

use std::f64::consts::PI;

use serde::Serialize;

use super::{LienardImage, TransformError};

/// Default `|x|` bound of the Liénard window.
pub const DEFAULT_LEVEL_WINDOW: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LevelError {
    #[error("level {0} lies below the minimum of H")]
    BelowMinimum(f64),
    #[error("resolution must be at least 8")]
    Resolution,
    #[error(transparent)]
    Transform(#[from] TransformError),
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelCurve {
    pub lambda: f64,
    /// `true` when the level is compact inside the window; open levels are
    /// cut at the window edge and may consist of several pieces.
    pub closed: bool,
    /// Polylines in the phase plane `(u, v)`.
    pub pieces: Vec<Vec<(f64, f64)>>,
}

impl LevelCurve {
    pub fn tag(&self) -> &'static str {
        if self.closed {
            "closed"
        } else {
            "open"
        }
    }
}

/// Radius along the ray at angle `theta` where `H = lambda`, if it lies
/// within `|x| <= window`. `H` is increasing along rays under hypothesis B.
fn ray_root(
    img: &LienardImage,
    lambda: f64,
    theta: f64,
    window: f64,
) -> Result<Option<(f64, f64)>, TransformError> {
    let (s, c) = theta.sin_cos();
    let mut rmax = f64::INFINITY;
    if c.abs() > 1e-15 {
        rmax = window / c.abs();
    }
    if s.abs() > 1e-15 {
        rmax = rmax.min((2.0 * lambda).sqrt() / s.abs() * (1.0 + 1e-12));
    }
    let h = |r: f64| img.hamiltonian(r * c, r * s);
    if h(rmax)? < lambda {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0, rmax);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        if h(m)? < lambda {
            lo = m;
        } else {
            hi = m;
        }
    }
    let r = 0.5 * (lo + hi);
    Ok(Some((r * c, r * s)))
}

/// Pull `{H = λ}` back through the inverse transform, sampling the level by
/// angle in the Liénard plane at `resolution` rays.
pub fn level_pullback(
    img: &LienardImage,
    lambda: f64,
    resolution: usize,
    window: f64,
) -> Result<LevelCurve, LevelError> {
    if lambda < 0.0 {
        return Err(LevelError::BelowMinimum(lambda));
    }
    if resolution < 8 {
        return Err(LevelError::Resolution);
    }
    if lambda == 0.0 {
        return Ok(LevelCurve {
            lambda,
            closed: true,
            pieces: vec![vec![(0.0, 0.0)]],
        });
    }
    let mut hits = Vec::with_capacity(resolution);
    for k in 0..resolution {
        let theta = 2.0 * PI * k as f64 / resolution as f64;
        hits.push(ray_root(img, lambda, theta, window)?);
    }
    let to_phase = |p: (f64, f64)| img.inverse(p.0, p.1);
    if hits.iter().all(Option::is_some) {
        let mut pts = hits
            .into_iter()
            .map(|p| to_phase(p.unwrap()))
            .collect::<Result<Vec<_>, _>>()?;
        pts.push(pts[0]);
        return Ok(LevelCurve {
            lambda,
            closed: true,
            pieces: vec![pts],
        });
    }
    // Start right after a gap so every piece is contiguous in angle.
    let start = (0..resolution)
        .find(|&k| hits[k].is_none() && hits[(k + 1) % resolution].is_some())
        .map(|k| (k + 1) % resolution);
    let mut pieces = Vec::new();
    if let Some(start) = start {
        let mut cur: Vec<(f64, f64)> = Vec::new();
        for i in 0..resolution {
            let k = (start + i) % resolution;
            match hits[k] {
                Some(p) => {
                    if cur.is_empty() {
                        if let Some(e) = edge_point(img, lambda, window, p)? {
                            cur.push(to_phase(e)?);
                        }
                    }
                    cur.push(to_phase(p)?);
                }
                None if !cur.is_empty() => {
                    let last = hits[(k + resolution - 1) % resolution].unwrap();
                    if let Some(e) = edge_point(img, lambda, window, last)? {
                        cur.push(to_phase(e)?);
                    }
                    pieces.push(std::mem::take(&mut cur));
                }
                None => {}
            }
        }
        if !cur.is_empty() {
            pieces.push(cur);
        }
    }
    Ok(LevelCurve {
        lambda,
        closed: false,
        pieces,
    })
}

/// Point of the level on the window edge `x = ±window`, on the side of `p`.
fn edge_point(
    img: &LienardImage,
    lambda: f64,
    window: f64,
    p: (f64, f64),
) -> Result<Option<(f64, f64)>, TransformError> {
    let x = window.copysign(p.0);
    let r = 2.0 * (lambda - img.big_g_tilde(x)?);
    if r < 0.0 {
        return Ok(None);
    }
    Ok(Some((x, r.sqrt().copysign(p.1))))
}

/// Distance from the origin to the unique crossing of a closed polyline
/// with the ray at angle `phi`; `None` unless exactly one crossing exists.
pub fn ray_radius(poly: &[(f64, f64)], phi: f64) -> Option<f64> {
    let (s, c) = phi.sin_cos();
    let mut found = None;
    for w in poly.windows(2) {
        let (a, b) = (w[0], w[1]);
        // Solve a + t (b - a) = r (c, s) with t in [0, 1), r > 0.
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let det = dx * s - dy * c;
        if det.abs() < 1e-300 {
            continue;
        }
        let t = (a.1 * c - a.0 * s) / det;
        let r = (a.1 * dx - a.0 * dy) / det;
        if (0.0..1.0).contains(&t) && r > 0.0 {
            if found.is_some() {
                return None;
            }
            found = Some(r);
        }
    }
    found
}

/// Whether consecutive closed curves are strictly nested, comparing radii on
/// `rays` equally spaced rays. `None` when some ray meets a curve twice.
pub fn nested_on_rays(curves: &[&[(f64, f64)]], rays: usize) -> Option<bool> {
    for k in 0..rays {
        let phi = 2.0 * PI * (k as f64 + 0.5) / rays as f64;
        let mut prev = 0.0;
        for c in curves {
            let r = ray_radius(c, phi)?;
            if r <= prev {
                return Some(false);
            }
            prev = r;
        }
    }
    Some(true)
}

/// Winding number of a closed polyline about the origin.
pub fn winding_number(poly: &[(f64, f64)]) -> i64 {
    let mut total = 0.0;
    for w in poly.windows(2) {
        let a = w[0].1.atan2(w[0].0);
        let b = w[1].1.atan2(w[1].0);
        let mut d = b - a;
        if d > PI {
            d -= 2.0 * PI;
        } else if d < -PI {
            d += 2.0 * PI;
        }
        total += d;
    }
    (total / (2.0 * PI)).round() as i64
}

use rayon::prelude::*;
use serde::Serialize;

use super::{
    crossing_values, cycle_orbit, find_cycle, integrate, return_map, CycleOptions, DynamicsError,
    Options, Section,
};
use crate::system::{EquationSpec, Scalar, SpecDocument};

#[derive(Debug, Clone)]
pub struct HopfOptions {
    /// Name of the scanned parameter.
    pub parameter: String,
    /// Inner seed `(rho0, 0)`.
    pub rho0: f64,
    /// Largest seed of the return-map ladder on the positive y-axis.
    pub outer: f64,
    /// Ratio between consecutive ladder seeds.
    pub ladder_ratio: f64,
    /// Crossings recorded from the inner seed.
    pub crossings: usize,
    pub cycle: CycleOptions,
    pub orbit_samples: usize,
}

impl Default for HopfOptions {
    fn default() -> Self {
        Self {
            parameter: "b".into(),
            rho0: 0.05,
            outer: 3.0,
            ladder_ratio: 1.25,
            crossings: 10,
            cycle: CycleOptions::default(),
            orbit_samples: 2048,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HopfVerdict {
    NoCycle,
    Cycle,
    Failed,
}

#[derive(Debug, Clone, Serialize)]
pub struct HopfRow {
    pub value: f64,
    pub verdict: HopfVerdict,
    /// `max |x|` on the located cycle.
    pub amplitude: Option<f64>,
    pub y_star: Option<f64>,
    pub multiplier: Option<f64>,
    /// Positive y-axis crossings of the orbit from `(rho0, 0)`.
    pub inner_crossings: Vec<f64>,
    pub note: String,
}

impl HopfRow {
    fn failed(value: f64, note: String) -> Self {
        Self {
            value,
            verdict: HopfVerdict::Failed,
            amplitude: None,
            y_star: None,
            multiplier: None,
            inner_crossings: Vec::new(),
            note,
        }
    }
}

fn scan_one(spec: &EquationSpec, value: f64, opts: &HopfOptions) -> Result<HopfRow, DynamicsError> {
    let io = &opts.cycle.integrator;
    let inner = integrate(
        spec,
        (opts.rho0, 0.0),
        &Options {
            section: Some(Section::PositiveYAxis),
            stop_at: opts.crossings,
            record: false,
            ..io.clone()
        },
    )?;
    let inner_crossings = crossing_values(&inner);
    let mut row = HopfRow {
        value,
        verdict: HopfVerdict::NoCycle,
        amplitude: None,
        y_star: None,
        multiplier: None,
        inner_crossings,
        note: String::new(),
    };
    let Some(&start) = row.inner_crossings.first() else {
        row.note = format!("inner seed never crossed the y-axis: {}", inner.termination);
        return Ok(row);
    };

    // Walk outward until R(y) - y turns from positive to negative.
    let mut prev: Option<(f64, f64)> = None;
    let mut y = start;
    while y <= opts.outer {
        let d = match return_map(spec, y, io) {
            Ok(r) => r.y1 - y,
            Err(DynamicsError::NoReturn { termination, .. }) => {
                row.note = format!("no return from y = {y:.6}: {}", termination.tag());
                // The cycle may sit just below the escape boundary.
                let bracket = match prev {
                    Some((yp, dp)) if dp > 0.0 => below_escape(spec, yp, y, io)?.map(|h| (yp, h)),
                    _ => None,
                };
                return match bracket {
                    Some(b) => finish(spec, row, b, opts),
                    None => Ok(row),
                };
            }
            Err(e) => return Err(e),
        };
        if let Some((yp, dp)) = prev {
            if dp > 0.0 && d < 0.0 {
                return finish(spec, row, (yp, y), opts);
            }
        } else if d < 0.0 {
            row.note = format!("R(y) < y at the innermost crossing y = {y:.6}");
        }
        prev = Some((y, d));
        y *= opts.ladder_ratio;
    }
    if row.note.is_empty() {
        row.note = format!("no sign change of R(y) - y up to y = {}", opts.outer);
    }
    Ok(row)
}

fn finish(
    spec: &EquationSpec,
    mut row: HopfRow,
    bracket: (f64, f64),
    opts: &HopfOptions,
) -> Result<HopfRow, DynamicsError> {
    let c = find_cycle(spec, bracket, &opts.cycle)?;
    let orbit = cycle_orbit(spec, &c, opts.orbit_samples, &opts.cycle.integrator)?;
    row.verdict = HopfVerdict::Cycle;
    row.amplitude = Some(orbit.iter().fold(0.0f64, |m, p| m.max(p.0.abs())));
    row.y_star = Some(c.y_star);
    row.multiplier = Some(c.multiplier);
    row.note = format!(
        "attracting cycle bracketed in [{:.6}, {:.6}]",
        bracket.0, bracket.1
    );
    Ok(row)
}

/// Between `lo` (returns outward) and `hi` (escapes), look for a seed that
/// returns inward.
fn below_escape(
    spec: &EquationSpec,
    mut lo: f64,
    mut hi: f64,
    io: &Options,
) -> Result<Option<f64>, DynamicsError> {
    for _ in 0..60 {
        let m = 0.5 * (lo + hi);
        match return_map(spec, m, io) {
            Ok(r) if r.y1 < m => return Ok(Some(m)),
            Ok(_) => lo = m,
            Err(DynamicsError::NoReturn { .. }) => hi = m,
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

/// Scan the family over `values` of one parameter; failures stay in their row.
pub fn hopf_scan(family: &SpecDocument, values: &[f64], opts: &HopfOptions) -> Vec<HopfRow> {
    values
        .par_iter()
        .map(|&v| {
            let mut doc = family.clone();
            doc.parameters
                .insert(opts.parameter.clone(), Scalar::Float(v));
            let spec = match EquationSpec::from_document(&doc) {
                Ok(s) => s,
                Err(e) => return HopfRow::failed(v, e.to_string()),
            };
            scan_one(&spec, v, opts).unwrap_or_else(|e| HopfRow::failed(v, e.to_string()))
        })
        .collect()
}

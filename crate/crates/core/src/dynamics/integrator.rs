//! Dormand–Prince 5(4) with dense output, section events and blow-up
//! detection, for autonomous fields on `(x, y, z)`.

use serde::Serialize;

pub type State = [f64; 3];

const A21: f64 = 1.0 / 5.0;
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Half-axis used as a Poincaré section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Section {
    /// `x = 0, y > 0`, crossed with `x` going from negative to nonnegative.
    PositiveYAxis,
    /// `x = 0, y < 0`, crossed with `x` going from positive to nonpositive.
    NegativeYAxis,
}

impl Section {
    fn crossed(self, x0: f64, x1: f64) -> bool {
        match self {
            Section::PositiveYAxis => x0 < 0.0 && x1 >= 0.0,
            Section::NegativeYAxis => x0 > 0.0 && x1 <= 0.0,
        }
    }

    fn admits(self, y: f64) -> bool {
        match self {
            Section::PositiveYAxis => y > 0.0,
            Section::NegativeYAxis => y < 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Options {
    /// Relative and absolute tolerance.
    pub tol: f64,
    pub tmax: f64,
    pub blowup_radius: f64,
    /// The step collapses below `min_step * max(1, |t|)`.
    pub min_step: f64,
    pub max_step: f64,
    pub max_steps: usize,
    pub section: Option<Section>,
    /// Stop at this many section crossings; 0 records without stopping.
    pub stop_at: usize,
    pub record: bool,
    pub dense: bool,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            tmax: 200.0,
            blowup_radius: 1e6,
            min_step: 1e-13,
            max_step: f64::INFINITY,
            max_steps: 5_000_000,
            section: None,
            stop_at: 0,
            record: true,
            dense: false,
        }
    }
}

impl Options {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && !v.is_nan() {
                Ok(())
            } else {
                Err(format!("{name} must be positive, got {v}"))
            }
        };
        positive("tol", self.tol)?;
        positive("tmax", self.tmax)?;
        positive("blowup_radius", self.blowup_radius)?;
        positive("min_step", self.min_step)?;
        positive("max_step", self.max_step)?;
        if self.max_steps == 0 {
            return Err("max_steps must be positive".into());
        }
        if self.stop_at > 0 && self.section.is_none() {
            return Err("stop_at needs a section".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    /// Accumulated divergence `∫ div dt`.
    pub z: f64,
}

impl Sample {
    fn new(t: f64, s: &State) -> Self {
        Self {
            t,
            x: s[0],
            y: s[1],
            z: s[2],
        }
    }

    pub fn point(&self) -> (f64, f64) {
        (self.x, self.y)
    }

    pub fn radius(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Termination {
    TimeLimit {
        t: f64,
        x: f64,
        y: f64,
    },
    SectionHit {
        section: Section,
        t: f64,
        x: f64,
        y: f64,
    },
    BlowUp {
        t: f64,
        x: f64,
        y: f64,
    },
    StepCollapse {
        t: f64,
        x: f64,
        y: f64,
    },
    StepLimit {
        t: f64,
        x: f64,
        y: f64,
    },
}

impl Termination {
    pub fn tag(&self) -> &'static str {
        match self {
            Termination::TimeLimit { .. } => "time-limit",
            Termination::SectionHit { .. } => "section-hit",
            Termination::BlowUp { .. } => "blow-up",
            Termination::StepCollapse { .. } => "step-collapse",
            Termination::StepLimit { .. } => "step-limit",
        }
    }

    /// Blow-up in the broad sense: radius exceeded or the step collapsed.
    pub fn escaped(&self) -> bool {
        matches!(
            self,
            Termination::BlowUp { .. } | Termination::StepCollapse { .. }
        )
    }

    pub fn time(&self) -> f64 {
        match *self {
            Termination::TimeLimit { t, .. }
            | Termination::SectionHit { t, .. }
            | Termination::BlowUp { t, .. }
            | Termination::StepCollapse { t, .. }
            | Termination::StepLimit { t, .. } => t,
        }
    }
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (t, x, y) = match *self {
            Termination::TimeLimit { t, x, y }
            | Termination::SectionHit { t, x, y, .. }
            | Termination::BlowUp { t, x, y }
            | Termination::StepCollapse { t, x, y }
            | Termination::StepLimit { t, x, y } => (t, x, y),
        };
        write!(f, "{} at t = {t:e}, (x, y) = ({x:e}, {y:e})", self.tag())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone)]
struct Segment {
    t0: f64,
    h: f64,
    r: [State; 5],
}

impl Segment {
    fn eval(&self, t: f64) -> State {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let mut out = [0.0; 3];
        for i in 0..3 {
            let r = &self.r;
            out[i] = r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i])));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub crossings: Vec<Sample>,
    pub termination: Termination,
    pub stats: Stats,
    dense: Vec<Segment>,
}

impl Trajectory {
    pub fn end(&self) -> Sample {
        *self.samples.last().expect("trajectory has a start")
    }

    /// Dense-output state at time `t`, when dense output was recorded.
    pub fn eval_at(&self, t: f64) -> Option<State> {
        let first = self.dense.first()?;
        let last = self.dense.last()?;
        if t < first.t0 || t > last.t0 + last.h {
            return None;
        }
        let i = self.dense.partition_point(|s| s.t0 + s.h < t);
        Some(self.dense[i.min(self.dense.len() - 1)].eval(t))
    }

    pub fn max_abs_x(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, s| m.max(s.x.abs()))
    }
}

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for i in 0..3 {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

fn finite(s: &State) -> bool {
    s.iter().all(|v| v.is_finite())
}

struct Step {
    y1: State,
    k: [State; 7],
    err: State,
}

/// One Dormand–Prince step from `y0` with `k1 = f(y0)`; `None` if a stage is
/// not finite.
fn dopri_step<F: Fn(&State) -> State>(f: &F, y0: &State, k1: &State, h: f64) -> Option<Step> {
    let mut k = [[0.0; 3]; 7];
    k[0] = *k1;
    k[1] = f(&axpy(y0, h, &[(A21, &k[0])]));
    k[2] = f(&axpy(y0, h, &[(A3[0], &k[0]), (A3[1], &k[1])]));
    k[3] = f(&axpy(
        y0,
        h,
        &[(A4[0], &k[0]), (A4[1], &k[1]), (A4[2], &k[2])],
    ));
    k[4] = f(&axpy(
        y0,
        h,
        &[
            (A5[0], &k[0]),
            (A5[1], &k[1]),
            (A5[2], &k[2]),
            (A5[3], &k[3]),
        ],
    ));
    k[5] = f(&axpy(
        y0,
        h,
        &[
            (A6[0], &k[0]),
            (A6[1], &k[1]),
            (A6[2], &k[2]),
            (A6[3], &k[3]),
            (A6[4], &k[4]),
        ],
    ));
    let y1 = axpy(
        y0,
        h,
        &[
            (B[0], &k[0]),
            (B[2], &k[2]),
            (B[3], &k[3]),
            (B[4], &k[4]),
            (B[5], &k[5]),
        ],
    );
    k[6] = f(&y1);
    if !k.iter().all(finite) || !finite(&y1) {
        return None;
    }
    let mut err = [0.0; 3];
    for (i, e) in err.iter_mut().enumerate() {
        *e = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
    }
    Some(Step { y1, k, err })
}

fn dense_segment(t0: f64, h: f64, y0: &State, st: &Step) -> Segment {
    let mut r = [[0.0; 3]; 5];
    for i in 0..3 {
        let ydiff = st.y1[i] - y0[i];
        let bspl = h * st.k[0][i] - ydiff;
        r[0][i] = y0[i];
        r[1][i] = ydiff;
        r[2][i] = bspl;
        r[3][i] = ydiff - h * st.k[6][i] - bspl;
        r[4][i] = h * (0..7).map(|j| D[j] * st.k[j][i]).sum::<f64>();
    }
    Segment { t0, h, r }
}

/// Max norm, so the divergence integral cannot dilute the phase error.
fn error_norm(y0: &State, y1: &State, err: &State, tol: f64) -> f64 {
    (0..3)
        .map(|i| (err[i] / (tol + tol * y0[i].abs().max(y1[i].abs()))).abs())
        .fold(0.0, f64::max)
}

fn rms(v: &State, y: &State, tol: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..3 {
        acc += (v[i] / (tol + tol * y[i].abs())).powi(2);
    }
    (acc / 3.0).sqrt()
}

fn initial_step<F: Fn(&State) -> State>(f: &F, y0: &State, f0: &State, tol: f64) -> f64 {
    let d0 = rms(y0, y0, tol);
    let d1 = rms(f0, y0, tol);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let y1 = axpy(y0, h0, &[(1.0, f0)]);
    let f1 = f(&y1);
    let diff = [f1[0] - f0[0], f1[1] - f0[1], f1[2] - f0[2]];
    let d2 = rms(&diff, y0, tol) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    if h1.is_finite() {
        (100.0 * h0).min(h1)
    } else {
        h0
    }
}

/// Locate the section crossing inside an accepted step and land on `x = 0`
/// exactly with a Hénon step in `x`.
fn locate_crossing<F: Fn(&State) -> State>(
    f: &F,
    seg: &Segment,
    y0: &State,
    k1: &State,
) -> Option<(f64, State)> {
    let xs = |s: f64| seg.eval(seg.t0 + s * seg.h)[0];
    let (mut a, mut b) = (0.0, 1.0);
    let (mut fa, mut fb) = (xs(a), xs(b));
    if fb == 0.0 {
        a = 1.0;
    } else {
        // Illinois regula falsi.
        let mut side = 0;
        for _ in 0..200 {
            let c = (a * fb - b * fa) / (fb - fa);
            let fc = xs(c);
            if fc == 0.0 || (b - a).abs() < 1e-15 {
                a = c;
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
            if (b - a).abs() < 1e-15 {
                break;
            }
        }
    }
    let s = a.clamp(0.0, 1.0);
    // Re-step with the fifth-order formula instead of trusting the interpolant.
    let p = if s == 0.0 {
        *y0
    } else {
        dopri_step(f, y0, k1, s * seg.h)?.y1
    };
    let t = seg.t0 + s * seg.h;
    henon_to_axis(f, t, &p)
}

/// One RK4 step with `x` as the independent variable, from `p` to `x = 0`.
fn henon_to_axis<F: Fn(&State) -> State>(f: &F, t: f64, p: &State) -> Option<(f64, State)> {
    // w = (t, y, z), dw/dx = (1, f_y, f_z) / f_x
    let g = |x: f64, w: &[f64; 3]| -> Option<[f64; 3]> {
        let d = f(&[x, w[1], w[2]]);
        if d[0] == 0.0 || !finite(&d) {
            return None;
        }
        Some([1.0 / d[0], d[1] / d[0], d[2] / d[0]])
    };
    let x0 = p[0];
    let dx = -x0;
    let w0 = [t, p[1], p[2]];
    if dx == 0.0 {
        return Some((t, [0.0, p[1], p[2]]));
    }
    let add =
        |w: &[f64; 3], c: f64, k: &[f64; 3]| [w[0] + c * k[0], w[1] + c * k[1], w[2] + c * k[2]];
    let k1 = g(x0, &w0)?;
    let k2 = g(x0 + 0.5 * dx, &add(&w0, 0.5 * dx, &k1))?;
    let k3 = g(x0 + 0.5 * dx, &add(&w0, 0.5 * dx, &k2))?;
    let k4 = g(0.0, &add(&w0, dx, &k3))?;
    let mut w = w0;
    for i in 0..3 {
        w[i] += dx / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Some((w[0], [0.0, w[1], w[2]]))
}

/// Integrate `s' = f(s)` from `s0` at `t = 0`.
pub fn integrate_field<F: Fn(&State) -> State>(
    f: F,
    s0: State,
    opts: &Options,
) -> Result<Trajectory, String> {
    opts.validate()?;
    let mut traj = Trajectory {
        samples: vec![Sample::new(0.0, &s0)],
        crossings: Vec::new(),
        termination: Termination::TimeLimit {
            t: 0.0,
            x: s0[0],
            y: s0[1],
        },
        stats: Stats::default(),
        dense: Vec::new(),
    };
    let blow = |t: f64, s: &State| Termination::BlowUp {
        t,
        x: s[0],
        y: s[1],
    };

    let mut t = 0.0;
    let mut y = s0;
    let mut k1 = f(&y);
    traj.stats.evaluations += 1;
    if !finite(&y) || !finite(&k1) || y[0].hypot(y[1]) > opts.blowup_radius {
        traj.termination = blow(t, &y);
        return Ok(traj);
    }
    let mut h = initial_step(&f, &y, &k1, opts.tol).min(opts.max_step);
    traj.stats.evaluations += 1;
    let mut facold: f64 = 1e-4;
    let mut last_rejected = false;

    loop {
        if traj.stats.accepted + traj.stats.rejected >= opts.max_steps {
            traj.termination = Termination::StepLimit {
                t,
                x: y[0],
                y: y[1],
            };
            break;
        }
        let h_min = opts.min_step * t.abs().max(1.0);
        if h < h_min {
            traj.termination = Termination::StepCollapse {
                t,
                x: y[0],
                y: y[1],
            };
            break;
        }
        let hit_end = t + h >= opts.tmax;
        if hit_end {
            h = opts.tmax - t;
        }
        traj.stats.evaluations += 6;
        let Some(st) = dopri_step(&f, &y, &k1, h) else {
            // Non-finite stage: shrink hard and retry.
            traj.stats.rejected += 1;
            h *= 0.25;
            last_rejected = true;
            continue;
        };
        let err = error_norm(&y, &st.y1, &st.err, opts.tol);
        let fac11 = err.powf(0.17);
        if err <= 1.0 {
            let mut fac = fac11 / facold.powf(0.04);
            fac = (fac / 0.9).clamp(0.1, 5.0);
            let mut h_new = (h / fac).min(opts.max_step);
            facold = err.max(1e-4);
            traj.stats.accepted += 1;
            let seg = dense_segment(t, h, &y, &st);
            let t1 = if hit_end { opts.tmax } else { t + h };

            // Section event inside this step.
            if let Some(sec) = opts.section {
                if sec.crossed(y[0], st.y1[0]) {
                    if let Some((tc, sc)) = locate_crossing(&f, &seg, &y, &k1) {
                        if sec.admits(sc[1]) {
                            let sample = Sample::new(tc, &sc);
                            traj.crossings.push(sample);
                            if opts.stop_at > 0 && traj.crossings.len() >= opts.stop_at {
                                if opts.dense {
                                    traj.dense.push(seg);
                                }
                                traj.samples.push(sample);
                                traj.termination = Termination::SectionHit {
                                    section: sec,
                                    t: tc,
                                    x: sc[0],
                                    y: sc[1],
                                };
                                return Ok(traj);
                            }
                        }
                    }
                }
            }
            if opts.dense {
                traj.dense.push(seg);
            }
            t = t1;
            y = st.y1;
            k1 = st.k[6];
            if opts.record {
                traj.samples.push(Sample::new(t, &y));
            }
            if y[0].hypot(y[1]) > opts.blowup_radius {
                traj.termination = blow(t, &y);
                break;
            }
            if hit_end {
                traj.termination = Termination::TimeLimit {
                    t,
                    x: y[0],
                    y: y[1],
                };
                break;
            }
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
            h = h_new;
        } else {
            traj.stats.rejected += 1;
            h /= (fac11 / 0.9).min(10.0);
            last_rejected = true;
        }
    }
    if !opts.record {
        traj.samples.push(Sample::new(t, &y));
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn harmonic(s: &State) -> State {
        [s[1], -s[0], 0.0]
    }

    #[test]
    fn tableau_consistency() {
        const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
        let rows: [&[f64]; 5] = [&A3, &A4, &A5, &A6, &[B[0], B[1], B[2], B[3], B[4], B[5]]];
        assert!((A21 - C[1]).abs() < 1e-15);
        for (i, row) in rows.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            assert!((sum - C[i + 2]).abs() < 1e-14, "row {i}");
        }
        assert!(E.iter().sum::<f64>().abs() < 1e-15);
    }

    #[test]
    fn harmonic_full_period() {
        let opts = Options {
            tmax: 2.0 * PI,
            ..Options::with_tol(1e-12)
        };
        let tr = integrate_field(harmonic, [1.0, 0.0, 0.0], &opts).unwrap();
        assert!(matches!(tr.termination, Termination::TimeLimit { .. }));
        let e = tr.end();
        assert!((e.x - 1.0).hypot(e.y) < 1e-8);
        for w in tr.samples.windows(2) {
            assert!(w[1].t > w[0].t);
        }
    }

    #[test]
    fn section_hit_lands_on_axis() {
        let opts = Options {
            section: Some(Section::PositiveYAxis),
            stop_at: 1,
            ..Options::with_tol(1e-8)
        };
        // Clockwise from (0, 1): back on the positive y-axis after 2π.
        let tr = integrate_field(harmonic, [0.0, 1.0, 0.0], &opts).unwrap();
        match tr.termination {
            Termination::SectionHit { t, x, y, .. } => {
                assert_eq!(x, 0.0);
                assert!((t - 2.0 * PI).abs() < 1e-7);
                assert!((y - 1.0).abs() < 1e-7);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dense_output_matches_solution() {
        let opts = Options {
            tmax: 3.0,
            dense: true,
            ..Options::with_tol(1e-10)
        };
        let tr = integrate_field(harmonic, [1.0, 0.0, 0.0], &opts).unwrap();
        for k in 0..=30 {
            let t = 0.1 * k as f64;
            let s = tr.eval_at(t).unwrap();
            assert!((s[0] - t.cos()).abs() < 1e-8, "t = {t}");
            assert!((s[1] + t.sin()).abs() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn finite_time_blow_up() {
        // x' = x², y' = 0 escapes at t = 1 from x = 1.
        let f = |s: &State| [s[0] * s[0], 0.0, 0.0];
        let tr = integrate_field(f, [1.0, 0.0, 0.0], &Options::default()).unwrap();
        assert!(tr.termination.escaped(), "{:?}", tr.termination);
        assert!((tr.termination.time() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn error_scales_with_tolerance() {
        let err = |tol: f64| {
            let opts = Options {
                tmax: 20.0 * PI,
                record: false,
                ..Options::with_tol(tol)
            };
            let e = integrate_field(harmonic, [1.0, 0.0, 0.0], &opts)
                .unwrap()
                .end();
            (e.x - 1.0).hypot(e.y)
        };
        let (a, b) = (err(1e-6), err(1e-9));
        assert!(b < a / 100.0, "{a} {b}");
    }

    #[test]
    fn rejects_bad_options() {
        let opts = Options {
            tol: 0.0,
            ..Options::default()
        };
        assert!(integrate_field(harmonic, [1.0, 0.0, 0.0], &opts).is_err());
        let opts = Options {
            stop_at: 1,
            ..Options::default()
        };
        assert!(integrate_field(harmonic, [1.0, 0.0, 0.0], &opts).is_err());
    }
}

//! Adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error("quadrature did not converge on [{a}, {b}]: estimate {estimate}, error {error:e}")]
    NonConvergence {
        a: f64,
        b: f64,
        estimate: f64,
        error: f64,
    },
    #[error("integrand is not finite at x = {0}")]
    NonFinite(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Kronrod value, `|K - G|` and the Kronrod estimate of `∫|f|`.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64, f64), QuadError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    let mut abs = 0.0;
    for i in 0..8 {
        let pts: &[f64] = if i == 7 {
            &[c]
        } else {
            &[c - h * XGK[i], c + h * XGK[i]]
        };
        for &x in pts {
            let v = f(x);
            if !v.is_finite() {
                return Err(QuadError::NonFinite(x));
            }
            kronrod += WGK[i] * v;
            abs += WGK[i] * v.abs();
            if i % 2 == 1 {
                gauss += WG[i / 2] * v;
            }
        }
    }
    Ok((kronrod * h, ((kronrod - gauss) * h).abs(), abs * h.abs()))
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// Integrate `f` over `[a, b]` until the error estimate is below
/// `max(abs_tol, rel_tol * |I|)`, bisecting the worst panel each round.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Quadrature, QuadError> {
    const MAX_PANELS: usize = 4000;
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let (v, e, ab) = gk15(&f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        a,
        b,
        value: v,
        error: e,
        abs: ab,
    });
    let mut total = v;
    let mut err = e;
    let mut abs_total = ab;
    let mut evals = 15;
    // Below the rounding floor further bisection cannot help.
    while err
        > abs_tol
            .max(rel_tol * total.abs())
            .max(50.0 * f64::EPSILON * abs_total)
    {
        if heap.len() >= MAX_PANELS {
            return Err(QuadError::NonConvergence {
                a,
                b,
                estimate: total,
                error: err,
            });
        }
        let worst = heap.pop().expect("nonempty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a.min(worst.b) || m >= worst.a.max(worst.b) {
            // Panel cannot be split further in floating point.
            return Err(QuadError::NonConvergence {
                a,
                b,
                estimate: total,
                error: err,
            });
        }
        let (v1, e1, a1) = gk15(&f, worst.a, m)?;
        let (v2, e2, a2) = gk15(&f, m, worst.b)?;
        evals += 30;
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        abs_total += a1 + a2 - worst.abs;
        heap.push(Panel {
            a: worst.a,
            b: m,
            value: v1,
            error: e1,
            abs: a1,
        });
        heap.push(Panel {
            a: m,
            b: worst.b,
            value: v2,
            error: e2,
            abs: a2,
        });
    }
    // Resum to shed accumulated rounding from the running updates.
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(Quadrature {
        value,
        error,
        evaluations: evals,
    })
}

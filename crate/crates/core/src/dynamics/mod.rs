//! Trajectories, return maps on the positive y-axis, limit cycles and flux
//! diagnostics.

mod cycle;
mod flux;
mod hopf;
mod integrator;
mod star;

use crate::system::{EquationSpec, SpecError};

pub use cycle::{
    cycle_orbit, find_cycle, return_map, CycleEstimate, CycleOptions, Return, Stability,
};
pub(crate) use flux::massera_structure;
pub use flux::{lienard_circle_flux, massera_circle_flux, oval_flux, FluxSign, FluxSummary};
pub use hopf::{hopf_scan, HopfOptions, HopfRow, HopfVerdict};
pub use integrator::{
    integrate_field, Options, Sample, Section, State, Stats, Termination, Trajectory,
};
pub use star::{star_shaped, star_shaped_cycle, StarShape};

#[derive(Debug, thiserror::Error)]
pub enum DynamicsError {
    #[error("invalid options: {0}")]
    Options(String),
    #[error("return map needs y0 > 0, got {0}")]
    Start(f64),
    #[error("no return from y0 = {y0}: {termination}")]
    NoReturn { y0: f64, termination: Termination },
    #[error("R(y) - y does not change sign on [{lo}, {hi}]: {r_lo:e}, {r_hi:e}")]
    Bracket {
        lo: f64,
        hi: f64,
        r_lo: f64,
        r_hi: f64,
    },
    #[error("closure error {0:e} exceeds the tolerance")]
    Closure(f64),
    #[error("degenerate cycle: radius {0:e}")]
    Degenerate(f64),
    #[error("oval of radius {0} is not closed")]
    OpenOval(f64),
    #[error("radius must be positive, got {0}")]
    Radius(f64),
    #[error("{0}")]
    Structure(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
}

/// Right-hand side on `(x, y, ∫div)`, evaluating each coefficient once.
pub fn augmented_field(spec: &EquationSpec) -> impl Fn(&State) -> State + '_ {
    let cs = spec.coefficients();
    move |s: &State| {
        let (x, y) = (s[0], s[1]);
        let mut damp = 0.0;
        let mut div = 0.0;
        for (l, c) in cs.iter().enumerate().skip(1).rev() {
            let v = c.eval(x);
            damp = (damp + v) * y;
            div = div * y + l as f64 * v;
        }
        [y, -(cs[0].eval(x) + damp), -div]
    }
}

/// Integrate the phase-plane system from `(x, y)`.
pub fn integrate(
    spec: &EquationSpec,
    initial: (f64, f64),
    opts: &Options,
) -> Result<Trajectory, DynamicsError> {
    integrate_field(augmented_field(spec), [initial.0, initial.1, 0.0], opts)
        .map_err(DynamicsError::Options)
}

/// Values of `y` at successive crossings of the positive y-axis.
pub fn crossing_values(trajectory: &Trajectory) -> Vec<f64> {
    trajectory.crossings.iter().map(|c| c.y).collect()
}

//! Change of variables taking `x'' + f_1 x' + f_2 x'^2 + g = 0` to the
//! Liénard system `x' = y - F̃(x)`, `y' = -g̃(x)`, with
//!
//! * `E(x) = exp(∫_0^x f_2)`,
//! * `F̃(x) = ∫_0^x f_1 E`,  `g̃ = g E²`,  `G̃ = ∫_0^x g̃`,
//! * phase point `(u, v)` ↦ `(x, y) = (u, v E(u) + F̃(u))`,
//! * time `dτ = dt / E(x)`.

mod levels;

use std::sync::Arc;

use crate::symbolic::quad::QuadError;
use crate::symbolic::{Antiderivative, Expression};
use crate::system::EquationSpec;

pub use levels::{
    level_pullback, nested_on_rays, ray_radius, winding_number, LevelCurve, LevelError,
    DEFAULT_LEVEL_WINDOW,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransformError {
    #[error("the transformation needs n <= 2, got n = {0}")]
    Order(usize),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// `F̃`, `g̃`, `G̃` and `E` for one equation.
#[derive(Clone)]
pub struct LienardImage {
    f2_primitive: Antiderivative,
    f1: Expression,
    g: Expression,
    f_tilde: Antiderivative,
    g_tilde_primitive: Antiderivative,
}

impl std::fmt::Debug for LienardImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LienardImage").finish_non_exhaustive()
    }
}

impl LienardImage {
    pub fn new(spec: &EquationSpec) -> Result<Self, TransformError> {
        Self::build(spec, true)
    }

    /// Image of the unperturbed system (`f_1` dropped).
    pub fn unperturbed(spec: &EquationSpec) -> Result<Self, TransformError> {
        Self::build(spec, false)
    }

    fn build(spec: &EquationSpec, with_f1: bool) -> Result<Self, TransformError> {
        if spec.n() > 2 {
            return Err(TransformError::Order(spec.n()));
        }
        let f1 = if with_f1 {
            spec.coefficient(1)
        } else {
            Expression::zero()
        };
        let f2 = spec.coefficient(2);
        let g = spec.g().clone();
        let f2_primitive = Antiderivative::of(&f2);

        let f_tilde = if f2.is_identically_zero() {
            Antiderivative::of(&f1)
        } else if f1.is_identically_zero() {
            Antiderivative::of(&Expression::zero())
        } else {
            let (f1c, p) = (f1.clone(), f2_primitive.clone());
            Antiderivative::numeric(Arc::new(move |s| f1c.eval(s) * p.eval(s).exp()), 1e-12)
        };
        let g_tilde_primitive = if f2.is_identically_zero() {
            Antiderivative::of(&g)
        } else {
            let (gc, p) = (g.clone(), f2_primitive.clone());
            Antiderivative::numeric(
                Arc::new(move |s| gc.eval(s) * (2.0 * p.eval(s)).exp()),
                1e-12,
            )
        };
        Ok(Self {
            f2_primitive,
            f1,
            g,
            f_tilde,
            g_tilde_primitive,
        })
    }

    /// `E(x) = exp(∫_0^x f_2)`.
    pub fn exp_factor(&self, x: f64) -> Result<f64, TransformError> {
        Ok(self.f2_primitive.try_eval(x)?.exp())
    }

    pub fn f_tilde(&self, x: f64) -> Result<f64, TransformError> {
        Ok(self.f_tilde.try_eval(x)?)
    }

    pub fn g_tilde(&self, x: f64) -> Result<f64, TransformError> {
        let e = self.exp_factor(x)?;
        Ok(self.g.eval(x) * e * e)
    }

    pub fn big_g_tilde(&self, x: f64) -> Result<f64, TransformError> {
        Ok(self.g_tilde_primitive.try_eval(x)?)
    }

    pub fn f1(&self) -> &Expression {
        &self.f1
    }

    /// Phase point `(u, v)` to Liénard point `(x, y)`.
    pub fn forward(&self, u: f64, v: f64) -> Result<(f64, f64), TransformError> {
        Ok((u, v * self.exp_factor(u)? + self.f_tilde(u)?))
    }

    /// Liénard point `(x, y)` to phase point `(u, v)`.
    pub fn inverse(&self, x: f64, y: f64) -> Result<(f64, f64), TransformError> {
        Ok((x, (y - self.f_tilde(x)?) / self.exp_factor(x)?))
    }

    /// `dτ/dt` at `x`.
    pub fn time_rescale_factor(&self, x: f64) -> Result<f64, TransformError> {
        Ok(1.0 / self.exp_factor(x)?)
    }

    /// `H(x, y) = y²/2 + G̃(x)` in Liénard coordinates.
    pub fn hamiltonian(&self, x: f64, y: f64) -> Result<f64, TransformError> {
        Ok(0.5 * y * y + self.big_g_tilde(x)?)
    }

    /// `(y - F̃(x), -g̃(x))`.
    pub fn lienard_field(&self, x: f64, y: f64) -> Result<(f64, f64), TransformError> {
        Ok((y - self.f_tilde(x)?, -self.g_tilde(x)?))
    }
}

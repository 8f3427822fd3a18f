//! A common view of both angular models as a scale mixture component.

use rand::RngCore;

use crate::angular::AngularModelA;
use crate::error::{invalid, Result};
use crate::functional::FunctionalModelB;
use crate::radial::RadialLaw;

/// Coordinate selector for marginal quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Margin {
    X,
    Y,
}

/// Either angular model.
#[derive(Debug, Clone)]
pub enum Model {
    A(AngularModelA),
    B(FunctionalModelB),
}

impl From<AngularModelA> for Model {
    fn from(m: AngularModelA) -> Self {
        Self::A(m)
    }
}

impl From<FunctionalModelB> for Model {
    fn from(m: FunctionalModelB) -> Self {
        Self::B(m)
    }
}

impl Model {
    pub fn label(&self) -> String {
        match self {
            Self::A(m) => m.label(),
            Self::B(m) => m.label(),
        }
    }

    /// `P(U₁ > tx/r, U₂ > ty/r)`.
    pub fn conditional_joint(&self, tx: f64, ty: f64, r: f64) -> Result<f64> {
        match self {
            Self::A(m) => {
                if !(r > 0.0) {
                    return Ok(0.0);
                }
                m.joint_tail(tx / r, ty / r)
            }
            Self::B(m) => m.conditional_joint(tx, ty, r),
        }
    }

    /// `P(U₁ > t/r)` or `P(U₂ > t/r)`.
    pub fn conditional_marginal(&self, margin: Margin, t: f64, r: f64) -> Result<f64> {
        match self {
            Self::A(m) => {
                if !(r > 0.0) {
                    return Ok(0.0);
                }
                m.marginal_sf(margin, t / r)
            }
            Self::B(m) => m.conditional_marginal(margin, t, r),
        }
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> (f64, f64) {
        match self {
            Self::A(m) => m.sample(rng),
            Self::B(m) => m.sample(rng),
        }
    }

    /// Upper bounds of `(U₁, U₂)`; the conditional tails vanish for
    /// `r` below `t / bound`.
    pub fn upper_bounds(&self) -> (f64, f64) {
        match self {
            Self::A(_) => (1.0, 1.0),
            Self::B(m) => m.upper_bounds(),
        }
    }

    /// The normalizing scale of the shifts: `x` for model A and `α_ρ x` for
    /// model B.
    pub fn shift_scale(&self, a: f64, x: f64) -> Result<f64> {
        match self {
            Self::A(_) => Ok(x),
            Self::B(m) => Ok(m.solve_alpha(a)?.alpha * x),
        }
    }

    /// Thresholds `(x(1 + δ/v), a x(1 + η/v))` where `v` is evaluated at
    /// [`shift_scale`](Self::shift_scale).
    pub fn thresholds(&self, radial: &RadialLaw, a: f64, delta: f64, eta: f64, x: f64) -> Result<(f64, f64)> {
        if !(x > 0.0) || !(a > 0.0 && a <= 1.0) {
            return invalid(format!("need x > 0 and a in (0, 1], got x = {x}, a = {a}"));
        }
        if !(delta >= 0.0 && eta >= 0.0) {
            return invalid(format!("shifts must be nonnegative, got ({delta}, {eta})"));
        }
        if delta == 0.0 && eta == 0.0 {
            return Ok((x, a * x));
        }
        let v = radial.v(self.shift_scale(a, x)?);
        Ok((x * (1.0 + delta / v), a * x * (1.0 + eta / v)))
    }
}

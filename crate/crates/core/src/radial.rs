//! Radial distributions with infinite upper endpoint in the Gumbel
//! max-domain of attraction.
//!
//! Every family uses the hazard rate `w = f / F̄` as its scaling function,
//! so `F̄(x + t/w(x)) / F̄(x) → e^{-t}` holds with an exact limit. All tail
//! evaluations are done on the log scale.

use std::f64::consts::LN_2;

use crate::error::{invalid, Error, Result};
use crate::numerics::special::{ln_gamma, ln_gamma_q, ln_normal_pdf, ln_normal_sf};

/// A positive radial law `R ~ F` with `F ∈ GMDA(w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialLaw {
    /// `F̄(x) = exp(-θ x^τ)`, scaling `w(x) = θ τ x^{τ-1}`.
    WeibullTail { theta: f64, tau: f64 },
    /// Euclidean norm of a `k`-dimensional standard Gaussian vector.
    Chi { k: u32 },
    /// `ln R ~ N(μ, σ²)`.
    LogNormal { mu: f64, sigma: f64 },
}

impl RadialLaw {
    pub fn weibull_tail(theta: f64, tau: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite() && tau > 0.0 && tau.is_finite()) {
            return invalid(format!("weibull tail needs theta > 0 and tau > 0, got ({theta}, {tau})"));
        }
        Ok(Self::WeibullTail { theta, tau })
    }

    pub fn chi(k: u32) -> Result<Self> {
        if k == 0 {
            return invalid("chi law needs k >= 1");
        }
        Ok(Self::Chi { k })
    }

    pub fn log_normal(mu: f64, sigma: f64) -> Result<Self> {
        if !(mu.is_finite() && sigma > 0.0 && sigma.is_finite()) {
            return invalid(format!("log-normal needs finite mu and sigma > 0, got ({mu}, {sigma})"));
        }
        Ok(Self::LogNormal { mu, sigma })
    }

    pub fn label(&self) -> String {
        match self {
            Self::WeibullTail { theta, tau } => format!("weibull_tail(theta={theta},tau={tau})"),
            Self::Chi { k } => format!("chi(k={k})"),
            Self::LogNormal { mu, sigma } => format!("log_normal(mu={mu},sigma={sigma})"),
        }
    }

    /// Index `λ` with `w(x) = x^{λ-1} L(x)`.
    pub fn weibull_index(&self) -> f64 {
        match self {
            Self::WeibullTail { tau, .. } => *tau,
            Self::Chi { .. } => 2.0,
            Self::LogNormal { .. } => 0.0,
        }
    }

    /// `ln F̄(x)`; arguments `x <= 0` give `0`.
    pub fn ln_sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match *self {
            Self::WeibullTail { theta, tau } => -theta * x.powf(tau),
            Self::Chi { k: 2 } => -0.5 * x * x,
            Self::Chi { k } => ln_gamma_q(0.5 * k as f64, 0.5 * x * x),
            Self::LogNormal { mu, sigma } => ln_normal_sf((x.ln() - mu) / sigma),
        }
    }

    /// `ln f(x)` for `x > 0`.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        match *self {
            Self::WeibullTail { theta, tau } => {
                (theta * tau).ln() + (tau - 1.0) * x.ln() - theta * x.powf(tau)
            }
            Self::Chi { k } => {
                let h = 0.5 * k as f64;
                (k as f64 - 1.0) * x.ln() - 0.5 * x * x - (h - 1.0) * LN_2 - ln_gamma(h)
            }
            Self::LogNormal { mu, sigma } => {
                let z = (x.ln() - mu) / sigma;
                ln_normal_pdf(z) - (x * sigma).ln()
            }
        }
    }

    /// Hazard-rate scaling function `w(x) = f(x) / F̄(x)` for `x > 0`.
    pub fn w(&self, x: f64) -> f64 {
        match *self {
            Self::WeibullTail { theta, tau } => theta * tau * x.powf(tau - 1.0),
            Self::Chi { k: 2 } => x,
            _ => (self.ln_pdf(x) - self.ln_sf(x)).exp(),
        }
    }

    /// `v(x) = x w(x)`.
    pub fn v(&self, x: f64) -> f64 {
        x * self.w(x)
    }

    /// Checked survival `F̄(x)`.
    pub fn survival(&self, x: f64) -> Result<f64> {
        self.ln_survival(x).map(f64::exp)
    }

    /// Checked `ln F̄(x)`.
    pub fn ln_survival(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return invalid(format!("survival needs x >= 0, got {x}"));
        }
        Ok(self.ln_sf(x))
    }

    pub fn density(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return invalid(format!("density needs x >= 0, got {x}"));
        }
        Ok(self.ln_pdf(x).exp())
    }

    pub fn scaling_w(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return invalid(format!("scaling function needs x > 0, got {x}"));
        }
        Ok(self.w(x))
    }

    pub fn scaling_v(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return invalid(format!("v(x) needs x > 0, got {x}"));
        }
        Ok(self.v(x))
    }

    /// `b(u) = F^{-1}(1 - 1/u)` for `u > 1`.
    pub fn quantile_b(&self, u: f64) -> Result<f64> {
        if !(u > 1.0) {
            return invalid(format!("quantile_b needs u > 1, got {u}"));
        }
        self.quantile_ln_sf(-u.ln())
    }

    /// Generalized inverse of the survival function on the log scale:
    /// the `x` with `ln F̄(x) = ln_level`.
    pub fn quantile_ln_sf(&self, ln_level: f64) -> Result<f64> {
        if ln_level.is_nan() || ln_level > 0.0 {
            return invalid(format!("log survival level must be <= 0, got {ln_level}"));
        }
        if ln_level == f64::NEG_INFINITY {
            return Err(Error::InvalidInput("survival level underflows to zero".into()));
        }
        if ln_level == 0.0 {
            return Ok(0.0);
        }
        match *self {
            Self::WeibullTail { theta, tau } => Ok((-ln_level / theta).powf(1.0 / tau)),
            Self::Chi { k: 2 } => Ok((-2.0 * ln_level).sqrt()),
            Self::Chi { .. } => self.invert_numerically(ln_level, (-2.0 * ln_level).sqrt()),
            Self::LogNormal { mu, sigma } => {
                self.invert_numerically(ln_level, (mu + sigma * (-2.0 * ln_level).sqrt()).exp())
            }
        }
    }

    /// Safeguarded Newton iteration inside an expanding bracket. The
    /// derivative of `ln F̄` is `-w`, so each Newton step is `g / w`.
    fn invert_numerically(&self, ln_level: f64, guess: f64) -> Result<f64> {
        let g = |x: f64| self.ln_sf(x) - ln_level;
        let mut lo = 0.0;
        let mut hi = guess.max(1.0);
        let mut expansions = 0;
        while g(hi) > 0.0 {
            lo = hi;
            hi *= 2.0;
            expansions += 1;
            if expansions > 2_000 || !hi.is_finite() {
                return Err(Error::Bracket(format!("cannot bracket survival level {ln_level}")));
            }
        }
        let mut x = guess.clamp(lo, hi);
        if x <= lo || x >= hi {
            x = 0.5 * (lo + hi);
        }
        for _ in 0..200 {
            let gx = g(x);
            if gx == 0.0 {
                return Ok(x);
            }
            if gx > 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let step = gx / self.w(x);
            let mut next = x + step;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 1e-15 * x.abs() || hi - lo <= 1e-15 * hi {
                return Ok(next);
            }
            x = next;
        }
        Ok(x)
    }

    /// Draw from `R | R > threshold` by inversion: the returned `r` has
    /// survival level `u * F̄(threshold)`. Decreasing in `u`.
    pub fn sample_conditional(&self, threshold: f64, u: f64) -> Result<f64> {
        if !(threshold >= 0.0) {
            return invalid(format!("threshold must be >= 0, got {threshold}"));
        }
        if !(u > 0.0 && u < 1.0) {
            return invalid(format!("u must lie in (0, 1), got {u}"));
        }
        let base = self.ln_sf(threshold);
        if !base.is_finite() {
            return Err(Error::InvalidInput(format!(
                "log survival at threshold {threshold} is not finite"
            )));
        }
        let r = self.quantile_ln_sf(u.ln() + base)?;
        Ok(r.max(threshold))
    }

    /// Finite-`x` diagnostics of the Gumbel domain and self-neglecting
    /// conditions on an `(x, t)` grid.
    pub fn mda_diagnostics(&self, x_grid: &[f64], t_grid: &[f64]) -> Result<MdaTable> {
        if x_grid.is_empty() || t_grid.is_empty() {
            return invalid("mda diagnostics need nonempty grids");
        }
        if x_grid.windows(2).any(|w| w[1] <= w[0]) || x_grid[0] <= 0.0 {
            return invalid("x grid must be positive and increasing");
        }
        let mut rows = Vec::with_capacity(x_grid.len() * t_grid.len());
        for &x in x_grid {
            let wx = self.w(x);
            for &t in t_grid {
                let shifted = x + t / wx;
                if shifted <= 0.0 {
                    return invalid(format!("x + t/w(x) must stay positive (x={x}, t={t})"));
                }
                let ratio_survival = (self.ln_sf(shifted) - self.ln_sf(x)).exp();
                let ratio_scaling = self.w(shifted) / wx;
                rows.push(MdaRow {
                    x,
                    t,
                    ratio_survival,
                    survival_deviation: (ratio_survival - (-t).exp()).abs(),
                    ratio_scaling,
                    scaling_deviation: (ratio_scaling - 1.0).abs(),
                });
            }
        }
        Ok(MdaTable { x_count: x_grid.len(), t_count: t_grid.len(), rows })
    }
}

/// One `(x, t)` entry of [`RadialLaw::mda_diagnostics`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MdaRow {
    pub x: f64,
    pub t: f64,
    /// `F̄(x + t/w(x)) / F̄(x)`, compare with `e^{-t}`.
    pub ratio_survival: f64,
    pub survival_deviation: f64,
    /// `w(x + t/w(x)) / w(x)`, compare with `1`.
    pub ratio_scaling: f64,
    pub scaling_deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MdaTable {
    x_count: usize,
    t_count: usize,
    pub rows: Vec<MdaRow>,
}

impl MdaTable {
    pub fn row(&self, xi: usize, ti: usize) -> &MdaRow {
        &self.rows[xi * self.t_count + ti]
    }

    /// True when, for every `t`, both deviations are nonincreasing over the
    /// last `tail` grid points in `x`.
    pub fn converging(&self, tail: usize, slack: f64) -> bool {
        let start = self.x_count.saturating_sub(tail);
        (0..self.t_count).all(|ti| {
            (start + 1..self.x_count).all(|xi| {
                let prev = self.row(xi - 1, ti);
                let cur = self.row(xi, ti);
                cur.survival_deviation <= prev.survival_deviation + slack
                    && cur.scaling_deviation <= prev.scaling_deviation + slack
            })
        })
    }
}

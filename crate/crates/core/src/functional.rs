//! Functional dependence `(U₁, U₂) = (I₁W, ρI₁W + I₂z*(W))` with random signs
//! `I₁, I₂`, a law for `W` on `[0, 1]` and a shape function `z*`.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2};
use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::error::{invalid, Error, Result};
use crate::model::Margin;
use crate::numerics::roots::{bisect, central_derivative};
use crate::numerics::special::{inc_beta_pair, ln_beta};

const ROOT_GRID: usize = 2_000;
const WINDOW_GRID: usize = 400;
const SIDE_SLACK: f64 = 1e-12;
const LEVEL_GRID: usize = 512;

/// Law of the angular variable `W` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WLaw {
    /// `W^power ~ Beta(alpha, beta)`.
    BetaPower { power: f64, alpha: f64, beta: f64 },
    /// Density `C |w - center|^{exponent - 1}` on `[0, 1]`: a pure power
    /// concentration of exponent `exponent` at `center`.
    Cusp { center: f64, exponent: f64 },
}

impl WLaw {
    pub fn beta_power(power: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(power > 0.0 && alpha > 0.0 && beta > 0.0) || !(power * alpha * beta).is_finite() {
            return invalid(format!(
                "W law needs positive power and Beta parameters, got ({power}, {alpha}, {beta})"
            ));
        }
        Ok(Self::BetaPower { power, alpha, beta })
    }

    /// `W² ~ Beta(1/2, 1/2)`, i.e. `W = |cos Θ|` for uniform `Θ`.
    pub fn arcsine() -> Self {
        Self::BetaPower { power: 2.0, alpha: 0.5, beta: 0.5 }
    }

    pub fn uniform() -> Self {
        Self::BetaPower { power: 1.0, alpha: 1.0, beta: 1.0 }
    }

    pub fn cusp(center: f64, exponent: f64) -> Result<Self> {
        if !(center > 0.0 && center < 1.0) || !(exponent > 0.0 && exponent.is_finite()) {
            return invalid(format!("cusp law needs center in (0,1) and exponent > 0, got ({center}, {exponent})"));
        }
        Ok(Self::Cusp { center, exponent })
    }

    fn is_arcsine(&self) -> bool {
        matches!(*self, Self::BetaPower { power, alpha, beta } if power == 2.0 && alpha == 0.5 && beta == 0.5)
    }

    fn cusp_norm(center: f64, g: f64) -> f64 {
        g / (center.powf(g) + (1.0 - center).powf(g))
    }

    /// `(P(W ≤ w), P(W > w))`.
    pub fn cdf_sf(&self, w: f64) -> (f64, f64) {
        if w <= 0.0 {
            return (0.0, 1.0);
        }
        if w >= 1.0 {
            return (1.0, 0.0);
        }
        match *self {
            _ if self.is_arcsine() => {
                let s = FRAC_2_PI * w.acos();
                (FRAC_2_PI * w.asin(), s)
            }
            Self::BetaPower { power, alpha, beta } => {
                let lw = w.ln();
                let x = (power * lw).exp();
                let y = -(power * lw).exp_m1();
                inc_beta_pair(alpha, beta, x, y)
            }
            Self::Cusp { center, exponent: g } => {
                let k = Self::cusp_norm(center, g) / g;
                if w < center {
                    let lower = k * (center.powf(g) - (center - w).powf(g));
                    let upper = k * ((1.0 - center).powf(g) + (center - w).powf(g));
                    (lower, upper)
                } else {
                    let lower = k * (center.powf(g) + (w - center).powf(g));
                    let upper = k * ((1.0 - center).powf(g) - (w - center).powf(g));
                    (lower, upper)
                }
            }
        }
    }

    pub fn cdf(&self, w: f64) -> f64 {
        self.cdf_sf(w).0
    }

    pub fn sf(&self, w: f64) -> f64 {
        self.cdf_sf(w).1
    }

    /// Density `h(w)` for `w ∈ (0, 1)`.
    pub fn density(&self, w: f64) -> f64 {
        if !(w > 0.0 && w < 1.0) {
            return 0.0;
        }
        match *self {
            Self::BetaPower { power, alpha, beta } => {
                let lw = w.ln();
                let x = (power * lw).exp();
                let y = -(power * lw).exp_m1();
                (power.ln() + (power - 1.0) * lw + (alpha - 1.0) * x.ln() + (beta - 1.0) * y.ln()
                    - ln_beta(alpha, beta))
                .exp()
            }
            Self::Cusp { center, exponent: g } => {
                Self::cusp_norm(center, g) * (w - center).abs().powf(g - 1.0)
            }
        }
    }

    /// `P(lo < W < hi)`.
    pub fn interval(&self, lo: f64, hi: f64) -> f64 {
        let lo = lo.max(0.0);
        let hi = hi.min(1.0);
        if hi <= lo {
            return 0.0;
        }
        if self.is_arcsine() {
            return (FRAC_2_PI * (lo.acos() - hi.acos())).max(0.0);
        }
        let (clo, slo) = self.cdf_sf(lo);
        let (chi, shi) = self.cdf_sf(hi);
        let p = if lo >= 0.5 { slo - shi } else { chi - clo };
        p.max(0.0)
    }

    /// The `w` with `P(W > w) = level`.
    pub fn quantile_sf(&self, level: f64) -> f64 {
        if level <= 0.0 {
            return 1.0;
        }
        if level >= 1.0 {
            return 0.0;
        }
        match *self {
            _ if self.is_arcsine() => (FRAC_PI_2 * level).cos(),
            Self::BetaPower { power, alpha, beta } if alpha == 1.0 && beta == 1.0 => {
                (1.0 - level).powf(1.0 / power)
            }
            Self::Cusp { center, exponent: g } => {
                let k = Self::cusp_norm(center, g) / g;
                let upper_mass = k * (1.0 - center).powf(g);
                if level <= upper_mass {
                    center + ((1.0 - center).powf(g) - level / k).max(0.0).powf(1.0 / g)
                } else {
                    center - (level / k - (1.0 - center).powf(g)).max(0.0).powf(1.0 / g)
                }
            }
            Self::BetaPower { .. } => {
                bisect(|w| self.sf(w) - level, 0.0, 1.0, 1e-15).unwrap_or(0.5)
            }
        }
    }

    /// Exponent `γ` of `P(W > 1 - s) ~ const · s^γ`.
    pub fn upper_exponent(&self) -> f64 {
        match *self {
            Self::BetaPower { beta, .. } => beta,
            Self::Cusp { .. } => 1.0,
        }
    }

    /// Exponent of `P(W < s) ~ const · s^γ`.
    pub fn lower_exponent(&self) -> f64 {
        match *self {
            Self::BetaPower { power, alpha, .. } => power * alpha,
            Self::Cusp { .. } => 1.0,
        }
    }

    /// Exponent `γ_a` and constant `L` of
    /// `P(t0 + K₁ s < W ≤ t0 + K₂ s) ~ L s^{γ_a}` as `s ↓ 0`.
    pub fn concentration(&self, t0: f64, k1: f64, k2: f64) -> (f64, f64) {
        match *self {
            Self::Cusp { center, exponent: g } if (center - t0).abs() <= 1e-12 * t0 => {
                let k = Self::cusp_norm(center, g) / g;
                (g, k * (k1.abs().powf(g) + k2.abs().powf(g)))
            }
            _ => (1.0, (k2 - k1) * self.density(t0)),
        }
    }

    /// Whether `W` has a continuous positive density at `t`.
    pub fn density_case(&self, t: f64) -> bool {
        match *self {
            Self::Cusp { center, .. } => (center - t).abs() > 1e-12 * t,
            Self::BetaPower { .. } => t > 0.0 && t < 1.0,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Self::BetaPower { power, alpha, beta } => format!("W^{power}~Beta({alpha},{beta})"),
            Self::Cusp { center, exponent } => format!("cusp(center={center},exponent={exponent})"),
        }
    }
}

/// Sign pattern, `W` interval and probability of one joint-exceedance piece.
pub(crate) type JointPiece = ((f64, f64), (f64, f64), f64);

/// A user supplied shape function `z*` on `[0, 1]`.
#[derive(Clone)]
pub struct CustomShape {
    func: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    label: String,
}

impl CustomShape {
    pub fn new(label: impl Into<String>, func: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { func: Arc::new(func), label: label.into() }
    }
}

impl fmt::Debug for CustomShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomShape").field("label", &self.label).finish()
    }
}

/// The shape function `z*`.
#[derive(Debug, Clone)]
pub enum ZShape {
    /// `z*(x) = √(1-ρ²) √(1-x²)`.
    Elliptical,
    /// `z*(x) = (1 - x^p)^{1/p}` (requires `ρ = 0`).
    Lp { p: f64 },
    Custom(CustomShape),
}

/// Model B for the angular pair.
#[derive(Debug, Clone)]
pub struct FunctionalModelB {
    rho: f64,
    shape: ZShape,
    w: WLaw,
    /// `[P(-,-), P(-,+), P(+,-), P(+,+)]` for `(I₁, I₂)`.
    signs: [f64; 4],
}

/// Critical direction data for a level `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalData {
    pub a: f64,
    /// `α_ρ > 1`, the root of `z(1/α) = a/α`.
    pub alpha: f64,
    /// `1/α_ρ`.
    pub t0: f64,
    /// Inverse slope from the symmetric difference quotient.
    pub c: f64,
    /// One-sided slope from below.
    pub c_left: f64,
    /// One-sided slope from above.
    pub c_right: f64,
    /// Half width of the monotone window around `t0`.
    pub epsilon: f64,
    pub k1: f64,
    pub k2: f64,
    /// Concentration exponent `γ_a` of `W` at `t0`.
    pub gamma_a: f64,
    /// `L_{K₁,K₂}`.
    pub l_k: f64,
    /// Whether `W` has a continuous positive density at `t0`.
    pub density_case: bool,
}

impl FunctionalModelB {
    pub fn new(rho: f64, shape: ZShape, w: WLaw, signs: [f64; 4]) -> Result<Self> {
        if !(rho > -1.0 && rho < 1.0) {
            return invalid(format!("rho must lie in (-1, 1), got {rho}"));
        }
        if let ZShape::Lp { p } = shape {
            if !(p > 0.0 && p.is_finite()) {
                return invalid(format!("Lp exponent must be positive, got {p}"));
            }
            if rho != 0.0 {
                return invalid("the Lp shape is defined with rho = 0");
            }
        }
        let total: f64 = signs.iter().sum();
        if signs.iter().any(|p| !(*p >= 0.0)) || (total - 1.0).abs() > 1e-12 {
            return invalid(format!("sign probabilities must be nonnegative and sum to one, got {signs:?}"));
        }
        if !(signs[3] > 0.0) {
            return invalid("P(I1 = I2 = 1) must be positive");
        }
        Ok(Self { rho, shape, w, signs })
    }

    /// Elliptical model with arcsine `W` and independent symmetric signs.
    pub fn elliptical(rho: f64) -> Result<Self> {
        Self::new(rho, ZShape::Elliptical, WLaw::arcsine(), [0.25; 4])
    }

    /// `L_p` model with `W^p ~ Beta(1/p, 1/p)` and symmetric signs.
    pub fn lp(p: f64) -> Result<Self> {
        if !(p > 0.0) {
            return invalid(format!("Lp exponent must be positive, got {p}"));
        }
        Self::new(0.0, ZShape::Lp { p }, WLaw::beta_power(p, 1.0 / p, 1.0 / p)?, [0.25; 4])
    }

    pub fn with_w(mut self, w: WLaw) -> Self {
        self.w = w;
        self
    }

    pub fn with_signs(self, signs: [f64; 4]) -> Result<Self> {
        Self::new(self.rho, self.shape, self.w, signs)
    }

    /// Replace `W` by a cusp of the given exponent centered at the critical
    /// point `1/α_ρ` for level `a`.
    pub fn with_cusp_at_critical(self, a: f64, exponent: f64) -> Result<Self> {
        let crit = self.solve_alpha(a)?;
        let w = WLaw::cusp(crit.t0, exponent)?;
        Ok(self.with_w(w))
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn shape(&self) -> &ZShape {
        &self.shape
    }

    pub fn w_law(&self) -> WLaw {
        self.w
    }

    pub fn signs(&self) -> [f64; 4] {
        self.signs
    }

    /// `p₁₁ = P(I₁ = I₂ = 1)`.
    pub fn p11(&self) -> f64 {
        self.signs[3]
    }

    pub fn label(&self) -> String {
        let shape = match &self.shape {
            ZShape::Elliptical => "elliptical".to_string(),
            ZShape::Lp { p } => format!("lp(p={p})"),
            ZShape::Custom(c) => format!("custom({})", c.label),
        };
        format!("{shape}(rho={},{})", self.rho, self.w.label())
    }

    pub fn zstar(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match &self.shape {
            ZShape::Elliptical => (1.0 - self.rho * self.rho).sqrt() * ((1.0 - x) * (1.0 + x)).sqrt(),
            ZShape::Lp { p } => {
                let xp = x.powf(*p);
                if xp >= 1.0 { 0.0 } else { ((-xp).ln_1p() / p).exp() }
            }
            ZShape::Custom(c) => (c.func)(x),
        }
    }

    /// `z(x) = ρx + z*(x)`.
    pub fn z(&self, x: f64) -> f64 {
        self.rho * x + self.zstar(x)
    }

    /// Density `h(x)` of `W` for `x ∈ (0, 1)`.
    pub fn w_density_at(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x < 1.0) {
            return invalid(format!("W density is evaluated on (0, 1), got {x}"));
        }
        Ok(self.w.density(x))
    }

    pub fn w_cdf(&self, x: f64) -> f64 {
        self.w.cdf(x)
    }

    /// Intervals of `w ∈ [0, 1]` where `s₁ρw + s₂z*(w) > c`, for `c > 0`.
    fn superlevel(&self, s1: f64, s2: f64, c: f64) -> Vec<(f64, f64)> {
        match &self.shape {
            ZShape::Elliptical => {
                // s₁ρ cos θ + s₂ρ* sin θ = cos(θ - s₂φ) with cos φ = s₁ρ
                if c >= 1.0 {
                    return vec![];
                }
                let phi = (s1 * self.rho).acos();
                let beta = c.acos();
                let center = s2 * phi;
                let lo = (center - beta).max(0.0);
                let hi = (center + beta).min(FRAC_PI_2);
                if hi <= lo {
                    return vec![];
                }
                vec![(hi.cos(), lo.cos())]
            }
            ZShape::Lp { p } => {
                if s2 < 0.0 || c >= 1.0 {
                    return vec![];
                }
                let cp = c.powf(*p);
                vec![(0.0, ((-cp).ln_1p() / p).exp())]
            }
            ZShape::Custom(_) => {
                let g = |w: f64| s1 * self.rho * w + s2 * self.zstar(w) - c;
                numeric_superlevel(g)
            }
        }
    }

    /// `P(s₁ρW + s₂z*(W) > c, W > lo)`.
    fn event_prob(&self, s1: f64, s2: f64, lo: f64, c: f64) -> f64 {
        self.superlevel(s1, s2, c)
            .into_iter()
            .map(|(l, h)| self.w.interval(l.max(lo), h))
            .sum()
    }

    /// `P(U₁ > tx/r, U₂ > ty/r)` for positive thresholds.
    pub fn conditional_joint(&self, tx: f64, ty: f64, r: f64) -> Result<f64> {
        if !(tx > 0.0 && ty > 0.0) {
            return invalid(format!("thresholds must be positive, got ({tx}, {ty})"));
        }
        if !(r > 0.0) {
            return Ok(0.0);
        }
        let lo = tx / r;
        if lo >= 1.0 {
            return Ok(0.0);
        }
        let c = ty / r;
        let mut p = self.signs[3] * self.event_prob(1.0, 1.0, lo, c);
        if self.signs[2] > 0.0 && self.rho > 0.0 {
            p += self.signs[2] * self.event_prob(1.0, -1.0, lo, c);
        }
        Ok(p)
    }

    /// `P(U₁ > t/r)` or `P(U₂ > t/r)` for `t > 0`.
    pub fn conditional_marginal(&self, margin: Margin, t: f64, r: f64) -> Result<f64> {
        let second = margin == Margin::Y;
        if !(t > 0.0) {
            return invalid(format!("threshold must be positive, got {t}"));
        }
        if !(r > 0.0) {
            return Ok(0.0);
        }
        let c = t / r;
        if !second {
            return Ok((self.signs[2] + self.signs[3]) * self.w.sf(c));
        }
        let patterns = [(-1.0, -1.0, self.signs[0]), (-1.0, 1.0, self.signs[1]), (1.0, -1.0, self.signs[2]), (1.0, 1.0, self.signs[3])];
        Ok(patterns
            .iter()
            .filter(|(_, _, p)| *p > 0.0)
            .map(|(s1, s2, p)| p * self.event_prob(*s1, *s2, 0.0, c))
            .sum())
    }

    /// Upper bounds of `U₁` and `U₂`.
    pub fn upper_bounds(&self) -> (f64, f64) {
        let n = 4 * LEVEL_GRID;
        let mut m = f64::NEG_INFINITY;
        for i in 0..=n {
            let w = i as f64 / n as f64;
            let z = self.zstar(w);
            m = m.max(self.rho * w + z).max(-self.rho * w + z);
        }
        // grid maximum may sit slightly below the true supremum
        (1.0, (m * (1.0 + 1e-3)).min(1.0 + self.rho.abs()))
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> (f64, f64) {
        let w = self.w.quantile_sf(rng.random::<f64>());
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut idx = 3;
        for (i, p) in self.signs.iter().enumerate() {
            acc += p;
            if u < acc {
                idx = i;
                break;
            }
        }
        let i1 = if idx >= 2 { 1.0 } else { -1.0 };
        let i2 = if idx % 2 == 1 { 1.0 } else { -1.0 };
        (i1 * w, self.rho * i1 * w + i2 * self.zstar(w))
    }

    /// Draw `W` conditioned on `lo < W < hi`.
    pub(crate) fn sample_w_between(&self, lo: f64, hi: f64, u: f64) -> f64 {
        let (shi, slo) = (self.w.sf(hi), self.w.sf(lo));
        self.w.quantile_sf(shi + u * (slo - shi)).clamp(lo, hi)
    }

    /// Weighted joint-exceedance events at radius `r`: for each contributing
    /// sign pattern, the `W` interval and its probability.
    pub(crate) fn joint_pieces(&self, tx: f64, ty: f64, r: f64) -> Vec<JointPiece> {
        let mut out = vec![];
        let lo = tx / r;
        if lo >= 1.0 {
            return out;
        }
        let c = ty / r;
        let mut push = |s1: f64, s2: f64, p: f64| {
            if p <= 0.0 {
                return;
            }
            for (l, h) in self.superlevel(s1, s2, c) {
                let l = l.max(lo);
                let m = self.w.interval(l, h);
                if m > 0.0 {
                    out.push(((s1, s2), (l, h), p * m));
                }
            }
        };
        push(1.0, 1.0, self.signs[3]);
        if self.rho > 0.0 {
            push(1.0, -1.0, self.signs[2]);
        }
        out
    }

    /// Critical direction `α_ρ` and inverse slope `c` at level `a`.
    pub fn solve_alpha(&self, a: f64) -> Result<CriticalData> {
        if !(a > 0.0 && a <= 1.0) {
            return invalid(format!("level a must lie in (0, 1], got {a}"));
        }
        if self.rho > 0.0 && a <= self.rho {
            return Err(Error::NoCriticalDirection(format!(
                "a = {a} does not exceed rho = {}",
                self.rho
            )));
        }
        let f = |t: f64| self.z(t) - a * t;
        let lo_t = if self.rho > 0.0 { self.rho / a } else { 0.0 };
        let grid: Vec<f64> = (1..=ROOT_GRID).map(|i| lo_t + (1.0 - lo_t) * i as f64 / ROOT_GRID as f64).collect();
        let vals: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
        let changes: Vec<usize> = (1..grid.len())
            .filter(|&i| (vals[i - 1] > 0.0) != (vals[i] > 0.0))
            .collect();
        let i = match changes.as_slice() {
            [i] => *i,
            [] => {
                return Err(Error::NoCriticalDirection(format!(
                    "z(t) - a t has no sign change on ({lo_t}, 1]"
                )))
            }
            many => {
                return Err(Error::NoCriticalDirection(format!(
                    "z(t) - a t changes sign {} times on ({lo_t}, 1]",
                    many.len()
                )))
            }
        };
        let t0 = bisect(f, grid[i - 1], grid[i], 1e-15)?;
        let y0 = a * t0;

        let dz = |x: f64, h: f64| (self.z(x + h) - self.z(x - h)) / (2.0 * h);
        let max_e = t0.min(1.0 - t0);
        if !(max_e > 0.0) || !(dz(t0, 1e-7 * max_e) < 0.0) {
            return Err(Error::NoCriticalDirection(format!("z is not decreasing at 1/alpha = {t0}")));
        }
        let mut good = 0.0;
        for j in 1..WINDOW_GRID {
            let e = max_e * j as f64 / WINDOW_GRID as f64;
            let h = (1e-3 * (max_e - e)).min(1e-7);
            if dz(t0 - e, h) < 0.0 && dz(t0 + e, h) < 0.0 {
                good = e;
            } else {
                break;
            }
        }
        if good == 0.0 {
            good = max_e / WINDOW_GRID as f64;
        }
        let eps = 0.9 * good;
        let (wl, wr) = (t0 - eps, t0 + eps);
        let mut prev = self.z(wl);
        for j in 1..=200 {
            let t = wl + (wr - wl) * j as f64 / 200.0;
            let zt = self.z(t);
            if zt > prev {
                return Err(Error::NoCriticalDirection(format!("z increases at {t} inside the monotone window")));
            }
            prev = zt;
        }
        for j in 1..=ROOT_GRID {
            let t = t0 + (1.0 - t0) * j as f64 / ROOT_GRID as f64;
            let zt = self.z(t);
            if zt > y0 + SIDE_SLACK {
                return Err(Error::SideCondition { point: t, value: zt, bound: y0 });
            }
        }

        let (z_hi, z_lo) = (self.z(wl), self.z(wr));
        let inv = |y: f64| bisect(|t| self.z(t) - y, wl, wr, 1e-16).unwrap_or(f64::NAN);
        let span = (z_hi - y0).min(y0 - z_lo);
        let (d, _) = central_derivative(inv, y0, (0.5 * span).min(1e-3));
        let c = -d;
        let h = (0.1 * span).min(1e-4);
        let left = |h: f64| (inv(y0 - h) - t0) / h;
        let right = |h: f64| (t0 - inv(y0 + h)) / h;
        let c_left = 2.0 * left(0.5 * h) - left(h);
        let c_right = 2.0 * right(0.5 * h) - right(h);
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::NoCriticalDirection(format!("inverse slope at 1/alpha is not positive: {c}")));
        }
        if (c_left - c).abs() > 1e-4 * c || (c_right - c).abs() > 1e-4 * c {
            return Err(Error::NoCriticalDirection(format!(
                "one-sided slopes disagree: left {c_left}, right {c_right}, central {c}"
            )));
        }
        let alpha = 1.0 / t0;
        let k1 = -t0;
        let k2 = c * a * t0;
        let (gamma_a, l_k) = self.w.concentration(t0, k1, k2);
        Ok(CriticalData {
            a,
            alpha,
            t0,
            c,
            c_left,
            c_right,
            epsilon: eps,
            k1,
            k2,
            gamma_a,
            l_k,
            density_case: self.w.density_case(t0),
        })
    }

    /// Coefficient and exponent of the marginal tail: `P(U₁ > 1-s)` or
    /// `P(U₂ > 1-s)` behaves like `coef · P(g(W) > 1-s)` with
    /// `P(g(W) > 1-s)` regularly varying of index `γ`.
    pub fn marginal_tail_data(&self, margin: Margin) -> Result<(f64, f64)> {
        let second = margin == Margin::Y;
        if self.rho < 0.0 {
            return Err(Error::Unsupported("marginal tails are derived for rho >= 0 only".into()));
        }
        if !second {
            return Ok((self.signs[2] + self.signs[3], self.w.upper_exponent()));
        }
        let gamma = match (&self.shape, self.rho > 0.0) {
            (ZShape::Elliptical, true) => 0.5,
            (ZShape::Elliptical, false) => 0.5 * self.w.lower_exponent(),
            (ZShape::Lp { p }, _) => self.w.lower_exponent() / p,
            (ZShape::Custom(_), _) => {
                return Err(Error::Unsupported("marginal tail exponent of a custom shape is unknown".into()))
            }
        };
        if self.rho > 0.0 {
            let sup_other = (0..=LEVEL_GRID)
                .map(|i| {
                    let w = i as f64 / LEVEL_GRID as f64;
                    -self.rho * w + self.zstar(w)
                })
                .fold(f64::NEG_INFINITY, f64::max);
            if sup_other >= 1.0 {
                return Err(Error::Unsupported("sup z* must stay below one when rho > 0".into()));
            }
            Ok((self.signs[3], gamma))
        } else {
            Ok((self.signs[1] + self.signs[3], gamma))
        }
    }

    /// `P(W > 1-s)` or `P(z(W) > 1-s)`.
    pub fn marginal_level_prob(&self, margin: Margin, s: f64) -> f64 {
        if margin == Margin::Y {
            self.event_prob(1.0, 1.0, 0.0, 1.0 - s)
        } else {
            self.w.sf(1.0 - s)
        }
    }
}

/// Intervals where `g > 0` on `[0, 1]`, located by a grid scan refined with
/// bisection.
fn numeric_superlevel(g: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    let n = LEVEL_GRID;
    let xs: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let mut out = vec![];
    let mut start = if vals[0] > 0.0 { Some(0.0) } else { None };
    for i in 1..=n {
        let (a, b) = (vals[i - 1] > 0.0, vals[i] > 0.0);
        if a != b {
            let root = bisect(&g, xs[i - 1], xs[i], 1e-16).unwrap_or(0.5 * (xs[i - 1] + xs[i]));
            if b {
                start = Some(root);
            } else if let Some(s) = start.take() {
                out.push((s, root));
            }
        }
    }
    if let Some(s) = start {
        out.push((s, 1.0));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quad::{integrate, Tolerance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ell_alpha(rho: f64, a: f64) -> f64 {
        (1.0 - 2.0 * a * rho + a * a).sqrt() / (1.0 - rho * rho).sqrt()
    }

    #[test]
    fn lp_critical_direction() {
        let m = FunctionalModelB::lp(2.0).unwrap();
        let cd = m.solve_alpha(1.0).unwrap();
        assert!((cd.alpha - 2f64.sqrt()).abs() < 1e-12);
        assert!((cd.c - 1.0).abs() < 1e-9);
        for p in [1.0, 1.5, 3.0] {
            for a in [0.5, 0.8, 1.0] {
                let cd = FunctionalModelB::lp(p).unwrap().solve_alpha(a).unwrap();
                assert!((cd.alpha - (1.0 + a.powf(p)).powf(1.0 / p)).abs() < 1e-12);
                assert!((cd.c - a.powf(p - 1.0)).abs() < 1e-8 * cd.c, "p={p} a={a}: {}", cd.c);
                assert!((cd.c_left - cd.c).abs() < 1e-6 * cd.c);
                assert!((cd.c_right - cd.c).abs() < 1e-6 * cd.c);
            }
        }
    }

    #[test]
    fn elliptical_critical_direction_grid() {
        for rho in [-0.5, 0.0, 0.3, 0.7] {
            for a in [0.5, 0.8, 1.0] {
                let m = FunctionalModelB::elliptical(rho).unwrap();
                if rho > 0.0 && a <= rho {
                    assert!(m.solve_alpha(a).is_err());
                    continue;
                }
                let cd = m.solve_alpha(a).unwrap();
                let c = (a - rho) / (1.0 - a * rho);
                assert!((cd.alpha - ell_alpha(rho, a)).abs() < 1e-10, "rho={rho} a={a}");
                assert!((cd.c - c).abs() < 1e-10 * c.max(1.0), "rho={rho} a={a}: {} vs {c}", cd.c);
                assert!((cd.c_left - cd.c).abs() < 1e-6 * cd.c);
                assert!((cd.c_right - cd.c).abs() < 1e-6 * cd.c);
                assert!((m.z(cd.t0) - a * cd.t0).abs() < 1e-14);
            }
        }
        let cd = FunctionalModelB::elliptical(0.5).unwrap().solve_alpha(0.8).unwrap();
        assert!((cd.alpha - (1.0f64 - 0.8 + 0.64).sqrt() / 0.75f64.sqrt()).abs() < 1e-12);
        assert!((cd.c - 0.5).abs() < 1e-10);
    }

    #[test]
    fn side_condition_violation_is_reported() {
        // a bump to the right of the critical point that rises above a/α
        // without creating another root
        let shape = CustomShape::new("bump", |x: f64| {
            (1.0 - x * x).sqrt() + 0.5 * (-((x - 0.95) / 0.01).powi(2)).exp()
        });
        let m = FunctionalModelB::new(0.0, ZShape::Custom(shape), WLaw::arcsine(), [0.25; 4]).unwrap();
        match m.solve_alpha(1.0) {
            Err(Error::SideCondition { point, value, bound }) => {
                assert!(point > 0.9 && point < 1.0 && value > bound);
            }
            other => panic!("expected a side-condition failure, got {other:?}"),
        }
    }

    #[test]
    fn density_examples() {
        let e = FunctionalModelB::elliptical(0.0).unwrap();
        assert!((e.w_density_at(1e-9).unwrap() - FRAC_2_PI).abs() < 1e-12);
        assert!(e.w_density_at(0.0).is_err() && e.w_density_at(1.0).is_err());
        let u = FunctionalModelB::lp(1.0).unwrap().with_w(WLaw::uniform());
        assert!((u.w_density_at(0.3).unwrap() - 1.0).abs() < 1e-14);
        // substitute w = 1 - y² to remove the endpoint singularity
        let total = integrate(|y| 2.0 * y * e.w.density(1.0 - y * y), 0.0, 1.0, &[], Tolerance::rel(1e-12), 2_000)
            .unwrap()
            .value;
        assert!((total - 1.0).abs() < 1e-8, "{total}");
        for law in [WLaw::beta_power(3.0, 0.7, 2.5).unwrap(), WLaw::cusp(0.3, 2.0).unwrap()] {
            let total = integrate(|w| law.density(w), 0.0, 1.0, &[0.3], Tolerance::rel(1e-10), 4_000).unwrap().value;
            assert!((total - 1.0).abs() < 1e-8, "{}: {total}", law.label());
        }
    }

    #[test]
    fn w_laws_are_consistent() {
        let laws = [
            WLaw::arcsine(),
            WLaw::uniform(),
            WLaw::beta_power(3.0, 0.7, 2.5).unwrap(),
            WLaw::beta_power(2.0, 0.5, 0.5).unwrap(),
            WLaw::cusp(0.6, 0.5).unwrap(),
            WLaw::cusp(0.3, 2.0).unwrap(),
        ];
        for law in laws {
            for i in 1..20 {
                let w = i as f64 / 20.0;
                let (c, s) = law.cdf_sf(w);
                assert!((c + s - 1.0).abs() < 1e-13, "{}", law.label());
                let q = law.quantile_sf(s);
                assert!((q - w).abs() < 1e-9, "{} at {w}: {q}", law.label());
                if let WLaw::Cusp { center, .. } = law {
                    if (w - center).abs() < 1e-9 {
                        continue;
                    }
                }
                let h = 1e-6;
                let num = (law.cdf(w + h) - law.cdf(w - h)) / (2.0 * h);
                assert!((num - law.density(w)).abs() < 1e-5 * law.density(w).max(1.0), "{}", law.label());
            }
        }
    }

    #[test]
    fn joint_tail_given_r_examples() {
        let e = FunctionalModelB::elliptical(0.0).unwrap();
        let expect = (e.w_cdf(3f64.sqrt() / 2.0) - e.w_cdf(0.5)) * 0.25;
        assert!((e.conditional_joint(1.0, 1.0, 2.0).unwrap() - expect).abs() < 1e-15);
        assert_eq!(e.conditional_joint(1.0, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(e.conditional_joint(1.0, 1.0, 0.5).unwrap(), 0.0);
        let lp = FunctionalModelB::lp(1.0).unwrap().with_w(WLaw::uniform());
        assert!((lp.conditional_joint(1.0, 1.0, 4.0).unwrap() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn closed_superlevels_match_numeric_scan() {
        for rho in [-0.4, 0.0, 0.5] {
            let m = FunctionalModelB::elliptical(rho).unwrap();
            let z = m.zstar(0.0) / (1.0 - rho * rho).sqrt();
            assert!((z - 1.0).abs() < 1e-15);
            for (s1, s2) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                for c in [0.05, 0.3, 0.7, 0.95] {
                    let closed = m.superlevel(s1, s2, c);
                    let numeric = numeric_superlevel(|w| s1 * rho * w + s2 * m.zstar(w) - c);
                    let pc: f64 = closed.iter().map(|(l, h)| m.w.interval(*l, *h)).sum();
                    let pn: f64 = numeric.iter().map(|(l, h)| m.w.interval(*l, *h)).sum();
                    assert!((pc - pn).abs() < 1e-10, "rho={rho} ({s1},{s2}) c={c}: {pc} vs {pn}");
                }
            }
        }
    }

    #[test]
    fn sampler_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let e = FunctionalModelB::elliptical(0.0).unwrap();
        let mean_sq: f64 = (0..n)
            .map(|_| {
                let (u, v) = e.sample(&mut rng);
                u * u + v * v
            })
            .sum::<f64>()
            / n as f64;
        assert!((mean_sq - 1.0).abs() < 1e-12);
        let lp = FunctionalModelB::lp(2.0).unwrap().with_w(WLaw::arcsine());
        let pos = (0..n).filter(|_| lp.sample(&mut rng).0 > 0.0).count() as f64 / n as f64;
        assert!((pos - 0.5).abs() < 4.0 * (0.25 / n as f64).sqrt());
        // elliptical ρ: E[U₁U₂] = ρ E[U₁²] = ρ/2 and E[U₂²] = 1/2
        let m = FunctionalModelB::elliptical(0.5).unwrap();
        let draws: Vec<(f64, f64)> = (0..n).map(|_| m.sample(&mut rng)).collect();
        let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for (x, y) in &draws {
            sxy += x * y;
            sxx += x * x;
            syy += y * y;
        }
        let corr = sxy / (sxx * syy).sqrt();
        assert!((corr - 0.5).abs() < 0.01, "{corr}");
    }

    #[test]
    fn conditional_marginals_match_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 200_000;
        for m in [
            FunctionalModelB::elliptical(0.5).unwrap(),
            FunctionalModelB::elliptical(-0.3).unwrap().with_signs([0.1, 0.2, 0.3, 0.4]).unwrap(),
            FunctionalModelB::lp(1.5).unwrap(),
        ] {
            let draws: Vec<(f64, f64)> = (0..n).map(|_| m.sample(&mut rng)).collect();
            for t in [0.2, 0.6, 0.9] {
                for margin in [Margin::X, Margin::Y] {
                    let p = m.conditional_marginal(margin, t, 1.0).unwrap();
                    let hits = draws.iter().filter(|d| if margin == Margin::Y { d.1 > t } else { d.0 > t }).count();
                    let phat = hits as f64 / n as f64;
                    let se = (p * (1.0 - p) / n as f64).sqrt().max(1e-6);
                    assert!((phat - p).abs() < 4.0 * se, "{} t={t} {margin:?}: {phat} vs {p}", m.label());
                }
                let p = m.conditional_joint(t, 0.5 * t, 1.0).unwrap();
                let hits = draws.iter().filter(|d| d.0 > t && d.1 > 0.5 * t).count();
                let phat = hits as f64 / n as f64;
                let se = (p * (1.0 - p) / n as f64).sqrt().max(1e-6);
                assert!((phat - p).abs() < 4.0 * se, "{} joint t={t}: {phat} vs {p}", m.label());
            }
        }
    }

    #[test]
    fn cusp_at_critical_point() {
        let m = FunctionalModelB::elliptical(0.3).unwrap().with_cusp_at_critical(0.8, 0.5).unwrap();
        let cd = m.solve_alpha(0.8).unwrap();
        assert!(!cd.density_case);
        assert_eq!(cd.gamma_a, 0.5);
        let s = 1e-6;
        let p = m.w.interval(cd.t0 + cd.k1 * s, cd.t0 + cd.k2 * s);
        assert!((p / s.sqrt() - cd.l_k).abs() < 1e-9 * cd.l_k);
    }

    #[test]
    fn marginal_tail_data() {
        let e = FunctionalModelB::elliptical(0.0).unwrap();
        assert_eq!(e.marginal_tail_data(Margin::X).unwrap(), (0.5, 0.5));
        assert_eq!(e.marginal_tail_data(Margin::Y).unwrap(), (0.5, 0.5));
        let e = FunctionalModelB::elliptical(0.5).unwrap();
        assert_eq!(e.marginal_tail_data(Margin::Y).unwrap(), (0.25, 0.5));
        assert!(FunctionalModelB::elliptical(-0.5).unwrap().marginal_tail_data(Margin::Y).is_err());
        // regular variation of P(z(W) > 1 - s)
        let r = e.marginal_level_prob(Margin::Y, 1e-8) / e.marginal_level_prob(Margin::Y, 1e-6);
        assert!((r - 0.1).abs() < 1e-3, "{r}");
    }
}

//! Reference values for finite-`x` tail probabilities: the mixture integral
//! `∫ q(r) dF(r)` by adaptive quadrature and by conditioned Monte Carlo.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::asymptotics::{Method, TailEstimate};
use crate::error::{invalid, Error, Result};
use crate::model::{Margin, Model};
use crate::numerics::quad::{integrate_try, Tolerance};
use crate::numerics::roots::bisect_predicate;
use crate::radial::RadialLaw;

/// Accuracy and sampling settings shared by the oracles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Relative tolerance of the quadrature oracle.
    pub rel_tol: f64,
    pub n_samples: usize,
    pub seed: u64,
    /// Number of independent random streams; fixes the reduction order.
    pub chunks: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-8, n_samples: 100_000, seed: 20_240_601, chunks: 64 }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) {
            return invalid(format!("rel_tol must lie in (0, 1e-2], got {}", self.rel_tol));
        }
        if self.n_samples < 1_000 {
            return invalid(format!("n_samples must be at least 1000, got {}", self.n_samples));
        }
        if self.chunks == 0 || self.chunks > self.n_samples {
            return invalid(format!("chunks must lie in [1, n_samples], got {}", self.chunks));
        }
        Ok(())
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.n_samples = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Smallest radius at which the conditional tail `q` becomes positive,
/// given a radius `lb` below which it vanishes.
pub fn support_start(q: &impl Fn(f64) -> Result<f64>, lb: f64) -> Result<f64> {
    if !(lb > 0.0 && lb.is_finite()) {
        return invalid(format!("support search needs a positive lower bound, got {lb}"));
    }
    let mut hi = lb;
    let mut found = false;
    for k in 0..120 {
        hi = lb * (1.0 + 1e-12 * 2f64.powi(k));
        if q(hi)? > 0.0 {
            found = true;
            break;
        }
    }
    if !found {
        return Err(Error::Degenerate(format!("exceedance probability vanishes for all radii up to {hi}")));
    }
    let mut failure = None;
    let r0 = bisect_predicate(
        |r| match q(r) {
            Ok(v) => v > 0.0,
            Err(e) => {
                failure = Some(e);
                true
            }
        },
        lb,
        hi,
        1e-15,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(r0),
    }
}

/// `∫_{r₀}^∞ q(r) dF(r)` with `r = r₀(1 + s/v(r₀))`, where `q` vanishes below
/// `lb`.
pub fn mixture_integral(
    radial: &RadialLaw,
    q: impl Fn(f64) -> Result<f64>,
    lb: f64,
    rel_tol: f64,
) -> Result<TailEstimate> {
    let r0 = support_start(&q, lb)?;
    let ln_sf0 = radial.ln_sf(r0);
    let ln_f0 = radial.ln_pdf(r0);
    let v0 = radial.v(r0);
    if !(ln_sf0.is_finite() && ln_f0.is_finite() && v0 > 0.0) {
        return Err(Error::Degenerate(format!("radial law underflows at r = {r0}")));
    }
    let r_of = |s: f64| r0 * (1.0 + s / v0);
    let integrand = |s: f64| -> Result<f64> {
        let r = r_of(s);
        let qv = q(r)?;
        if qv == 0.0 {
            return Ok(0.0);
        }
        Ok(qv * (radial.ln_pdf(r) - ln_f0).exp())
    };
    let tol = Tolerance::new(1e-300, 0.5 * rel_tol);
    let mut total = 0.0;
    let mut err = 0.0;
    let mut lo = 0.0;
    let mut hi = 32.0;
    let mut remainder = f64::INFINITY;
    for _ in 0..12 {
        let breaks: Vec<f64> = [0.125, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0]
            .iter()
            .map(|b| lo + b * (hi - lo) / 32.0)
            .collect();
        let piece = integrate_try(integrand, lo, hi, &breaks, tol, 2_000)?;
        total += piece.value;
        err += piece.error;
        remainder = (radial.ln_sf(r_of(hi)) - ln_sf0).exp();
        if total > 0.0 && remainder <= 1e-2 * rel_tol * total {
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if !(total > 0.0) || remainder > 1e-2 * rel_tol * total {
        return Err(Error::Truncation {
            partial: total * ln_sf0.exp(),
            reason: format!("remaining radial mass {remainder:e} relative to integral {total:e}"),
        });
    }
    Ok(TailEstimate {
        log_value: ln_sf0 + total.ln(),
        method: Method::Quadrature,
        error: Some((err + remainder) / total),
        components: vec![("survival(r0)".into(), ln_sf0), ("integral".into(), total.ln())],
    })
}

/// Exact `P(X > tx, Y > ty)` by quadrature.
pub fn quadrature_joint_tail_at(
    radial: &RadialLaw,
    model: &Model,
    tx: f64,
    ty: f64,
    cfg: &OracleConfig,
) -> Result<TailEstimate> {
    cfg.validate()?;
    let (b1, b2) = model.upper_bounds();
    let lb = (tx / b1).max(ty / b2);
    mixture_integral(radial, |r| model.conditional_joint(tx, ty, r), lb, cfg.rel_tol)
}

/// Exact `P(X > x(1+δ/v), Y > ax(1+η/v))` by quadrature.
pub fn quadrature_joint_tail(
    radial: &RadialLaw,
    model: &Model,
    a: f64,
    delta: f64,
    eta: f64,
    x: f64,
    cfg: &OracleConfig,
) -> Result<TailEstimate> {
    let (tx, ty) = model.thresholds(radial, a, delta, eta, x)?;
    quadrature_joint_tail_at(radial, model, tx, ty, cfg)
}

/// Exact marginal tail `P(X > t)` or `P(Y > t)` by quadrature.
pub fn quadrature_marginal_tail(
    radial: &RadialLaw,
    model: &Model,
    margin: Margin,
    t: f64,
    cfg: &OracleConfig,
) -> Result<TailEstimate> {
    cfg.validate()?;
    if !(t > 0.0) {
        return invalid(format!("marginal threshold must be positive, got {t}"));
    }
    let (b1, b2) = model.upper_bounds();
    let lb = t / if margin == Margin::X { b1 } else { b2 };
    mixture_integral(radial, |r| model.conditional_marginal(margin, t, r), lb, cfg.rel_tol)
}

/// The `t` with `ln P(margin > t) = ln_level`, from the quadrature marginal.
pub fn marginal_quantile(
    radial: &RadialLaw,
    model: &Model,
    margin: Margin,
    ln_level: f64,
    cfg: &OracleConfig,
) -> Result<f64> {
    if !(ln_level < 0.0 && ln_level.is_finite()) {
        return invalid(format!("log level must be negative and finite, got {ln_level}"));
    }
    let g = |t: f64| -> Result<f64> {
        Ok(quadrature_marginal_tail(radial, model, margin, t, cfg)?.log_value - ln_level)
    };
    // P(R U > t) <= F̄(t / sup U), so the radial quantile scaled by sup U is an upper bracket
    let (b1, b2) = model.upper_bounds();
    let bound = if margin == Margin::X { b1 } else { b2 };
    let mut hi = radial.quantile_ln_sf(ln_level)? * bound;
    let mut g_hi = g(hi)?;
    while g_hi > 0.0 {
        hi *= 1.5;
        g_hi = g(hi)?;
    }
    let mut lo = 0.5 * hi;
    let mut g_lo = g(lo)?;
    let mut guard = 0;
    while g_lo < 0.0 {
        hi = lo;
        g_hi = g_lo;
        lo *= 0.5;
        g_lo = g(lo)?;
        guard += 1;
        if guard > 200 {
            return Err(Error::Bracket(format!("cannot bracket marginal level {ln_level}")));
        }
    }
    // Illinois false position on the log scale
    let mut side = 0;
    for _ in 0..200 {
        let t = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
        let t = if t > lo && t < hi { t } else { 0.5 * (lo + hi) };
        let gt = g(t)?;
        if gt.abs() < 1e-13 || (hi - lo) < 1e-13 * hi {
            return Ok(t);
        }
        if gt > 0.0 {
            lo = t;
            g_lo = gt;
            if side == 1 {
                g_hi *= 0.5;
            }
            side = 1;
        } else {
            hi = t;
            g_hi = gt;
            if side == -1 {
                g_lo *= 0.5;
            }
            side = -1;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn uniform_open(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Sums of `f` and `f²` over `cfg.n_samples` draws, split into
/// `cfg.chunks` independent streams reduced in chunk order.
fn chunked_moments(
    cfg: &OracleConfig,
    f: impl Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
) -> Result<(f64, f64, usize)> {
    let n = cfg.n_samples;
    let k = cfg.chunks;
    let parts: Vec<Result<(f64, f64, usize)>> = (0..k)
        .into_par_iter()
        .map(|chunk| {
            let count = n / k + usize::from(chunk < n % k);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(chunk as u64);
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                let v = f(&mut rng)?;
                s1 += v;
                s2 += v * v;
            }
            Ok((s1, s2, count))
        })
        .collect();
    let mut acc = (0.0, 0.0, 0);
    for p in parts {
        let (a, b, c) = p?;
        acc.0 += a;
        acc.1 += b;
        acc.2 += c;
    }
    Ok(acc)
}

fn mc_estimate(ln_scale: f64, moments: (f64, f64, usize), what: &str) -> Result<TailEstimate> {
    let (s1, s2, n) = moments;
    let nf = n as f64;
    let mean = s1 / nf;
    if !(mean > 0.0) {
        return Err(Error::InsufficientSamples(format!("{what}: no sample hit the exceedance region")));
    }
    let var = ((s2 / nf - mean * mean) * nf / (nf - 1.0)).max(0.0);
    let se = (var / nf).sqrt();
    Ok(TailEstimate {
        log_value: ln_scale + mean.ln(),
        method: Method::MonteCarlo,
        error: Some(se / mean),
        components: vec![("survival(r0)".into(), ln_scale), ("mean".into(), mean.ln())],
    })
}

/// Conditional Monte Carlo `F̄(r₀) · mean q(R̃)`, `R̃ ~ R | R > r₀`.
pub fn mc_joint_tail_at(radial: &RadialLaw, model: &Model, tx: f64, ty: f64, cfg: &OracleConfig) -> Result<TailEstimate> {
    cfg.validate()?;
    let (b1, b2) = model.upper_bounds();
    let q = |r: f64| model.conditional_joint(tx, ty, r);
    let r0 = support_start(&q, (tx / b1).max(ty / b2))?;
    let moments = chunked_moments(cfg, |rng| {
        let r = radial.sample_conditional(r0, uniform_open(rng))?;
        q(r)
    })?;
    mc_estimate(radial.ln_sf(r0), moments, "conditional estimator")
}

pub fn mc_joint_tail(
    radial: &RadialLaw,
    model: &Model,
    a: f64,
    delta: f64,
    eta: f64,
    x: f64,
    cfg: &OracleConfig,
) -> Result<TailEstimate> {
    let (tx, ty) = model.thresholds(radial, a, delta, eta, x)?;
    mc_joint_tail_at(radial, model, tx, ty, cfg)
}

/// Indicator Monte Carlo drawing both `R̃` and the angular pair.
pub fn mc_joint_tail_indicator(
    radial: &RadialLaw,
    model: &Model,
    a: f64,
    delta: f64,
    eta: f64,
    x: f64,
    cfg: &OracleConfig,
) -> Result<TailEstimate> {
    cfg.validate()?;
    let (tx, ty) = model.thresholds(radial, a, delta, eta, x)?;
    let (b1, b2) = model.upper_bounds();
    let q = |r: f64| model.conditional_joint(tx, ty, r);
    let r0 = support_start(&q, (tx / b1).max(ty / b2))?;
    let moments = chunked_moments(cfg, |rng| {
        let r = radial.sample_conditional(r0, uniform_open(rng))?;
        let (u1, u2) = model.sample(rng);
        Ok(if r * u1 > tx && r * u2 > ty { 1.0 } else { 0.0 })
    })?;
    mc_estimate(radial.ln_sf(r0), moments, "indicator estimator")
}

/// One row of a [`ConvergenceTable`].
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub x: f64,
    pub approx: Result<TailEstimate>,
    pub oracle: Result<TailEstimate>,
}

impl ConvergenceRow {
    /// `approx / oracle`, or NaN when either failed.
    pub fn ratio(&self) -> f64 {
        match (&self.approx, &self.oracle) {
            (Ok(a), Ok(o)) => a.ratio(o),
            _ => f64::NAN,
        }
    }
}

/// Ratios of an approximation to an oracle along an increasing `x` grid.
#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// `|ratio - 1|` for every row.
    pub fn deviations(&self) -> Vec<f64> {
        self.rows.iter().map(|r| (r.ratio() - 1.0).abs()).collect()
    }

    /// `|ratio - 1|` is nonincreasing over the last three rows.
    pub fn trend_ok(&self) -> bool {
        self.trend_ok_within(0.0)
    }

    /// As [`Self::trend_ok`], ignoring increases of at most `slack`.
    pub fn trend_ok_within(&self, slack: f64) -> bool {
        let d = self.deviations();
        let tail = &d[d.len().saturating_sub(3)..];
        tail.iter().all(|v| v.is_finite()) && tail.windows(2).all(|w| w[1] <= w[0] + slack)
    }

    /// Largest reported relative error of the oracle over the last three rows.
    pub fn oracle_noise(&self) -> f64 {
        let n = self.rows.len();
        self.rows[n.saturating_sub(3)..]
            .iter()
            .filter_map(|r| r.oracle.as_ref().ok().and_then(|o| o.error))
            .fold(0.0, f64::max)
    }

    /// `|ratio - 1|` is strictly decreasing over the whole grid.
    pub fn strictly_decreasing(&self) -> bool {
        let d = self.deviations();
        d.iter().all(|v| v.is_finite()) && d.windows(2).all(|w| w[1] < w[0])
    }
}

/// Evaluates `approx` and `oracle` on every grid point (in parallel).
pub fn convergence_table(
    approx: impl Fn(f64) -> Result<TailEstimate> + Sync,
    oracle: impl Fn(f64) -> Result<TailEstimate> + Sync,
    x_grid: &[f64],
) -> Result<ConvergenceTable> {
    if x_grid.len() < 3 || x_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return invalid("x grid must be increasing with at least 3 points");
    }
    let rows = x_grid
        .par_iter()
        .map(|&x| ConvergenceRow { x, approx: approx(x), oracle: oracle(x) })
        .collect();
    Ok(ConvergenceTable { rows })
}

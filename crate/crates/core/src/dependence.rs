//! Conditional excess limits, tail dependence and the residual dependence
//! index.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::angular::AngularModelA;
use crate::asymptotics::j_integral;
use crate::error::{invalid, Error, Result};
use crate::functional::FunctionalModelB;
use crate::model::{Margin, Model};
use crate::numerics::quad::{integrate, Tolerance};
use crate::numerics::special::gamma;
use crate::oracle::{marginal_quantile, quadrature_joint_tail_at, support_start, OracleConfig};
use crate::radial::RadialLaw;

/// Limit law of the scaled excesses `(E₁, E₂)` of model B: independent
/// exponentials with rates `rate_x` and `rate_y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcessLimit {
    pub rate_x: f64,
    pub rate_y: f64,
    pub alpha: f64,
    pub c: f64,
    /// Description of the excess scaling `g(n)`.
    pub scaling: String,
}

impl ExcessLimit {
    /// `P(E₁ > s, E₂ > t) = exp(-s D - t D*)`.
    pub fn survival(&self, s: f64, t: f64) -> Result<f64> {
        if !(s >= 0.0 && t >= 0.0) {
            return invalid(format!("excess arguments must be nonnegative, got ({s}, {t})"));
        }
        Ok((-s * self.rate_x - t * self.rate_y).exp())
    }
}

/// `D = α/(ca+1)` and `D* = cα/(ca+1)`.
pub fn excess_limit_rates(model: &FunctionalModelB, a: f64) -> Result<ExcessLimit> {
    let cd = model.solve_alpha(a)?;
    let den = cd.c * a + 1.0;
    Ok(ExcessLimit {
        rate_x: cd.alpha / den,
        rate_y: cd.c * cd.alpha / den,
        alpha: cd.alpha,
        c: cd.c,
        scaling: format!("g(n) = w({} n)", cd.alpha),
    })
}

/// Limit survival `(s, t) ↦ J_{s, t/a} / J_{0,0}` of the excesses
/// `(w(x)(X - x), w(x)(Y - ax))` under model A.
#[derive(Debug, Clone, Copy)]
pub struct Theorem1ExcessLimit {
    model: AngularModelA,
    a: f64,
    j00: f64,
}

impl Theorem1ExcessLimit {
    pub fn survival(&self, s: f64, t: f64) -> Result<f64> {
        if !(s >= 0.0 && t >= 0.0) {
            return invalid(format!("excess arguments must be nonnegative, got ({s}, {t})"));
        }
        Ok(j_integral(&self.model, self.a, s, t / self.a)? / self.j00)
    }
}

pub fn theorem1_excess_limit(model: &AngularModelA, a: f64) -> Result<Theorem1ExcessLimit> {
    let j00 = j_integral(model, a, 0.0, 0.0)?;
    Ok(Theorem1ExcessLimit { model: *model, a, j00 })
}

/// Simulated scaled excesses over `(x, ax)` and their fit to the limit law.
#[derive(Debug, Clone)]
pub struct ExcessReport {
    pub x: f64,
    pub limit: ExcessLimit,
    /// Number of draws with positive weight.
    pub accepted: usize,
    pub effective_size: f64,
    pub ks_x: f64,
    pub ks_y: f64,
    pub correlation: f64,
    /// `(s, P̂(E₁ > s), P̂(E₂ > s), P̂(E₁ > s, E₂ > s))`.
    pub grid: Vec<(f64, f64, f64, f64)>,
}

/// Weighted conditioned simulation of `(X, Y) | X > x, Y > ax`: the radius is
/// drawn from `R | R > r₀`, `W` from its law restricted to the exceedance
/// set, and each draw carries weight `P(exceedance | R)`.
pub fn excess_empirical(
    radial: &RadialLaw,
    model: &FunctionalModelB,
    a: f64,
    x: f64,
    cfg: &OracleConfig,
) -> Result<ExcessReport> {
    cfg.validate()?;
    let limit = excess_limit_rates(model, a)?;
    let cd = model.solve_alpha(a)?;
    if !cd.density_case {
        return Err(Error::Unsupported("excess limit needs a continuous density of W at 1/alpha".into()));
    }
    let (tx, ty) = (x, a * x);
    let g = radial.w(cd.alpha * x);
    let q = |r: f64| model.conditional_joint(tx, ty, r);
    let (_, b2) = model.upper_bounds();
    let r0 = support_start(&q, (tx).max(ty / b2))?;
    let n = cfg.n_samples;
    let k = cfg.chunks;
    let rho = model.rho();
    let parts: Vec<Result<Vec<(f64, f64, f64)>>> = (0..k)
        .into_par_iter()
        .map(|chunk| {
            let count = n / k + usize::from(chunk < n % k);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(chunk as u64);
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                let u: f64 = 1.0 - rng.random::<f64>();
                let r = radial.sample_conditional(r0, u.min(1.0 - f64::EPSILON))?;
                let pieces = model.joint_pieces(tx, ty, r);
                let total: f64 = pieces.iter().map(|p| p.2).sum();
                if !(total > 0.0) {
                    continue;
                }
                let pick = rng.random::<f64>() * total;
                let mut acc = 0.0;
                let mut chosen = pieces[pieces.len() - 1];
                for p in &pieces {
                    acc += p.2;
                    if pick < acc {
                        chosen = *p;
                        break;
                    }
                }
                let ((_, s2), (lo, hi), _) = chosen;
                let w = model.sample_w_between(lo, hi, rng.random());
                let xs = r * w;
                let ys = r * (rho * w + s2 * model.zstar(w));
                out.push(((xs - tx) * g, (ys - ty) * g, total));
            }
            Ok(out)
        })
        .collect();
    let mut draws = Vec::with_capacity(n);
    for p in parts {
        draws.extend(p?);
    }
    let sw: f64 = draws.iter().map(|d| d.2).sum();
    let sw2: f64 = draws.iter().map(|d| d.2 * d.2).sum();
    let ess = sw * sw / sw2;
    if !(ess >= 1_000.0) {
        return Err(Error::InsufficientSamples(format!(
            "effective sample size {ess:.0} below 1000; increase n_samples or lower x"
        )));
    }
    let ex: Vec<(f64, f64)> = draws.iter().map(|d| (d.0, d.2)).collect();
    let ey: Vec<(f64, f64)> = draws.iter().map(|d| (d.1, d.2)).collect();
    let ks_x = weighted_ks_exp(ex, limit.rate_x);
    let ks_y = weighted_ks_exp(ey, limit.rate_y);
    let (mx, my) = draws.iter().fold((0.0, 0.0), |acc, d| (acc.0 + d.2 * d.0 / sw, acc.1 + d.2 * d.1 / sw));
    let (mut cxy, mut cxx, mut cyy) = (0.0, 0.0, 0.0);
    for d in &draws {
        cxy += d.2 * (d.0 - mx) * (d.1 - my);
        cxx += d.2 * (d.0 - mx).powi(2);
        cyy += d.2 * (d.1 - my).powi(2);
    }
    let grid = [0.25, 0.5, 1.0, 2.0, 3.0]
        .iter()
        .map(|&s| {
            let fx = |v: f64| if v > s { 1.0 } else { 0.0 };
            let (mut px, mut py, mut pj) = (0.0, 0.0, 0.0);
            for d in &draws {
                px += d.2 * fx(d.0);
                py += d.2 * fx(d.1);
                pj += d.2 * fx(d.0) * fx(d.1);
            }
            (s, px / sw, py / sw, pj / sw)
        })
        .collect();
    Ok(ExcessReport {
        x,
        limit,
        accepted: draws.len(),
        effective_size: ess,
        ks_x,
        ks_y,
        correlation: cxy / (cxx * cyy).sqrt(),
        grid,
    })
}

/// Kolmogorov distance between a weighted sample and `Exp(rate)`.
fn weighted_ks_exp(mut sample: Vec<(f64, f64)>, rate: f64) -> f64 {
    sample.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = sample.iter().map(|s| s.1).sum();
    let mut cum = 0.0;
    let mut ks: f64 = 0.0;
    for (v, w) in sample {
        let f = if v > 0.0 { -(-rate * v).exp_m1() } else { 0.0 };
        ks = ks.max((f - cum / total).abs());
        cum += w;
        ks = ks.max((f - cum / total).abs());
    }
    ks
}

/// `S(x, y) = Γ(γ₁+γ₂+1)⁻¹ ∫₀^∞ (t + ln x)₊^{γ₁} (t + ln y)₊^{γ₂} e^{-t} dt`.
pub fn fgm_s_limit(x: f64, y: f64, gamma1: f64, gamma2: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return invalid(format!("arguments must be positive, got ({x}, {y})"));
    }
    if !(gamma1 >= 0.0 && gamma2 >= 0.0) {
        return invalid("exponents must be nonnegative");
    }
    let (lx, ly) = (x.ln(), y.ln());
    let pos = |m: f64, g: f64| {
        if m <= 0.0 {
            0.0
        } else if g == 0.0 {
            1.0
        } else {
            m.powf(g)
        }
    };
    let start = 0f64.max(-lx).max(-ly);
    let end = start + 60.0 + 4.0 * (gamma1 + gamma2);
    let mut breaks = vec![-lx, -ly, start + 1.0, start + 5.0, start + 20.0];
    breaks.retain(|b| *b > start && *b < end);
    breaks.sort_by(f64::total_cmp);
    let r = integrate(
        |t| pos(t + lx, gamma1) * pos(t + ly, gamma2) * (-t).exp(),
        start,
        end,
        &breaks,
        Tolerance::new(1e-300, 1e-13),
        2_000,
    )?;
    Ok(r.value / gamma(gamma1 + gamma2 + 1.0))
}

/// Where a residual dependence index came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexSource {
    ClosedForm,
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualIndex {
    pub eta: f64,
    pub source: IndexSource,
}

/// `η = α_ρ^{-λ}` at level `a = 1`, with `λ` the Weibull-type index of `R`.
pub fn residual_index_model_b(model: &FunctionalModelB, radial: &RadialLaw) -> Result<ResidualIndex> {
    let lambda = radial.weibull_index();
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Unsupported(format!("radial law {} has no Weibull-type index", radial.label())));
    }
    let alpha = model.solve_alpha(1.0)?.alpha;
    Ok(ResidualIndex { eta: alpha.powf(-lambda), source: IndexSource::ClosedForm })
}

/// Regression of `ln P(X > b₁(u), Y > b₂(u))` on `ln u`.
#[derive(Debug, Clone)]
pub struct EtaFit {
    pub index: ResidualIndex,
    pub slope: f64,
    /// `(u, b₁(u), b₂(u), ln P(X > b₁, Y > b₂))`.
    pub points: Vec<(f64, f64, f64, f64)>,
    /// First grid index used by the regression.
    pub first_used: usize,
    /// `w(b₂)(b₂ - b₁)` at the largest `u`; reported, never used in `η`.
    pub b_gap: f64,
}

/// Least-squares slope of `ys` on `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Degenerate("regression needs at least two paired points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) || !sxy.is_finite() {
        return Err(Error::Degenerate("regressor has no spread".into()));
    }
    Ok(sxy / sxx)
}

/// `η` from a fit of the slope `-1/η` of `ln S_u(1,1)`, regressing over the
/// largest `u` from the point where consecutive local slopes agree within 5%.
pub fn eta_from_log_curve(ln_u: &[f64], ln_p: &[f64]) -> Result<(f64, f64, usize)> {
    let n = ln_u.len();
    if n < 3 {
        return Err(Error::Degenerate("need at least three grid points".into()));
    }
    let local: Vec<f64> = (1..n).map(|i| (ln_p[i] - ln_p[i - 1]) / (ln_u[i] - ln_u[i - 1])).collect();
    let mut first = n - 3;
    for i in 0..local.len() - 1 {
        if (local[i + 1] - local[i]).abs() <= 0.05 * local[i].abs() {
            first = i.min(n - 3);
            break;
        }
    }
    let slope = ols_slope(&ln_u[first..], &ln_p[first..])?;
    if !(slope < 0.0) {
        return Err(Error::Degenerate(format!("log tail does not decrease in u (slope {slope})")));
    }
    Ok((-1.0 / slope, slope, first))
}

/// Empirical `η` from exact quadrature of `P(X > b₁(u), Y > b₂(u))` with
/// `b_i` the marginal quantiles at level `1/u`.
pub fn empirical_eta(radial: &RadialLaw, model: &Model, u_grid: &[f64], cfg: &OracleConfig) -> Result<EtaFit> {
    if u_grid.len() < 5 {
        return invalid("u grid needs at least 5 points");
    }
    if u_grid.iter().any(|u| !(*u > 1.0)) || u_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return invalid("u grid must be increasing and above 1");
    }
    let points: Vec<Result<(f64, f64, f64, f64)>> = u_grid
        .par_iter()
        .map(|&u| {
            let lvl = -u.ln();
            let b1 = marginal_quantile(radial, model, Margin::X, lvl, cfg)?;
            let b2 = marginal_quantile(radial, model, Margin::Y, lvl, cfg)?;
            let p = quadrature_joint_tail_at(radial, model, b1, b2, cfg)?;
            Ok((u, b1, b2, p.log_value))
        })
        .collect();
    let points: Vec<(f64, f64, f64, f64)> = points.into_iter().collect::<Result<_>>()?;
    let ln_u: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ln_p: Vec<f64> = points.iter().map(|p| p.3).collect();
    let (eta, slope, first_used) = eta_from_log_curve(&ln_u, &ln_p)?;
    let last = points[points.len() - 1];
    let b_gap = radial.w(last.2) * (last.2 - last.1);
    Ok(EtaFit { index: ResidualIndex { eta, source: IndexSource::Empirical }, slope, points, first_used, b_gap })
}

/// Finite-`u` tail dependence ratio
/// `P(G₁(X) > 1 - s/u, G₂(Y) > 1 - t/u) / (min(s, t)/u)`.
pub fn tail_dependence_l(radial: &RadialLaw, model: &Model, s: f64, t: f64, u: f64, cfg: &OracleConfig) -> Result<f64> {
    if !(s > 0.0 && t > 0.0) || !(u > s.max(t)) {
        return invalid(format!("need s, t > 0 and u > max(s, t), got s = {s}, t = {t}, u = {u}"));
    }
    let b1 = marginal_quantile(radial, model, Margin::X, (s / u).ln(), cfg)?;
    let b2 = marginal_quantile(radial, model, Margin::Y, (t / u).ln(), cfg)?;
    let p = quadrature_joint_tail_at(radial, model, b1, b2, cfg)?;
    Ok((p.log_value + u.ln() - s.min(t).ln()).exp())
}

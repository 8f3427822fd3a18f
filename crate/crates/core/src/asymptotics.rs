//! First-order tail approximations assembled in log space.

use std::f64::consts::PI;
use std::fmt;

use crate::angular::AngularModelA;
use crate::error::{invalid, Error, Result};
use crate::functional::{FunctionalModelB, ZShape};
use crate::model::Margin;
use crate::numerics::quad::{integrate, Tolerance};
use crate::numerics::special::ln_gamma;
use crate::radial::RadialLaw;

/// How a [`TailEstimate`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ModelA,
    ModelB,
    EllipticalClosed,
    LpClosed,
    Marginal,
    Quadrature,
    MonteCarlo,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::ModelA => "model_a",
            Self::ModelB => "model_b",
            Self::EllipticalClosed => "elliptical_closed",
            Self::LpClosed => "lp_closed",
            Self::Marginal => "marginal",
            Self::Quadrature => "quadrature",
            Self::MonteCarlo => "monte_carlo",
        };
        f.write_str(s)
    }
}

/// A tail probability held as a natural logarithm, with the named log
/// factors it was assembled from.
#[derive(Debug, Clone, PartialEq)]
pub struct TailEstimate {
    pub log_value: f64,
    pub method: Method,
    /// Relative error bound (quadrature) or relative standard error (Monte
    /// Carlo).
    pub error: Option<f64>,
    pub components: Vec<(String, f64)>,
}

impl TailEstimate {
    /// Builds an estimate whose log value is the sum of the components.
    pub fn from_components(method: Method, components: Vec<(String, f64)>) -> Self {
        let log_value = components.iter().map(|(_, v)| v).sum();
        Self { log_value, method, error: None, components }
    }

    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }

    pub fn log10(&self) -> f64 {
        self.log_value / std::f64::consts::LN_10
    }

    /// Ratio `self / other` computed in log space.
    pub fn ratio(&self, other: &TailEstimate) -> f64 {
        (self.log_value - other.log_value).exp()
    }
}

fn comp(name: &str, ln: f64) -> (String, f64) {
    (name.to_string(), ln)
}

const J_TOL: Tolerance = Tolerance::new(1e-300, 1e-13);

/// `J_{δ,η} = ∫_δ^∞ ξ_a(s, δ, η) e^{-s} ds`.
///
/// The shifts may be negative, which is how `J_{0, η-δ}` with `η < δ` is
/// evaluated.
pub fn j_integral(model: &AngularModelA, a: f64, delta: f64, eta: f64) -> Result<f64> {
    if !delta.is_finite() || !eta.is_finite() {
        return invalid("J needs finite shifts");
    }
    let gamma = model.limit_data(a)?.gamma;
    let start = delta;
    let base = delta.max(eta).max(start);
    let end = base + 60.0 + 4.0 * gamma;
    let mut breaks: Vec<f64> = model.xi_kinks(a, delta, eta);
    breaks.extend([base + 1.0, base + 4.0, base + 12.0, base + 30.0]);
    breaks.retain(|b| *b > start && *b < end);
    breaks.sort_by(f64::total_cmp);
    let mut err = None;
    let r = integrate(
        |s| match model.xi(a, s, delta, eta) {
            Ok(v) => v * (-s).exp(),
            Err(e) => {
                err = Some(e);
                0.0
            }
        },
        start,
        end,
        &breaks,
        J_TOL,
        4_000,
    )?;
    if let Some(e) = err {
        return Err(e);
    }
    if !(r.value > 0.0) {
        return Err(Error::Degenerate(format!("J integral is not positive: {}", r.value)));
    }
    Ok(r.value)
}

/// `J_{δ,η} L_a(1/v(x)) v(x)^{-γ} F̄(x)`.
pub fn theorem1_approx(
    radial: &RadialLaw,
    model: &AngularModelA,
    a: f64,
    delta: f64,
    eta: f64,
    x: f64,
) -> Result<TailEstimate> {
    check_x(x)?;
    if !(delta >= 0.0 && eta >= 0.0) {
        return invalid(format!("shifts must be nonnegative, got ({delta}, {eta})"));
    }
    let ld = model.limit_data(a)?;
    let j = j_integral(model, a, delta, eta)?;
    let v = radial.v(x);
    let l = ld.l_a(1.0 / v);
    Ok(TailEstimate::from_components(
        Method::ModelA,
        vec![
            comp("J", j.ln()),
            comp("L_a(1/v)", l.ln()),
            comp("v^-gamma", -ld.gamma * v.ln()),
            comp("survival", radial.ln_sf(x)),
        ],
    ))
}

/// Tail of `R U₁` when `P(U₁ > 1 - s) = s^γ L(s)`:
/// `Γ(γ+1) L(1/v(x)) v(x)^{-γ} F̄(x)`.
pub fn berman_marginal(radial: &RadialLaw, gamma: f64, l: impl Fn(f64) -> f64, x: f64) -> Result<TailEstimate> {
    check_x(x)?;
    if !(gamma >= 0.0) {
        return invalid(format!("gamma must be nonnegative, got {gamma}"));
    }
    let v = radial.v(x);
    Ok(TailEstimate::from_components(
        Method::Marginal,
        vec![
            comp("gamma(g+1)", ln_gamma(gamma + 1.0)),
            comp("L(1/v)", l(1.0 / v).ln()),
            comp("v^-gamma", -gamma * v.ln()),
            comp("survival", radial.ln_sf(x)),
        ],
    ))
}

/// `p₁₁ Γ(γ_a+1) L_{K₁,K₂} v(αx)^{-γ_a} F̄(αx)`; with a density at `1/α` this
/// is `p₁₁ h(1/α) (ca+1)/α · F̄(αx)/v(αx)`.
pub fn model_b_approx(radial: &RadialLaw, model: &FunctionalModelB, a: f64, x: f64) -> Result<TailEstimate> {
    check_x(x)?;
    let cd = model.solve_alpha(a)?;
    let xs = cd.alpha * x;
    let v = radial.v(xs);
    Ok(TailEstimate::from_components(
        Method::ModelB,
        vec![
            comp("p11", model.p11().ln()),
            comp("gamma(g_a+1)", ln_gamma(cd.gamma_a + 1.0)),
            comp("L_K1K2", cd.l_k.ln()),
            comp("v^-gamma_a", -cd.gamma_a * v.ln()),
            comp("survival(alpha x)", radial.ln_sf(xs)),
        ],
    ))
}

/// Shifted version of [`model_b_approx`] in the density case:
/// `p₁₁ (h(1/α)/α) (ca+1) exp(-(caη+δ)/(ca+1)) F̄(αx)/v(αx)`.
pub fn model_b_excess_approx(
    radial: &RadialLaw,
    model: &FunctionalModelB,
    a: f64,
    delta: f64,
    eta: f64,
    x: f64,
) -> Result<TailEstimate> {
    check_x(x)?;
    if !(delta >= 0.0 && eta >= 0.0) {
        return invalid(format!("shifts must be nonnegative, got ({delta}, {eta})"));
    }
    let cd = model.solve_alpha(a)?;
    if !cd.density_case {
        return Err(Error::Unsupported(
            "shifted approximation needs a continuous density of W at 1/alpha".into(),
        ));
    }
    let xs = cd.alpha * x;
    let ca1 = cd.c * a + 1.0;
    Ok(TailEstimate::from_components(
        Method::ModelB,
        vec![
            comp("p11", model.p11().ln()),
            comp("h(1/alpha)/alpha", (model.w_law().density(cd.t0) / cd.alpha).ln()),
            comp("ca+1", ca1.ln()),
            comp("shift", -(cd.c * a * eta + delta) / ca1),
            comp("1/v(alpha x)", -radial.v(xs).ln()),
            comp("survival(alpha x)", radial.ln_sf(xs)),
        ],
    ))
}

/// `α_ρ` of the elliptical model in closed form.
pub fn elliptical_alpha(rho: f64, a: f64) -> f64 {
    (1.0 - 2.0 * a * rho + a * a).sqrt() / (1.0 - rho * rho).sqrt()
}

/// Elliptical joint tail with arcsine `W` and `p₁₁ = 1/4`:
/// `α²(1-ρ²)^{3/2} / (2π(1-aρ)(a-ρ)) · F̄(αx)/v(αx)`.
pub fn elliptical_closed_form(rho: f64, a: f64, radial: &RadialLaw, x: f64) -> Result<TailEstimate> {
    check_x(x)?;
    if !(rho > -1.0 && rho < 1.0) {
        return invalid(format!("rho must lie in (-1, 1), got {rho}"));
    }
    if !(a > rho && a <= 1.0 && a > 0.0) {
        return invalid(format!("the elliptical formula needs a in (max(rho, 0), 1], got a = {a}, rho = {rho}"));
    }
    let alpha = elliptical_alpha(rho, a);
    let rs = 1.0 - rho * rho;
    let coef = alpha * alpha * rs * rs.sqrt() / (2.0 * PI * (1.0 - a * rho) * (a - rho));
    let xs = alpha * x;
    Ok(TailEstimate::from_components(
        Method::EllipticalClosed,
        vec![
            comp("coefficient", coef.ln()),
            comp("1/v(alpha x)", -radial.v(xs).ln()),
            comp("survival(alpha x)", radial.ln_sf(xs)),
        ],
    ))
}

/// `L_p` joint tail
/// `p₁₁ α^{p-2} h(1/α) exp(-(δ + a^p η)/(1 + a^p)) F̄(αx)/(x w(αx))`
/// with `α = (1 + a^p)^{1/p}`.
pub fn lp_closed_form(
    model: &FunctionalModelB,
    a: f64,
    delta: f64,
    eta: f64,
    radial: &RadialLaw,
    x: f64,
) -> Result<TailEstimate> {
    check_x(x)?;
    let ZShape::Lp { p } = *model.shape() else {
        return invalid("lp_closed_form needs an Lp model");
    };
    if !(a > 0.0 && a <= 1.0) {
        return invalid(format!("level a must lie in (0, 1], got {a}"));
    }
    if !(delta >= 0.0 && eta >= 0.0) {
        return invalid(format!("shifts must be nonnegative, got ({delta}, {eta})"));
    }
    let ap = a.powf(p);
    let alpha = (1.0 + ap).powf(1.0 / p);
    let h = model.w_law().density(1.0 / alpha);
    let xs = alpha * x;
    Ok(TailEstimate::from_components(
        Method::LpClosed,
        vec![
            comp("p11", model.p11().ln()),
            comp("alpha^(p-2)", (p - 2.0) * alpha.ln()),
            comp("h(1/alpha)", h.ln()),
            comp("shift", -(delta + ap * eta) / (1.0 + ap)),
            comp("1/(x w(alpha x))", -(x * radial.w(xs)).ln()),
            comp("survival(alpha x)", radial.ln_sf(xs)),
        ],
    ))
}

/// Marginal tail `P(X > x)` or `P(Y > x)` of model B:
/// `coef · Γ(γ+1) · P(g(W) > 1 - 1/v(x)) · F̄(x)`.
pub fn marginal_tail_approx(radial: &RadialLaw, model: &FunctionalModelB, margin: Margin, x: f64) -> Result<TailEstimate> {
    check_x(x)?;
    let (coef, gamma) = model.marginal_tail_data(margin)?;
    let v = radial.v(x);
    let level = model.marginal_level_prob(margin, 1.0 / v);
    Ok(TailEstimate::from_components(
        Method::Marginal,
        vec![
            comp("sign probability", coef.ln()),
            comp("gamma(g+1)", ln_gamma(gamma + 1.0)),
            comp("P(g(W) > 1-1/v)", level.ln()),
            comp("survival", radial.ln_sf(x)),
        ],
    ))
}

fn check_x(x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return invalid(format!("x must be positive and finite, got {x}"));
    }
    Ok(())
}

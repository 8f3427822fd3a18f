//! A fast self-check of the library's invariants, usable from the command
//! line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::angular::AngularModelA;
use crate::asymptotics::{elliptical_closed_form, j_integral, lp_closed_form, model_b_approx};
use crate::dependence::{excess_limit_rates, fgm_s_limit, residual_index_model_b};
use crate::error::Result;
use crate::functional::FunctionalModelB;
use crate::model::Model;
use crate::numerics::special::gamma;
use crate::oracle::{mc_joint_tail, quadrature_joint_tail, OracleConfig};
use crate::radial::RadialLaw;

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn run(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match f() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check { name, passed: false, detail: format!("error: {e}") },
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

/// The angular models used by the checks.
pub fn shipped_models() -> Vec<Model> {
    vec![
        Model::A(AngularModelA::Degenerate),
        Model::A(AngularModelA::MinDominated { gamma1: 1.0 }),
        Model::A(AngularModelA::Fgm { k: 0.5, gamma1: 1.0, gamma2: 1.0 }),
        Model::A(AngularModelA::linear_combo(0.6, 0.4, 1.0, 1.0).expect("valid parameters")),
        Model::B(FunctionalModelB::elliptical(0.3).expect("valid rho")),
        Model::B(FunctionalModelB::lp(1.5).expect("valid p")),
    ]
}

/// Runs every check; `seed` drives the randomized ones.
pub fn run_all(seed: u64) -> Vec<Check> {
    let chi2 = RadialLaw::Chi { k: 2 };
    let mut out = vec![];

    out.push(run("radial closed forms", || {
        let dev = (chi2.ln_sf(2.0) + 2.0).abs()
            + (chi2.v(10.0) - 100.0).abs()
            + (chi2.quantile_b(2f64.exp())? - 2.0).abs();
        Ok((dev < 1e-12, format!("total deviation {dev:e}")))
    }));

    out.push(run("elliptical critical direction", || {
        let mut worst: f64 = 0.0;
        for rho in [-0.5, 0.0, 0.3, 0.7] {
            for a in [0.5, 0.8, 1.0] {
                if a <= rho {
                    continue;
                }
                let cd = FunctionalModelB::elliptical(rho)?.solve_alpha(a)?;
                let alpha = (1.0 - 2.0 * a * rho + a * a).sqrt() / (1.0 - rho * rho).sqrt();
                let c = (a - rho) / (1.0 - a * rho);
                worst = worst.max((cd.alpha - alpha).abs()).max((cd.c - c).abs());
            }
        }
        Ok((worst < 1e-10, format!("max deviation {worst:e}")))
    }));

    out.push(run("reduction identities", || {
        let mut worst: f64 = 0.0;
        for (rho, a) in [(0.0, 1.0), (0.3, 0.8), (0.5, 0.9)] {
            let m = FunctionalModelB::elliptical(rho)?;
            let b = model_b_approx(&chi2, &m, a, 7.0)?;
            worst = worst.max((b.ratio(&elliptical_closed_form(rho, a, &chi2, 7.0)?) - 1.0).abs());
        }
        for (p, a) in [(1.0, 1.0), (2.0, 0.8), (3.0, 0.5)] {
            let m = FunctionalModelB::lp(p)?;
            let b = model_b_approx(&chi2, &m, a, 7.0)?;
            worst = worst.max((b.ratio(&lp_closed_form(&m, a, 0.0, 0.0, &chi2, 7.0)?) - 1.0).abs());
        }
        Ok((worst < 1e-10, format!("max relative deviation {worst:e}")))
    }));

    out.push(run("J identities", || {
        let mut worst: f64 = 0.0;
        for g in [0.0, 0.5, 1.0, 2.0] {
            let m = AngularModelA::MinDominated { gamma1: g };
            worst = worst.max((j_integral(&m, 1.0, 0.0, 0.0)? - gamma(g + 1.0)).abs());
        }
        let fgm = AngularModelA::Fgm { k: 0.5, gamma1: 1.0, gamma2: 2.0 };
        for d in [0.0, 0.5, 1.0] {
            for e in [0.0, 0.5 * d, d] {
                let lhs = j_integral(&fgm, 1.0, d, e)?;
                let rhs = (-d).exp() * j_integral(&fgm, 1.0, 0.0, e - d)?;
                worst = worst.max((lhs - rhs).abs());
            }
        }
        Ok((worst < 1e-8, format!("max deviation {worst:e}")))
    }));

    out.push(run("J bounded by gamma function", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fgm = AngularModelA::Fgm { k: 0.5, gamma1: 1.0, gamma2: 1.0 };
        let bound = gamma(3.0);
        for _ in 0..20 {
            let (d, e) = (3.0 * rng.random::<f64>(), 3.0 * rng.random::<f64>());
            if j_integral(&fgm, 1.0, d, e)? > bound {
                return Ok((false, format!("J({d}, {e}) exceeds the bound")));
            }
        }
        Ok((true, "20 random shifts".into()))
    }));

    out.push(run("FGM limit homogeneity", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let (x, y, c) = (rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>());
            let lhs = fgm_s_limit(c * x, c * y, 1.0, 1.0)?;
            worst = worst.max((lhs - c * fgm_s_limit(x, y, 1.0, 1.0)?).abs());
        }
        Ok((worst <= 1e-8, format!("max deviation {worst:e}")))
    }));

    out.push(run("excess rates", || {
        let lim = excess_limit_rates(&FunctionalModelB::elliptical(0.5)?, 1.0)?;
        let alt = (1.0 - 0.5) / (lim.alpha * 0.75);
        Ok(((lim.rate_x - alt).abs() < 1e-12 && (lim.rate_x - lim.rate_y).abs() < 1e-9, format!("D = {}", lim.rate_x)))
    }));

    out.push(run("residual index", || {
        let mut worst: f64 = 0.0;
        for rho in [0.0, 0.5] {
            let e = residual_index_model_b(&FunctionalModelB::elliptical(rho)?, &chi2)?;
            worst = worst.max((e.eta - (1.0 + rho) / 2.0).abs());
        }
        Ok((worst < 1e-10, format!("max deviation {worst:e}")))
    }));

    let cfg = OracleConfig { n_samples: 20_000, seed, ..OracleConfig::default() };
    out.push(run("oracle agreement", || {
        let mut worst: f64 = 0.0;
        for m in shipped_models() {
            let a = if matches!(m, Model::B(_)) { 0.8 } else { 1.0 };
            let q = quadrature_joint_tail(&chi2, &m, a, 0.0, 0.0, 4.0, &cfg)?;
            let mc = mc_joint_tail(&chi2, &m, a, 0.0, 0.0, 4.0, &cfg)?;
            let se = mc.error.unwrap_or(0.0);
            let z = if se > 0.0 {
                (mc.ratio(&q) - 1.0).abs() / se
            } else if rel(mc.value(), q.value()) < 1e-9 {
                0.0
            } else {
                f64::INFINITY
            };
            worst = worst.max(z);
        }
        Ok((worst < 4.0, format!("max |z| {worst:.2}")))
    }));

    out.push(run("oracle monotonicity and bound", || {
        let qcfg = OracleConfig::default();
        for m in shipped_models() {
            let a = if matches!(m, Model::B(_)) { 0.8 } else { 1.0 };
            let mut prev = f64::INFINITY;
            for x in [3.0, 4.0, 5.0] {
                let p = quadrature_joint_tail(&chi2, &m, a, 0.5, 0.5, x, &qcfg)?.log_value;
                let v = chi2.v(m.shift_scale(a, x)?);
                if !(p < prev) || p > chi2.ln_sf(x * (1.0 + 0.5 / v)) + 1e-12 {
                    return Ok((false, format!("{} fails at x = {x}", m.label())));
                }
                prev = p;
            }
        }
        Ok((true, "decreasing in x and below the radial bound".into()))
    }));

    out
}

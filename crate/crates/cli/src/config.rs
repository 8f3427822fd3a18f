use serde::Deserialize;

use scalemix_core::{AngularModelA, FunctionalModelB, Model, OracleConfig, RadialLaw, WLaw};

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub radial: RadialCfg,
    pub angular: Option<AngularCfg>,
    pub functional: Option<FunctionalCfg>,
    #[serde(default = "one")]
    pub a: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub eta: f64,
    #[serde(default = "default_x_grid")]
    pub x_grid: Vec<f64>,
    #[serde(default)]
    pub oracle: OracleCfg,
    #[serde(default)]
    pub excess: ExcessCfg,
    #[serde(default, rename = "eta_fit")]
    pub eta_fit: EtaCfg,
}

fn one() -> f64 {
    1.0
}

fn default_x_grid() -> Vec<f64> {
    vec![4.0, 6.0, 8.0, 10.0]
}

#[derive(Debug, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadialCfg {
    Chi { k: u32 },
    WeibullTail { theta: f64, tau: f64 },
    LogNormal { mu: f64, sigma: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum AngularCfg {
    Degenerate,
    MinDominated { gamma1: f64 },
    LinearCombo { lambda1: f64, lambda2: f64, gamma1: f64, gamma2: f64 },
    Fgm { k: f64, gamma1: f64, gamma2: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionalCfg {
    Elliptical {
        rho: f64,
        w: Option<WInput>,
        signs: Option<[f64; 4]>,
    },
    Lp {
        p: f64,
        w: Option<WInput>,
        signs: Option<[f64; 4]>,
    },
}

/// Either the shorthand `{ beta_alpha, beta_beta }`, read as `W^q ~ Beta`
/// with `q = p` for Lp shapes and `q = 2` for the elliptical shape, or a
/// tagged law.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum WInput {
    Beta(BetaShorthand),
    Law(WCfg),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaShorthand {
    pub beta_alpha: f64,
    pub beta_beta: f64,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case", deny_unknown_fields)]
pub enum WCfg {
    Arcsine,
    Uniform,
    BetaPower { power: f64, alpha: f64, beta: f64 },
    Cusp { center: f64, exponent: f64 },
    /// Cusp placed at `1/α` for the configured level `a`.
    CuspAtCritical { exponent: f64 },
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleCfg {
    #[serde(default = "default_method")]
    pub method: OracleMethod,
    pub rel_tol: Option<f64>,
    pub samples: Option<usize>,
    pub chunks: Option<usize>,
    pub seed: Option<u64>,
}

fn default_method() -> OracleMethod {
    OracleMethod::Quadrature
}

impl Default for OracleCfg {
    fn default() -> Self {
        Self { method: OracleMethod::Quadrature, rel_tol: None, samples: None, chunks: None, seed: None }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExcessCfg {
    #[serde(default = "default_excess_x")]
    pub x: Vec<f64>,
    #[serde(default = "default_excess_samples")]
    pub samples: usize,
}

fn default_excess_x() -> Vec<f64> {
    vec![5.0, 8.0, 10.0]
}

fn default_excess_samples() -> usize {
    200_000
}

impl Default for ExcessCfg {
    fn default() -> Self {
        Self { x: default_excess_x(), samples: default_excess_samples() }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtaCfg {
    #[serde(default = "default_u_grid")]
    pub u_grid: Vec<f64>,
}

fn default_u_grid() -> Vec<f64> {
    (0..9).map(|i| 10f64.powf(2.0 + 0.5 * i as f64)).collect()
}

impl Default for EtaCfg {
    fn default() -> Self {
        Self { u_grid: default_u_grid() }
    }
}

/// A validated experiment ready for dispatch.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub radial: RadialLaw,
    pub model: Model,
    pub a: f64,
    pub delta: f64,
    pub eta: f64,
    pub x_grid: Vec<f64>,
    pub method: OracleMethod,
    pub oracle: OracleConfig,
    pub excess_x: Vec<f64>,
    pub excess_samples: usize,
    pub u_grid: Vec<f64>,
}

fn cfg_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn w_law(w: &WCfg) -> Result<Option<WLaw>, CliError> {
    Ok(Some(match *w {
        WCfg::Arcsine => WLaw::arcsine(),
        WCfg::Uniform => WLaw::uniform(),
        WCfg::BetaPower { power, alpha, beta } => WLaw::beta_power(power, alpha, beta).map_err(cfg_err)?,
        WCfg::Cusp { center, exponent } => WLaw::cusp(center, exponent).map_err(cfg_err)?,
        WCfg::CuspAtCritical { .. } => return Ok(None),
    }))
}

fn functional_model(cfg: &FunctionalCfg, a: f64) -> Result<FunctionalModelB, CliError> {
    let (mut m, w, signs, power) = match cfg {
        FunctionalCfg::Elliptical { rho, w, signs } => (FunctionalModelB::elliptical(*rho), w, signs, 2.0),
        FunctionalCfg::Lp { p, w, signs } => (FunctionalModelB::lp(*p), w, signs, *p),
    };
    if let Some(s) = signs {
        m = m.and_then(|m| m.with_signs(*s));
    }
    let mut m = m.map_err(cfg_err)?;
    match w {
        None => {}
        Some(WInput::Beta(b)) => {
            m = m.with_w(WLaw::beta_power(power, b.beta_alpha, b.beta_beta).map_err(cfg_err)?);
        }
        Some(WInput::Law(w)) => {
            m = match (w_law(w)?, w) {
                (Some(law), _) => m.with_w(law),
                (None, WCfg::CuspAtCritical { exponent }) => {
                    m.with_cusp_at_critical(a, *exponent).map_err(cfg_err)?
                }
                (None, _) => unreachable!(),
            };
        }
    }
    Ok(m)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(cfg_err)
    }

    /// Range checks and model construction; `seed` overrides the oracle seed.
    pub fn build(&self, seed: Option<u64>) -> Result<Experiment, CliError> {
        let radial = match self.radial {
            RadialCfg::Chi { k } => RadialLaw::chi(k),
            RadialCfg::WeibullTail { theta, tau } => RadialLaw::weibull_tail(theta, tau),
            RadialCfg::LogNormal { mu, sigma } => RadialLaw::log_normal(mu, sigma),
        }
        .map_err(cfg_err)?;
        if !(self.a > 0.0 && self.a <= 1.0) {
            return Err(CliError::Config(format!("a must lie in (0, 1], got {}", self.a)));
        }
        if !(self.delta >= 0.0 && self.eta >= 0.0 && self.delta.is_finite() && self.eta.is_finite()) {
            return Err(CliError::Config(format!(
                "delta and eta must be finite and nonnegative, got ({}, {})",
                self.delta, self.eta
            )));
        }
        let model: Model = match (&self.angular, &self.functional) {
            (Some(a), None) => Model::A(
                match *a {
                    AngularCfg::Degenerate => Ok(AngularModelA::Degenerate),
                    AngularCfg::MinDominated { gamma1 } => AngularModelA::min_dominated(gamma1),
                    AngularCfg::LinearCombo { lambda1, lambda2, gamma1, gamma2 } => {
                        AngularModelA::linear_combo(lambda1, lambda2, gamma1, gamma2)
                    }
                    AngularCfg::Fgm { k, gamma1, gamma2 } => AngularModelA::fgm(k, gamma1, gamma2),
                }
                .map_err(cfg_err)?,
            ),
            (None, Some(f)) => Model::B(functional_model(f, self.a)?),
            _ => return Err(CliError::Config("exactly one of [angular] or [functional] must be given".into())),
        };
        let finite_positive = |v: &f64| v.is_finite() && *v > 0.0;
        if !self.x_grid.iter().all(finite_positive) || self.x_grid.is_empty() {
            return Err(CliError::Config("x_grid must be a nonempty list of positive numbers".into()));
        }
        if !self.excess.x.iter().all(finite_positive) {
            return Err(CliError::Config("excess.x must hold positive numbers".into()));
        }
        if self.eta_fit.u_grid.len() < 3 || !self.eta_fit.u_grid.iter().all(|u| u.is_finite() && *u > 1.0) {
            return Err(CliError::Config("eta_fit.u_grid needs at least 3 values above 1".into()));
        }
        let mut oracle = OracleConfig::default();
        if let Some(t) = self.oracle.rel_tol {
            oracle.rel_tol = t;
        }
        if let Some(n) = self.oracle.samples {
            oracle.n_samples = n;
        }
        if let Some(c) = self.oracle.chunks {
            oracle.chunks = c;
        }
        if let Some(s) = seed.or(self.oracle.seed) {
            oracle.seed = s;
        }
        oracle.validate().map_err(cfg_err)?;
        Ok(Experiment {
            radial,
            model,
            a: self.a,
            delta: self.delta,
            eta: self.eta,
            x_grid: self.x_grid.clone(),
            method: self.oracle.method,
            oracle,
            excess_x: self.excess.x.clone(),
            excess_samples: self.excess.samples,
            u_grid: self.eta_fit.u_grid.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "[radial]\nfamily = \"chi\"\nk = 2\n[functional]\nmodel = \"elliptical\"\nrho = 0.5\n";

    #[test]
    fn defaults_and_seed_override() {
        let cfg = ExperimentConfig::parse(BASE).unwrap();
        let e = cfg.build(None).unwrap();
        assert_eq!(e.a, 1.0);
        assert_eq!(e.x_grid, vec![4.0, 6.0, 8.0, 10.0]);
        assert_eq!(e.oracle.seed, OracleConfig::default().seed);
        assert_eq!(e.method, OracleMethod::Quadrature);
        assert_eq!(cfg.build(Some(11)).unwrap().oracle.seed, 11);
    }

    #[test]
    fn beta_shorthand_matches_tagged_form() {
        let lp = "[radial]\nfamily = \"chi\"\nk = 2\n[functional]\nmodel = \"lp\"\np = 2.0\n";
        let short = format!("{lp}w = {{ beta_alpha = 0.5, beta_beta = 0.5 }}\n");
        let long = format!("{lp}w = {{ law = \"beta_power\", power = 2.0, alpha = 0.5, beta = 0.5 }}\n");
        let w = |t: &str| match ExperimentConfig::parse(t).unwrap().build(None).unwrap().model {
            Model::B(m) => m.w_law(),
            Model::A(_) => panic!("expected a functional model"),
        };
        assert_eq!(w(&short), w(&long));
        assert_eq!(w(&short), WLaw::arcsine());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(ExperimentConfig::parse(&format!("{BASE}bogus = 1\n")), Err(CliError::Config(_))));
    }

    #[test]
    fn cusp_at_critical_resolves_against_a() {
        let text = format!("a = 0.8\n{BASE}w = {{ law = \"cusp_at_critical\", exponent = 0.5 }}\n");
        let e = ExperimentConfig::parse(&text).unwrap().build(None).unwrap();
        let Model::B(m) = e.model else { panic!("expected a functional model") };
        let cd = m.solve_alpha(0.8).unwrap();
        assert!(!cd.density_case);
    }
}

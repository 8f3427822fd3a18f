use scalemix_core::asymptotics::{elliptical_closed_form, lp_closed_form, model_b_approx, theorem1_approx};
use scalemix_core::dependence::{empirical_eta, excess_empirical, residual_index_model_b};
use scalemix_core::oracle::{convergence_table, mc_joint_tail, quadrature_joint_tail};
use scalemix_core::{verify, FunctionalModelB, Model, Result as CoreResult, TailEstimate, WLaw, ZShape};

use crate::config::{Experiment, OracleMethod};
use crate::error::CliError;
use crate::output::{log10_of_ln, num, Table};

/// Result of a command: the table, plus a failure to report after writing it.
pub struct Report {
    pub table: Table,
    pub failure: Option<CliError>,
}

impl From<Table> for Report {
    fn from(table: Table) -> Self {
        Self { table, failure: None }
    }
}

fn standard_elliptical(m: &FunctionalModelB) -> bool {
    matches!(m.shape(), ZShape::Elliptical) && m.w_law() == WLaw::arcsine() && m.signs() == [0.25; 4]
}

fn shifted(e: &Experiment) -> bool {
    e.delta != 0.0 || e.eta != 0.0
}

type Estimator<'a> = Box<dyn Fn(f64) -> CoreResult<TailEstimate> + Sync + 'a>;

/// Every approximation that applies to the configured model and thresholds.
fn approximations(e: &Experiment) -> Result<Vec<Estimator<'_>>, CliError> {
    let mut out: Vec<Estimator<'_>> = vec![];
    match &e.model {
        Model::A(m) => {
            m.supports_level(e.a)?;
            out.push(Box::new(move |x| theorem1_approx(&e.radial, m, e.a, e.delta, e.eta, x)));
        }
        Model::B(m) => {
            if matches!(m.shape(), ZShape::Lp { .. }) {
                out.push(Box::new(move |x| lp_closed_form(m, e.a, e.delta, e.eta, &e.radial, x)));
            }
            if !shifted(e) {
                out.push(Box::new(move |x| model_b_approx(&e.radial, m, e.a, x)));
                if standard_elliptical(m) {
                    let rho = m.rho();
                    out.push(Box::new(move |x| elliptical_closed_form(rho, e.a, &e.radial, x)));
                }
            }
            if out.is_empty() {
                return Err(CliError::Config(
                    "nonzero delta or eta under a functional model needs an lp shape".into(),
                ));
            }
        }
    }
    Ok(out)
}

pub fn approx(e: &Experiment) -> Result<Report, CliError> {
    let methods = approximations(e)?;
    let mut t = Table::new(vec!["x", "method", "value_log10", "components_ln"]);
    for &x in &e.x_grid {
        for f in &methods {
            let est = f(x)?;
            let comps: Vec<String> = est.components.iter().map(|(k, v)| format!("{k}={}", num(*v))).collect();
            t.push(vec![num(x), est.method.to_string(), log10_of_ln(est.log_value), comps.join(";")]);
        }
    }
    Ok(t.into())
}

fn oracle(e: &Experiment, x: f64) -> CoreResult<TailEstimate> {
    match e.method {
        OracleMethod::Quadrature => quadrature_joint_tail(&e.radial, &e.model, e.a, e.delta, e.eta, x, &e.oracle),
        OracleMethod::MonteCarlo => mc_joint_tail(&e.radial, &e.model, e.a, e.delta, e.eta, x, &e.oracle),
    }
}

pub fn compare(e: &Experiment) -> Result<Report, CliError> {
    if e.x_grid.len() < 3 || e.x_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Config("compare needs an increasing x_grid with at least 3 points".into()));
    }
    let approx = approximations(e)?.into_iter().next().expect("at least one approximation");
    let table = convergence_table(approx, |x| oracle(e, x), &e.x_grid)?;
    let trend = table.trend_ok_within(2.0 * table.oracle_noise());
    let mut t = Table::new(vec![
        "x",
        "approx_method",
        "approx_log10",
        "oracle_method",
        "oracle_log10",
        "oracle_rel_error",
        "ratio",
        "abs_deviation",
        "trend_ok",
    ]);
    for row in &table.rows {
        let a = row.approx.as_ref().map_err(|err| CliError::from(err.clone()))?;
        let o = row.oracle.as_ref().map_err(|err| CliError::from(err.clone()))?;
        let ratio = row.ratio();
        t.push(vec![
            num(row.x),
            a.method.to_string(),
            log10_of_ln(a.log_value),
            o.method.to_string(),
            log10_of_ln(o.log_value),
            o.error.map(num).unwrap_or_default(),
            num(ratio),
            num((ratio - 1.0).abs()),
            trend.to_string(),
        ]);
    }
    let failure = (!trend).then(|| {
        CliError::Trend(format!("|ratio - 1| increases over the last three grid points: {:?}", table.deviations()))
    });
    Ok(Report { table: t, failure })
}

pub fn excess(e: &Experiment) -> Result<Report, CliError> {
    let Model::B(m) = &e.model else {
        return Err(CliError::Config("excess runs need a [functional] model".into()));
    };
    let cfg = e.oracle.with_samples(e.excess_samples);
    let mut t = Table::new(vec![
        "x",
        "rate_x",
        "rate_y",
        "alpha",
        "c",
        "accepted",
        "effective_size",
        "ks_x",
        "ks_y",
        "correlation",
    ]);
    for &x in &e.excess_x {
        let r = excess_empirical(&e.radial, m, e.a, x, &cfg)?;
        t.push(vec![
            num(x),
            num(r.limit.rate_x),
            num(r.limit.rate_y),
            num(r.limit.alpha),
            num(r.limit.c),
            r.accepted.to_string(),
            num(r.effective_size),
            num(r.ks_x),
            num(r.ks_y),
            num(r.correlation),
        ]);
    }
    Ok(t.into())
}

pub fn eta(e: &Experiment) -> Result<Report, CliError> {
    let closed = match &e.model {
        Model::B(m) => Some(residual_index_model_b(m, &e.radial)?.eta),
        Model::A(_) => None,
    };
    let fit = empirical_eta(&e.radial, &e.model, &e.u_grid, &e.oracle)?;
    let emp = fit.index.eta;
    let mut t = Table::new(vec!["eta_closed", "eta_empirical", "abs_diff", "slope", "first_used", "points"]);
    t.push(vec![
        closed.map(num).unwrap_or_default(),
        num(emp),
        closed.map(|c| num((c - emp).abs())).unwrap_or_default(),
        num(fit.slope),
        fit.first_used.to_string(),
        fit.points.len().to_string(),
    ]);
    Ok(t.into())
}

pub fn verify(seed: u64) -> Report {
    let checks = verify::run_all(seed);
    let mut t = Table::new(vec!["check", "passed", "detail"]);
    for c in &checks {
        t.push(vec![c.name.to_string(), c.passed.to_string(), c.detail.clone()]);
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    let failure = (!failed.is_empty()).then(|| CliError::Trend(format!("failed checks: {}", failed.join(", "))));
    Report { table: t, failure }
}

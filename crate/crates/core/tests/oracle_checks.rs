use scalemix_core::asymptotics::{elliptical_alpha, marginal_tail_approx};
use scalemix_core::dependence::excess_limit_rates;
use scalemix_core::numerics::quad::{integrate, Tolerance};
use scalemix_core::oracle::{
    marginal_quantile, mc_joint_tail, mc_joint_tail_indicator, quadrature_joint_tail,
    quadrature_marginal_tail,
};
use scalemix_core::{AngularModelA, FunctionalModelB, Margin, Model, OracleConfig, RadialLaw};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

fn chi2() -> RadialLaw {
    RadialLaw::chi(2).unwrap()
}

fn gaussian_joint_tail(rho: f64, x: f64, y: f64) -> f64 {
    let n = Normal::standard();
    let s = (1.0 - rho * rho).sqrt();
    let f = |u: f64| n.pdf(u) * n.sf((y - rho * u) / s);
    integrate(f, x, x + 40.0, &[], Tolerance::rel(1e-12), 2000).unwrap().value
}

#[test]
fn elliptical_chi2_is_gaussian() {
    let r = chi2();
    let cfg = OracleConfig::default();
    let n = Normal::standard();
    for rho in [0.0, 0.3, 0.5, -0.4] {
        let m = Model::B(FunctionalModelB::elliptical(rho).unwrap());
        for x in [1.0, 3.0, 5.0] {
            let px = quadrature_marginal_tail(&r, &m, Margin::X, x, &cfg).unwrap().value();
            let py = quadrature_marginal_tail(&r, &m, Margin::Y, x, &cfg).unwrap().value();
            assert!((px / n.sf(x) - 1.0).abs() < 1e-7, "rho={rho} x={x}");
            assert!((py / n.sf(x) - 1.0).abs() < 1e-7, "rho={rho} x={x}");
        }
        if rho < 0.0 {
            continue;
        }
        for (a, x) in [(1.0, 2.0), (0.8, 4.0), (1.0, 6.0)] {
            let q = quadrature_joint_tail(&r, &m, a, 0.0, 0.0, x, &cfg).unwrap().value();
            let g = gaussian_joint_tail(rho, x, a * x);
            assert!((q / g - 1.0).abs() < 1e-6, "rho={rho} a={a} x={x}: {q} vs {g}");
        }
    }
}

#[test]
fn lp_two_is_independent_gaussian() {
    let r = chi2();
    let n = Normal::standard();
    let m = Model::B(FunctionalModelB::lp(2.0).unwrap());
    for (a, x) in [(1.0, 2.0), (0.5, 5.0)] {
        let q = quadrature_joint_tail(&r, &m, a, 0.0, 0.0, x, &OracleConfig::default()).unwrap().value();
        let g = n.sf(x) * n.sf(a * x);
        assert!((q / g - 1.0).abs() < 1e-7);
    }
}

#[test]
fn gaussian_excess_rates() {
    for (rho, a) in [(0.0, 1.0), (0.3, 0.8), (0.5, 1.0)] {
        let m = FunctionalModelB::elliptical(rho).unwrap();
        let lim = excess_limit_rates(&m, a).unwrap();
        let alpha = elliptical_alpha(rho, a);
        assert!((lim.alpha - alpha).abs() < 1e-10);
        let rx = (1.0 - a * rho) / ((1.0 - rho * rho) * alpha);
        let ry = (a - rho) / ((1.0 - rho * rho) * alpha);
        assert!((lim.rate_x - rx).abs() < 1e-6, "rho={rho}: {} vs {rx}", lim.rate_x);
        assert!((lim.rate_y - ry).abs() < 1e-6, "rho={rho}: {} vs {ry}", lim.rate_y);
    }
}

#[test]
fn indicator_and_rao_blackwell_agree() {
    let r = chi2();
    let cfg = OracleConfig::default().with_samples(400_000);
    let models: [(Model, f64); 3] = [
        (AngularModelA::fgm(0.5, 1.0, 1.0).unwrap().into(), 1.0),
        (FunctionalModelB::elliptical(0.3).unwrap().into(), 0.8),
        (AngularModelA::min_dominated(1.0).unwrap().into(), 1.0),
    ];
    for (m, a) in &models {
        let q = quadrature_joint_tail(&r, m, *a, 0.0, 0.0, 3.0, &cfg).unwrap();
        let ind = mc_joint_tail_indicator(&r, m, *a, 0.0, 0.0, 3.0, &cfg).unwrap();
        let rb = mc_joint_tail(&r, m, *a, 0.0, 0.0, 3.0, &cfg).unwrap();
        let z_ind = (ind.ratio(&q) - 1.0).abs() / ind.error.unwrap();
        let z_rb = (rb.ratio(&q) - 1.0).abs() / rb.error.unwrap();
        assert!(z_ind < 4.0 && z_rb < 4.0, "{}: {z_ind} {z_rb}", m.label());
        assert!(rb.error.unwrap() <= ind.error.unwrap());
    }
}

#[test]
fn marginal_quantile_inverts_marginal_tail() {
    let r = chi2();
    let cfg = OracleConfig::default();
    let m: Model = AngularModelA::fgm(0.5, 1.0, 2.0).unwrap().into();
    for ln_level in [-3.0, -10.0, -30.0] {
        for margin in [Margin::X, Margin::Y] {
            let t = marginal_quantile(&r, &m, margin, ln_level, &cfg).unwrap();
            let back = quadrature_marginal_tail(&r, &m, margin, t, &cfg).unwrap().log_value;
            assert!((back - ln_level).abs() < 1e-7);
        }
    }
}

#[test]
fn marginal_approximation_converges() {
    let r = chi2();
    let cfg = OracleConfig::default();
    let m = FunctionalModelB::lp(1.5).unwrap();
    let mm = Model::B(m.clone());
    let devs: Vec<f64> = [4.0, 8.0, 16.0]
        .iter()
        .map(|&x| {
            let q = quadrature_marginal_tail(&r, &mm, Margin::X, x, &cfg).unwrap();
            let ap = marginal_tail_approx(&r, &m, Margin::X, x).unwrap();
            (q.ratio(&ap) - 1.0).abs()
        })
        .collect();
    assert!(devs[2] < devs[0] && devs[2] < 0.1, "{devs:?}");
}

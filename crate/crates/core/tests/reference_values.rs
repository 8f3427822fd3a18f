use scalemix_core::numerics::special::{gamma, gamma_q, inc_beta_pair, ln_beta, ln_gamma, ln_normal_sf};
use scalemix_core::RadialLaw;
use statrs::distribution::{ChiSquared, ContinuousCDF, LogNormal, Normal, Weibull, Continuous};
use statrs::function::beta::{beta_reg, ln_beta as sr_ln_beta};
use statrs::function::gamma::{gamma_ur, ln_gamma as sr_ln_gamma};

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

#[test]
fn special_functions_match_statrs() {
    for x in [0.1, 0.5, 1.0, 1.5, 2.5, 7.0, 30.0] {
        assert!(close(ln_gamma(x), sr_ln_gamma(x), 1e-12) || (ln_gamma(x) - sr_ln_gamma(x)).abs() < 1e-13);
        assert!(close(gamma(x), statrs::function::gamma::gamma(x), 1e-12));
    }
    for (a, b) in [(0.5, 0.5), (1.0, 2.0), (3.5, 0.7)] {
        assert!((ln_beta(a, b) - sr_ln_beta(a, b)).abs() < 1e-12);
        for x in [0.05, 0.3, 0.5, 0.9] {
            let (p, q) = inc_beta_pair(a, b, x, 1.0 - x);
            assert!((p - beta_reg(a, b, x)).abs() < 1e-12);
            assert!((p + q - 1.0).abs() < 1e-14);
        }
    }
    for (a, x) in [(0.5, 0.1), (1.0, 3.0), (2.5, 4.0), (5.0, 2.0)] {
        assert!(close(gamma_q(a, x), gamma_ur(a, x), 1e-11), "a={a} x={x}: {} vs {}", gamma_q(a, x), gamma_ur(a, x));
    }
    let n = Normal::standard();
    for z in [-3.0, -1.0, 0.0, 1.0, 4.0, 8.0] {
        assert!(close(ln_normal_sf(z).exp(), n.sf(z), 1e-9), "z={z}: {:e} vs {:e}", ln_normal_sf(z).exp(), n.sf(z));
    }
}

#[test]
fn chi_survival_and_density_match_chi_squared() {
    for k in [1u32, 2, 3, 5] {
        let r = RadialLaw::chi(k).unwrap();
        let d = ChiSquared::new(k as f64).unwrap();
        for x in [0.3, 1.0, 2.0, 4.0, 6.0] {
            assert!(close(r.ln_sf(x).exp(), d.sf(x * x), 1e-10), "k={k} x={x}");
            assert!(close(r.ln_pdf(x).exp(), 2.0 * x * d.pdf(x * x), 1e-10), "k={k} x={x}");
        }
    }
}

#[test]
fn weibull_tail_matches_weibull() {
    let (theta, tau) = (0.7, 1.5);
    let r = RadialLaw::weibull_tail(theta, tau).unwrap();
    let d = Weibull::new(tau, theta.powf(-1.0 / tau)).unwrap();
    for x in [0.2, 1.0, 3.0, 5.0] {
        assert!(close(r.ln_sf(x).exp(), d.sf(x), 1e-12));
        assert!(close(r.ln_pdf(x).exp(), d.pdf(x), 1e-12));
        let q = r.quantile_ln_sf(d.sf(x).ln()).unwrap();
        assert!(close(q, x, 1e-9));
    }
}

#[test]
fn log_normal_matches_statrs() {
    let r = RadialLaw::log_normal(0.2, 0.6).unwrap();
    let d = LogNormal::new(0.2, 0.6).unwrap();
    for x in [0.5, 1.0, 4.0, 20.0] {
        assert!(close(r.ln_sf(x).exp(), d.sf(x), 1e-10));
        assert!(close(r.ln_pdf(x).exp(), d.pdf(x), 1e-10));
    }
    for u in [10.0, 1e3, 1e6] {
        let b = r.quantile_b(u).unwrap();
        assert!(close(d.sf(b), 1.0 / u, 1e-8));
    }
}

#[test]
fn chi_quantiles_match_inverse_cdf() {
    for k in [1u32, 3, 4] {
        let r = RadialLaw::chi(k).unwrap();
        let d = ChiSquared::new(k as f64).unwrap();
        for p in [0.5, 0.9, 0.999] {
            let b = r.quantile_b(1.0 / (1.0 - p)).unwrap();
            assert!(close(b * b, d.inverse_cdf(p), 1e-7), "k={k} p={p}");
        }
    }
}

#[test]
fn hazard_rate_is_density_over_survival() {
    for r in [
        RadialLaw::chi(3).unwrap(),
        RadialLaw::weibull_tail(1.2, 0.8).unwrap(),
        RadialLaw::log_normal(0.0, 1.0).unwrap(),
    ] {
        for x in [0.7, 2.0, 5.0] {
            let w = (r.ln_pdf(x) - r.ln_sf(x)).exp();
            assert!(close(r.w(x), w, 1e-9), "{} at {x}", r.label());
            assert!(close(r.v(x), x * w, 1e-9));
        }
    }
}

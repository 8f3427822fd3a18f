//! Fixtures shared by the benchmarks.

use scalemix_core::{AngularModelA, FunctionalModelB, Model, OracleConfig, RadialLaw};

pub fn chi2() -> RadialLaw {
    RadialLaw::chi(2).expect("valid degrees of freedom")
}

pub fn fgm() -> AngularModelA {
    AngularModelA::fgm(0.5, 1.0, 1.0).expect("valid parameters")
}

pub fn linear_combo() -> AngularModelA {
    AngularModelA::linear_combo(0.6, 0.4, 1.0, 1.0).expect("valid parameters")
}

pub fn elliptical() -> FunctionalModelB {
    FunctionalModelB::elliptical(0.3).expect("valid rho")
}

pub fn lp() -> FunctionalModelB {
    FunctionalModelB::lp(1.5).expect("valid p")
}

/// Model, level `a` and label for each benchmarked configuration.
pub fn configurations() -> Vec<(&'static str, Model, f64)> {
    vec![
        ("fgm", Model::A(fgm()), 1.0),
        ("linear_combo", Model::A(linear_combo()), 1.0),
        ("elliptical", Model::B(elliptical()), 0.8),
        ("lp", Model::B(lp()), 0.7),
    ]
}

pub fn small_mc() -> OracleConfig {
    OracleConfig::default().with_samples(20_000)
}

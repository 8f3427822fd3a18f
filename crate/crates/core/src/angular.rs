//! Angular dependence structures `(U₁, U₂)` for the unconstrained model:
//! `U₁ ∈ [0, 1]` with upper endpoint one and a local limit `ξ_a` of the
//! joint tail around the absorbing point `(1, a)`.
//!
//! All shipped instances use power marginals `P(S > 1 - s) = s^γ` on
//! `[0, 1]`, so the slowly varying factors are exactly computable.

use rand::{Rng, RngCore};

use crate::error::{invalid, Error, Result};
use crate::model::Margin;
use crate::numerics::quad::{integrate, Tolerance};

const XI_TOL: Tolerance = Tolerance::new(1e-14, 1e-12);

/// `P(S > u)` for `S` with `P(S > 1 - s) = s^γ`, `s ∈ [0, 1]`.
pub fn power_sf(gamma: f64, u: f64) -> f64 {
    if u >= 1.0 {
        0.0
    } else if u <= 0.0 || gamma == 0.0 {
        1.0
    } else {
        (1.0 - u).powf(gamma)
    }
}

/// `m₊^γ` with the convention `m₊^0 = 1{m > 0}`.
fn pos_pow(m: f64, gamma: f64) -> f64 {
    if m <= 0.0 {
        0.0
    } else if gamma == 0.0 {
        1.0
    } else {
        m.powf(gamma)
    }
}

fn power_draw(gamma: f64, rng: &mut dyn RngCore) -> f64 {
    if gamma == 0.0 {
        return 1.0;
    }
    let v: f64 = rng.random();
    1.0 - v.powf(1.0 / gamma)
}

fn check_level(a: f64) -> Result<()> {
    if !(a > 0.0 && a <= 1.0) {
        return invalid(format!("level a must lie in (0, 1], got {a}"));
    }
    Ok(())
}

fn check_gamma(name: &str, g: f64) -> Result<()> {
    if !(g >= 0.0 && g.is_finite()) {
        return invalid(format!("{name} must be a finite nonnegative number, got {g}"));
    }
    Ok(())
}

/// Linear combinations `U_i = λ_i S₁ + (1 - λ_i) S₂` of independent power
/// variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearCombo {
    pub lambda1: f64,
    pub lambda2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// `ξ̃(1, 0, 0)`, the normalizer of the limit function.
    norm: f64,
}

impl LinearCombo {
    pub fn new(lambda1: f64, lambda2: f64, gamma1: f64, gamma2: f64) -> Result<Self> {
        if !(lambda2 > 0.0 && lambda2 <= lambda1 && lambda1 < 1.0) {
            return invalid(format!(
                "linear combination needs 0 < lambda2 <= lambda1 < 1, got ({lambda1}, {lambda2})"
            ));
        }
        check_gamma("gamma1", gamma1)?;
        check_gamma("gamma2", gamma2)?;
        let mut lc = Self { lambda1, lambda2, gamma1, gamma2, norm: 1.0 };
        lc.norm = lc.xi_tilde(1.0, 0.0, 0.0)?;
        Ok(lc)
    }

    /// Normalizer `ξ̃(1, 0, 0) = γ₂ C_{γ₁,γ₂,λ₁,λ₂}` (equal to the limit
    /// directly when `γ₂ = 0`).
    pub fn normalizer(&self) -> f64 {
        self.norm
    }

    /// Largest `s` for which `P(U₁ > 1-s, U₂ > 1-s) = ξ̃(1,0,0) s^{γ₁+γ₂}`
    /// holds exactly.
    fn exact_radius(&self) -> f64 {
        self.lambda2.min(1.0 - self.lambda1)
    }

    /// `∫ φ(min((e₁ - λ̄₁z)/λ₁, (e₂ - λ̄₂z)/λ₂)) dG(z)` where `G` is the law of
    /// `T₂ = 1 - S₂` (`capped`) or its scaling limit `γ₂ z^{γ₂-1} dz` on
    /// `(0, ∞)`. `φ(m) = m₊^{γ₁}`, capped at one for the probability.
    fn mixture(&self, e1: f64, e2: f64, capped: bool) -> Result<f64> {
        let (l1, l2) = (self.lambda1, self.lambda2);
        let (b1, b2) = (1.0 - l1, 1.0 - l2);
        let g1 = self.gamma1;
        let g2 = self.gamma2;
        let m = |z: f64| ((e1 - b1 * z) / l1).min((e2 - b2 * z) / l2);
        let phi = |mv: f64| {
            let p = pos_pow(mv, g1);
            if capped { p.min(1.0) } else { p }
        };
        if e1 <= 0.0 || e2 <= 0.0 {
            return Ok(0.0);
        }
        if g2 == 0.0 {
            return Ok(phi(m(0.0)));
        }
        let mut z_max = (e1 / b1).min(e2 / b2);
        if capped {
            z_max = z_max.min(1.0);
        }
        let mut kinks_z = vec![];
        if l1 != l2 {
            kinks_z.push((l1 * e2 - l2 * e1) / (l1 - l2));
        }
        if capped {
            kinks_z.push((e1 - l1) / b1);
            kinks_z.push((e2 - l2) / b2);
        }
        let y_max = z_max.powf(g2);
        let kinks: Vec<f64> = kinks_z
            .into_iter()
            .filter(|z| *z > 0.0 && *z < z_max)
            .map(|z| z.powf(g2))
            .collect();
        let inv = 1.0 / g2;
        let r = integrate(|y| phi(m(y.powf(inv))), 0.0, y_max, &kinks, XI_TOL, 4_000)?;
        Ok(r.value)
    }

    /// Exact `P(U₁ > u₁, U₂ > u₂)`.
    pub fn joint_tail(&self, u1: f64, u2: f64) -> Result<f64> {
        self.mixture(1.0 - u1, 1.0 - u2, true)
    }

    /// The un-normalized limit
    /// `ξ̃(s,δ,η) = γ₂ ∫₀^∞ (max(0, min([s-δ-λ̄₁z]/λ₁, [s-η-λ̄₂z]/λ₂)))^{γ₁} z^{γ₂-1} dz`.
    pub fn xi_tilde(&self, s: f64, delta: f64, eta: f64) -> Result<f64> {
        self.mixture(s - delta, s - eta, false)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> (f64, f64) {
        let s1 = power_draw(self.gamma1, rng);
        let s2 = power_draw(self.gamma2, rng);
        (
            self.lambda1 * s1 + (1.0 - self.lambda1) * s2,
            self.lambda2 * s1 + (1.0 - self.lambda2) * s2,
        )
    }
}

/// `C_{γ₁,γ₂,λ₁,λ₂}` from its two-integral representation.
pub fn c_constant(gamma1: f64, gamma2: f64, lambda1: f64, lambda2: f64) -> Result<f64> {
    if !(lambda2 > 0.0 && lambda2 <= lambda1 && lambda1 < 1.0) {
        return invalid("c_constant needs 0 < lambda2 <= lambda1 < 1");
    }
    check_gamma("gamma1", gamma1)?;
    if !(gamma2 > 0.0 && gamma2.is_finite()) {
        return invalid(format!("c_constant needs gamma2 > 0, got {gamma2}"));
    }
    let (b1, b2) = (1.0 - lambda1, 1.0 - lambda2);
    // first piece with y = t^{γ₂}: ∫₀¹ (1 - λ̄₁ y^{1/γ₂})^{γ₁} dy / γ₂
    let inv = 1.0 / gamma2;
    let first = integrate(|y| pos_pow(1.0 - b1 * y.powf(inv), gamma1), 0.0, 1.0, &[], XI_TOL, 4_000)?;
    let second = integrate(
        |t| pos_pow(1.0 - b2 * t, gamma1) * t.powf(gamma2 - 1.0),
        1.0,
        1.0 / b2,
        &[],
        XI_TOL,
        4_000,
    )?;
    Ok(lambda1.powf(-gamma1) * first.value / gamma2 + lambda2.powf(-gamma1) * second.value)
}

/// Dependence model A for the angular pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngularModelA {
    /// `U₁ = U₂ = 1`.
    Degenerate,
    /// Power-tailed `U₁` with `U₂ = U₁^{1/2} ≥ U₁`.
    MinDominated { gamma1: f64 },
    LinearCombo(LinearCombo),
    /// FGM copula with parameter `K ∈ [0, 1)` over power marginals.
    Fgm { k: f64, gamma1: f64, gamma2: f64 },
}

/// Exponent and slowly varying factor of `P(U_a > 1 - s) = s^γ L_a(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitData {
    pub gamma: f64,
    pub a: f64,
    model: AngularModelA,
}

impl LimitData {
    /// `L_a(s)` for `s ∈ (0, 1]`.
    pub fn l_a(&self, s: f64) -> f64 {
        let a = self.a;
        match self.model {
            AngularModelA::Degenerate | AngularModelA::MinDominated { .. } => 1.0,
            AngularModelA::Fgm { k, gamma1, gamma2 } => {
                let g1 = s.powf(gamma1);
                if a == 1.0 {
                    let g2 = s.powf(gamma2);
                    1.0 + k * (1.0 - g1) * (1.0 - g2)
                } else {
                    let g2 = power_sf(gamma2, a * (1.0 - s));
                    g2 * (1.0 + k * (1.0 - g1) * (1.0 - g2))
                }
            }
            AngularModelA::LinearCombo(lc) => {
                if s <= lc.exact_radius() {
                    lc.norm
                } else {
                    lc.joint_tail(1.0 - s, 1.0 - s).map(|p| p / s.powf(self.gamma)).unwrap_or(f64::NAN)
                }
            }
        }
    }
}

impl AngularModelA {
    pub fn min_dominated(gamma1: f64) -> Result<Self> {
        check_gamma("gamma1", gamma1)?;
        Ok(Self::MinDominated { gamma1 })
    }

    pub fn linear_combo(lambda1: f64, lambda2: f64, gamma1: f64, gamma2: f64) -> Result<Self> {
        LinearCombo::new(lambda1, lambda2, gamma1, gamma2).map(Self::LinearCombo)
    }

    pub fn fgm(k: f64, gamma1: f64, gamma2: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&k) {
            return invalid(format!("FGM parameter must lie in [0, 1), got {k}"));
        }
        check_gamma("gamma1", gamma1)?;
        check_gamma("gamma2", gamma2)?;
        Ok(Self::Fgm { k, gamma1, gamma2 })
    }

    pub fn label(&self) -> String {
        match self {
            Self::Degenerate => "degenerate".into(),
            Self::MinDominated { gamma1 } => format!("min_dominated(gamma1={gamma1})"),
            Self::LinearCombo(lc) => format!(
                "linear_combo(lambda1={},lambda2={},gamma1={},gamma2={})",
                lc.lambda1, lc.lambda2, lc.gamma1, lc.gamma2
            ),
            Self::Fgm { k, gamma1, gamma2 } => format!("fgm(k={k},gamma1={gamma1},gamma2={gamma2})"),
        }
    }

    /// Whether the limit data exist at level `a`.
    pub fn supports_level(&self, a: f64) -> Result<()> {
        check_level(a)?;
        if matches!(self, Self::LinearCombo(_)) && a != 1.0 {
            return Err(Error::Unsupported(format!(
                "linear-combination model is only defined at a = 1 (both components share the endpoint 1), got a = {a}"
            )));
        }
        Ok(())
    }

    /// Exact `P(U₁ > u₁, U₂ > u₂)`.
    pub fn joint_tail(&self, u1: f64, u2: f64) -> Result<f64> {
        match *self {
            Self::Degenerate => Ok(if u1 < 1.0 && u2 < 1.0 { 1.0 } else { 0.0 }),
            Self::MinDominated { gamma1 } => {
                if u2 >= 1.0 {
                    return Ok(0.0);
                }
                let thr = if u2 > 0.0 { u1.max(u2 * u2) } else { u1 };
                Ok(power_sf(gamma1, thr))
            }
            Self::LinearCombo(lc) => lc.joint_tail(u1, u2),
            Self::Fgm { k, gamma1, gamma2 } => {
                let g1 = power_sf(gamma1, u1);
                let g2 = power_sf(gamma2, u2);
                Ok(g1 * g2 * (1.0 + k * (1.0 - g1) * (1.0 - g2)))
            }
        }
    }

    /// Checked version of [`joint_tail`](Self::joint_tail) for `u₁, u₂ ∈ [0, 1)`.
    pub fn joint_tail_exact(&self, u1: f64, u2: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&u1) || !(0.0..1.0).contains(&u2) {
            return invalid(format!("joint tail arguments must lie in [0, 1), got ({u1}, {u2})"));
        }
        self.joint_tail(u1, u2)
    }

    /// `P(U₁ > u)` or `P(U₂ > u)`.
    pub fn marginal_sf(&self, margin: Margin, u: f64) -> Result<f64> {
        let second = margin == Margin::Y;
        match *self {
            Self::Degenerate => Ok(if u < 1.0 { 1.0 } else { 0.0 }),
            Self::MinDominated { gamma1 } => {
                if !second {
                    Ok(power_sf(gamma1, u))
                } else if u >= 1.0 {
                    Ok(0.0)
                } else if u <= 0.0 {
                    Ok(1.0)
                } else {
                    Ok(power_sf(gamma1, u * u))
                }
            }
            Self::Fgm { gamma1, gamma2, .. } => Ok(power_sf(if second { gamma2 } else { gamma1 }, u)),
            Self::LinearCombo(lc) => {
                // the other combination never exceeds one, so threshold -1 is vacuous
                if second { lc.joint_tail(-1.0, u) } else { lc.joint_tail(u, -1.0) }
            }
        }
    }

    /// The local limit `ξ_a(s, δ, η)`.
    ///
    /// The shifts may be negative; the limit depends on `(s - δ, s - η)`
    /// only.
    pub fn xi(&self, a: f64, s: f64, delta: f64, eta: f64) -> Result<f64> {
        self.supports_level(a)?;
        let full = a == 1.0;
        Ok(match *self {
            Self::Degenerate => {
                if s > delta && (!full || s > eta) { 1.0 } else { 0.0 }
            }
            Self::MinDominated { gamma1 } => {
                if full {
                    pos_pow((s - delta).min(2.0 * (s - eta)), gamma1)
                } else {
                    pos_pow(s - delta, gamma1)
                }
            }
            Self::Fgm { gamma1, gamma2, .. } => {
                if full {
                    pos_pow(s - delta, gamma1) * pos_pow(s - eta, gamma2)
                } else {
                    pos_pow(s - delta, gamma1)
                }
            }
            Self::LinearCombo(lc) => lc.xi_tilde(s, delta, eta)? / lc.norm,
        })
    }

    /// Points in `s` where `ξ_a(·, δ, η)` is not smooth.
    pub fn xi_kinks(&self, a: f64, delta: f64, eta: f64) -> Vec<f64> {
        let mut k = vec![delta, eta];
        if let Self::MinDominated { .. } = self {
            if a == 1.0 {
                // s - δ = 2(s - η)
                k.push(2.0 * eta - delta);
            }
        }
        k
    }

    /// Exponent `γ` and slowly varying factor `L_a` at level `a`.
    pub fn limit_data(&self, a: f64) -> Result<LimitData> {
        self.supports_level(a)?;
        let gamma = match *self {
            Self::Degenerate => 0.0,
            Self::MinDominated { gamma1 } => gamma1,
            Self::Fgm { gamma1, gamma2, .. } => {
                if a == 1.0 { gamma1 + gamma2 } else { gamma1 }
            }
            Self::LinearCombo(lc) => lc.gamma1 + lc.gamma2,
        };
        Ok(LimitData { gamma, a, model: *self })
    }

    /// `P(U_a > 1 - s)` with `U_a = min(U₁, U₂/a)`, computed from the joint tail.
    pub fn level_tail(&self, a: f64, s: f64) -> Result<f64> {
        self.joint_tail(1.0 - s, a * (1.0 - s))
    }

    /// Exact draw of `(U₁, U₂)`.
    pub fn sample(&self, rng: &mut dyn RngCore) -> (f64, f64) {
        match *self {
            Self::Degenerate => (1.0, 1.0),
            Self::MinDominated { gamma1 } => {
                let u1 = power_draw(gamma1, rng);
                (u1, u1.sqrt())
            }
            Self::LinearCombo(lc) => lc.sample(rng),
            Self::Fgm { k, gamma1, gamma2 } => {
                // conditional method on C(u,v) = uv[1 + K(1-u)(1-v)]; the copula
                // coordinates are the marginal survival levels Ḡ_i(U_i)
                let u: f64 = rng.random();
                let t: f64 = rng.random();
                let coef = k * (1.0 - 2.0 * u);
                let v = if coef.abs() < 1e-12 {
                    t
                } else {
                    let b = 1.0 + coef;
                    // numerically stable root of coef v² - b v + t = 0 in [0, 1]
                    2.0 * t / (b + (b * b - 4.0 * coef * t).sqrt())
                };
                let inv = |level: f64, g: f64| if g == 0.0 { 1.0 } else { 1.0 - level.powf(1.0 / g) };
                (inv(u, gamma1), inv(v, gamma2))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn models() -> Vec<AngularModelA> {
        vec![
            AngularModelA::Degenerate,
            AngularModelA::min_dominated(1.0).unwrap(),
            AngularModelA::min_dominated(0.5).unwrap(),
            AngularModelA::fgm(0.5, 1.0, 1.0).unwrap(),
            AngularModelA::fgm(0.3, 0.5, 2.0).unwrap(),
            AngularModelA::linear_combo(0.5, 0.5, 1.0, 1.0).unwrap(),
            AngularModelA::linear_combo(0.7, 0.3, 1.5, 0.5).unwrap(),
        ]
    }

    #[test]
    fn joint_tail_examples() {
        let md = AngularModelA::min_dominated(1.0).unwrap();
        assert!((md.joint_tail_exact(0.9, 0.9).unwrap() - 0.1).abs() < 1e-15);
        let fgm0 = AngularModelA::fgm(0.0, 1.0, 1.0).unwrap();
        assert!((fgm0.joint_tail_exact(0.9, 0.8).unwrap() - 0.02).abs() < 1e-15);
        assert!(md.joint_tail_exact(1.0, 0.2).is_err());
    }

    #[test]
    fn linear_combo_joint_tail_matches_area() {
        // uniform S's: P(S₁+S₂ > 1.8)/... with λ = 1/2: P((S₁+S₂)/2 > 0.9) = 0.02
        let lc = AngularModelA::linear_combo(0.5, 0.5, 1.0, 1.0).unwrap();
        assert!((lc.joint_tail(0.9, 0.9).unwrap() - 0.02).abs() < 1e-13);
        // P(U > 0.5) = 1/2 by symmetry
        assert!((lc.marginal_sf(Margin::X, 0.5).unwrap() - 0.5).abs() < 1e-13);
    }

    #[test]
    fn fgm_xi_example() {
        let fgm = AngularModelA::fgm(0.5, 1.0, 1.0).unwrap();
        assert_eq!(fgm.xi(1.0, 2.0, 1.0, 0.0).unwrap(), 2.0);
        for m in models() {
            assert_eq!(m.xi(1.0, 0.5, 0.7, 0.0).unwrap(), 0.0, "{}", m.label());
            assert_eq!(m.xi(1.0, 0.5, 0.0, 0.5).unwrap(), 0.0, "{}", m.label());
        }
    }

    #[test]
    fn linear_combo_xi_tilde_small_s() {
        let lc = LinearCombo::new(0.5, 0.5, 1.0, 1.0).unwrap();
        for s in [0.01, 0.1, 1.0, 3.0] {
            assert!((lc.xi_tilde(s, 0.0, 0.0).unwrap() / (s * s) - 2.0).abs() < 1e-11);
        }
        assert!((lc.normalizer() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn c_constant_examples() {
        assert!((c_constant(1.0, 1.0, 0.5, 0.5).unwrap() - 2.0).abs() < 1e-12);
        for (g2, l2) in [(1.0f64, 0.3f64), (0.5, 0.2), (2.5, 0.6)] {
            let expect = (1.0 - l2).powf(-g2) / g2;
            assert!((c_constant(0.0, g2, 0.8, l2).unwrap() - expect).abs() < 1e-10);
        }
        let lc = LinearCombo::new(0.7, 0.3, 1.0, 1.0).unwrap();
        let c = c_constant(1.0, 1.0, 0.7, 0.3).unwrap();
        let s = 1e-3;
        let small = lc.xi_tilde(s, 0.0, 0.0).unwrap() / (s * s);
        assert!((small - c).abs() < 1e-6);
        assert!(c_constant(1.0, 0.0, 0.7, 0.3).is_err());
    }

    #[test]
    fn limit_data_examples() {
        let fgm = AngularModelA::fgm(0.5, 1.0, 1.0).unwrap();
        let ld = fgm.limit_data(1.0).unwrap();
        assert_eq!(ld.gamma, 2.0);
        assert!((ld.l_a(0.1) - (1.0 + 0.5 * 0.81)).abs() < 1e-15);
        let md = AngularModelA::min_dominated(1.0).unwrap();
        let ld = md.limit_data(1.0).unwrap();
        assert_eq!((ld.gamma, ld.l_a(0.3)), (1.0, 1.0));
        let ld = fgm.limit_data(0.5).unwrap();
        assert_eq!(ld.gamma, 1.0);
        // L_a(s) → Ḡ₂(a)(1 + K G₂(a)) as s ↓ 0
        assert!((ld.l_a(1e-9) - 0.5 * (1.0 + 0.5 * 0.5)).abs() < 1e-8);
        let lc = AngularModelA::linear_combo(0.5, 0.5, 1.0, 1.0).unwrap();
        assert!(matches!(lc.limit_data(0.5), Err(Error::Unsupported(_))));
    }

    #[test]
    fn level_tail_is_power_times_slowly_varying() {
        for m in models() {
            for a in [1.0, 0.7] {
                let Ok(ld) = m.limit_data(a) else { continue };
                for i in 1..=50 {
                    let s = 0.5 * i as f64 / 50.0;
                    let exact = m.level_tail(a, s).unwrap();
                    let fact = s.powf(ld.gamma) * ld.l_a(s);
                    assert!((exact - fact).abs() <= 1e-10 * exact.max(1e-300) + 1e-15,
                        "{} a={a} s={s}: {exact} vs {fact}", m.label());
                }
            }
        }
    }

    #[test]
    fn limit_condition_converges() {
        for m in models() {
            for a in [1.0, 0.6] {
                let Ok(ld) = m.limit_data(a) else { continue };
                for s in [0.5, 1.0, 2.0] {
                    for delta in [0.0, 0.5] {
                        for eta in [0.0, 0.5] {
                            let xi = m.xi(a, s, delta, eta).unwrap();
                            let devs: Vec<f64> = [1e2, 1e3, 1e4]
                                .iter()
                                .map(|&x| {
                                    let num = m
                                        .joint_tail(1.0 - (s - delta) / x, a * (1.0 - (s - eta) / x))
                                        .unwrap();
                                    let den = (1.0 / x).powf(ld.gamma) * ld.l_a(1.0 / x);
                                    (num / den - xi).abs()
                                })
                                .collect();
                            assert!(devs[2] <= devs[0] + 1e-9,
                                "{} a={a} s={s} δ={delta} η={eta}: {devs:?}", m.label());
                            assert!(devs[2] < 1e-2 * xi.max(1.0));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn xi_depends_only_on_shifted_arguments() {
        // ξ(s,δ,η) = ξ(s - η, δ - η, 0) for δ ≥ η
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in models() {
            for _ in 0..50 {
                let s: f64 = 0.1 + 4.0 * rng.random::<f64>();
                let eta: f64 = rng.random::<f64>();
                let delta = eta + rng.random::<f64>();
                let lhs = m.xi(1.0, s, delta, eta).unwrap();
                let rhs = m.xi(1.0, s - eta, delta - eta, 0.0).unwrap();
                assert!((lhs - rhs).abs() < 1e-10 * lhs.max(1.0), "{}", m.label());
                let lhs = m.xi(1.0, s, eta, delta).unwrap();
                let rhs = m.xi(1.0, s - eta, 0.0, delta - eta).unwrap();
                assert!((lhs - rhs).abs() < 1e-10 * lhs.max(1.0), "{}", m.label());
            }
        }
    }

    #[test]
    fn xi_nondecreasing_in_s() {
        for m in models() {
            let vals: Vec<f64> = (1..60).map(|i| m.xi(1.0, 0.1 * i as f64, 0.4, 0.2).unwrap()).collect();
            assert!(vals.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{}", m.label());
        }
    }

    #[test]
    fn joint_tail_monotone() {
        for m in models() {
            let mut prev_row = f64::INFINITY;
            for i in 0..10 {
                let u1 = 0.1 * i as f64;
                let p = m.joint_tail(u1, 0.3).unwrap();
                assert!(p <= prev_row + 1e-14, "{}", m.label());
                prev_row = p;
                let q = m.joint_tail(0.3, u1).unwrap();
                assert!(q <= m.joint_tail(0.3, 0.0).unwrap() + 1e-14);
            }
            assert!(m.joint_tail(0.0, 0.0).unwrap() <= 1.0 + 1e-14);
            assert_eq!(m.joint_tail(1.0, 0.5).unwrap(), 0.0);
        }
    }

    #[test]
    fn samplers_respect_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 200_000;
        let md = AngularModelA::min_dominated(1.0).unwrap();
        assert!((0..1000).all(|_| {
            let (u1, u2) = md.sample(&mut rng);
            u2 >= u1
        }));
        // FGM(K=0): independent uniforms
        let fgm0 = AngularModelA::fgm(0.0, 1.0, 1.0).unwrap();
        let draws: Vec<(f64, f64)> = (0..n).map(|_| fgm0.sample(&mut rng)).collect();
        let corr = correlation(&draws);
        assert!(corr.abs() < 3.0 / (n as f64).sqrt(), "{corr}");
        // LinearCombo with uniform S: E[U₁] = 1/2
        let lc = AngularModelA::linear_combo(0.5, 0.5, 1.0, 1.0).unwrap();
        let mean: f64 = (0..n).map(|_| lc.sample(&mut rng).0).sum::<f64>() / n as f64;
        let se = (1.0 / 24.0 / n as f64).sqrt();
        assert!((mean - 0.5).abs() < 3.0 * se, "{mean}");
    }

    #[test]
    fn samplers_match_joint_tails() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 200_000;
        for m in models() {
            for (u1, u2) in [(0.5, 0.4), (0.8, 0.85), (0.2, 0.9)] {
                let p = m.joint_tail(u1, u2).unwrap();
                let hits = (0..n)
                    .filter(|_| {
                        let (a, b) = m.sample(&mut rng);
                        a > u1 && b > u2
                    })
                    .count();
                let phat = hits as f64 / n as f64;
                let se = (p * (1.0 - p) / n as f64).sqrt().max(1e-9);
                assert!((phat - p).abs() < 4.0 * se + 1e-12, "{} ({u1},{u2}): {phat} vs {p}", m.label());
            }
        }
    }

    fn correlation(d: &[(f64, f64)]) -> f64 {
        let n = d.len() as f64;
        let (mx, my) = d.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0 / n, acc.1 + p.1 / n));
        let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for (x, y) in d {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx).powi(2);
            syy += (y - my).powi(2);
        }
        sxy / (sxx * syy).sqrt()
    }
}

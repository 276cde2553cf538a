//! Normalization, radial expectation values and the Heisenberg report.
//!
//! All expectations are ratios against the normalization integral
//! `∫ r²R² dr` over `r ∈ [0, arcsinh(1)/α]` (equivalently `s ∈ [0, 1]`), so N
//! and the 4π prefactors cancel. The integrals can be evaluated in either the
//! `s` or the `r` parameterization; the two must agree.
//!
//! ⟨p²⟩ comes in three flavours, see [`KineticMode`].

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::State;
use crate::quadrature::{Integrator, QuadratureConfig, QuadratureResult};
use crate::specfun::{polynomial_weight, Wavefunction};
use crate::spectrum;

/// Position variance below which a state counts as squeezed.
pub const SQUEEZE_THRESHOLD: f64 = 0.5;

/// How ⟨p²⟩ is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KineticMode {
    /// `4π·2μE − ħ²Λ⟨r⁻²⟩ − ħ²β⟨tanh²⟩`: the energy term carries the
    /// explicit 4π of the unnormalized integral form while the two integral
    /// terms are normalized by N². This is the convention of the published
    /// tables.
    #[default]
    Printed,
    /// `2μE − ħ²Λ⟨r⁻²⟩ − ħ²β⟨tanh²⟩` with every term normalized.
    Identity,
    /// `−ħ² ∫ r² R R'' dr / ∫ r² R² dr`, independent of the energy formula.
    Derivative,
}

impl KineticMode {
    pub const ALL: [KineticMode; 3] = [Self::Printed, Self::Identity, Self::Derivative];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Printed => "printed",
            Self::Identity => "identity",
            Self::Derivative => "derivative",
        }
    }
}

impl fmt::Display for KineticMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KineticMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "printed" => Ok(Self::Printed),
            "identity" => Ok(Self::Identity),
            "derivative" => Ok(Self::Derivative),
            other => Err(format!(
                "unknown kinetic mode `{other}` (expected printed, identity or derivative)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Parameterization {
    /// s = sinh²(αr) on [0, 1].
    S,
    /// r on [0, arcsinh(1)/α].
    R,
}

/// Quadrature settings used for expectation values: order 32, relative
/// tolerance 1e-10 and no absolute floor (the radial integrals can be tiny
/// for deep wells).
pub fn default_integrator() -> Integrator {
    Integrator::new(QuadratureConfig {
        abs_tol: 0.0,
        ..QuadratureConfig::default()
    })
    .expect("default quadrature settings are valid")
}

/// Raw radial integrals, all divided by N².
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentIntegrals {
    /// ∫ r²R² dr
    pub norm: QuadratureResult,
    /// ∫ r⁴R² dr
    pub r4: QuadratureResult,
    /// ∫ R² dr
    pub r0: QuadratureResult,
    /// ∫ r² tanh²(αr) R² dr
    pub tanh2: QuadratureResult,
    /// ∫ r² R R'' dr
    pub kinetic: QuadratureResult,
}

impl MomentIntegrals {
    pub fn evaluations(&self) -> usize {
        [self.norm, self.r4, self.r0, self.tanh2, self.kinetic]
            .iter()
            .map(|q| q.evaluations)
            .sum()
    }
}

pub fn moment_integrals(
    state: &State,
    integrator: &Integrator,
    param: Parameterization,
) -> Result<MomentIntegrals> {
    match param {
        Parameterization::S => moments_s(state, integrator),
        Parameterization::R => moments_r(state, integrator),
    }
}

fn moments_s(state: &State, integ: &Integrator) -> Result<MomentIntegrals> {
    let alpha = state.params.alpha;
    let c1 = 1.0 / (2.0 * alpha);
    let c3 = c1 / (alpha * alpha);
    let c5 = c3 / (alpha * alpha);
    let (a, b) = state.jacobi_params();
    let wf = Wavefunction {
        state: *state,
        norm: 1.0,
    };
    let arc2 = |s: f64| s.sqrt().asinh().powi(2);

    let norm = integ.integrate(|s| arc2(s) * polynomial_weight(state, s) * c3, 0.0, 1.0)?;
    let r4 = integ.integrate(
        |s| arc2(s).powi(2) * polynomial_weight(state, s) * c5,
        0.0,
        1.0,
    )?;
    let r0 = integ.integrate(|s| polynomial_weight(state, s) * c1, 0.0, 1.0)?;
    let tanh2 = integ.integrate(
        |s| arc2(s) * s / (1.0 + s) * polynomial_weight(state, s) * c3,
        0.0,
        1.0,
    )?;
    let kinetic = integ.integrate(
        |s| {
            let (p, q) = wf.laplacian_factor(s);
            arc2(s) * s.powf(a) * (1.0 + s).powf(b) * p * q * c3
        },
        0.0,
        1.0,
    )?;
    Ok(MomentIntegrals {
        norm,
        r4,
        r0,
        tanh2,
        kinetic,
    })
}

fn moments_r(state: &State, integ: &Integrator) -> Result<MomentIntegrals> {
    let alpha = state.params.alpha;
    let wf = Wavefunction {
        state: *state,
        norm: 1.0,
    };
    let top = state.r_max();
    let u2 = |r: f64| wf.value_at_r(r).powi(2);

    let norm = integ.integrate(|r| r * r * u2(r), 0.0, top)?;
    let r4 = integ.integrate(|r| r.powi(4) * u2(r), 0.0, top)?;
    let r0 = integ.integrate(u2, 0.0, top)?;
    let tanh2 = integ.integrate(|r| r * r * (alpha * r).tanh().powi(2) * u2(r), 0.0, top)?;
    let kinetic = integ.integrate(
        |r| r * r * wf.value_at_r(r) * wf.second_derivative_r(r),
        0.0,
        top,
    )?;
    Ok(MomentIntegrals {
        norm,
        r4,
        r0,
        tanh2,
        kinetic,
    })
}

fn rel_err(q: &QuadratureResult) -> f64 {
    if q.value == 0.0 {
        q.error_estimate
    } else {
        q.error_estimate / q.value.abs()
    }
}

fn ratio_error(num: &QuadratureResult, den: &QuadratureResult) -> f64 {
    rel_err(num) + rel_err(den)
}

/// N with 4πN²∫r²R²dr/N² = 1.
pub fn normalization_constant(state: &State, integrator: &Integrator) -> Result<f64> {
    let m = moments_s(state, integrator)?;
    Ok(norm_from(&m))
}

fn norm_from(m: &MomentIntegrals) -> f64 {
    1.0 / (4.0 * PI * m.norm.value).sqrt()
}

/// ⟨r²⟩ as the ratio ∫r⁴R²/∫r²R².
pub fn expect_r2(state: &State, integrator: &Integrator) -> Result<f64> {
    let m = moments_s(state, integrator)?;
    Ok(m.r4.value / m.norm.value)
}

/// ⟨r²⟩ as 4πN²∫r⁴R²/N², using the explicit normalization constant.
pub fn expect_r2_with_norm(state: &State, integrator: &Integrator) -> Result<f64> {
    let m = moments_s(state, integrator)?;
    let n = norm_from(&m);
    Ok(4.0 * PI * n * n * m.r4.value)
}

pub fn expect_tanh2(state: &State, integrator: &Integrator) -> Result<f64> {
    let m = moments_s(state, integrator)?;
    Ok(m.tanh2.value / m.norm.value)
}

/// ⟨r⁻²⟩ from the density, ∫R²dr / ∫r²R²dr.
pub fn expect_r_inv2_numeric(state: &State, integrator: &Integrator) -> Result<f64> {
    let m = moments_s(state, integrator)?;
    Ok(m.r0.value / m.norm.value)
}

pub fn expect_p2(state: &State, integrator: &Integrator, mode: KineticMode) -> Result<f64> {
    let m = moments_s(state, integrator)?;
    Ok(KineticValues::from_moments(state, &m).get(mode))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KineticValues {
    pub printed: f64,
    pub identity: f64,
    pub derivative: f64,
}

impl KineticValues {
    fn from_moments(state: &State, m: &MomentIntegrals) -> Self {
        let energy = spectrum::energy(state).value();
        let r_inv2 = m.r0.value / m.norm.value;
        let tanh2 = m.tanh2.value / m.norm.value;
        let kinetic = m.kinetic.value / m.norm.value;
        Self::assemble(state, energy, r_inv2, tanh2, kinetic)
    }

    fn assemble(state: &State, energy: f64, r_inv2: f64, tanh2: f64, r_laplacian: f64) -> Self {
        let p = &state.params;
        let d = &state.derived;
        let hbar2 = p.hbar * p.hbar;
        let potential_terms = hbar2 * d.centrifugal * r_inv2 + hbar2 * d.beta * tanh2;
        let two_mu_e = 2.0 * p.mu * energy;
        Self {
            printed: 4.0 * PI * two_mu_e - potential_terms,
            identity: two_mu_e - potential_terms,
            derivative: -hbar2 * r_laplacian,
        }
    }

    pub fn get(&self, mode: KineticMode) -> f64 {
        match mode {
            KineticMode::Printed => self.printed,
            KineticMode::Identity => self.identity,
            KineticMode::Derivative => self.derivative,
        }
    }
}

/// Relative error estimates carried over from the quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureErrors {
    pub norm: f64,
    pub r2: f64,
    pub r_inv2: f64,
    pub tanh2: f64,
    pub kinetic: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StateObservables {
    pub energy: f64,
    pub r2: f64,
    /// ⟨p²⟩ in the selected `mode`.
    pub p2: f64,
    pub mode: KineticMode,
    pub kinetic: KineticValues,
    pub r_inv2_numeric: f64,
    pub r_inv2_hft: f64,
    pub tanh2: f64,
    pub norm_constant: f64,
    pub quadrature_errors: QuadratureErrors,
    pub evaluations: usize,
    /// ⟨r²R R''⟩-type integral ratio, kept so ⟨p²⟩ can be re-assembled
    /// for another `d0` without re-integrating.
    r_laplacian: f64,
}

impl StateObservables {
    pub fn compute(state: &State, integrator: &Integrator, mode: KineticMode) -> Result<Self> {
        let m = moments_s(state, integrator)?;
        let kinetic = KineticValues::from_moments(state, &m);
        let r2 = m.r4.value / m.norm.value;
        if !(r2.is_finite() && r2 > 0.0) {
            return Err(Error::Unsupported(format!(
                "non-positive <r^2> = {r2} for state {:?}",
                state.quantum
            )));
        }
        Ok(Self {
            energy: spectrum::energy(state).value(),
            r2,
            p2: kinetic.get(mode),
            mode,
            kinetic,
            r_inv2_numeric: m.r0.value / m.norm.value,
            r_inv2_hft: spectrum::r_inverse_squared(state),
            tanh2: m.tanh2.value / m.norm.value,
            norm_constant: norm_from(&m),
            quadrature_errors: QuadratureErrors {
                norm: rel_err(&m.norm),
                r2: ratio_error(&m.r4, &m.norm),
                r_inv2: ratio_error(&m.r0, &m.norm),
                tanh2: ratio_error(&m.tanh2, &m.norm),
                kinetic: ratio_error(&m.kinetic, &m.norm),
            },
            evaluations: m.evaluations(),
            r_laplacian: m.kinetic.value / m.norm.value,
        })
    }

    /// Same observables with the energy (and so the energy-based ⟨p²⟩
    /// modes) re-evaluated for `state`, which must differ from the original
    /// only in `d0`.
    pub fn with_energy_of(&self, state: &State) -> Self {
        let energy = spectrum::energy(state).value();
        let kinetic = KineticValues::assemble(
            state,
            energy,
            self.r_inv2_numeric,
            self.tanh2,
            self.r_laplacian,
        );
        Self {
            energy,
            p2: kinetic.get(self.mode),
            kinetic,
            ..*self
        }
    }

    pub fn with_mode(&self, mode: KineticMode) -> Self {
        Self {
            p2: self.kinetic.get(mode),
            mode,
            ..*self
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UncertaintyReport {
    pub delta_r: f64,
    pub delta_p: f64,
    /// (Δr)²(Δp)² = ⟨r²⟩⟨p²⟩.
    pub product2: f64,
    /// (ℓ + 3/2)².
    pub bound: f64,
    pub squeezed: bool,
    pub mean_r: f64,
    pub mean_p: f64,
}

impl UncertaintyReport {
    pub fn satisfies_bound(&self) -> bool {
        self.product2 >= self.bound
    }
}

/// (ℓ + 3/2)².
pub fn uncertainty_bound(l: u32) -> f64 {
    let x = f64::from(l) + 1.5;
    x * x
}

pub fn is_squeezed(variance_r: f64) -> bool {
    variance_r < SQUEEZE_THRESHOLD
}

/// ⟨r⟩ = ⟨p⟩ = 0 by symmetry, so Δr = √⟨r²⟩ and Δp = √⟨p²⟩.
pub fn uncertainty_report(state: &State, obs: &StateObservables) -> UncertaintyReport {
    UncertaintyReport {
        delta_r: obs.r2.sqrt(),
        delta_p: obs.p2.sqrt(),
        product2: obs.r2 * obs.p2,
        bound: uncertainty_bound(state.quantum.l),
        squeezed: is_squeezed(obs.r2),
        mean_r: 0.0,
        mean_p: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn ground_state_half_depth() {
        let integ = default_integrator();
        let s = State::table(0.5, 1.0, 0, 0).unwrap();
        let obs = StateObservables::compute(&s, &integ, KineticMode::Printed).unwrap();
        assert!(rel(obs.r2, 0.551859) < 1e-5, "{}", obs.r2);
        assert!(rel(obs.p2, 5.99104) < 1e-5, "{}", obs.p2);
        assert!(obs.tanh2 > 0.0 && obs.tanh2 <= 0.5);
        let n = obs.norm_constant;
        let m = moment_integrals(&s, &integ, Parameterization::S).unwrap();
        assert!((4.0 * PI * n * n * m.norm.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ratio_and_norm_forms_agree() {
        let integ = default_integrator();
        for (lambda, n, l) in [(0.5, 0, 0), (5.5, 3, 2), (9.5, 1, 1)] {
            let s = State::table(lambda, 1.0, n, l).unwrap();
            let a = expect_r2(&s, &integ).unwrap();
            let b = expect_r2_with_norm(&s, &integ).unwrap();
            assert!(rel(a, b) < 1e-10);
        }
    }

    #[test]
    fn s_wave_centrifugal_term_vanishes() {
        let integ = default_integrator();
        let s = State::table(3.5, 1.0, 1, 0).unwrap();
        let obs = StateObservables::compute(&s, &integ, KineticMode::Identity).unwrap();
        let manual = obs.energy - s.derived.beta * obs.tanh2;
        assert_eq!(obs.kinetic.identity, manual);
    }

    #[test]
    fn kinetic_modes_agree_for_exact_s_states() {
        let integ = default_integrator();
        for (lambda, n) in [(0.5, 0), (4.5, 2), (9.5, 0)] {
            let s = State::table(lambda, 1.0, n, 0).unwrap();
            let obs = StateObservables::compute(&s, &integ, KineticMode::Identity).unwrap();
            assert!(rel(obs.kinetic.derivative, obs.kinetic.identity) < 1e-8);
        }
    }

    #[test]
    fn d0_reassembly_matches_recompute() {
        let integ = default_integrator();
        let s = State::table(6.5, 1.0, 2, 1).unwrap();
        let obs = StateObservables::compute(&s, &integ, KineticMode::Printed).unwrap();
        let shifted = s.with_d0(-0.2);
        let fresh = StateObservables::compute(&shifted, &integ, KineticMode::Printed).unwrap();
        let cheap = obs.with_energy_of(&shifted);
        assert!(rel(cheap.p2, fresh.p2) < 1e-13);
        assert_eq!(cheap.kinetic.derivative, obs.kinetic.derivative);
    }

    #[test]
    fn squeezing_report() {
        let integ = default_integrator();
        let s = State::table(2.5, 1.0, 0, 0).unwrap();
        let obs = StateObservables::compute(&s, &integ, KineticMode::Printed).unwrap();
        let rep = uncertainty_report(&s, &obs);
        assert!(rep.squeezed);
        assert_eq!(rep.product2, obs.r2 * obs.p2);
        assert_eq!(rep.bound, 2.25);
        assert!(rep.satisfies_bound());
        assert_eq!((rep.mean_r, rep.mean_p), (0.0, 0.0));
        assert_eq!(uncertainty_bound(1), 6.25);
        assert_eq!(uncertainty_bound(2), 12.25);
        assert!(!is_squeezed(0.526554));
        assert!(is_squeezed(0.498741));
    }

    #[test]
    fn mode_parsing() {
        for m in KineticMode::ALL {
            assert_eq!(m.as_str().parse::<KineticMode>().unwrap(), m);
        }
        assert!("kinetic".parse::<KineticMode>().is_err());
    }
}

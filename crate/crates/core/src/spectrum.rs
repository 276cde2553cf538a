//! Closed-form energy levels and the Hellmann-Feynman value of ⟨r⁻²⟩.

use serde::Serialize;

use crate::model::State;

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Energy(pub f64);

impl Energy {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `E = ħ²/(2μ)·[4d0Λ − 4n² − 4n + 8nγ + 4γ − 8nζ − 4ζ − 3/2 − Λ + 8γζ]`,
/// term for term. No sign clamping is applied.
pub fn energy(state: &State) -> Energy {
    let d = &state.derived;
    let n = f64::from(state.quantum.n);
    let (g, z, lam) = (d.gamma, d.zeta, d.centrifugal);
    let bracket = 4.0 * d.d0 * lam - 4.0 * n * n - 4.0 * n + 8.0 * n * g + 4.0 * g
        - 8.0 * n * z
        - 4.0 * z
        - 1.5
        - lam
        + 8.0 * g * z;
    Energy(state.params.energy_scale() * bracket)
}

/// Hellmann-Feynman ⟨r⁻²⟩ = −2/3 − n/√ζ − 1/(2√ζ) + γ/√ζ.
pub fn r_inverse_squared(state: &State) -> f64 {
    let d = &state.derived;
    let n = f64::from(state.quantum.n);
    let root = d.zeta.sqrt();
    -2.0 / 3.0 - n / root - 0.5 / root + d.gamma / root
}

/// Large-λ slope d⟨r⁻²⟩/dλ → α/(2√ζ).
pub fn r_inverse_squared_slope_limit(state: &State) -> f64 {
    state.params.alpha / (2.0 * state.derived.zeta.sqrt())
}

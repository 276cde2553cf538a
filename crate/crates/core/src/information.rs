//! Fisher information in position and momentum space and the Cramér-Rao
//! product, both through expectation-value identities.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::State;
use crate::observables::StateObservables;

/// Lower bound on I[ρ]·I[γ].
pub const FISHER_PRODUCT_BOUND: f64 = 36.0;

/// Spatial dimension entering the Cramér-Rao bound D².
pub const DIMENSION: u32 = 3;

pub const CRAMER_RAO_BOUND: f64 = (DIMENSION * DIMENSION) as f64;

/// I[ρ] = 4⟨p²⟩ − 2(2ℓ+1)|m|⟨r⁻²⟩, with the Hellmann-Feynman ⟨r⁻²⟩.
pub fn fisher_position(state: &State, obs: &StateObservables) -> f64 {
    let m = state.quantum.m;
    if m == 0 {
        return 4.0 * obs.p2;
    }
    let l = f64::from(state.quantum.l);
    4.0 * obs.p2 - 2.0 * (2.0 * l + 1.0) * f64::from(m.unsigned_abs()) * obs.r_inv2_hft
}

/// I[γ] = 4⟨r²⟩ for m = 0. Nonzero m needs ⟨p⁻²⟩, which requires the
/// momentum-space density and is not available.
pub fn fisher_momentum(state: &State, obs: &StateObservables) -> Result<f64> {
    if state.quantum.m != 0 {
        return Err(Error::Unsupported(format!(
            "I[gamma] for m = {} needs <p^-2>, which is not computed",
            state.quantum.m
        )));
    }
    Ok(4.0 * obs.r2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InformationReport {
    pub fisher_rho: f64,
    pub fisher_gamma: f64,
    pub product: f64,
    pub product_bound: f64,
    /// V[ρ] = ⟨r²⟩ (zero mean).
    pub variance_rho: f64,
    pub cramer_rao: f64,
    pub cramer_rao_bound: f64,
    pub product_satisfied: bool,
    pub cramer_rao_satisfied: bool,
}

pub fn information_report(state: &State, obs: &StateObservables) -> Result<InformationReport> {
    let fisher_rho = fisher_position(state, obs);
    let fisher_gamma = fisher_momentum(state, obs)?;
    let product = fisher_rho * fisher_gamma;
    let variance_rho = obs.r2;
    let cramer_rao = fisher_rho * variance_rho;
    Ok(InformationReport {
        fisher_rho,
        fisher_gamma,
        product,
        product_bound: FISHER_PRODUCT_BOUND,
        variance_rho,
        cramer_rao,
        cramer_rao_bound: CRAMER_RAO_BOUND,
        product_satisfied: product >= FISHER_PRODUCT_BOUND,
        cramer_rao_satisfied: cramer_rao >= CRAMER_RAO_BOUND,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PotentialParams, QuantumNumbers, DEFAULT_D0};
    use crate::observables::{default_integrator, uncertainty_report, KineticMode};

    fn printed_obs(state: &State, r2: f64, p2: f64) -> StateObservables {
        let mut obs =
            StateObservables::compute(state, &default_integrator(), KineticMode::Printed).unwrap();
        obs.r2 = r2;
        obs.p2 = p2;
        obs
    }

    #[test]
    fn table_ten_rows_from_table_two_inputs() {
        let s = State::table(0.5, 1.0, 0, 0).unwrap();
        let obs = printed_obs(&s, 0.551859, 5.99104);
        let rep = information_report(&s, &obs).unwrap();
        assert!((rep.fisher_rho - 23.96416).abs() < 1e-9);
        assert!((rep.fisher_gamma - 2.207436).abs() < 1e-9);
        assert!((rep.product - 52.89935).abs() < 1e-4);
        assert!((rep.cramer_rao - 13.22484).abs() < 1e-4);
        assert!(rep.product_satisfied && rep.cramer_rao_satisfied);

        let s = State::table(9.5, 1.0, 0, 0).unwrap();
        let obs = printed_obs(&s, 0.287563, 322.742);
        assert!((fisher_position(&s, &obs) - 1290.968).abs() < 1e-9);
        assert!((fisher_momentum(&s, &obs).unwrap() - 1.150252).abs() < 1e-12);
    }

    #[test]
    fn cramer_rao_is_four_times_uncertainty_product() {
        let s = State::table(0.5, 1.0, 0, 0).unwrap();
        let obs = printed_obs(&s, 0.551859, 5.99104);
        let rep = information_report(&s, &obs).unwrap();
        let unc = uncertainty_report(&s, &obs);
        assert!((rep.cramer_rao - 4.0 * unc.product2).abs() < 1e-12);
        assert!((rep.product - 16.0 * unc.product2).abs() < 1e-10);
    }

    #[test]
    fn m_zero_collapses_bitwise() {
        let s = State::table(7.5, 1.0, 2, 1).unwrap();
        let obs =
            StateObservables::compute(&s, &default_integrator(), KineticMode::Printed).unwrap();
        assert_eq!(
            fisher_position(&s, &obs).to_bits(),
            (4.0 * obs.p2).to_bits()
        );
        assert_eq!(
            fisher_momentum(&s, &obs).unwrap().to_bits(),
            (4.0 * obs.r2).to_bits()
        );
    }

    #[test]
    fn nonzero_m() {
        let s = State::new(
            PotentialParams::table_units(7.5, 1.0).unwrap(),
            QuantumNumbers::new(2, 1, -1).unwrap(),
            DEFAULT_D0,
        )
        .unwrap();
        let obs =
            StateObservables::compute(&s, &default_integrator(), KineticMode::Printed).unwrap();
        let expect = 4.0 * obs.p2 - 2.0 * 3.0 * 1.0 * obs.r_inv2_hft;
        assert_eq!(fisher_position(&s, &obs), expect);
        assert!(matches!(
            fisher_momentum(&s, &obs),
            Err(Error::Unsupported(_))
        ));
        assert!(information_report(&s, &obs).is_err());
    }

    #[test]
    fn bounds_constants() {
        assert_eq!(FISHER_PRODUCT_BOUND, 36.0);
        assert_eq!(CRAMER_RAO_BOUND, 9.0);
    }
}

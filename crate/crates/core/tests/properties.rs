use proptest::prelude::*;

use ptinfo::information::{fisher_momentum, fisher_position, information_report};
use ptinfo::model::{max_bound_state, PotentialParams, QuantumNumbers, State};
use ptinfo::observables::{
    default_integrator, moment_integrals, uncertainty_report, KineticMode, Parameterization,
    StateObservables,
};
use ptinfo::specfun::jacobi_value;

fn bound_state() -> impl Strategy<Value = State> {
    (0.5f64..40.0, 0.2f64..2.0, 0u32..4, 0u32..4)
        .prop_filter_map("state must be bound", |(lambda, alpha, n, l)| {
            State::table(lambda, alpha, n, l).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 32,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn moments_are_physical(s in bound_state()) {
        let o = StateObservables::compute(&s, &default_integrator(), KineticMode::Printed).unwrap();
        let r_max = s.r_max();
        prop_assert!(o.r2 > 0.0 && o.r2 < r_max * r_max);
        prop_assert!(o.tanh2 > 0.0 && o.tanh2 < 0.5);
        prop_assert!(o.r_inv2_numeric > 1.0 / (r_max * r_max));
        prop_assert!(o.norm_constant > 0.0);
    }

    #[test]
    fn parameterizations_agree(s in bound_state()) {
        let integ = default_integrator();
        let a = moment_integrals(&s, &integ, Parameterization::S).unwrap();
        let b = moment_integrals(&s, &integ, Parameterization::R).unwrap();
        for (x, y) in [(a.norm, b.norm), (a.r4, b.r4), (a.r0, b.r0), (a.tanh2, b.tanh2)] {
            prop_assert!(((x.value - y.value) / y.value).abs() < 1e-8);
        }
    }

    #[test]
    fn information_identities(s in bound_state()) {
        let o = StateObservables::compute(&s, &default_integrator(), KineticMode::Printed).unwrap();
        let info = information_report(&s, &o).unwrap();
        let unc = uncertainty_report(&s, &o);
        prop_assert_eq!(fisher_position(&s, &o).to_bits(), (4.0 * o.p2).to_bits());
        prop_assert_eq!(fisher_momentum(&s, &o).unwrap().to_bits(), (4.0 * o.r2).to_bits());
        prop_assert!((info.product - 16.0 * unc.product2).abs() <= 1e-12 * info.product.abs());
        prop_assert!((info.cramer_rao - 4.0 * unc.product2).abs() <= 1e-12 * info.cramer_rao.abs());
    }

    #[test]
    fn boundness_cutoff(lambda in 0.1f64..40.0, alpha in 0.2f64..2.0, l in 0u32..4) {
        let p = PotentialParams::table_units(lambda, alpha).unwrap();
        let max = max_bound_state(&p);
        prop_assert!(f64::from(max) < lambda && f64::from(max) + 1.0 >= lambda);
        prop_assert!(State::new(p, QuantumNumbers::nl(max, l), 1.0 / 12.0).is_ok());
        prop_assert!(State::new(p, QuantumNumbers::nl(max + 1, l), 1.0 / 12.0).is_err());
    }

    #[test]
    fn jacobi_at_one(n in 0u32..8, a in 0.5f64..20.0, b in -60.0f64..-0.5) {
        // P_n^(a,b)(1) = C(n + a, n).
        let want = (0..n).fold(1.0, |acc, i| acc * (a + f64::from(n - i)) / f64::from(i + 1));
        let got = jacobi_value(n, a, b, 1.0);
        prop_assert!((got - want).abs() <= 1e-12 * want.abs());
    }

    #[test]
    fn with_energy_of_matches_fresh(s in bound_state(), d0 in -0.5f64..0.5) {
        let integ = default_integrator();
        let o = StateObservables::compute(&s, &integ, KineticMode::Identity).unwrap();
        let shifted = s.with_d0(d0);
        let fresh = StateObservables::compute(&shifted, &integ, KineticMode::Identity).unwrap();
        let cheap = o.with_energy_of(&shifted);
        prop_assert!((cheap.p2 - fresh.p2).abs() <= 1e-11 * fresh.p2.abs().max(1.0));
    }
}

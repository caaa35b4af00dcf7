use phs_core::cayley::{cayley_transform, inverse_cayley, is_dissipative, resolvent_bound_check};
use phs_core::numerics::{c64, identity, inverse, max_abs, operator_norm, Tolerances};
use phs_core::sampling;
use proptest::prelude::*;

proptest! {
    #[test]
    fn dissipative_round_trip_is_identity(seed in any::<u64>(), d in 1usize..9) {
        let tol = Tolerances::default();
        let mut rng = sampling::seeded(seed);
        let a = sampling::random_dissipative(&mut rng, d);
        let c = cayley_transform(&a, &tol).unwrap();
        prop_assert!(operator_norm(&c) <= 1.0 + 1e-10);
        let back = inverse_cayley(&c, &tol).unwrap();
        prop_assert!(max_abs(&(back - &a)) <= 1e-9 * (1.0 + operator_norm(&a)));
    }

    #[test]
    fn skew_hermitian_maps_to_unitary(seed in any::<u64>(), d in 1usize..9) {
        let tol = Tolerances::default();
        let mut rng = sampling::seeded(seed);
        let s = sampling::random_skew_hermitian(&mut rng, d);
        let c = cayley_transform(&s, &tol).unwrap();
        prop_assert!(max_abs(&(c.adjoint() * &c - identity(d))) <= 1e-10);
    }

    #[test]
    fn dissipativity_matches_resolvent_bound(seed in any::<u64>(), d in 1usize..7, flip in any::<bool>()) {
        let tol = Tolerances::default();
        let mut rng = sampling::seeded(seed);
        let a = if flip {
            sampling::random_non_dissipative(&mut rng, d, 0.1)
        } else {
            sampling::random_dissipative(&mut rng, d)
        };
        let lambdas = [1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4];
        let bound = resolvent_bound_check(&a, &lambdas, 4, &mut rng, &tol).unwrap();
        prop_assert_eq!(is_dissipative(&a, &tol), !flip);
        prop_assert_eq!(bound, !flip);
    }

    #[test]
    fn hille_yosida_resolvent_norm(seed in any::<u64>(), d in 1usize..9, exponent in -2.0f64..3.0) {
        let tol = Tolerances::default();
        let mut rng = sampling::seeded(seed);
        let a = sampling::random_dissipative(&mut rng, d);
        let lambda = 10f64.powf(exponent);
        let r = inverse(&(identity(d) * c64(lambda, 0.0) - &a), &tol, "lambda - A").unwrap();
        prop_assert!(operator_norm(&r) <= 1.0 / lambda + 1e-10);
    }
}

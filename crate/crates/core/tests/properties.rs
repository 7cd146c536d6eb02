//! Randomized structural properties: symmetries of the special functions,
//! branch confinement of the phase, unit-preserving conversions, and
//! bit-exact state round trips.

use num_complex::Complex64;
use phasegate::analytic::{complex_fidelity_equal_ab, ip_gaussian, theta_phase};
use phasegate::dynamics::{
    decompose_sectors, read_checkpoint, write_checkpoint, JointState, KGrid, Sector,
};
use phasegate::model::{
    dimensionless_from_physical, physical_from_dimensionless, DimensionlessParams, JointSpectrum,
    Scaling,
};
use phasegate::numerics::{erfc_complex, erfi, faddeeva, QuadratureSpec};
use proptest::prelude::*;
use std::f64::consts::PI;

fn canonical_equal_ab(alpha: f64, tau: f64) -> phasegate::model::PhysicalConfig {
    physical_from_dimensionless(
        &DimensionlessParams::equal_ab(alpha, tau).unwrap(),
        Scaling::canonical(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn faddeeva_reflection_symmetry(re in -6.0f64..6.0, im in 0.0f64..6.0) {
        // w(-z̄) = w(z)̄  on the closed upper half-plane
        let z = Complex64::new(re, im);
        let lhs = faddeeva(-z.conj()).unwrap();
        let rhs = faddeeva(z).unwrap().conj();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
    }

    #[test]
    fn erfc_functional_equation(re in -3.0f64..3.0, im in -3.0f64..3.0) {
        // erfc(-z) = 2 - erfc(z)
        let z = Complex64::new(re, im);
        let lhs = erfc_complex(-z).unwrap();
        let rhs = Complex64::new(2.0, 0.0) - erfc_complex(z).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-11 * rhs.norm().max(1.0));
    }

    #[test]
    fn erfi_is_odd(x in -5.5f64..5.5) {
        let lhs = erfi(-x).unwrap();
        let rhs = -erfi(x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }

    #[test]
    fn ip_is_antisymmetric(kb in -6.0f64..6.0, kc in -6.0f64..6.0, sigma in 0.05f64..1.5) {
        let fwd = ip_gaussian(kb, kc, sigma).unwrap();
        let rev = ip_gaussian(kc, kb, sigma).unwrap();
        prop_assert!((fwd + rev).abs() <= 1e-13 * fwd.abs().max(1e-300));
    }

    #[test]
    fn theta_branch_confined(
        kb in -10.0f64..10.0,
        kc in -10.0f64..10.0,
        log_alpha in -1.0f64..2.0,
        log_tau in -2.0f64..0.0,
    ) {
        let cfg = canonical_equal_ab(10f64.powf(log_alpha), 10f64.powf(log_tau));
        let th = theta_phase(kb, kc, &cfg).unwrap();
        prop_assert!((0.0..=PI).contains(&th), "theta = {th}");
    }

    #[test]
    fn unit_conversions_round_trip(
        log_alpha in -1.0f64..2.0,
        log_tau in -2.0f64..0.0,
        fig2_family in proptest::bool::ANY,
    ) {
        let alpha = 10f64.powf(log_alpha);
        let tau = 10f64.powf(log_tau);
        let params = if fig2_family {
            DimensionlessParams::fig2(alpha, tau).unwrap()
        } else {
            DimensionlessParams::equal_ab(alpha, tau).unwrap()
        };
        let cfg = physical_from_dimensionless(&params, Scaling::canonical()).unwrap();
        let back = dimensionless_from_physical(&cfg).unwrap();
        prop_assert!((back.alpha - alpha).abs() <= 1e-10 * alpha);
        prop_assert!((back.tau - tau).abs() <= 1e-10 * tau);
        prop_assert!((back.vel_ratio_ab_ac - params.vel_ratio_ab_ac).abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn overlap_stays_in_unit_disc(
        log_alpha in -0.3f64..1.3,
        log_tau in -1.3f64..-0.3,
    ) {
        let tau = 10f64.powf(log_tau);
        let p = DimensionlessParams::equal_ab(10f64.powf(log_alpha), tau).unwrap();
        let f = complex_fidelity_equal_ab(&p, &QuadratureSpec::for_tau(tau)).unwrap();
        prop_assert!(f.overlap.norm() <= 1.0 + 1e-6, "overlap = {}", f.overlap);
        prop_assert!(f.fidelity() <= 1.0 + 2e-6);
    }

    #[test]
    fn decomposition_preserves_norm_and_round_trips(
        log_alpha in -0.3f64..0.7,
        log_tau in -1.3f64..-0.5,
    ) {
        let cfg = canonical_equal_ab(10f64.powf(log_alpha), 10f64.powf(log_tau));
        let grid = KGrid::new(129, 8.0).unwrap();
        let spectrum = JointSpectrum::from_config(&cfg);
        let state = decompose_sectors(&spectrum, grid, &cfg).unwrap();
        prop_assert!((state.norm() - 1.0).abs() < 1e-6);
        prop_assert_eq!(state.sectors.len(), 2 * grid.n - 1);
        let back = state.bc_grid();
        let dk = grid.dk();
        for i in (0..grid.n).step_by(17) {
            for j in (0..grid.n).step_by(13) {
                let want = spectrum.amplitude(grid.axis(i), grid.axis(j)) * dk;
                prop_assert_eq!(back[i * grid.n + j], want);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn checkpoint_round_trip_arbitrary_state(
        seed_re in proptest::collection::vec(-1.0f64..1.0, 25),
        seed_im in proptest::collection::vec(-1.0f64..1.0, 25),
        time in 0.0f64..100.0,
    ) {
        let grid = KGrid::new(3, 4.0).unwrap();
        let mut feed = seed_re.iter().zip(&seed_im).map(|(&r, &i)| Complex64::new(r, i));
        let mut next = || feed.next().unwrap();
        let sectors = (0..5usize)
            .map(|s| {
                let i_min = s.saturating_sub(2);
                let count = s.min(2) - i_min + 1;
                Sector {
                    index: s,
                    total_k: -8.0 + s as f64 * grid.dk(),
                    a: next(),
                    bc: (0..count).map(|_| next()).collect(),
                    i_min,
                }
            })
            .collect();
        let state = JointState { grid, time, sectors };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.bin");
        let hash = [42u8; 32];
        write_checkpoint(&state, &hash, &path).unwrap();
        let (back, h) = read_checkpoint(&path).unwrap();
        prop_assert_eq!(h, hash);
        prop_assert_eq!(back, state);
    }
}

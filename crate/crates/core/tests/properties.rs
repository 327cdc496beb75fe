//! Property tests for the representation layer: grid/Fock round trips,
//! moment agreement between the two sides, and the cubic-kernel amplitude
//! pattern.

use cubic_core::fock::{self, FockVector, XPolynomial};
use cubic_core::grid::{from_grid, to_grid, GridSpec};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

const DIM: usize = 48;

/// Random normalized state supported on the lowest `support` levels.
fn low_energy_state(support: usize) -> impl Strategy<Value = FockVector> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), support).prop_filter_map(
        "state must not be numerically null",
        |pairs| {
            let mut amplitudes: Vec<C64> =
                pairs.into_iter().map(|(re, im)| C64::new(re, im)).collect();
            let norm_sq: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
            if norm_sq < 1e-3 {
                return None;
            }
            let scale = 1.0 / norm_sq.sqrt();
            for a in amplitudes.iter_mut() {
                *a *= scale;
            }
            amplitudes.resize(DIM, C64::new(0.0, 0.0));
            Some(FockVector::new(amplitudes).unwrap())
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn grid_round_trip_is_identity(state in low_energy_state(12)) {
        let wf = to_grid(&state, GridSpec::default()).unwrap();
        let back = from_grid(&wf, DIM, 1e-8).unwrap();
        for (a, b) in state.amplitudes.iter().zip(&back.amplitudes) {
            prop_assert!((a - b).norm() < 1e-8, "amplitude deviation {:.3e}", (a - b).norm());
        }
        // Parseval: the projection loses no mass for in-space states.
        prop_assert!((back.norm_sq() - wf.norm_sq()).abs() < 1e-8);
    }

    #[test]
    fn fock_and_grid_moments_agree(state in low_energy_state(10)) {
        let report = fock::moments_pure(&state).unwrap();
        let wf = to_grid(&state, GridSpec::default()).unwrap();
        let m = wf.raw_moments();
        prop_assert!((m.x1 - report.mean_x).abs() < 1e-6);
        prop_assert!((m.x2 - report.mean_x2).abs() < 1e-6);
        prop_assert!((m.p1 - report.mean_p).abs() < 1e-6);
        prop_assert!((m.p2 - report.mean_p2).abs() < 1e-6);
    }

    #[test]
    fn cubic_kernel_amplitude_pattern(chi in 0.005f64..0.2) {
        // (1 + χx̂³)|0⟩ has amplitudes (1, 3χ/(2√2), 0, √3χ/2, 0, …).
        let poly = XPolynomial::new(vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(chi, 0.0),
        ]);
        let (state, norm) = fock::apply_poly_x(&poly, &FockVector::vacuum(16)).unwrap();
        let unnorm: Vec<C64> = state.amplitudes.iter().map(|a| a * norm).collect();
        prop_assert!((unnorm[0] - C64::new(1.0, 0.0)).norm() < 1e-12);
        prop_assert!((unnorm[1] - C64::new(3.0 * chi / (2.0 * 2f64.sqrt()), 0.0)).norm() < 1e-12);
        prop_assert!((unnorm[3] - C64::new(3f64.sqrt() * chi / 2.0, 0.0)).norm() < 1e-12);
        for n in [2usize, 4, 5, 6] {
            prop_assert!(unnorm[n].norm() < 1e-14);
        }
    }

    #[test]
    fn grid_norm_matches_fock_norm(state in low_energy_state(8)) {
        let wf = to_grid(&state, GridSpec::default()).unwrap();
        prop_assert!((wf.norm_sq() - 1.0).abs() < 1e-8);
    }
}

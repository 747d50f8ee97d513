use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use proptest::prelude::*;

use chronoclock::clocks::{resolution_overlap, ClockModel, ClockSpec};
use chronoclock::dynamics::{evolve_composite, evolve_free, pointer_distribution, CompositeOptions, ExitPolicy, Readout};
use chronoclock::exec::Execution;
use chronoclock::lattice::{gaussian_state, Grid, Region};
use chronoclock::observables::{smear, Axis, Distribution, Lattice, ResponseKernel};
use chronoclock::pdx::{free_propagator, restricted_propagator_image, GaussianPacket};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn free_evolution_matches_closed_form(x0 in -5.0f64..5.0, p0 in -3.0f64..3.0, sigma in 0.8f64..2.0, t in 0.0f64..3.0) {
        let g = Grid::new(-40.0, 40.0, 1024).unwrap();
        let psi = gaussian_state(&g, x0, p0, sigma).unwrap();
        let out = evolve_free(&psi, 1.0, t);
        prop_assert!((out.norm() - psi.norm()).abs() < 1e-12);
        let pk = GaussianPacket::wave_packet(x0, p0, sigma);
        let phase = Complex64::from_polar(1.0, p0 * x0);
        for j in (0..1024).step_by(97) {
            let (v, _) = pk.evolve(g.x(j), Complex64::new(t, 0.0), 1.0);
            prop_assert!((phase * v - out.amplitudes()[j]).norm() < 1e-9);
        }
    }

    #[test]
    fn coarse_graining_is_additive(a in 0.0f64..3.0, b in 3.0f64..6.0, c in 6.0f64..10.0) {
        let l = Lattice::new(0.0, 0.05, 201).unwrap();
        let d = Distribution::new(Axis::TimeT, l, l.coordinates().iter().map(|t| (-(t - 4.0f64).powi(2)).exp() + 0.1).collect()).unwrap();
        let whole = d.coarse_grain(a, c).unwrap();
        let parts = d.coarse_grain(a, b).unwrap() + d.coarse_grain(b, c).unwrap();
        prop_assert!((whole - parts).abs() < 1e-12);
        prop_assert!(whole >= 0.0);
    }

    #[test]
    fn propagators_are_reciprocal(x1 in 0.1f64..8.0, x0 in 0.1f64..8.0, t in 0.1f64..5.0, v in -2.0f64..2.0) {
        let a = free_propagator(x1, t, x0, 1.3).unwrap();
        let b = free_propagator(x0, t, x1, 1.3).unwrap();
        prop_assert!((a - b).norm() < 1e-14);
        let r1 = restricted_propagator_image(x1, t, x0, v, 1.3).unwrap();
        let r2 = restricted_propagator_image(x0, t, x1, v, 1.3).unwrap();
        prop_assert!((r1 - r2).norm() < 1e-13);
    }

    #[test]
    fn resolution_overlap_follows_gaussian_law(s in 0.0f64..10.0, lambda in 0.2f64..3.0) {
        let sigma_eps = 0.25;
        let clock = ClockModel::build(&ClockSpec::LinearMomentum { eps0: 2.0, sigma_eps, y0: 0.0 }, Grid::new(-48.0, 48.0, 256).unwrap()).unwrap();
        let o = resolution_overlap(&clock, lambda, s / (lambda * sigma_eps)).norm();
        prop_assert!((o - (-s * s / 2.0).exp()).abs() < 1e-8);
    }

    #[test]
    fn truncation_keeps_initial_weight(eps0 in -5.0f64..5.0, sigma_eps in 0.15f64..1.5, y0 in -3.0f64..3.0) {
        let clock = ClockModel::build(&ClockSpec::LinearMomentum { eps0, sigma_eps, y0 }, Grid::new(-32.0, 32.0, 256).unwrap()).unwrap();
        prop_assert!(clock.captured_mass() >= 1.0 - 1e-8);
        prop_assert!(clock.levels().windows(2).all(|w| w[0].epsilon < w[1].epsilon));
        assert_abs_diff_eq!(clock.initial_state().norm(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn identity_kernel_reproduces_input(shift in -2.0f64..2.0) {
        let l = Lattice::new(-5.0, 0.1, 101).unwrap();
        let d = Distribution::quasi(Axis::TimeT, l, l.coordinates().iter().map(|t| (t - shift) * (-(t * t)).exp()).collect()).unwrap();
        let out = smear(&d, &ResponseKernel::identity(l, Axis::TimeT)).unwrap();
        for (a, b) in out.density().iter().zip(d.density()) {
            prop_assert!((a - b).abs() < 1e-13);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn composite_readout_is_unitary(lambda in 0.0f64..0.3, x0 in 6.0f64..9.0) {
        let g = Grid::new(-30.0, 30.0, 512).unwrap();
        let psi = gaussian_state(&g, x0, -3.0, 1.5).unwrap();
        let clock = ClockModel::build(&ClockSpec::LinearMomentum { eps0: 1.0, sigma_eps: 0.3, y0: 0.0 }, Grid::new(-16.0, 16.0, 128).unwrap()).unwrap();
        let opts = CompositeOptions { execution: Execution::Sequential, exit: ExitPolicy::Warn };
        let st = evolve_composite(&psi, &clock, lambda, Region::HalfLinePositive, 1.0, 2.0, 0.005, opts).unwrap();
        let pi = pointer_distribution(&st, Readout::All, Execution::Sequential).unwrap();
        prop_assert!((pi.mass() - 1.0).abs() < 1e-6);
        prop_assert!(st.max_norm_drift() < 1e-10);
    }
}

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use chronoclock::lattice::Grid;
use chronoclock::pdx::{
    grid_reference, pdx_first_crossing, relative_l2, scattering_integral, scattering_integral_oracle, sqrt_i,
    CrossingTable, GaussianPacket, PostCrossing,
};

#[test]
fn branch_convention() {
    assert!((sqrt_i() - Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)).norm() < 1e-16);
}

#[test]
fn decomposition_without_step_reproduces_free_evolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let sigma = 0.15;
    for _ in 0..5 {
        let x0 = rng.gen_range(6.0..9.0);
        let x1 = rng.gen_range(-8.0..-0.5);
        let t = rng.gen_range(1.0..5.0);
        let src = GaussianPacket::wave_packet(x0, -2.0, 1.0);
        let pdx = pdx_first_crossing(x1, &src, t, 0.0, 1.0, PostCrossing::Free { sigma }).unwrap();
        let (exact, _) = src.evolve(x1, Complex64::new(t, -sigma * sigma), 1.0);
        assert!((pdx - exact).norm() <= 1e-5 * src.amplitude.norm(), "x0={x0} x1={x1} t={t}: {pdx} vs {exact}");
    }
}

#[test]
fn semiclassical_error_exceeds_exact_error() {
    let grid = Grid::new(-30.0, 30.0, 1024).unwrap();
    let sigma = 4.0 * grid.dx();
    let src = GaussianPacket::wave_packet(5.0, -3.0, 1.0);
    let (tau, dt) = (3.5, 3e-4);
    let xs: Vec<f64> = (0..25).map(|i| -10.0 + 0.4 * i as f64).collect();
    let mut last = f64::INFINITY;
    for ratio in [5.0, 10.0, 20.0] {
        let v = 4.5 / ratio;
        let table = CrossingTable::step_potential(&grid, &xs, v, 1.0, sigma, tau, dt).unwrap();
        let ends = table.endpoints().to_vec();
        let reference = grid_reference(&grid, &src, tau, v, 1.0, sigma, dt, &ends).unwrap();
        let semi: Vec<Complex64> =
            ends.iter().map(|&x| pdx_first_crossing(x, &src, tau, v, 1.0, PostCrossing::Free { sigma }).unwrap()).collect();
        let exact: Vec<Complex64> = (0..ends.len())
            .map(|i| pdx_first_crossing(ends[i], &src, table.duration(), v, 1.0, PostCrossing::Tabulated { table: &table, index: i }).unwrap())
            .collect();
        let (es, ee) = (relative_l2(&semi, &reference), relative_l2(&exact, &reference));
        assert!(es >= ee, "E/V={ratio}: semiclassical {es} < exact {ee}");
        assert!(es < last);
        last = es;
    }
}

#[test]
fn scattering_integral_sign_flips_across_origin() {
    let a = scattering_integral(1.5, 2.0, 1.0).unwrap();
    let b = scattering_integral(-1.5, 2.0, 1.0).unwrap();
    assert!((a + b).norm() < 1e-14);
    let o = scattering_integral_oracle(-1.5, 2.0, 1.0).unwrap();
    assert!((o - b).norm() / b.norm() < 1e-3);
}

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use fisher_dimer::geometry::Lattice;
use fisher_dimer::spectral::PeriodicCell;
use fisher_dimer::{Complex64, Error};
use proptest::prelude::*;

const CATALAN: f64 = 0.915_965_594_177_219;

fn cells() -> Vec<PeriodicCell> {
    [Lattice::z2(), Lattice::triangular(), Lattice::honeycomb()].into_iter().map(|l| PeriodicCell::new(l).unwrap()).collect()
}

#[test]
fn square_lattice_ising_free_energy_is_the_classical_critical_value() {
    // −log Z per site at the critical point of the square lattice: log √2 + 2G/π.
    let cell = PeriodicCell::new(Lattice::z2()).unwrap();
    let f = cell.free_energy_ising().unwrap() / cell.primal_vertex_count() as f64;
    assert!((f + (SQRT_2.ln() + 2.0 * CATALAN / PI)).abs() < 1e-13, "{f}");
}

#[test]
fn rectangular_cell_at_right_angle_is_the_square_lattice() {
    let square = PeriodicCell::new(Lattice::z2()).unwrap();
    let rect = PeriodicCell::new(Lattice::rectangular(FRAC_PI_4).unwrap()).unwrap();
    let per_site = |c: &PeriodicCell| c.free_energy_dimer().unwrap() / c.primal_vertex_count() as f64;
    assert!((per_site(&square) - per_site(&rect)).abs() < 1e-13);
}

#[test]
fn square_lattice_ratio_constant() {
    // 2 · (cot²(π/8) − 1)² with cot(π/8) = 1 + √2.
    let cell = PeriodicCell::new(Lattice::z2()).unwrap();
    let expected = 2.0 * ((1.0 + SQRT_2).powi(2) - 1.0).powi(2);
    assert!((cell.ratio_constant() - expected).abs() < 1e-12 * expected);
}

#[test]
fn characteristic_polynomials_vanish_at_the_real_node() {
    let one = Complex64::new(1.0, 0.0);
    for cell in cells() {
        let scale = cell.char_poly(Complex64::new(-1.0, 0.0), Complex64::new(-1.0, 0.0)).norm();
        assert!(cell.char_poly(one, one).norm() < 1e-10 * scale, "{}", cell.lattice.name);
        assert!(cell.laplacian_char_poly(one, one).norm() < 1e-10);
    }
}

#[test]
fn ratio_is_constant_and_predicted() {
    for cell in cells() {
        let report = cell.check_ratio(40, 5).unwrap();
        assert!(report.spread < 1e-8);
        assert!(((report.mean - report.predicted) / report.predicted).abs() < 1e-8, "{}", cell.lattice.name);
    }
}

#[test]
fn torus_integral_reproduces_closed_forms() {
    for cell in cells() {
        let integral = cell.free_energy_integral(128).unwrap();
        let closed = cell.free_energy_dimer().unwrap();
        assert!((integral.value - closed).abs() < 1e-6, "{}: {} vs {closed}", cell.lattice.name, integral.value);
    }
    let cell = PeriodicCell::new(Lattice::z2()).unwrap();
    assert!(matches!(cell.free_energy_integral(102), Err(Error::OutOfRange { .. })));
    assert!(cell.free_energy_integral(32).is_err());
}

#[test]
fn entropy_two_ways() {
    for cell in cells() {
        let direct = cell.entropy_dimer().unwrap();
        let closed = cell.entropy_closed_form().unwrap();
        assert!((direct - closed).abs() < 1e-12, "{}: {direct} vs {closed}", cell.lattice.name);
    }
}

/// Σᵢ K_{x,xᵢ} K⁻¹_{xᵢ,y} = δ with every inverse entry taken from the
/// torus integral: the Fourier oracle checked on its own terms.
#[test]
fn fourier_inverse_inverts_the_kasteleyn_operator() {
    for cell in cells() {
        let n = cell.order();
        for x in [0, n / 2, n - 1] {
            let row = cell.orientation.row(&cell.fisher, x);
            for y in 0..n {
                let queries: Vec<(usize, usize, [i32; 2])> = row.iter().map(|&(xi, _, s)| (xi, y, s)).collect();
                let values = cell.fourier_inverse_entries(&queries, 256).unwrap();
                let sum: f64 = row.iter().zip(&values).map(|(&(_, k, _), v)| k * v.value).sum();
                let delta = if x == y { 1.0 } else { 0.0 };
                assert!((sum - delta).abs() < 1e-6, "{} ({x}, {y}): {sum}", cell.lattice.name);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ising_free_energy_is_dimer_minus_couplings(theta in 0.05..1.5f64) {
        let cell = PeriodicCell::new(Lattice::rectangular(theta).unwrap()).unwrap();
        let lhs = cell.free_energy_ising().unwrap();
        let rhs = cell.free_energy_dimer().unwrap() - cell.log_sinh_coupling_sum().unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn characteristic_polynomial_symmetries(a in 0.0..(2.0 * PI), b in 0.0..(2.0 * PI), r in 0.5..2.0f64) {
        let cell = PeriodicCell::new(Lattice::honeycomb()).unwrap();
        let (z, w) = (Complex64::from_polar(r, a), Complex64::from_polar(1.0 / r, b));
        let p = cell.char_poly(z, w);
        prop_assert!((cell.char_poly(z.conj(), w.conj()) - p.conj()).norm() <= 1e-10 * p.norm().max(1.0));
        // Real on the unit torus.
        let u = cell.char_poly(Complex64::from_polar(1.0, a), Complex64::from_polar(1.0, b));
        prop_assert!(u.im.abs() <= 1e-10 * u.norm().max(1.0));
    }
}

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use fisher_dimer::special::{clausen, composite_gauss, gauss_legendre, lobachevsky};
use fisher_dimer::Complex64;
use proptest::prelude::*;

const CATALAN: f64 = 0.915_965_594_177_219;

/// −∫₀^x log(2 sin t) dt with the logarithmic singularity split off:
/// the remainder log(sin t / t) is smooth and Simpson's rule handles it.
fn lobachevsky_oracle(x: f64) -> f64 {
    let n = 4000;
    let h = x / n as f64;
    let smooth = |t: f64| if t == 0.0 { 0.0 } else { (t.sin() / t).ln() };
    let mut s = smooth(0.0) + smooth(x);
    for i in 1..n {
        s += smooth(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    -(s * h / 3.0) - x * ((2.0 * x).ln() - 1.0)
}

#[test]
fn clausen_at_right_angle_is_catalans_constant() {
    assert!((clausen(FRAC_PI_2) - CATALAN).abs() < 1e-15);
    assert!((lobachevsky(FRAC_PI_4) - CATALAN / 2.0).abs() < 1e-15);
}

#[test]
fn lobachevsky_vanishes_at_zero_and_right_angle() {
    assert_eq!(lobachevsky(0.0), 0.0);
    assert!(lobachevsky(FRAC_PI_2).abs() < 1e-15);
    assert!(lobachevsky(PI).abs() < 1e-15);
}

#[test]
fn single_precision_tracks_double() {
    for x in [0.1f32, 0.5, 1.0, 1.4] {
        let single = lobachevsky(x);
        let double = lobachevsky(f64::from(x));
        assert!((f64::from(single) - double).abs() < 1e-6, "{x}");
    }
}

#[test]
fn gauss_legendre_is_exact_on_polynomials() {
    let (x, w) = gauss_legendre(8);
    assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    for p in 0..16 {
        let quad: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum();
        let exact = if p % 2 == 0 { 2.0 / (p as f64 + 1.0) } else { 0.0 };
        assert!((quad - exact).abs() < 1e-14, "degree {p}");
    }
    let v = composite_gauss(|t| Complex64::new(t.cos(), t.sin()), 0.0, PI, 4, 8);
    assert!((v - Complex64::new(0.0, 2.0)).norm() < 1e-14);
}

proptest! {
    #[test]
    fn lobachevsky_matches_quadrature(x in 1e-3..FRAC_PI_2) {
        prop_assert!((lobachevsky(x) - lobachevsky_oracle(x)).abs() < 1e-11);
    }

    #[test]
    fn lobachevsky_is_odd_and_pi_periodic(x in -3.0..3.0f64) {
        prop_assert!((lobachevsky(-x) + lobachevsky(x)).abs() < 1e-14);
        prop_assert!((lobachevsky(x + PI) - lobachevsky(x)).abs() < 1e-13);
    }

    #[test]
    fn clausen_duplication(t in 0.01..3.1f64) {
        // Cl₂(2θ) = 2 Cl₂(θ) − 2 Cl₂(π − θ).
        let lhs = clausen(2.0 * t);
        let rhs = 2.0 * clausen(t) - 2.0 * clausen(PI - t);
        prop_assert!((lhs - rhs).abs() < 1e-13);
    }
}

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use proptest::prelude::*;

use super::quadrature::{keyhole, ray_integral};
use super::rational::{residue_with_log, Factored};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn one_over_2pi_i() -> Complex64 {
    1.0 / c(0.0, 2.0 * PI)
}

#[test]
fn ray_integral_of_double_pole() {
    // ∫₀^∞ dλ / (λ + 1)² = 1.
    let mut g = Factored::new(c(1.0, 0.0));
    g.push(c(-1.0, 0.0), -2);
    let got = ray_integral(&g, 0.0).unwrap();
    assert!((got - one_over_2pi_i()).norm() < 1e-13, "{got}");
}

#[test]
fn ray_integral_of_conjugate_poles() {
    // ∫₀^∞ dλ / (λ² + 1) = π/2.
    let mut g = Factored::new(c(1.0, 0.0));
    g.push(c(0.0, 1.0), -1);
    g.push(c(0.0, -1.0), -1);
    let got = ray_integral(&g, 0.0).unwrap();
    assert!((got - one_over_2pi_i() * FRAC_PI_2).norm() < 1e-13, "{got}");
}

#[test]
fn ray_integral_rejects_non_integrable() {
    let mut g = Factored::new(c(1.0, 0.0));
    g.push(c(-1.0, 0.0), -1);
    assert!(ray_integral(&g, 0.0).is_err());
    let mut h = Factored::new(c(1.0, 0.0));
    h.push(c(1.0, 0.0), -2);
    assert!(ray_integral(&h, 0.0).is_err(), "pole on the ray");
}

#[test]
fn keyhole_matches_residue_and_ray() {
    let mut g = Factored::new(c(1.0, 0.0));
    g.push(c(-1.0, 0.0), -2);
    let res = residue_with_log(&g, c(-1.0, 0.0), 2, c(0.0, PI));
    // Res of log λ / (λ + 1)² at −1 is 1/λ = −1.
    assert!((res.log_residue - c(-1.0, 0.0)).norm() < 1e-14);
    assert!((res.residue).norm() < 1e-14, "no 1/(λ+1) term");
    let hole = keyhole(|l| g.eval(l), 0.0, 1024, 1e3, 1e-3).unwrap();
    let expected = res.log_residue * c(0.0, 1.0 / (2.0 * PI));
    // Truncation at radius 1e3 costs about log(1e3)/1e3.
    assert!((c(hole.value, hole.imag) - expected).norm() < 2e-3);
    assert!((ray_integral(&g, 0.0).unwrap() - expected).norm() < 1e-13);
}

#[test]
fn eval_matches_direct_product_on_both_sides_of_the_circle() {
    let mut g = Factored::new(c(0.3, -1.2));
    g.push(c(0.5, 0.5), 2);
    g.push(Complex64::from_polar(1.0, 0.4), -3);
    g.push(c(-2.0, 0.1), -1);
    for lambda in [c(0.2, -0.3), c(0.9, 0.1), c(3.0, -4.0), c(-50.0, 20.0)] {
        let direct = c(0.3, -1.2) * (lambda - c(0.5, 0.5)).powi(2) / (lambda - Complex64::from_polar(1.0, 0.4)).powi(3) / (lambda - c(-2.0, 0.1));
        assert!((g.eval(lambda) - direct).norm() <= 1e-13 * direct.norm(), "{lambda}");
    }
}

#[test]
fn push_merges_close_roots_and_drops_cancellations() {
    let mut g = Factored::new(c(1.0, 0.0));
    g.push(c(1.0, 0.0), -1);
    g.push(c(1.0 + 1e-12, 0.0), -1);
    assert_eq!(g.roots.len(), 1);
    assert_eq!(g.roots[0].1, -2);
    g.push(c(1.0, 0.0), 2);
    assert!(g.roots.is_empty());
    assert!(g.poles().is_empty());
}

#[test]
fn regular_part_is_the_taylor_expansion() {
    let q = Complex64::from_polar(1.0, 1.1);
    let mut g = Factored::new(c(2.0, 1.0));
    g.push(q, -3);
    g.push(c(0.3, -0.7), 1);
    g.push(c(-1.5, 0.2), -1);
    let coeffs = g.regular_part(q, 3);
    let h = 1e-3;
    for dir in [c(1.0, 0.0), c(0.0, 1.0), c(-0.6, 0.8)] {
        let t = dir * h;
        let series = coeffs[0] + coeffs[1] * t + coeffs[2] * t * t;
        let exact = g.eval(q + t) * t.powi(3);
        assert!((series - exact).norm() < 1e-8 * exact.norm(), "{series} vs {exact}");
    }
}

/// Simple poles on the unit circle at well separated angles.
fn pole_angles() -> impl Strategy<Value = Vec<f64>> {
    (3usize..6).prop_flat_map(|n| {
        prop::collection::vec(0.0..1.0f64, n)
            .prop_map(move |jitter| jitter.iter().enumerate().map(|(i, j)| 2.0 * PI * (i as f64 + 0.1 + 0.6 * j) / n as f64).collect())
    })
}

proptest! {
    #[test]
    fn residue_sum_equals_ray_integral(
        angles in pole_angles(),
        zero in (-0.9..0.9f64, -0.9..0.9f64),
        scale in (-2.0..2.0f64, -2.0..2.0f64),
    ) {
        let mut g = Factored::new(c(scale.0, scale.1));
        for &a in &angles {
            g.push(Complex64::from_polar(1.0, a), -1);
        }
        g.push(c(zero.0, zero.1), 1);
        let mut sorted = angles.clone();
        sorted.sort_by(f64::total_cmp);
        // Cut through the middle of the widest gap.
        let (mut ray, mut widest) = (0.0, 0.0);
        for i in 0..sorted.len() {
            let a = sorted[i];
            let b = if i + 1 < sorted.len() { sorted[i + 1] } else { sorted[0] + 2.0 * PI };
            if b - a > widest {
                widest = b - a;
                ray = 0.5 * (a + b);
            }
        }
        let log = |q: Complex64| c(q.norm().ln(), ray + (q.arg() - ray).rem_euclid(2.0 * PI));
        let by_residues: Complex64 = g
            .poles()
            .iter()
            .map(|&(q, m)| residue_with_log(&g, q, m, log(q)).log_residue)
            .sum::<Complex64>()
            * c(0.0, 1.0 / (2.0 * PI));
        let by_ray = ray_integral(&g, ray).unwrap();
        let size = g.constant.norm().max(1.0);
        prop_assert!((by_residues - by_ray).norm() < 1e-11 * size, "{} vs {}", by_residues, by_ray);
    }

    #[test]
    fn eval_is_continuous_across_the_unit_circle(arg in 0.0..(2.0 * PI), rho in (-3.0..3.0f64, -3.0..3.0f64)) {
        let mut g = Factored::new(c(1.0, 0.0));
        g.push(c(rho.0, rho.1), -4);
        g.push(c(-rho.1, rho.0 + 0.5), 2);
        let inside = g.eval(Complex64::from_polar(1.0 - 1e-12, arg));
        let outside = g.eval(Complex64::from_polar(1.0 + 1e-12, arg));
        prop_assume!(inside.is_finite() && inside.norm() < 1e8);
        prop_assert!((inside - outside).norm() <= 1e-9 * inside.norm().max(1.0));
    }
}

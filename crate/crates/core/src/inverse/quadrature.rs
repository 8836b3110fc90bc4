//! Numerical contour integrals: the ray reduction used for badly
//! conditioned residue sums, and the keyhole oracle.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::rational::Factored;
use crate::error::{Error, Result};
use crate::special::composite_gauss;

/// Decay exponent of the trapezoid error, e^{−2π·strip/h}.
const STRIP_EXPONENT: f64 = 40.0;

/// (1/2πi) ∫ g along the ray at angle `d`, with λ = e^{s + id}.
///
/// In s the integrand is analytic in a strip whose half-width is the
/// angular distance from the ray to the nearest pole, so the trapezoid
/// rule converges geometrically with a step set from that distance.
pub(crate) fn ray_integral(g: &Factored, d: f64) -> Result<Complex64> {
    let strip = g
        .poles()
        .iter()
        .map(|(q, _)| {
            let a = (q.arg() - d).rem_euclid(2.0 * PI);
            a.min(2.0 * PI - a)
        })
        .fold(PI, f64::min);
    let at_zero: i32 = g.roots.iter().filter(|(r, _)| r.norm() < 1e-12).map(|&(_, e)| e).sum();
    let at_infinity: i32 = g.roots.iter().map(|&(_, e)| e).sum();
    let (left, right) = (f64::from(at_zero + 1), -f64::from(at_infinity + 1));
    if strip < 1e-3 || left <= 0.0 || right <= 0.0 {
        return Err(Error::NonConvergence { what: "ray integral", estimate: f64::INFINITY, tolerance: 1e-10 });
    }
    let h = 2.0 * PI * 0.8 * strip / STRIP_EXPONENT;
    let (lo, hi) = (-(40.0 / left + 2.0), 40.0 / right + 2.0);
    let (k0, k1) = ((lo / h).floor() as i64, (hi / h).ceil() as i64);
    let dir = Complex64::from_polar(1.0, d);
    let (mut fine, mut coarse) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for k in k0..=k1 {
        let s = k as f64 * h;
        let v = g.eval(dir * s.exp()) * s.exp();
        fine += v;
        if k % 2 == 0 {
            coarse += v;
        }
    }
    fine *= h;
    coarse *= 2.0 * h;
    // Errors fall by e^{−E/2} when the step halves.
    let estimate = (fine - coarse).norm() * (-STRIP_EXPONENT / 2.0).exp();
    if !(estimate < 1e-10) || !fine.is_finite() {
        return Err(Error::NonConvergence { what: "ray integral", estimate, tolerance: 1e-10 });
    }
    Ok(fine * dir / Complex64::new(0.0, 2.0 * PI))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub imag: f64,
    /// |value(n) − value(n/2)|.
    pub estimate: f64,
}

const PANEL: usize = 16;

fn keyhole_once<F>(g: &F, d: f64, n: usize, big: f64, small: f64) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
{
    let panels = (n / PANEL).max(1);
    let i = Complex64::new(0.0, 1.0);
    let circle = |r: f64| {
        composite_gauss(
            |t| {
                let l = Complex64::from_polar(r, t);
                g(l) * Complex64::new(r.ln(), t) * i * l
            },
            d,
            d + 2.0 * PI,
            panels,
            PANEL,
        )
    };
    let dir = Complex64::from_polar(1.0, d);
    let ray = composite_gauss(|s| g(dir * s.exp()) * s.exp(), small.ln(), big.ln(), panels, PANEL) * dir;
    let total = circle(big) - circle(small) - ray * (2.0 * PI) * i;
    total / (4.0 * PI * PI)
}

/// Integral of g·log over a keyhole around the cut at angle `d`, divided
/// by 4π², using `n` Gauss nodes per contour piece.
pub(crate) fn keyhole<F>(g: F, d: f64, n: usize, big: f64, small: f64) -> Result<QuadratureResult>
where
    F: Fn(Complex64) -> Complex64,
{
    let fine = keyhole_once(&g, d, n, big, small);
    let coarse = keyhole_once(&g, d, n / 2, big, small);
    let estimate = (fine - coarse).norm();
    if !estimate.is_finite() || estimate > 1e-6 {
        return Err(Error::NonConvergence { what: "keyhole quadrature", estimate, tolerance: 1e-6 });
    }
    Ok(QuadratureResult { value: fine.re, imag: fine.im, estimate })
}

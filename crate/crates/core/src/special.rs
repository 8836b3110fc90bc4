//! Clausen and Lobachevsky functions plus the quadrature rules shared by the
//! numerical oracles.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::scalar::Real;

fn zeta_even(k: usize) -> f64 {
    if k == 1 {
        return std::f64::consts::PI.powi(2) / 6.0;
    }
    let s = (2 * k) as f64;
    let n = 30.0_f64;
    let mut sum = 0.0;
    for m in 1..30 {
        sum += (m as f64).powf(-s);
    }
    sum += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s) + s * n.powf(-s - 1.0) / 12.0 - s * (s + 1.0) * (s + 2.0) * n.powf(-s - 3.0) / 720.0
        + s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * n.powf(-s - 5.0) / 30240.0;
    sum
}

/// Coefficients ζ(2k) / (k (2k+1) (2π)^{2k}) of the odd power series of Cl₂.
fn clausen_coefficients() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let two_pi = 2.0 * std::f64::consts::PI;
        (1..=40)
            .map(|k| {
                let kf = k as f64;
                zeta_even(k) / (kf * (2.0 * kf + 1.0) * two_pi.powi(2 * k as i32))
            })
            .collect()
    })
}

/// Clausen function Cl₂(θ) = −∫₀^θ log|2 sin(t/2)| dt.
pub fn clausen<T: Real>(theta: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut t = theta - two_pi * (theta / two_pi).round();
    if t > T::PI() {
        t = t - two_pi;
    }
    if t == T::zero() {
        return T::zero();
    }
    let mut sum = t - t * t.abs().ln();
    let t2 = t * t;
    let mut power = t * t2;
    for &c in clausen_coefficients() {
        let term = T::lit(c) * power;
        sum = sum + term;
        if term.abs() <= T::epsilon() * sum.abs() * T::lit(1e-2) {
            break;
        }
        power = power * t2;
    }
    sum
}

/// Lobachevsky function L(x) = −∫₀^x log|2 sin t| dt = Cl₂(2x)/2.
pub fn lobachevsky<T: Real>(x: T) -> T {
    clausen(x + x) / T::lit(2.0)
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = nf * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre rule: `panels` equal panels of `order` points each.
pub fn composite_gauss<F>(f: F, a: f64, b: f64, panels: usize, order: usize) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let (xs, ws) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = a + h * p as f64;
        let mid = lo + 0.5 * h;
        for (x, w) in xs.iter().zip(&ws) {
            acc += f(mid + 0.5 * h * x) * (w * 0.5 * h);
        }
    }
    acc
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const G7_WEIGHTS: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * GK_WEIGHTS[7];
    let mut gauss = fc * G7_WEIGHTS[3];
    for j in 0..7 {
        let dx = h * GK_NODES[j];
        let s = f(c - dx) + f(c + dx);
        kron += s * GK_WEIGHTS[j];
        if j % 2 == 1 {
            gauss += s * G7_WEIGHTS[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

/// Adaptive Gauss–Kronrod (7/15) quadrature of a complex integrand.
///
/// Returns the integral and the summed error estimate. Intervals are split
/// until the local estimate drops below its share of `tol` or the interval
/// budget runs out.
pub fn adaptive_gk15<F>(f: F, a: f64, b: f64, tol: f64, max_intervals: usize) -> (Complex64, f64)
where
    F: Fn(f64) -> Complex64,
{
    let mut pending = vec![(a, b, gk15(&f, a, b))];
    let mut total = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut count = 1usize;
    let width = b - a;
    while let Some((lo, hi, (val, err))) = pending.pop() {
        let share = tol * (hi - lo) / width;
        if err <= share.max(1e-300) || count >= max_intervals || hi - lo < 1e-12 * width {
            total += val;
            error += err;
            continue;
        }
        let mid = 0.5 * (lo + hi);
        pending.push((lo, mid, gk15(&f, lo, mid)));
        pending.push((mid, hi, gk15(&f, mid, hi)));
        count += 2;
    }
    (total, error)
}

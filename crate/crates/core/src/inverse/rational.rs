//! Factored rational functions C·∏(λ − ρ)^e and their residues against a
//! branch of the logarithm.

use num_complex::Complex64;

const MERGE_TOL: f64 = 1e-9;

fn pow(z: Complex64, e: i32) -> Complex64 {
    if e >= 0 {
        z.powu(e as u32)
    } else {
        z.inv().powu(e.unsigned_abs())
    }
}

/// C·∏(λ − ρᵢ)^{eᵢ} with distinct roots and non-zero exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct Factored {
    pub constant: Complex64,
    pub roots: Vec<(Complex64, i32)>,
}

impl Factored {
    pub fn new(constant: Complex64) -> Self {
        Self { constant, roots: Vec::new() }
    }

    pub fn scale(&mut self, c: Complex64) {
        self.constant *= c;
    }

    /// Multiply by (λ − ρ)^e, merging with an existing root within 1e-9.
    pub fn push(&mut self, rho: Complex64, e: i32) {
        if let Some(slot) = self.roots.iter_mut().find(|(r, _)| (*r - rho).norm() < MERGE_TOL) {
            slot.1 += e;
        } else {
            self.roots.push((rho, e));
        }
        self.roots.retain(|&(_, e)| e != 0);
    }

    /// Value at λ. Outside the unit disc the factors are taken as
    /// λ(1 − ρ/λ) so that high orders at large |λ| do not overflow.
    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        if lambda.norm_sqr() <= 1.0 {
            return self.roots.iter().fold(self.constant, |acc, &(r, e)| acc * pow(lambda - r, e));
        }
        let inv = one / lambda;
        let total: i32 = self.roots.iter().map(|&(_, e)| e).sum();
        let rest = self.roots.iter().fold(self.constant, |acc, &(r, e)| acc * pow(one - r * inv, e));
        rest * (lambda.ln() * total as f64).exp()
    }

    /// Poles with their orders.
    pub fn poles(&self) -> Vec<(Complex64, usize)> {
        self.roots.iter().filter(|(_, e)| *e < 0).map(|&(r, e)| (r, (-e) as usize)).collect()
    }

    /// Laurent data at the pole `q` of order m: the Taylor coefficients
    /// G_0..G_{m−1} of (λ − q)^m · self around q.
    pub fn regular_part(&self, q: Complex64, m: usize) -> Vec<Complex64> {
        let mut g0 = self.constant;
        for &(r, e) in &self.roots {
            if (r - q).norm() >= MERGE_TOL {
                g0 *= (q - r).powi(e);
            }
        }
        // log of the regular part: s_j = Σ e_r (−1)^{j+1} / (j (q − r)^j).
        let mut s = vec![Complex64::new(0.0, 0.0); m];
        for &(r, e) in &self.roots {
            if (r - q).norm() < MERGE_TOL {
                continue;
            }
            let inv = 1.0 / (q - r);
            let mut pw = Complex64::new(1.0, 0.0);
            for (j, sj) in s.iter_mut().enumerate().skip(1) {
                pw *= inv;
                let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                *sj += pw * (sign * e as f64 / j as f64);
            }
        }
        let mut exp_coeffs = vec![Complex64::new(0.0, 0.0); m];
        exp_coeffs[0] = Complex64::new(1.0, 0.0);
        for n in 1..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 1..=n {
                acc += s[k] * exp_coeffs[n - k] * k as f64;
            }
            exp_coeffs[n] = acc / n as f64;
        }
        exp_coeffs.iter().map(|c| c * g0).collect()
    }
}

/// Residue of the function and of the function times a logarithm branch at
/// a pole, with the branch value `log_q` = log q.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleResidue {
    pub location: Complex64,
    pub order: usize,
    pub residue: Complex64,
    pub log_value: Complex64,
    pub log_residue: Complex64,
    /// Σ|terms| of the log-residue sum, for conditioning estimates.
    pub magnitude: f64,
}

pub fn residue_with_log(f: &Factored, q: Complex64, m: usize, log_q: Complex64) -> PoleResidue {
    let g = f.regular_part(q, m);
    let mut log_coeffs = vec![log_q; m];
    let inv = 1.0 / q;
    let mut pw = Complex64::new(1.0, 0.0);
    for (k, c) in log_coeffs.iter_mut().enumerate().skip(1) {
        pw *= inv;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        *c = pw * (sign / k as f64);
    }
    let mut log_residue = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    for j in 0..m {
        let term = g[j] * log_coeffs[m - 1 - j];
        log_residue += term;
        magnitude += term.norm();
    }
    PoleResidue { location: q, order: m, residue: g[m - 1], log_value: log_q, log_residue, magnitude }
}

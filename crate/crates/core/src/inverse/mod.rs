//! Local formula for the inverse Kasteleyn matrix of the critical Fisher
//! graph: each entry is a contour integral of f_x(λ) f_y(−λ) Exp(λ) log λ,
//! evaluated here exactly by residues, plus a small constant.

mod gamma;
mod quadrature;
pub mod rational;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fisher::{EdgeClass, VertexType};
use crate::geometry::{exp_along, DiamondPath};
use crate::model::CriticalModel;

pub use gamma::{CaseTag, Exceptional, GammaPath};
pub use quadrature::QuadratureResult;
pub use rational::{Factored, PoleResidue};

const TWO_PI: f64 = 2.0 * PI;
const GAP_TIE: f64 = 1e-9;

/// One term numerator/(pole − λ) of an f-function, with its sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleTerm {
    pub pole: Complex64,
    pub numerator: Complex64,
    pub sign: f64,
}

/// f_x(λ) = Σ sign · numerator / (pole − λ) for a Fisher vertex x.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleFunction {
    pub owner: usize,
    pub ty: VertexType,
    pub terms: Vec<PoleTerm>,
}

impl PoleFunction {
    pub fn eval(&self, lambda: Complex64) -> Result<Complex64> {
        self.terms.iter().try_fold(Complex64::new(0.0, 0.0), |acc, t| {
            let den = t.pole - lambda;
            if den.norm() < 1e-14 {
                return Err(Error::PoleHit { context: "f_value", re: lambda.re, im: lambda.im });
            }
            Ok(acc + t.numerator * t.sign / den)
        })
    }

    /// Coefficient N with f(λ) ≈ −N/λ at infinity.
    fn leading(&self) -> Complex64 {
        self.terms.iter().map(|t| t.numerator * t.sign).sum()
    }

    /// f(λ) when `reflected` is false, f(−λ) otherwise, in factored form.
    fn factored(&self, reflected: bool) -> Factored {
        // ±λ enters as (p ∓ λ); reflected terms read c/(λ + p).
        let flip = if reflected { 1.0 } else { -1.0 };
        let pole_at = |p: Complex64| if reflected { -p } else { p };
        let c: Vec<Complex64> = self.terms.iter().map(|t| t.numerator * t.sign).collect();
        match self.terms.len() {
            1 => {
                let mut f = Factored::new(c[0] * flip);
                f.push(pole_at(self.terms[0].pole), -1);
                f
            }
            _ => {
                let (p1, p2) = (self.terms[0].pole, self.terms[1].pole);
                let b = c[0] + c[1];
                let a = c[0] * p2 + c[1] * p1;
                let mut f = if b.norm() < 1e-14 {
                    Factored::new(a)
                } else {
                    let mut f = Factored::new(b * flip);
                    f.push(if reflected { -a / b } else { a / b }, 1);
                    f
                };
                f.push(pole_at(p1), -1);
                f.push(pole_at(p2), -1);
                f
            }
        }
    }
}

/// How the integral part of an entry was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Residues when well conditioned, the ray integral otherwise.
    Auto,
    Residue,
    Ray,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Auto => "auto",
            Method::Residue => "residue",
            Method::Ray => "ray",
        }
    }
}

/// Which rule fixed the branch cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectorRule {
    NoPoles,
    LargestGap,
    Convention,
    Direction,
}

/// Pole-free sector holding the branch cut of log λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorSpec {
    pub start: f64,
    pub end: f64,
    /// Direction of the cut; log-values have argument in (ray, ray + 2π).
    pub ray: f64,
    pub rule: SectorRule,
}

impl SectorSpec {
    pub fn width(&self) -> f64 {
        self.end - self.start
    }

    pub fn log(&self, q: Complex64) -> Complex64 {
        let phi = self.ray + (q.arg() - self.ray).rem_euclid(TWO_PI);
        Complex64::new(q.norm().ln(), phi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InverseEntry {
    pub x: usize,
    pub y: usize,
    pub value: f64,
    /// Imaginary part of the computed value; zero up to rounding.
    pub imag: f64,
    pub integral: f64,
    pub constant: f64,
    pub method: Method,
    pub sector: SectorSpec,
    pub residues: Vec<PoleResidue>,
    pub case: Option<CaseTag>,
}

/// Residue sums whose terms exceed this size lose too many digits; the ray
/// integral is used instead under [`Method::Auto`].
const RESIDUE_MAGNITUDE_LIMIT: f64 = 1e4;

/// Evaluator for entries of K⁻¹ on a fixed model. Diamond paths are cached
/// per pair of primal vertices.
#[derive(Debug)]
pub struct LocalInverse<'m> {
    model: &'m CriticalModel,
    method: Method,
    paths: Mutex<HashMap<(usize, usize), Arc<DiamondPath>>>,
}

impl<'m> LocalInverse<'m> {
    pub fn new(model: &'m CriticalModel) -> Self {
        Self::with_method(model, Method::Auto)
    }

    pub fn with_method(model: &'m CriticalModel, method: Method) -> Self {
        Self { model, method, paths: Mutex::new(HashMap::new()) }
    }

    pub fn model(&self) -> &'m CriticalModel {
        self.model
    }

    pub fn pole_function(&self, x: usize) -> PoleFunction {
        let f = &self.model.fisher;
        let fv = f.vertices[x];
        let term = |u: usize| {
            let a = self.model.angles.alpha(u);
            let sign = if f.vertices[u].ty == VertexType::Z { -1.0 } else { 1.0 };
            PoleTerm { pole: Complex64::from_polar(1.0, a), numerator: Complex64::from_polar(1.0, a / 2.0), sign }
        };
        let terms = match fv.ty {
            VertexType::V => vec![term(f.index(fv.g, fv.k, VertexType::W)), term(f.index(fv.g, fv.k, VertexType::Z))],
            _ => vec![term(x)],
        };
        PoleFunction { owner: x, ty: fv.ty, terms }
    }

    pub fn f_value(&self, x: usize, lambda: Complex64) -> Result<Complex64> {
        self.pole_function(x).eval(lambda)
    }

    /// Minimal diamond path between primal vertices, from `from` to `to`.
    pub fn path(&self, from: usize, to: usize) -> Result<Arc<DiamondPath>> {
        if let Some(p) = self.paths.lock().expect("path cache poisoned").get(&(from, to)) {
            return Ok(p.clone());
        }
        let p = Arc::new(self.model.diamond.minimal_path(from, to)?);
        self.paths.lock().expect("path cache poisoned").insert((from, to), p.clone());
        Ok(p)
    }

    /// Exp_{x,y}(λ) between the primal vertices of two Fisher vertices.
    pub fn exp(&self, x: usize, y: usize, lambda: Complex64) -> Result<Complex64> {
        let f = &self.model.fisher;
        let path = self.path(f.vertices[y].g, f.vertices[x].g)?;
        exp_along(&path.steps, lambda)
    }

    /// Σ_i K_{x,xᵢ} f_{xᵢ}(λ) Exp_{xᵢ,y}(λ) for a Fisher vertex x and a
    /// primal vertex y; vanishes identically.
    pub fn kernel_residual(&self, x: usize, y: usize, lambda: Complex64) -> Result<Complex64> {
        let f = &self.model.fisher;
        let mut acc = Complex64::new(0.0, 0.0);
        for (xi, k, _) in self.model.kasteleyn().row(x) {
            let path = self.path(y, f.vertices[xi].g)?;
            acc += self.f_value(xi, lambda)? * exp_along(&path.steps, lambda)? * k;
        }
        Ok(acc)
    }

    /// f_x(λ) f_y(−λ) Exp_{x,y}(λ) as a factored rational function.
    pub fn integrand(&self, x: usize, y: usize) -> Result<Factored> {
        let f = &self.model.fisher;
        let mut g = self.pole_function(x).factored(false);
        let fy = self.pole_function(y).factored(true);
        g.scale(fy.constant);
        for &(r, e) in &fy.roots {
            g.push(r, e);
        }
        let path = self.path(f.vertices[y].g, f.vertices[x].g)?;
        for &s in &path.steps {
            g.scale(Complex64::new(-1.0, 0.0));
            g.push(-s, 1);
            g.push(s, -1);
        }
        Ok(g)
    }

    /// Constant part: ±1/4 on same-decoration pairs of w/z-type vertices.
    pub fn constant_term(&self, x: usize, y: usize) -> f64 {
        let f = &self.model.fisher;
        let (vx, vy) = (f.vertices[x], f.vertices[y]);
        if vx.g != vy.g || vx.ty == VertexType::V || vy.ty == VertexType::V {
            return 0.0;
        }
        if x == y {
            return if vx.ty == VertexType::W { 0.25 } else { -0.25 };
        }
        // Inner cycle positions: z_k at 2k, w_k at 2k + 1, counterclockwise.
        let d = f.degree(vx.g);
        let pos = |k: usize, ty: VertexType| 2 * k + usize::from(ty == VertexType::W);
        let target = pos(vy.k, vy.ty);
        let mut p = pos(vx.k, vx.ty);
        let mut n = 0;
        while p != target {
            if p % 2 == 0 {
                // z_k → w_{k−1} crosses the ring edge (w_{k−1}, z_k) against its
                // canonical direction.
                let k = p / 2;
                let e = f.ring_edge(vx.g, (k + d - 1) % d);
                if self.model.orientation.sign[e] < 0 {
                    n += 1;
                }
            }
            p = (p + 2 * d - 1) % (2 * d);
        }
        if n % 2 == 0 {
            0.25
        } else {
            -0.25
        }
    }

    fn is_vv_pair(&self, x: usize, y: usize) -> bool {
        let f = &self.model.fisher;
        if f.vertices[x].ty != VertexType::V || f.vertices[y].ty != VertexType::V {
            return false;
        }
        x == y || f.edge_between(x, y).is_some_and(|e| f.edges[e].class == EdgeClass::Inter)
    }

    /// Branch sector for the pair given the poles of its integrand.
    pub fn sector(&self, x: usize, y: usize, poles: &[(Complex64, usize)]) -> Result<SectorSpec> {
        let f = &self.model.fisher;
        let mut angles: Vec<f64> = poles.iter().map(|(q, _)| q.arg().rem_euclid(TWO_PI)).collect();
        angles.sort_by(|a, b| a.total_cmp(b));
        match angles.len() {
            0 => return Ok(SectorSpec { start: 0.0, end: TWO_PI, ray: PI, rule: SectorRule::NoPoles }),
            1 => {
                let a = angles[0];
                return Ok(SectorSpec { start: a, end: a + TWO_PI, ray: a + PI, rule: SectorRule::LargestGap });
            }
            _ => {}
        }
        let gaps: Vec<(f64, f64)> = (0..angles.len())
            .map(|i| {
                let a = angles[i];
                let b = if i + 1 < angles.len() { angles[i + 1] } else { angles[0] + TWO_PI };
                (a, b)
            })
            .collect();
        let gap_from = |start: f64, rule: SectorRule| {
            gaps.iter()
                .find(|(a, _)| (Complex64::from_polar(1.0, *a) - Complex64::from_polar(1.0, start)).norm() < 1e-7)
                .map(|&(a, b)| SectorSpec { start: a, end: b, ray: 0.5 * (a + b), rule })
                .ok_or_else(|| Error::EmptySector { x: f.name(x), y: f.name(y) })
        };

        let (vx, vy) = (f.vertices[x], f.vertices[y]);
        let wz = |t: VertexType| t != VertexType::V;
        if vx.g == vy.g && wz(vx.ty) && wz(vy.ty) && poles.len() == 2 && (poles[0].0 + poles[1].0).norm() < 1e-9 {
            let x_pole = self.model.angles.alpha(x);
            let y_pole = self.model.angles.alpha(y) + PI;
            let start = if vy.ty == VertexType::W { y_pole } else { x_pole };
            return gap_from(start, SectorRule::Convention);
        }
        if self.is_vv_pair(x, y) {
            let xz = f.index(vx.g, vx.k, VertexType::Z);
            return gap_from(self.model.angles.alpha(xz), SectorRule::Convention);
        }

        let widest = gaps.iter().map(|(a, b)| b - a).fold(0.0, f64::max);
        let tied: Vec<(f64, f64)> = gaps.iter().copied().filter(|(a, b)| b - a > widest - GAP_TIE).collect();
        if tied.len() == 1 {
            let (a, b) = tied[0];
            return Ok(SectorSpec { start: a, end: b, ray: 0.5 * (a + b), rule: SectorRule::LargestGap });
        }
        let gamma = self.build_gamma(x, y)?;
        let v = gamma.y_hat - gamma.x_hat;
        if v.norm() < 1e-12 {
            return Err(Error::EmptySector { x: f.name(x), y: f.name(y) });
        }
        let dir = v.arg().rem_euclid(TWO_PI);
        for (a, b) in tied {
            for shift in [0.0, TWO_PI] {
                let d = dir + shift;
                if d > a + GAP_TIE && d < b - GAP_TIE {
                    return Ok(SectorSpec { start: a, end: b, ray: 0.5 * (a + b), rule: SectorRule::Direction });
                }
            }
        }
        Err(Error::PoleCollision { x: f.name(x), y: f.name(y) })
    }

    /// Entry K⁻¹_{x,y} with its breakdown.
    pub fn entry(&self, x: usize, y: usize) -> Result<InverseEntry> {
        let g = self.integrand(x, y)?;
        let poles = g.poles();
        let sector = self.sector(x, y, &poles)?;
        let residues: Vec<PoleResidue> = poles.iter().map(|&(q, m)| rational::residue_with_log(&g, q, m, sector.log(q))).collect();
        let magnitude = residues.iter().map(|r| r.magnitude).fold(0.0, f64::max);
        let method = match self.method {
            Method::Auto if magnitude > RESIDUE_MAGNITUDE_LIMIT => Method::Ray,
            Method::Auto => Method::Residue,
            m => m,
        };
        let integral = match method {
            Method::Ray => quadrature::ray_integral(&g, sector.ray)?,
            _ => residues.iter().map(|r| r.log_residue).sum::<Complex64>() * Complex64::new(0.0, 1.0 / TWO_PI),
        };
        let constant = self.constant_term(x, y);
        Ok(InverseEntry {
            x,
            y,
            value: integral.re + constant,
            imag: integral.im,
            integral: integral.re,
            constant,
            method,
            sector,
            residues,
            case: self.build_gamma(x, y).ok().map(|g| g.case),
        })
    }

    pub fn value(&self, x: usize, y: usize) -> Result<f64> {
        Ok(self.entry(x, y)?.value)
    }

    /// Entries for many pairs, computed in parallel.
    pub fn entries(&self, pairs: &[(usize, usize)]) -> Vec<Result<InverseEntry>> {
        pairs.par_iter().map(|&(x, y)| self.entry(x, y)).collect()
    }

    /// Keyhole-contour quadrature of the same integral, as an oracle for
    /// [`entry`](Self::entry). `n` nodes per contour piece; the estimate
    /// compares against n/2 nodes.
    pub fn entry_quadrature(&self, x: usize, y: usize, n: usize) -> Result<QuadratureResult> {
        let g = self.integrand(x, y)?;
        let sector = self.sector(x, y, &g.poles())?;
        let fx = self.pole_function(x);
        let fy = self.pole_function(y);
        let f = &self.model.fisher;
        let path = self.path(f.vertices[y].g, f.vertices[x].g)?;
        let integrand = |l: Complex64| -> Complex64 {
            let a = fx.eval(l).unwrap_or(Complex64::new(f64::NAN, 0.0));
            let b = fy.eval(-l).unwrap_or(Complex64::new(f64::NAN, 0.0));
            let e = exp_along(&path.steps, l).unwrap_or(Complex64::new(f64::NAN, 0.0));
            a * b * e
        };
        let mut res = quadrature::keyhole(integrand, sector.ray, n, 1e3, 1e-3)?;
        res.value += self.constant_term(x, y);
        Ok(res)
    }

    /// Leading term of K⁻¹_{x,y} as the primal vertices move apart.
    pub fn asymptotic(&self, x: usize, y: usize) -> f64 {
        let f = &self.model.fisher;
        let (px, py) = (self.pole_function(x), self.pole_function(y));
        let at_zero = |p: &PoleFunction| -> Complex64 { p.terms.iter().map(|t| t.numerator * t.sign / t.pole).sum() };
        let a0 = at_zero(&px) * at_zero(&py);
        let a_inf = px.leading() * py.leading();
        let xi = self.model.graph.position(f.vertices[x].g) - self.model.graph.position(f.vertices[y].g);
        let z = (a_inf / (2.0 * xi) - a0 / (2.0 * xi.conj())) / Complex64::new(0.0, TWO_PI);
        z.re
    }
}

#[cfg(test)]
mod tests;

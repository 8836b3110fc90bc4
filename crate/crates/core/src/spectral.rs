//! Periodic graphs: Fourier-transformed Kasteleyn and Laplacian matrices,
//! characteristic polynomials, free energies, entropy and the Fourier
//! inverse.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fisher::{EdgeClass, FisherGraph, KasteleynOrientation, StarGraph, VertexType};
use crate::geometry::{Lattice, LatticePatch};
use crate::model::CriticalModel;
use crate::weights::{entropy_summand, free_energy_summand, ising_free_energy_summand, sinh_coupling, CriticalWeights};

/// One fundamental domain of a periodic critical model on the torus.
#[derive(Debug, Clone)]
pub struct PeriodicCell {
    pub lattice: Lattice,
    pub fisher: FisherGraph,
    pub orientation: KasteleynOrientation,
    /// Half-angles of the primal edges of the domain.
    pub thetas: Vec<f64>,
}

fn pow2(z: Complex64, w: Complex64, s: [i32; 2]) -> Complex64 {
    z.powi(s[0]) * w.powi(s[1])
}

/// Point (j + ½)/n of the half-shifted grid on the unit circle.
fn grid_point(j: usize, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (j as f64 + 0.5) / n as f64)
}

/// Torus average with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusIntegral {
    pub value: f64,
    /// |value(n) − value(n/2)| before extrapolation.
    pub estimate: f64,
}

/// Sampled ratio of the two characteristic polynomials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioReport {
    pub predicted: f64,
    pub mean: f64,
    /// (max − min)/|mean| over the samples.
    pub spread: f64,
    pub samples: usize,
}

impl PeriodicCell {
    /// Decorate and orient the cell, choosing among the four spin
    /// structures the one whose characteristic polynomial vanishes at (1, 1).
    pub fn new(lattice: Lattice) -> Result<Self> {
        let fisher = FisherGraph::from_stars(&StarGraph::from_lattice(&lattice))?;
        let base = KasteleynOrientation::compute(&fisher)?;
        let variants =
            [base.clone(), base.flip_winding(&fisher, 0), base.flip_winding(&fisher, 1), base.flip_winding(&fisher, 0).flip_winding(&fisher, 1)];
        let one = Complex64::new(1.0, 0.0);
        let mut best: Option<(f64, KasteleynOrientation)> = None;
        for o in variants {
            let det = fourier_matrix(&fisher, &o, one, one).determinant().norm();
            if best.as_ref().is_none_or(|(d, _)| det < *d) {
                best = Some((det, o));
            }
        }
        let (det, orientation) = best.expect("four variants");
        if det > 1e-8 {
            return Err(Error::OrientationFailure {
                face: 0,
                detail: format!("no spin structure makes the characteristic polynomial vanish at (1,1) (min |P| = {det:.3e})"),
            });
        }
        let thetas = fisher.edges.iter().filter(|e| e.class == EdgeClass::Inter).map(|e| fisher.theta(e.a)).collect();
        Ok(Self { lattice, fisher, orientation, thetas })
    }

    pub fn order(&self) -> usize {
        self.fisher.vertex_count()
    }

    pub fn primal_vertex_count(&self) -> usize {
        self.lattice.cell.len()
    }

    /// K̂(z, w): entry (u, v) sums K_{u,v'} z^h w^v over the copies v' of v.
    pub fn fourier_kasteleyn(&self, z: Complex64, w: Complex64) -> DMatrix<Complex64> {
        fourier_matrix(&self.fisher, &self.orientation, z, w)
    }

    pub fn char_poly(&self, z: Complex64, w: Complex64) -> Complex64 {
        self.fourier_kasteleyn(z, w).determinant()
    }

    /// Fourier transform of the critical Laplacian: off-diagonal tan θ,
    /// diagonal −Σ tan θ.
    pub fn fourier_laplacian(&self, z: Complex64, w: Complex64) -> DMatrix<Complex64> {
        let n = self.primal_vertex_count();
        let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for (c, star) in self.lattice.stars().iter().enumerate() {
            for h in star {
                let t = h.theta.tan();
                m[(c, h.target)] += pow2(z, w, h.shift) * t;
                m[(c, c)] -= t;
            }
        }
        m
    }

    /// det(−Δ̂(z, w)), the characteristic polynomial of the positive
    /// Laplacian, so that P/P_Δ is a positive constant.
    pub fn laplacian_char_poly(&self, z: Complex64, w: Complex64) -> Complex64 {
        (-self.fourier_laplacian(z, w)).determinant()
    }

    /// 2^{|V|} ∏ (cot²(θ/2) − 1) over the primal edges of the domain.
    pub fn ratio_constant(&self) -> f64 {
        let prod: f64 = self.thetas.iter().map(|t| 1.0 / (t / 2.0).tan().powi(2) - 1.0).product();
        2f64.powi(self.primal_vertex_count() as i32) * prod
    }

    /// Compare P/P_Δ at random torus points with [`ratio_constant`](Self::ratio_constant).
    pub fn check_ratio(&self, samples: usize, seed: u64) -> Result<RatioReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ratios = Vec::with_capacity(samples);
        while ratios.len() < samples {
            let (a, b): (f64, f64) = (rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI));
            let (z, w) = (Complex64::from_polar(1.0, a), Complex64::from_polar(1.0, b));
            let lap = self.laplacian_char_poly(z, w);
            if lap.norm() < 1e-6 {
                continue;
            }
            ratios.push(self.char_poly(z, w) / lap);
        }
        let mean = ratios.iter().sum::<Complex64>() / samples as f64;
        let (lo, hi) = ratios.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.re), hi.max(r.re)));
        let imag = ratios.iter().map(|r| r.im.abs()).fold(0.0, f64::max);
        let spread = ((hi - lo) + imag) / mean.norm();
        if spread > 1e-8 {
            return Err(Error::RatioNotConstant { spread });
        }
        Ok(RatioReport { predicted: self.ratio_constant(), mean: mean.re, spread, samples })
    }

    /// Dimer free energy per fundamental domain, in closed form.
    pub fn free_energy_dimer(&self) -> Result<f64> {
        let n = (self.thetas.len() + self.primal_vertex_count()) as f64;
        let sum: f64 = self.thetas.iter().map(|&t| free_energy_summand(t)).sum::<Result<f64>>()?;
        Ok(-n * 2f64.ln() / 2.0 + sum)
    }

    /// Ising free energy per fundamental domain, in closed form.
    pub fn free_energy_ising(&self) -> Result<f64> {
        let sum: f64 = self.thetas.iter().map(|&t| ising_free_energy_summand(t)).sum::<Result<f64>>()?;
        Ok(-(self.primal_vertex_count() as f64) * 2f64.ln() / 2.0 - sum)
    }

    /// Σ log sinh J over the primal edges of the domain.
    pub fn log_sinh_coupling_sum(&self) -> Result<f64> {
        self.thetas.iter().map(|&t| Ok(sinh_coupling(t)?.ln())).sum()
    }

    /// Dimer entropy −f_D − Σ P(e) log ν_e with the single-edge probabilities
    /// of the inter-decoration edges.
    pub fn entropy_dimer(&self) -> Result<f64> {
        let mut acc = -self.free_energy_dimer()?;
        for &t in &self.thetas {
            let w = CriticalWeights::<f64>::new(t)?;
            acc -= w.edge_probability(crate::weights::EdgeKind::Vv) * w.dimer_weight.ln();
        }
        Ok(acc)
    }

    /// Dimer entropy from the per-rhombus summands.
    pub fn entropy_closed_form(&self) -> Result<f64> {
        let n = (self.thetas.len() + self.primal_vertex_count()) as f64;
        let sum: f64 = self.thetas.iter().map(|&t| entropy_summand(t)).sum::<Result<f64>>()?;
        Ok(n * 2f64.ln() / 2.0 + sum)
    }

    fn grid_average<F>(&self, n: usize, f: F) -> f64
    where
        F: Fn(Complex64, Complex64) -> f64 + Sync,
    {
        // The integrands used here are real and invariant under (z, w) → (z̄, w̄),
        // which maps grid row j to n − 1 − j; only half the rows are visited.
        let half = n / 2;
        let total: f64 = (0..half)
            .into_par_iter()
            .map(|i| {
                let z = grid_point(i, n);
                (0..n).map(|j| f(z, grid_point(j, n))).sum::<f64>()
            })
            .sum();
        2.0 * total / (n * n) as f64
    }

    /// −½ ∬ log|det K̂| over the torus on an n×n half-shifted grid, with one
    /// Richardson step against n/2.
    pub fn free_energy_integral(&self, n: usize) -> Result<TorusIntegral> {
        if n < 64 || !n.is_multiple_of(4) {
            return Err(Error::OutOfRange { what: "free energy grid size", value: n as f64 });
        }
        let f = |z, w| self.char_poly(z, w).norm().ln();
        let fine = -0.5 * self.grid_average(n, f);
        let coarse = -0.5 * self.grid_average(n / 2, f);
        let estimate = (fine - coarse).abs();
        if !estimate.is_finite() || estimate > 1e-2 {
            return Err(Error::NonConvergence { what: "free energy integral", estimate, tolerance: 1e-2 });
        }
        Ok(TorusIntegral { value: (4.0 * fine - coarse) / 3.0, estimate })
    }

    fn inverse_pass(&self, queries: &[(usize, usize, [i32; 2])], n: usize) -> Vec<f64> {
        let size = self.order();
        let mut columns: Vec<usize> = queries.iter().map(|q| q.1).collect();
        columns.sort_unstable();
        columns.dedup();
        let col_slot: HashMap<usize, usize> = columns.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut rhs = DMatrix::from_element(size, columns.len(), Complex64::new(0.0, 0.0));
        for (i, &c) in columns.iter().enumerate() {
            rhs[(c, i)] = Complex64::new(1.0, 0.0);
        }
        let half = n / 2;
        let sums = (0..half)
            .into_par_iter()
            .map(|i| {
                let z = grid_point(i, n);
                let mut acc = vec![0.0; queries.len()];
                for j in 0..n {
                    let w = grid_point(j, n);
                    let lu = self.fourier_kasteleyn(z, w).lu();
                    let Some(sol) = lu.solve(&rhs) else { continue };
                    for (a, &(x, y, d)) in acc.iter_mut().zip(queries) {
                        *a += (sol[(x, col_slot[&y])] * pow2(z, w, d)).re;
                    }
                }
                acc
            })
            .reduce(
                || vec![0.0; queries.len()],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            );
        sums.into_iter().map(|s| 2.0 * s / (n * n) as f64).collect()
    }

    /// K⁻¹ between cell vertex x in translate a and cell vertex y in
    /// translate b, for each query (x, y, a − b), by an n×n torus average of
    /// K̂⁻¹ with one Richardson step against n/2.
    pub fn fourier_inverse_entries(&self, queries: &[(usize, usize, [i32; 2])], n: usize) -> Result<Vec<TorusIntegral>> {
        if n < 16 || !n.is_multiple_of(4) {
            return Err(Error::OutOfRange { what: "Fourier inverse grid size", value: n as f64 });
        }
        if let Some(&(x, y, _)) = queries.iter().find(|q| q.0 >= self.order() || q.1 >= self.order()) {
            return Err(Error::UnknownVertex(format!("{x} or {y}")));
        }
        let fine = self.inverse_pass(queries, n);
        let coarse = self.inverse_pass(queries, n / 2);
        fine.into_iter()
            .zip(coarse)
            .map(|(f, c)| {
                let estimate = (f - c).abs();
                if !estimate.is_finite() || estimate > 1e-3 {
                    return Err(Error::NonConvergence { what: "Fourier inverse", estimate, tolerance: 1e-3 });
                }
                Ok(TorusIntegral { value: (4.0 * f - c) / 3.0, estimate })
            })
            .collect()
    }

    pub fn fourier_inverse_entry(&self, x: usize, y: usize, offset: [i32; 2], n: usize) -> Result<TorusIntegral> {
        Ok(self.fourier_inverse_entries(&[(x, y, offset)], n)?[0])
    }

    /// Cell Fisher vertex and translation of a Fisher vertex of a patch cut
    /// from the same lattice.
    pub fn locate(&self, patch: &LatticePatch, patch_fisher: &FisherGraph, u: usize) -> Result<(usize, [i32; 2])> {
        let fv = patch_fisher.vertices[u];
        let (c, offset) = patch.cell_of[fv.g];
        let angle = patch_fisher.stars[fv.g][fv.k].angle;
        let k = self.fisher.stars[c]
            .iter()
            .position(|h| (Complex64::from_polar(1.0, h.angle) - Complex64::from_polar(1.0, angle)).norm() < 1e-7)
            .ok_or_else(|| Error::MalformedGraph(format!("half-edge of `{}` not found in the cell", patch_fisher.name(u))))?;
        Ok((self.fisher.index(c, k, fv.ty), offset))
    }

    /// The cell orientation copied to every translate inside a patch.
    pub fn lift_orientation(&self, patch: &LatticePatch, patch_fisher: &FisherGraph) -> Result<KasteleynOrientation> {
        let mut sign = Vec::with_capacity(patch_fisher.edges.len());
        for e in &patch_fisher.edges {
            let (ca, _) = self.locate(patch, patch_fisher, e.a)?;
            let (cb, _) = self.locate(patch, patch_fisher, e.b)?;
            let ce = self.fisher.edge_between(ca, cb).ok_or_else(|| Error::MalformedGraph("edge missing in cell".into()))?;
            let cell_edge = &self.fisher.edges[ce];
            // Self-loop-like pairs (ca == cb never occurs) and parallel
            // classes are told apart by matching the vertex at the tail.
            let tail = if self.orientation.sign[ce] > 0 { cell_edge.a } else { cell_edge.b };
            sign.push(if tail == ca { 1 } else { -1 });
        }
        let o = KasteleynOrientation { sign };
        o.verify(patch_fisher)?;
        Ok(o)
    }

    /// A patch of the lattice with the cell orientation lifted onto it.
    pub fn patch_model(&self, radius: usize) -> Result<(LatticePatch, CriticalModel)> {
        let patch = self.lattice.patch(radius)?;
        let fisher = FisherGraph::decorate(&patch.graph)?;
        let orientation = self.lift_orientation(&patch, &fisher)?;
        let model = CriticalModel::with_orientation(patch.graph.clone(), orientation)?;
        Ok((patch, model))
    }

    /// Fourier-side query for a pair of patch Fisher vertices.
    pub fn query(&self, patch: &LatticePatch, patch_fisher: &FisherGraph, x: usize, y: usize) -> Result<(usize, usize, [i32; 2])> {
        let (cx, a) = self.locate(patch, patch_fisher, x)?;
        let (cy, b) = self.locate(patch, patch_fisher, y)?;
        Ok((cx, cy, [a[0] - b[0], a[1] - b[1]]))
    }

    pub fn vertex_type(&self, u: usize) -> VertexType {
        self.fisher.vertices[u].ty
    }
}

fn fourier_matrix(f: &FisherGraph, o: &KasteleynOrientation, z: Complex64, w: Complex64) -> DMatrix<Complex64> {
    let n = f.vertex_count();
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for u in 0..n {
        for (v, k, s) in o.row(f, u) {
            m[(u, v)] += pow2(z, w, s) * k;
        }
    }
    m
}

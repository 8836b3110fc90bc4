//! Probabilities from inverse entries: Pfaffians of skew sub-matrices,
//! cylinder-set probabilities, and brute-force oracles on small graphs.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fisher::{EdgeClass, FisherGraph, VertexType};
use crate::inverse::LocalInverse;

/// Dense real antisymmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SkewMatrix {
    /// Build from the strict upper triangle; the rest follows by antisymmetry.
    pub fn from_upper(n: usize, mut upper: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let a = upper(i, j);
                data[i * n + j] = a;
                data[j * n + i] = -a;
            }
        }
        Self { n, data }
    }

    /// Accepts a row-major matrix only if it is exactly antisymmetric.
    pub fn from_dense(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Parse(format!("expected {} entries, got {}", n * n, data.len())));
        }
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((data[i * n + j] + data[j * n + i]).abs());
            }
        }
        if worst > 0.0 {
            return Err(Error::NotSkewSymmetric(worst));
        }
        Ok(Self { n, data })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Pfaffian by skew Gaussian elimination (Parlett–Reid) with partial
    /// pivoting.
    pub fn pfaffian(&self) -> Result<f64> {
        let n = self.n;
        if n % 2 == 1 {
            return Err(Error::OddOrder(n));
        }
        let mut a = self.data.clone();
        let at = |i: usize, j: usize| i * n + j;
        let mut pf = 1.0;
        for k in (0..n.saturating_sub(1)).step_by(2) {
            let kp = (k + 1..n).max_by(|&i, &j| a[at(i, k)].abs().total_cmp(&a[at(j, k)].abs())).expect("non-empty");
            if kp != k + 1 {
                for c in 0..n {
                    a.swap(at(k + 1, c), at(kp, c));
                }
                for r in 0..n {
                    a.swap(at(r, k + 1), at(r, kp));
                }
                pf = -pf;
            }
            let pivot = a[at(k, k + 1)];
            if pivot == 0.0 {
                return Ok(0.0);
            }
            pf *= pivot;
            if k + 2 < n {
                let tau: Vec<f64> = (k + 2..n).map(|j| a[at(k, j)] / pivot).collect();
                let col: Vec<f64> = (k + 2..n).map(|i| a[at(i, k + 1)]).collect();
                for (ii, i) in (k + 2..n).enumerate() {
                    for (jj, j) in (k + 2..n).enumerate() {
                        a[at(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                    }
                }
            }
        }
        Ok(pf)
    }

    /// Determinant by LU, for cross-checking the Pfaffian.
    pub fn determinant(&self) -> f64 {
        nalgebra::DMatrix::from_row_slice(self.n, self.n, &self.data).determinant()
    }
}

/// A cylinder-set probability, reported without clamping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderProbability {
    pub value: f64,
    /// False when the value lies within rounding of [0, 1] but outside it.
    pub valid: bool,
}

/// Check that `edges` are Fisher edges with pairwise distinct endpoints.
pub fn check_fragment(fisher: &FisherGraph, edges: &[(usize, usize)]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for &(x, y) in edges {
        if x >= fisher.vertex_count() || y >= fisher.vertex_count() || fisher.edge_between(x, y).is_none() {
            return Err(Error::NotAMatchingFragment(format!("({x}, {y}) is not an edge")));
        }
        if !seen.insert(x) || !seen.insert(y) {
            return Err(Error::NotAMatchingFragment(format!("endpoint of ({}, {}) repeated", fisher.name(x), fisher.name(y))));
        }
    }
    Ok(())
}

/// Probability that every edge in `edges` is covered:
/// (∏ K_{xᵢ,yᵢ}) · Pf of the transposed inverse sub-matrix on
/// (x₁, y₁, …, x_k, y_k).
pub fn cylinder_probability(inv: &LocalInverse<'_>, edges: &[(usize, usize)]) -> Result<CylinderProbability> {
    let model = inv.model();
    check_fragment(&model.fisher, edges)?;
    let order: Vec<usize> = edges.iter().flat_map(|&(x, y)| [x, y]).collect();
    let n = order.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let values = inv.entries(&pairs.iter().map(|&(i, j)| (order[j], order[i])).collect::<Vec<_>>());
    let mut upper = HashMap::with_capacity(pairs.len());
    for (&(i, j), v) in pairs.iter().zip(values) {
        upper.insert((i, j), v?.value);
    }
    let a = SkewMatrix::from_upper(n, |i, j| upper[&(i, j)]);
    let k: f64 = edges.iter().map(|&(x, y)| model.kasteleyn().entry(x, y)).product();
    let value = k * a.pfaffian()?;
    if !(-1e-10..=1.0 + 1e-10).contains(&value) {
        return Err(Error::OutOfRangeProbability(value));
    }
    Ok(CylinderProbability { value, valid: (0.0..=1.0).contains(&value) })
}

/// Single-edge probability P(e) = K_{x,y} K⁻¹_{y,x}.
pub fn edge_probability(inv: &LocalInverse<'_>, x: usize, y: usize) -> Result<CylinderProbability> {
    cylinder_probability(inv, &[(x, y)])
}

/// All perfect matchings of a small Fisher graph with their weights.
#[derive(Debug, Clone)]
pub struct MatchingEnsemble {
    /// Edge indices of each matching, sorted.
    pub matchings: Vec<Vec<usize>>,
    pub weights: Vec<f64>,
    pub partition: f64,
}

/// Largest Fisher graph the enumerator accepts.
pub const ENUMERATION_LIMIT: usize = 40;

fn extend(f: &FisherGraph, matched: &mut [bool], chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    // Branch on the free vertex with the fewest free neighbours.
    let mut best: Option<(usize, Vec<usize>)> = None;
    for u in 0..f.vertex_count() {
        if matched[u] {
            continue;
        }
        let options: Vec<usize> = f.incident[u].iter().copied().filter(|&e| !matched[f.other_end(e, u)]).collect();
        if options.is_empty() {
            return;
        }
        if best.as_ref().is_none_or(|(_, o)| options.len() < o.len()) {
            let stop = options.len() == 1;
            best = Some((u, options));
            if stop {
                break;
            }
        }
    }
    let Some((u, options)) = best else {
        let mut m = chosen.clone();
        m.sort_unstable();
        out.push(m);
        return;
    };
    for e in options {
        let v = f.other_end(e, u);
        matched[u] = true;
        matched[v] = true;
        chosen.push(e);
        extend(f, matched, chosen, out);
        chosen.pop();
        matched[u] = false;
        matched[v] = false;
    }
}

/// Exhaustive enumeration of perfect matchings with edge weights taken
/// from the Fisher graph.
pub fn enumerate_matchings(f: &FisherGraph) -> Result<MatchingEnsemble> {
    let n = f.vertex_count();
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { size: n, limit: ENUMERATION_LIMIT });
    }
    if n % 2 == 1 {
        return Err(Error::NoPerfectMatching);
    }
    // Split on the edges at vertex 0 so branches run in parallel.
    let first: Vec<usize> = f.incident.first().cloned().unwrap_or_default();
    let mut matchings: Vec<Vec<usize>> = first
        .par_iter()
        .flat_map_iter(|&e| {
            let mut matched = vec![false; n];
            matched[0] = true;
            matched[f.other_end(e, 0)] = true;
            let mut out = Vec::new();
            extend(f, &mut matched, &mut vec![e], &mut out);
            out
        })
        .collect();
    if n == 0 {
        matchings.push(Vec::new());
    }
    if matchings.is_empty() {
        return Err(Error::NoPerfectMatching);
    }
    let weights: Vec<f64> = matchings.iter().map(|m| m.iter().map(|&e| f.edges[e].weight).product()).collect();
    let partition = weights.iter().sum();
    Ok(MatchingEnsemble { matchings, weights, partition })
}

impl MatchingEnsemble {
    /// Probability of each edge under the Boltzmann measure.
    pub fn edge_marginals(&self, edge_count: usize) -> Vec<f64> {
        let mut p = vec![0.0; edge_count];
        for (m, w) in self.matchings.iter().zip(&self.weights) {
            for &e in m {
                p[e] += w;
            }
        }
        p.iter_mut().for_each(|x| *x /= self.partition);
        p
    }

    /// Number of matchings sharing each set of inter-decoration edges.
    pub fn completions(&self, f: &FisherGraph) -> HashMap<Vec<usize>, usize> {
        let mut count = HashMap::new();
        for m in &self.matchings {
            let key: Vec<usize> = m.iter().copied().filter(|&e| f.edges[e].class == EdgeClass::Inter).collect();
            *count.entry(key).or_insert(0) += 1;
        }
        count
    }
}

/// Ising partition function Σ_σ exp(Σ J_e σ_u σ_v) by exhaustive spin sum.
pub fn ising_partition(vertex_count: usize, couplings: &[(usize, usize, f64)]) -> Result<f64> {
    if vertex_count > 24 {
        return Err(Error::TooLarge { size: vertex_count, limit: 24 });
    }
    Ok((0u32..1 << vertex_count)
        .into_par_iter()
        .map(|s| {
            let spin = |u: usize| if s >> u & 1 == 1 { 1.0 } else { -1.0 };
            couplings.iter().map(|&(u, v, j)| j * spin(u) * spin(v)).sum::<f64>().exp()
        })
        .sum())
}

/// Couplings of the primal graph underlying a Fisher graph, one per inter
/// edge, at the critical value for its half-angle.
pub fn critical_couplings(f: &FisherGraph) -> Result<Vec<(usize, usize, f64)>> {
    f.edges
        .iter()
        .filter(|e| e.class == EdgeClass::Inter)
        .map(|e| {
            let (a, b) = (f.vertices[e.a], f.vertices[e.b]);
            debug_assert!(a.ty == VertexType::V && b.ty == VertexType::V);
            Ok((a.g, b.g, crate::weights::critical_coupling(f.stars[a.g][a.k].theta)?))
        })
        .collect()
}

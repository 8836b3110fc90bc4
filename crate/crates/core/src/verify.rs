//! Self-checks comparing the library against independent oracles. Each
//! check reports its worst deviation against a budget; the command-line
//! `verify` suites and the acceptance tests both run these.

use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;
use std::fmt;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fisher::{EdgeClass, FisherGraph, KasteleynMatrix, KasteleynOrientation, StarGraph, VertexType};
use crate::geometry::{IsoradialGraph, Lattice, RhombicGrid};
use crate::gibbs::{critical_couplings, edge_probability, enumerate_matchings, ising_partition, SkewMatrix};
use crate::inverse::{InverseEntry, LocalInverse};
use crate::model::CriticalModel;
use crate::spectral::PeriodicCell;
use crate::weights::{edge_probability_closed_form, EdgeKind};

const TYPES: [VertexType; 3] = [VertexType::V, VertexType::W, VertexType::Z];

/// Outcome of one check.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub deviation: f64,
    pub budget: f64,
    #[serde(serialize_with = "seconds")]
    pub runtime: Duration,
    pub detail: String,
}

fn seconds<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl Check {
    fn finish(name: &str, deviation: f64, budget: f64, start: Instant, detail: String) -> Self {
        Self { name: name.to_string(), passed: deviation.is_finite() && deviation < budget, deviation, budget, runtime: start.elapsed(), detail }
    }

    /// Merge several checks into one whose deviation is the worst ratio to
    /// budget, scaled back to `budget`.
    pub fn combine(name: &str, budget: f64, parts: Vec<Check>) -> Self {
        let passed = !parts.is_empty() && parts.iter().all(|c| c.passed);
        let scaled = parts.iter().map(|c| c.deviation / c.budget * budget).fold(0.0, |a: f64, b| if b.is_nan() { f64::NAN } else { a.max(b) });
        let runtime = parts.iter().map(|c| c.runtime).sum();
        let detail = parts.iter().map(|c| format!("{} {:.3e}/{:.0e}", c.name, c.deviation, c.budget)).collect::<Vec<_>>().join("; ");
        Self { name: name.to_string(), passed, deviation: scaled, budget, runtime, detail }
    }

    /// A check that could not run.
    pub fn failed(name: &str, err: &Error) -> Self {
        Self { name: name.to_string(), passed: false, deviation: f64::NAN, budget: 0.0, runtime: Duration::ZERO, detail: err.to_string() }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: max deviation {:.3e} (budget {:.1e}, {:.2}s) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.deviation,
            self.budget,
            self.runtime.as_secs_f64(),
            self.detail
        )
    }
}

/// Named checks with an aggregate status.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn push(&mut self, name: &str, result: Result<Check>) {
        self.checks.push(result.unwrap_or_else(|e| Check::failed(name, &e)));
    }
}

/// Entries K⁻¹ for a set of pairs, keyed by pair.
fn entry_table(inv: &LocalInverse<'_>, pairs: HashSet<(usize, usize)>) -> Result<HashMap<(usize, usize), InverseEntry>> {
    let pairs: Vec<(usize, usize)> = pairs.into_iter().collect();
    let values = inv.entries(&pairs);
    pairs.into_iter().zip(values).map(|(p, v)| Ok((p, v?))).collect()
}

/// Fisher vertices of primal vertex `g`.
fn decoration(f: &FisherGraph, g: usize) -> impl Iterator<Item = usize> + '_ {
    (0..f.degree(g)).flat_map(move |k| TYPES.into_iter().map(move |t| f.index(g, k, t)))
}

/// max |Σᵢ K_{x,xᵢ} K⁻¹_{xᵢ,y} − δ_{x,y}| over interior x and y within
/// graph distance `reach` of x.
pub fn kk_identity(model: &CriticalModel, reach: usize) -> Result<Check> {
    let start = Instant::now();
    let (g, f) = (&model.graph, &model.fisher);
    let k = model.kasteleyn();
    let mut rows = Vec::new();
    let mut needed = HashSet::new();
    for xg in (0..g.vertex_count()).filter(|&v| g.is_interior(v)) {
        let dist = g.distances_from(xg);
        let ys: Vec<usize> = (0..g.vertex_count()).filter(|&v| dist[v].is_some_and(|d| d <= reach)).flat_map(|yg| decoration(f, yg)).collect();
        for x in decoration(f, xg) {
            let row = k.row(x);
            for &y in &ys {
                needed.extend(row.iter().map(|&(xi, _, _)| (xi, y)));
            }
            rows.push((x, row, ys.clone()));
        }
    }
    let table = entry_table(&LocalInverse::new(model), needed)?;
    let mut worst = 0.0f64;
    let mut count = 0usize;
    for (x, row, ys) in rows {
        for y in ys {
            let sum: f64 = row.iter().map(|&(xi, kv, _)| kv * table[&(xi, y)].value).sum();
            worst = worst.max((sum - if x == y { 1.0 } else { 0.0 }).abs());
            count += 1;
        }
    }
    Ok(Check::finish("kk-identity", worst, 1e-10, start, format!("{count} entries of KK^-1, {} inverse entries", table.len())))
}

/// Kernel identity Σᵢ K_{x,xᵢ} f_{xᵢ}(λ) Exp_{xᵢ,y}(λ) = 0 at random λ,
/// relative to |Exp_{x,y}(λ)|.
pub fn kernel_identity(model: &CriticalModel, samples: usize, seed: u64) -> Result<Check> {
    let start = Instant::now();
    let (g, f) = (&model.graph, &model.fisher);
    let inv = LocalInverse::new(model);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let interior: Vec<usize> = (0..g.vertex_count()).filter(|&v| g.is_interior(v)).collect();
    if interior.is_empty() {
        return Err(Error::MalformedGraph("graph has no interior vertex".into()));
    }
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let lambda = Complex64::from_polar(rng.gen_range(0.2..5.0), rng.gen_range(-PI..PI));
        let xg = interior[rng.gen_range(0..interior.len())];
        let yg = interior[rng.gen_range(0..interior.len())];
        let k = rng.gen_range(0..f.degree(xg));
        let scale = inv.exp(f.index(xg, k, VertexType::W), f.index(yg, 0, VertexType::V), lambda)?.norm().max(1.0);
        for t in TYPES {
            let r = inv.kernel_residual(f.index(xg, k, t), yg, lambda)?;
            worst = worst.max(r.norm() / scale);
        }
    }
    Ok(Check::finish("kernel-identity", worst, 1e-10, start, format!("{samples} spectral parameters x 3 vertex types")))
}

fn ki_table(x: VertexType, y: VertexType) -> f64 {
    use VertexType::*;
    match (x, y) {
        (W, W) | (Z, Z) | (V, W) | (V, Z) => 0.5,
        (Z, W) | (W, Z) => -0.5,
        (V, V) => 1.0,
        _ => 0.0,
    }
}

fn kc_table(x: VertexType, y: VertexType) -> f64 {
    use VertexType::*;
    match (x, y) {
        (W, W) | (Z, Z) | (W, Z) | (Z, W) => 0.5,
        (V, W) | (V, Z) => -0.5,
        _ => 0.0,
    }
}

/// The integral part KI and the constant part KC of KK⁻¹ separately match
/// their tables: non-zero only when x and y share a triangle.
pub fn intermediate_tables(model: &CriticalModel, reach: usize) -> Result<Check> {
    let start = Instant::now();
    let (g, f) = (&model.graph, &model.fisher);
    let k = model.kasteleyn();
    let centre = (0..g.vertex_count())
        .filter(|&v| g.is_interior(v))
        .min_by(|&a, &b| g.boundary_distances()[b].cmp(&g.boundary_distances()[a]).then(a.cmp(&b)))
        .ok_or_else(|| Error::MalformedGraph("graph has no interior vertex".into()))?;
    let dist = g.distances_from(centre);
    let ys: Vec<usize> = (0..g.vertex_count()).filter(|&v| dist[v].is_some_and(|d| d <= reach)).flat_map(|yg| decoration(f, yg)).collect();
    let xs: Vec<usize> = decoration(f, centre).collect();
    let mut needed = HashSet::new();
    for &x in &xs {
        for (xi, _, _) in k.row(x) {
            needed.extend(ys.iter().map(|&y| (xi, y)));
        }
    }
    let table = entry_table(&LocalInverse::new(model), needed)?;
    let (mut worst_i, mut worst_c) = (0.0f64, 0.0f64);
    for &x in &xs {
        let row = k.row(x);
        for &y in &ys {
            let ki: f64 = row.iter().map(|&(xi, kv, _)| kv * table[&(xi, y)].integral).sum();
            let kc: f64 = row.iter().map(|&(xi, kv, _)| kv * table[&(xi, y)].constant).sum();
            let (fx, fy) = (f.vertices[x], f.vertices[y]);
            let same = fx.g == fy.g && fx.k == fy.k;
            let (ei, ec) = if same { (ki_table(fx.ty, fy.ty), kc_table(fx.ty, fy.ty)) } else { (0.0, 0.0) };
            worst_i = worst_i.max((ki - ei).abs());
            worst_c = worst_c.max((kc - ec).abs());
        }
    }
    Ok(Check::finish(
        "intermediate-tables",
        worst_i.max(worst_c),
        1e-10,
        start,
        format!("KI {worst_i:.2e}, KC {worst_c:.2e} over {} x {} pairs", xs.len(), ys.len()),
    ))
}

/// Single-edge Pfaffian probabilities against the closed forms on
/// rectangular lattices, plus per-vertex closure.
pub fn closed_forms(thetas: &[f64]) -> Result<Check> {
    let start = Instant::now();
    let (mut worst_next, mut worst_theta, mut worst_sum) = (0.0f64, 0.0f64, 0.0f64);
    for &theta in thetas {
        let patch = Lattice::rectangular(theta)?.patch(3)?;
        let model = CriticalModel::new(patch.graph)?;
        let inv = LocalInverse::new(&model);
        let f = &model.fisher;
        let c = patch.center;
        let probability = |a: usize, b: usize| edge_probability(&inv, a, b).map(|p| p.value);
        for k in 0..f.degree(c) {
            let th = f.stars[c][k].theta;
            let (v, w, z) = (f.index(c, k, VertexType::V), f.index(c, k, VertexType::W), f.index(c, k, VertexType::Z));
            let zn = f.index(c, (k + 1) % f.degree(c), VertexType::Z);
            let vo = f.other_end(f.inter_edge(c, k).ok_or_else(|| Error::MalformedGraph("centre lacks an edge".into()))?, v);
            worst_next = worst_next.max((probability(w, zn)? - 0.5).abs());
            for (kind, a, b) in [(EdgeKind::Wz, w, z), (EdgeKind::WvOrZv, w, v), (EdgeKind::WvOrZv, z, v), (EdgeKind::Vv, v, vo)] {
                worst_theta = worst_theta.max((probability(a, b)? - edge_probability_closed_form(kind, th)?).abs());
            }
        }
        for u in decoration(f, c) {
            let mut total = 0.0;
            for &e in &f.incident[u] {
                total += probability(u, f.other_end(e, u))?;
            }
            worst_sum = worst_sum.max((total - 1.0).abs());
        }
    }
    // The 1/2 edge has the tighter budget; scale it onto the common one.
    let deviation = (worst_next * 100.0).max(worst_theta).max(worst_sum);
    Ok(Check::finish(
        "closed-forms",
        deviation,
        1e-10,
        start,
        format!("P=1/2 edge {worst_next:.2e} (budget 1e-12), theta forms {worst_theta:.2e}, closure {worst_sum:.2e}"),
    ))
}

/// Interior pairs within `reach`, drawn at random.
fn random_pairs(model: &CriticalModel, count: usize, reach: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let (g, f) = (&model.graph, &model.fisher);
    let interior: Vec<usize> = (0..g.vertex_count()).filter(|&v| g.is_interior(v)).collect();
    let mut pairs = Vec::with_capacity(count);
    while pairs.len() < count && !interior.is_empty() {
        let xg = interior[rng.gen_range(0..interior.len())];
        let dist = g.distances_from(xg);
        let near: Vec<usize> = interior.iter().copied().filter(|&v| dist[v].is_some_and(|d| d <= reach)).collect();
        let yg = near[rng.gen_range(0..near.len())];
        let x = f.index(xg, rng.gen_range(0..f.degree(xg)), TYPES[rng.gen_range(0..3)]);
        let y = f.index(yg, rng.gen_range(0..f.degree(yg)), TYPES[rng.gen_range(0..3)]);
        pairs.push((x, y));
    }
    pairs
}

/// Residue evaluation against keyhole-contour quadrature with `n` nodes.
pub fn residue_vs_keyhole(model: &CriticalModel, count: usize, n: usize, seed: u64) -> Result<Check> {
    let start = Instant::now();
    let inv = LocalInverse::new(model);
    let pairs = random_pairs(model, count, 4, &mut ChaCha8Rng::seed_from_u64(seed));
    let diffs: Vec<f64> =
        pairs.par_iter().map(|&(x, y)| Ok((inv.value(x, y)? - inv.entry_quadrature(x, y, n)?.value).abs())).collect::<Result<_>>()?;
    let worst = diffs.iter().copied().fold(0.0, f64::max);
    Ok(Check::finish("residue-vs-keyhole", worst, 1e-8, start, format!("{} pairs, {n} nodes per contour piece", pairs.len())))
}

/// Local formula against the Fourier inverse of a periodic cell.
pub fn fourier_vs_local(cell: &PeriodicCell, count: usize, n: usize, seed: u64) -> Result<Check> {
    let start = Instant::now();
    let (patch, model) = cell.patch_model(7)?;
    let inv = LocalInverse::new(&model);
    let pairs = random_pairs(&model, count, 4, &mut ChaCha8Rng::seed_from_u64(seed));
    let queries = pairs.iter().map(|&(x, y)| cell.query(&patch, &model.fisher, x, y)).collect::<Result<Vec<_>>>()?;
    let fourier = cell.fourier_inverse_entries(&queries, n)?;
    let mut worst = 0.0f64;
    for (&(x, y), q) in pairs.iter().zip(&fourier) {
        worst = worst.max((inv.value(x, y)? - q.value).abs());
    }
    Ok(Check::finish(&format!("fourier-vs-local[{}]", cell.lattice.name), worst, 1e-7, start, format!("{} pairs, grid {n}", pairs.len())))
}

/// Closed-form dimer free energy against the torus integral of −½ log|det K̂|.
pub fn free_energy(cell: &PeriodicCell, n: usize) -> Result<Check> {
    let start = Instant::now();
    let closed = cell.free_energy_dimer()?;
    let integral = cell.free_energy_integral(n)?;
    Ok(Check::finish(
        &format!("free-energy[{}]", cell.lattice.name),
        (closed - integral.value).abs(),
        1e-6,
        start,
        format!("f_D {closed:.12}, integral {:.12}", integral.value),
    ))
}

/// f_I = f_D − Σ log sinh J over the edges of the domain.
pub fn ising_dimer_identity(cell: &PeriodicCell) -> Result<Check> {
    let start = Instant::now();
    let fi = cell.free_energy_ising()?;
    let fd = cell.free_energy_dimer()?;
    let dev = (fi - (fd - cell.log_sinh_coupling_sum()?)).abs();
    Ok(Check::finish(&format!("ising-dimer-identity[{}]", cell.lattice.name), dev, 1e-12, start, format!("f_I {fi:.12}")))
}

/// The ratio of the Kasteleyn and Laplacian characteristic polynomials is
/// constant and equals the predicted constant.
pub fn polynomial_ratio(cell: &PeriodicCell, samples: usize, seed: u64) -> Result<Check> {
    let start = Instant::now();
    let r = cell.check_ratio(samples, seed)?;
    let mismatch = ((r.mean - r.predicted) / r.predicted).abs();
    Ok(Check::finish(
        &format!("polynomial-ratio[{}]", cell.lattice.name),
        r.spread.max(mismatch),
        1e-8,
        start,
        format!("ratio {:.12}, predicted {:.12}, spread {:.2e}", r.mean, r.predicted, r.spread),
    ))
}

/// Decay of K⁻¹ on ℤ² along the lattice direction (2, 1): ratio to the
/// leading term near distance 30 and the log-log slope over [10, 60].
pub fn asymptotics() -> Result<Check> {
    let start = Instant::now();
    let lattice = Lattice::z2();
    let patch = lattice.patch(64)?;
    let model = CriticalModel::new(patch.graph)?;
    let inv = LocalInverse::new(&model);
    let (g, f) = (&model.graph, &model.fisher);
    let c = patch.center;
    let origin = g.position(c);
    let x = f.index(c, 0, VertexType::W);
    let mut points = Vec::new();
    for s in 3..=19 {
        let target = origin + lattice.basis[0] * (2 * s) as f64 + lattice.basis[1] * s as f64;
        let yg = (0..g.vertex_count())
            .min_by(|&a, &b| (g.position(a) - target).norm().total_cmp(&(g.position(b) - target).norm()))
            .expect("non-empty patch");
        let y = f.index(yg, 1, VertexType::Z);
        let d = (g.position(yg) - origin).norm();
        points.push((d, inv.value(x, y)?, inv.asymptotic(x, y)));
    }
    let ratio_err =
        points.iter().min_by(|a, b| (a.0 - 30.0).abs().total_cmp(&(b.0 - 30.0).abs())).map(|p| (p.1 / p.2 - 1.0).abs()).unwrap_or(f64::NAN);
    let fit: Vec<(f64, f64)> = points.iter().filter(|p| (10.0..=60.0).contains(&p.0)).map(|p| (p.0.ln(), p.1.abs().ln())).collect();
    let slope = least_squares_slope(&fit);
    // Both budgets mapped onto [0, 1): ratio error / 0.15 and |slope + 1| / 0.1.
    let deviation = (ratio_err / 0.15).max((slope + 1.0).abs() / 0.1);
    Ok(Check::finish(
        "asymptotics",
        deviation,
        1.0,
        start,
        format!("ratio error {ratio_err:.4} at distance ~30, slope {slope:.4} over {} points", fit.len()),
    ))
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mx, my) = (points.iter().map(|p| p.0).sum::<f64>() / n, points.iter().map(|p| p.1).sum::<f64>() / n);
    let cov: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let var: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    cov / var
}

/// Two rhombic patches share their train-track directions for indices
/// |i| ≤ `inner` and differ beyond; entries between vertices well inside
/// the common region must coincide.
pub fn locality(seed: u64) -> Result<Check> {
    let start = Instant::now();
    let (n, inner, radius) = (10, 5, 9);
    let a = RhombicGrid::quasiperiodic(seed, n);
    let mut b = RhombicGrid::quasiperiodic(seed.wrapping_add(1), n);
    for i in -inner..=inner {
        let idx = (i + n) as usize;
        b.a[idx] = a.a[idx];
        b.b[idx] = a.b[idx];
    }
    let ma = CriticalModel::new(a.patch(radius)?)?;
    let mb = CriticalModel::new(b.patch(radius)?)?;
    let (ia, ib) = (LocalInverse::new(&ma), LocalInverse::new(&mb));
    // Primal vertices at diamond coordinates |i|, |j| ≤ 2 sit inside the
    // common region together with every rhombus a minimal path may use.
    let core: Vec<usize> = (0..ma.graph.vertex_count()).filter(|&v| (ma.graph.position(v) - a.position(0, 0)).norm() < 2.5).collect();
    let mut worst = 0.0f64;
    let mut count = 0;
    for &xg in &core {
        let xb = mb.graph.vertex_index(ma.graph.vertex_id(xg))?;
        for &yg in &core {
            let yb = mb.graph.vertex_index(ma.graph.vertex_id(yg))?;
            for x in decoration(&ma.fisher, xg) {
                for y in decoration(&ma.fisher, yg) {
                    let x2 = mb.fisher.parse_name(&ma.fisher.name(x))?;
                    let y2 = mb.fisher.parse_name(&ma.fisher.name(y))?;
                    debug_assert_eq!((mb.fisher.vertices[x2].g, mb.fisher.vertices[y2].g), (xb, yb));
                    worst = worst.max((ia.value(x, y)? - ib.value(x2, y2)?).abs());
                    count += 1;
                }
            }
        }
    }
    let differs = (ma.graph.position(ma.graph.vertex_count() - 1) - mb.graph.position(mb.graph.vertex_count() - 1)).norm();
    Ok(Check::finish(
        "locality",
        worst,
        1e-12,
        start,
        format!("{count} entries on {} core vertices; outer vertices moved by up to {differs:.2}", core.len()),
    ))
}

/// Small planar graphs for exhaustive enumeration, as kept vertex lists:
/// a triangle, two triangles sharing an edge, and quadrilateral faces.
fn brute_force_graphs() -> Result<Vec<(String, IsoradialGraph, Vec<usize>)>> {
    fn centre(g: &IsoradialGraph) -> usize {
        (0..g.vertex_count()).min_by(|&a, &b| g.position(a).norm().total_cmp(&g.position(b).norm())).expect("non-empty")
    }
    fn neighbours(g: &IsoradialGraph, c: usize) -> Vec<usize> {
        g.star(c).iter().filter_map(|h| h.target).collect()
    }
    fn quad(g: &IsoradialGraph) -> Result<Vec<usize>> {
        let c = centre(g);
        let nb = neighbours(g, c);
        let opposite = (0..g.vertex_count())
            .find(|&v| v != c && g.edge_between(v, nb[0]).is_some() && g.edge_between(v, nb[1]).is_some())
            .ok_or_else(|| Error::MalformedGraph("no quadrilateral face at the centre".into()))?;
        Ok(vec![c, nb[0], opposite, nb[1]])
    }
    let tri = Lattice::triangular().patch(3)?.graph;
    let (c, nb) = (centre(&tri), neighbours(&tri, centre(&tri)));
    let z2 = Lattice::z2().patch(3)?.graph;
    let quasi = RhombicGrid::quasiperiodic(3, 6).patch(4)?;
    Ok(vec![
        ("triangle".into(), tri.clone(), vec![c, nb[0], nb[1]]),
        ("two-triangles".into(), tri, vec![c, nb[0], nb[1], nb[2]]),
        ("square".into(), z2.clone(), quad(&z2)?),
        ("quasiperiodic-rhombus".into(), quasi.clone(), quad(&quasi)?),
    ])
}

/// Exhaustive matchings of small Fisher graphs: every inter-edge
/// configuration has exactly two completions inside each decoration,
/// |Pf K| equals the matching sum, and ∏ sinh J · Z_dimer equals the Ising
/// spin sum.
pub fn brute_force() -> Result<Check> {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut structure_ok = true;
    let mut details = Vec::new();
    for (name, graph, keep) in brute_force_graphs()? {
        let sg = StarGraph::induced(&graph, &keep)?;
        let f = FisherGraph::from_stars(&sg)?;
        let ensemble = enumerate_matchings(&f)?;
        let mut groups: HashMap<Vec<usize>, Vec<&Vec<usize>>> = HashMap::new();
        for m in &ensemble.matchings {
            let key: Vec<usize> = m.iter().copied().filter(|&e| f.edges[e].class == EdgeClass::Inter).collect();
            groups.entry(key).or_default().push(m);
        }
        for members in groups.values() {
            for g in 0..f.g_count() {
                let local: HashSet<Vec<usize>> = members
                    .iter()
                    .map(|m| m.iter().copied().filter(|&e| f.edges[e].class != EdgeClass::Inter && f.vertices[f.edges[e].a].g == g).collect())
                    .collect();
                structure_ok &= local.len() == 2;
            }
            structure_ok &= members.len() == 1 << f.g_count();
        }
        let orientation = KasteleynOrientation::compute(&f)?;
        let k = KasteleynMatrix::new(&f, &orientation);
        let pf = SkewMatrix::from_upper(f.vertex_count(), |i, j| k.entry(i, j)).pfaffian()?;
        worst = worst.max((pf.abs() - ensemble.partition).abs() / ensemble.partition);
        let couplings = critical_couplings(&f)?;
        let spin_sum = ising_partition(f.g_count(), &couplings)?;
        let predicted = couplings.iter().map(|c| c.2.sinh()).product::<f64>() * ensemble.partition;
        worst = worst.max(((spin_sum - predicted) / spin_sum).abs());
        details.push(format!("{name}: {} Fisher vertices, {} matchings", f.vertex_count(), ensemble.matchings.len()));
    }
    let deviation = if structure_ok { worst } else { f64::INFINITY };
    Ok(Check::finish("brute-force", deviation, 1e-12, start, details.join("; ")))
}

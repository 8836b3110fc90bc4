use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet, VecDeque};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::graph::{IsoradialGraph, PeriodicInfo, Stub, Vertex, DEFAULT_EPSILON};
use super::{angle_0_2pi, unit};
use crate::error::{Error, Result};

/// Half-edge of a periodic cell star.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellHalfEdge {
    pub angle: f64,
    pub theta: f64,
    pub target: usize,
    /// Star index of the reverse half-edge at `target`.
    pub twin: usize,
    /// Lattice translation of the target copy.
    pub shift: [i32; 2],
}

/// A ℤ²-periodic isoradial graph described by one fundamental domain.
#[derive(Debug, Clone)]
pub struct Lattice {
    pub name: String,
    pub basis: [Complex64; 2],
    pub cell: Vec<Complex64>,
    /// Edges `(u, v, shift)` joining u in the base cell to v in cell `shift`.
    pub edges: Vec<(usize, usize, [i32; 2])>,
}

/// A finite ball cut out of a lattice, remembering each vertex's orbit.
#[derive(Debug, Clone)]
pub struct LatticePatch {
    pub graph: IsoradialGraph,
    /// `(cell vertex, translation)` of each patch vertex.
    pub cell_of: Vec<(usize, [i32; 2])>,
    pub center: usize,
}

fn translate(basis: &[Complex64; 2], s: [i32; 2]) -> Complex64 {
    basis[0] * s[0] as f64 + basis[1] * s[1] as f64
}

impl Lattice {
    /// Rectangular lattice with horizontal half-angle θ and vertical π/2 − θ;
    /// θ = π/4 is the square lattice.
    pub fn rectangular(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < FRAC_PI_2) {
            return Err(Error::OutOfRange { what: "rectangular lattice angle", value: theta });
        }
        Ok(Self {
            name: format!("square:theta={theta}"),
            basis: [Complex64::new(2.0 * theta.cos(), 0.0), Complex64::new(0.0, 2.0 * theta.sin())],
            cell: vec![Complex64::new(0.0, 0.0)],
            edges: vec![(0, 0, [1, 0]), (0, 0, [0, 1])],
        })
    }

    pub fn z2() -> Self {
        let mut l = Self::rectangular(FRAC_PI_4).expect("pi/4 is admissible");
        l.name = "z2".into();
        l
    }

    /// Triangular lattice with unit circumradius (all half-angles π/6).
    pub fn triangular() -> Self {
        let s3 = 3f64.sqrt();
        Self {
            name: "triangular".into(),
            basis: [Complex64::new(s3, 0.0), Complex64::new(s3 / 2.0, 1.5)],
            cell: vec![Complex64::new(0.0, 0.0)],
            edges: vec![(0, 0, [1, 0]), (0, 0, [0, 1]), (0, 0, [-1, 1])],
        }
    }

    /// Honeycomb lattice with unit edges (all half-angles π/3).
    pub fn honeycomb() -> Self {
        let s3 = 3f64.sqrt();
        Self {
            name: "honeycomb".into(),
            basis: [Complex64::new(s3, 0.0), Complex64::new(s3 / 2.0, 1.5)],
            cell: vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)],
            edges: vec![(0, 1, [0, 0]), (1, 0, [0, 1]), (1, 0, [-1, 1])],
        }
    }

    /// Recover the lattice from a graph carrying periodic data: every
    /// half-edge of a cell vertex is matched to a translate of a cell vertex.
    pub fn from_periodic_graph(graph: &IsoradialGraph, name: &str) -> Result<Self> {
        let p = graph.periodic.as_ref().ok_or_else(|| Error::MalformedGraph("graph has no periodic data".into()))?;
        let [b0, b1] = p.basis;
        let det = b0.re * b1.im - b0.im * b1.re;
        if det.abs() < 1e-9 {
            return Err(Error::MalformedGraph("degenerate lattice basis".into()));
        }
        let cell: Vec<Complex64> = p.cell_vertices.iter().map(|&v| graph.position(v)).collect();
        let locate = |q: Complex64| -> Option<(usize, [i32; 2])> {
            cell.iter().enumerate().find_map(|(c, &o)| {
                let d = q - o;
                let a = (d.re * b1.im - d.im * b1.re) / det;
                let b = (b0.re * d.im - b0.im * d.re) / det;
                let s = [a.round() as i32, b.round() as i32];
                ((translate(&p.basis, s) - d).norm() < 1e-7).then_some((c, s))
            })
        };
        let mut edges = Vec::new();
        for (u, &x) in p.cell_vertices.iter().enumerate() {
            for h in graph.star(x) {
                let q = graph.position(x) + unit(h.angle) * (2.0 * h.theta.cos());
                let (v, s) = locate(q)
                    .ok_or_else(|| Error::MalformedGraph(format!("neighbour of `{}` is not a translate of a cell vertex", graph.vertex_id(x))))?;
                // Keep one of the two half-edges of every edge.
                if (u, v, s) < (v, u, [-s[0], -s[1]]) {
                    edges.push((u, v, s));
                }
            }
        }
        edges.sort();
        edges.dedup();
        Ok(Self { name: name.to_string(), basis: p.basis, cell, edges })
    }

    pub fn position(&self, c: usize, s: [i32; 2]) -> Complex64 {
        self.cell[c] + translate(&self.basis, s)
    }

    /// Counterclockwise stars of the cell vertices.
    pub fn stars(&self) -> Vec<Vec<CellHalfEdge>> {
        let mut raw: Vec<Vec<(f64, f64, usize, [i32; 2], usize)>> = vec![Vec::new(); self.cell.len()];
        for (e, &(u, v, s)) in self.edges.iter().enumerate() {
            let d = self.position(v, s) - self.cell[u];
            let theta = (d.norm() / 2.0).acos();
            raw[u].push((angle_0_2pi(d), theta, v, s, 2 * e));
            raw[v].push((angle_0_2pi(-d), theta, u, [-s[0], -s[1]], 2 * e + 1));
        }
        for star in raw.iter_mut() {
            star.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
        let mut slot = HashMap::new();
        for (c, star) in raw.iter().enumerate() {
            for (k, h) in star.iter().enumerate() {
                slot.insert(h.4, (c, k));
            }
        }
        raw.iter()
            .map(|star| {
                star.iter()
                    .map(|&(angle, theta, target, shift, tag)| {
                        let (_, twin) = slot[&(tag ^ 1)];
                        CellHalfEdge { angle, theta, target, twin, shift }
                    })
                    .collect()
            })
            .collect()
    }

    /// Faces of the torus quotient, each as counterclockwise corners
    /// `(cell vertex, outgoing star index, translation)`.
    pub fn cell_faces(&self) -> Vec<Vec<(usize, usize, [i32; 2])>> {
        let stars = self.stars();
        let mut used: Vec<Vec<bool>> = stars.iter().map(|s| vec![false; s.len()]).collect();
        let mut faces = Vec::new();
        for c0 in 0..stars.len() {
            for k0 in 0..stars[c0].len() {
                if used[c0][k0] {
                    continue;
                }
                let mut face = Vec::new();
                let (mut c, mut k, mut off) = (c0, k0, [0i32, 0i32]);
                loop {
                    used[c][k] = true;
                    face.push((c, k, off));
                    let h = stars[c][k];
                    off = [off[0] + h.shift[0], off[1] + h.shift[1]];
                    let d = stars[h.target].len();
                    c = h.target;
                    k = (h.twin + d - 1) % d;
                    if c == c0 && k == k0 {
                        break;
                    }
                }
                faces.push(face);
            }
        }
        faces
    }

    /// Ball of graph radius `radius` around cell vertex 0, with stubs on
    /// edges that leave the ball.
    pub fn patch(&self, radius: usize) -> Result<LatticePatch> {
        let stars = self.stars();
        let mut index: HashMap<(usize, [i32; 2]), usize> = HashMap::new();
        let mut cell_of = vec![(0usize, [0i32, 0i32])];
        let mut dist = vec![0usize];
        index.insert((0, [0, 0]), 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            if dist[i] == radius {
                continue;
            }
            let (c, o) = cell_of[i];
            for h in &stars[c] {
                let key = (h.target, [o[0] + h.shift[0], o[1] + h.shift[1]]);
                if let Entry::Vacant(slot) = index.entry(key) {
                    slot.insert(cell_of.len());
                    cell_of.push(key);
                    dist.push(dist[i] + 1);
                    queue.push_back(cell_of.len() - 1);
                }
            }
        }
        let vertices: Vec<Vertex> = cell_of.iter().map(|&(c, o)| Vertex { id: format!("{c}_{}_{}", o[0], o[1]), pos: self.position(c, o) }).collect();

        let mut faces = Vec::new();
        for (fi, face) in self.cell_faces().iter().enumerate() {
            let (c0, _, off0) = face[0];
            for &(c, o) in &cell_of {
                if c != c0 {
                    continue;
                }
                let base = [o[0] - off0[0], o[1] - off0[1]];
                let cycle: Option<Vec<usize>> =
                    face.iter().map(|&(ci, _, oi)| index.get(&(ci, [base[0] + oi[0], base[1] + oi[1]])).copied()).collect();
                if let Some(cycle) = cycle {
                    faces.push((format!("f{fi}_{}_{}", base[0], base[1]), cycle));
                }
            }
        }

        // Edges inside the ball that bound no face inside it are kept as a
        // pair of stubs, so every star stays complete.
        let mut face_edges = HashSet::new();
        for (_, cycle) in &faces {
            for i in 0..cycle.len() {
                let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
                face_edges.insert((a.min(b), a.max(b)));
            }
        }
        let mut stubs = Vec::new();
        for (i, &(c, o)) in cell_of.iter().enumerate() {
            for h in &stars[c] {
                let key = (h.target, [o[0] + h.shift[0], o[1] + h.shift[1]]);
                let inside = index.get(&key).is_some_and(|&j| face_edges.contains(&(i.min(j), i.max(j))));
                if !inside {
                    stubs.push(Stub { vertex: i, angle: h.angle, theta: h.theta });
                }
            }
        }
        let graph = IsoradialGraph::new(vertices, faces, stubs, DEFAULT_EPSILON)?;
        let cell_vertices = (0..self.cell.len()).filter_map(|c| index.get(&(c, [0, 0])).copied()).collect();
        let graph = graph.with_periodic(PeriodicInfo { basis: self.basis, cell_vertices });
        Ok(LatticePatch { graph, cell_of, center: 0 })
    }
}

/// Rhombic tiling spanned by two transverse families of train-tracks:
/// diamond vertex (i, j) sits at Σ a_{i'} + Σ b_{j'}.
#[derive(Debug, Clone)]
pub struct RhombicGrid {
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    /// Grid half-width: indices run over −n..=n.
    pub n: i32,
}

impl RhombicGrid {
    /// Constant directions: e^{−iθ} and e^{iθ} give the rectangular lattice.
    pub fn uniform(a: Complex64, b: Complex64, n: i32) -> Self {
        Self { a: vec![a; 2 * n as usize + 1], b: vec![b; 2 * n as usize + 1], n }
    }

    /// Seeded random directions arg a_i ∈ −π/4 ± 0.3, arg b_j ∈ π/4 ± 0.3.
    pub fn quasiperiodic(seed: u64, n: i32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = 2 * n as usize + 1;
        let a = (0..len).map(|_| unit(-FRAC_PI_4 + rng.gen_range(-0.3..0.3))).collect();
        let b = (0..len).map(|_| unit(FRAC_PI_4 + rng.gen_range(-0.3..0.3))).collect();
        Self { a, b, n }
    }

    fn partial(seq: &[Complex64], n: i32, i: i32) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        if i >= 0 {
            for k in 0..i {
                acc += seq[(k + n) as usize];
            }
        } else {
            for k in i..0 {
                acc -= seq[(k + n) as usize];
            }
        }
        acc
    }

    pub fn position(&self, i: i32, j: i32) -> Complex64 {
        Self::partial(&self.a, self.n, i) + Self::partial(&self.b, self.n, j)
    }

    /// Primal vertices with i + j even and max(|i|, |j|) ≤ radius.
    pub fn patch(&self, radius: i32) -> Result<IsoradialGraph> {
        if radius + 1 > self.n {
            return Err(Error::OutOfRange { what: "rhombic grid radius", value: radius as f64 });
        }
        let mut index = HashMap::new();
        let mut vertices = Vec::new();
        for i in -radius..=radius {
            for j in -radius..=radius {
                if (i + j).rem_euclid(2) == 0 {
                    index.insert((i, j), vertices.len());
                    vertices.push(Vertex { id: format!("{i}_{j}"), pos: self.position(i, j) });
                }
            }
        }
        let mut faces = Vec::new();
        for i in -radius..=radius {
            for j in -radius..=radius {
                if (i + j).rem_euclid(2) == 1 {
                    let corners = [(i + 1, j), (i, j + 1), (i - 1, j), (i, j - 1)];
                    let cycle: Option<Vec<usize>> = corners.iter().map(|c| index.get(c).copied()).collect();
                    if let Some(cycle) = cycle {
                        faces.push((format!("d{i}_{j}"), cycle));
                    }
                }
            }
        }
        let mut face_edges = HashSet::new();
        for (_, cycle) in &faces {
            for k in 0..4 {
                let (p, q) = (cycle[k], cycle[(k + 1) % 4]);
                face_edges.insert((p.min(q), p.max(q)));
            }
        }
        let mut stubs = Vec::new();
        for (&(i, j), &x) in &index {
            let p = self.position(i, j);
            for (di, dj) in [(1, 1), (-1, 1), (-1, -1), (1, -1)] {
                let inside = index.get(&(i + di, j + dj)).is_some_and(|&y| face_edges.contains(&(x.min(y), x.max(y))));
                if !inside {
                    let d = self.position(i + di, j + dj) - p;
                    stubs.push(Stub { vertex: x, angle: angle_0_2pi(d), theta: (d.norm() / 2.0).acos() });
                }
            }
        }
        IsoradialGraph::new(vertices, faces, stubs, DEFAULT_EPSILON)
    }
}

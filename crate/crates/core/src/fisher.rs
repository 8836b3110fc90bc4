//! Fisher decoration, Kasteleyn orientation, critical Kasteleyn matrix and
//! the angle field in ℝ/4πℤ.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{wrap_2pi, IsoradialGraph, Lattice};
use crate::weights::critical_dimer_weight;

const FOUR_PI: f64 = 4.0 * PI;

/// One half-edge of a star, in the combinatorial form shared by finite
/// patches and torus cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarEntry {
    pub angle: f64,
    pub theta: f64,
    /// `(vertex, star index of the reverse half-edge)`.
    pub target: Option<(usize, usize)>,
    /// Lattice translation of the target copy (zero on finite patches).
    pub shift: [i32; 2],
}

/// Rotation system with face corners: the input to the decoration.
#[derive(Debug, Clone)]
pub struct StarGraph {
    pub names: Vec<String>,
    pub stars: Vec<Vec<StarEntry>>,
    /// Faces as counterclockwise corners `(vertex, k)`, where `k` is the
    /// star index of the half-edge to the next corner.
    pub faces: Vec<Vec<(usize, usize)>>,
    pub periodic: bool,
}

impl StarGraph {
    pub fn from_graph(graph: &IsoradialGraph) -> Result<Self> {
        let mut stars = Vec::with_capacity(graph.vertex_count());
        for x in 0..graph.vertex_count() {
            let mut star = Vec::with_capacity(graph.degree(x));
            for h in graph.star(x) {
                let target = match (h.target, h.edge) {
                    (Some(y), Some(e)) => {
                        let l = graph.halfedge_index(y, e).ok_or_else(|| Error::MalformedGraph("dangling half-edge".into()))?;
                        Some((y, l))
                    }
                    _ => None,
                };
                star.push(StarEntry { angle: h.angle, theta: h.theta, target, shift: [0, 0] });
            }
            stars.push(star);
        }
        let mut faces = Vec::with_capacity(graph.faces.len());
        for face in &graph.faces {
            let m = face.cycle.len();
            let mut corners = Vec::with_capacity(m);
            for i in 0..m {
                let (x, y) = (face.cycle[i], face.cycle[(i + 1) % m]);
                let e = graph.edge_between(x, y).expect("face edges exist");
                corners.push((x, graph.halfedge_index(x, e).expect("edge in star")));
            }
            faces.push(corners);
        }
        Ok(Self { names: graph.vertices.iter().map(|v| v.id.clone()).collect(), stars, faces, periodic: false })
    }

    /// Subgraph induced by `keep`, with every edge leaving it dropped. Faces
    /// survive when all their corners are kept. Used for finite graphs where
    /// boundary stubs are not wanted.
    pub fn induced(graph: &IsoradialGraph, keep: &[usize]) -> Result<Self> {
        let full = Self::from_graph(graph)?;
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mut remap: Vec<HashMap<usize, usize>> = vec![HashMap::new(); keep.len()];
        let mut stars = vec![Vec::new(); keep.len()];
        for (i, &x) in keep.iter().enumerate() {
            for (k, h) in full.stars[x].iter().enumerate() {
                if let Some((y, _)) = h.target {
                    if pos.contains_key(&y) {
                        remap[i].insert(k, stars[i].len());
                        stars[i].push(*h);
                    }
                }
            }
        }
        for star in &mut stars {
            for h in star.iter_mut() {
                let (y, l) = h.target.expect("kept half-edges have targets");
                let j = pos[&y];
                h.target = Some((j, remap[j][&l]));
            }
        }
        let faces = full
            .faces
            .iter()
            .filter_map(|corners| corners.iter().map(|&(x, k)| Some((*pos.get(&x)?, *remap[*pos.get(&x)?].get(&k)?))).collect())
            .collect();
        let names = keep.iter().map(|&x| full.names[x].clone()).collect();
        Ok(Self { names, stars, faces, periodic: false })
    }

    /// Quotient of a lattice by its translations (a single torus cell).
    pub fn from_lattice(lattice: &Lattice) -> Self {
        let cell_stars = lattice.stars();
        let stars = cell_stars
            .iter()
            .map(|star| star.iter().map(|h| StarEntry { angle: h.angle, theta: h.theta, target: Some((h.target, h.twin)), shift: h.shift }).collect())
            .collect();
        let faces = lattice.cell_faces().into_iter().map(|f| f.into_iter().map(|(c, k, _)| (c, k)).collect()).collect();
        Self { names: (0..lattice.cell.len()).map(|c| c.to_string()).collect(), stars, faces, periodic: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VertexType {
    V,
    W,
    Z,
}

impl VertexType {
    pub fn letter(self) -> char {
        match self {
            VertexType::V => 'v',
            VertexType::W => 'w',
            VertexType::Z => 'z',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FisherVertex {
    pub g: usize,
    pub k: usize,
    pub ty: VertexType,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeClass {
    Triangle,
    Ring,
    Inter,
}

/// Edge between `a` and `b`; `shift` is the translation from the copy of `a` to the
/// copy of `b` on torus cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherEdge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
    pub class: EdgeClass,
    pub shift: [i32; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceKind {
    Triangle(usize),
    Inner(usize),
    Primal(usize),
}

/// A bounded face as a closed walk of `(edge, traversed a→b)` steps.
/// Triangles are walked clockwise; the other faces have even length.
#[derive(Debug, Clone, PartialEq)]
pub struct FisherFace {
    pub kind: FaceKind,
    pub steps: Vec<(usize, bool)>,
}

/// The Fisher graph of an isoradial patch or torus cell.
#[derive(Debug, Clone)]
pub struct FisherGraph {
    pub names: Vec<String>,
    pub offsets: Vec<usize>,
    pub stars: Vec<Vec<StarEntry>>,
    pub vertices: Vec<FisherVertex>,
    pub edges: Vec<FisherEdge>,
    pub incident: Vec<Vec<usize>>,
    pub faces: Vec<FisherFace>,
    pub periodic: bool,
    ring_edge: Vec<usize>,
    inter_edge: Vec<Option<usize>>,
}

impl FisherGraph {
    /// Replace every vertex of degree d by d triangles joined in a ring.
    pub fn decorate(graph: &IsoradialGraph) -> Result<Self> {
        Self::from_stars(&StarGraph::from_graph(graph)?)
    }

    pub fn from_stars(sg: &StarGraph) -> Result<Self> {
        let n = sg.stars.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut total = 0;
        for (x, star) in sg.stars.iter().enumerate() {
            if star.len() < 2 {
                return Err(Error::MalformedGraph(format!("vertex `{}` has degree {}", sg.names[x], star.len())));
            }
            offsets.push(total);
            total += 3 * star.len();
        }
        offsets.push(total);
        let mut vertices = Vec::with_capacity(total);
        for (x, star) in sg.stars.iter().enumerate() {
            for k in 0..star.len() {
                for ty in [VertexType::V, VertexType::W, VertexType::Z] {
                    vertices.push(FisherVertex { g: x, k, ty });
                }
            }
        }
        let idx = |x: usize, k: usize, ty: VertexType| {
            offsets[x]
                + 3 * k
                + match ty {
                    VertexType::V => 0,
                    VertexType::W => 1,
                    VertexType::Z => 2,
                }
        };
        let mut edges = Vec::new();
        let mut triangle_edges = vec![[0usize; 3]; total / 3];
        let mut ring_edge = vec![0usize; total / 3];
        for (x, star) in sg.stars.iter().enumerate() {
            let d = star.len();
            for k in 0..d {
                let (v, w, z) = (idx(x, k, VertexType::V), idx(x, k, VertexType::W), idx(x, k, VertexType::Z));
                let base = edges.len();
                for (a, b) in [(v, z), (z, w), (w, v)] {
                    edges.push(FisherEdge { a, b, weight: 1.0, class: EdgeClass::Triangle, shift: [0, 0] });
                }
                triangle_edges[offsets[x] / 3 + k] = [base, base + 1, base + 2];
            }
            for k in 0..d {
                ring_edge[offsets[x] / 3 + k] = edges.len();
                edges.push(FisherEdge {
                    a: idx(x, k, VertexType::W),
                    b: idx(x, (k + 1) % d, VertexType::Z),
                    weight: 1.0,
                    class: EdgeClass::Ring,
                    shift: [0, 0],
                });
            }
        }
        let mut inter_edge = vec![None; total / 3];
        for (x, star) in sg.stars.iter().enumerate() {
            for (k, h) in star.iter().enumerate() {
                let Some((y, l)) = h.target else { continue };
                let back = sg.stars[y].get(l).and_then(|r| r.target);
                if back != Some((x, k)) {
                    return Err(Error::MalformedGraph(format!("half-edge {k} at `{}` has no consistent twin", sg.names[x])));
                }
                if (x, k) < (y, l) {
                    let e = edges.len();
                    edges.push(FisherEdge {
                        a: idx(x, k, VertexType::V),
                        b: idx(y, l, VertexType::V),
                        weight: critical_dimer_weight(h.theta)?,
                        class: EdgeClass::Inter,
                        shift: h.shift,
                    });
                    inter_edge[offsets[x] / 3 + k] = Some(e);
                    inter_edge[offsets[y] / 3 + l] = Some(e);
                }
            }
        }

        let mut faces = Vec::new();
        for (x, star) in sg.stars.iter().enumerate() {
            let d = star.len();
            for k in 0..d {
                let t = triangle_edges[offsets[x] / 3 + k];
                faces.push(FisherFace { kind: FaceKind::Triangle(x), steps: t.iter().map(|&e| (e, true)).collect() });
            }
            let mut steps = Vec::with_capacity(2 * d);
            for k in 0..d {
                steps.push((triangle_edges[offsets[x] / 3 + k][1], true));
                steps.push((ring_edge[offsets[x] / 3 + k], true));
            }
            faces.push(FisherFace { kind: FaceKind::Inner(x), steps });
        }
        for (fi, corners) in sg.faces.iter().enumerate() {
            let m = corners.len();
            let mut steps = Vec::with_capacity(4 * m);
            for i in 0..m {
                let (x, k) = corners[i];
                let d = sg.stars[x].len();
                let k1 = (k + 1) % d;
                steps.push((triangle_edges[offsets[x] / 3 + k1][0], true));
                steps.push((ring_edge[offsets[x] / 3 + k], false));
                steps.push((triangle_edges[offsets[x] / 3 + k][2], true));
                let (nx, nk) = corners[(i + 1) % m];
                let expected = Some((nx, (nk + 1) % sg.stars[nx].len()));
                if sg.stars[x][k].target != expected {
                    return Err(Error::MalformedGraph(format!("face {fi} corners are not consecutive at `{}`", sg.names[x])));
                }
                let e = inter_edge[offsets[x] / 3 + k].expect("target exists");
                steps.push((e, edges[e].a == idx(x, k, VertexType::V)));
            }
            faces.push(FisherFace { kind: FaceKind::Primal(fi), steps });
        }

        let mut incident = vec![Vec::with_capacity(3); total];
        for (e, edge) in edges.iter().enumerate() {
            incident[edge.a].push(e);
            incident[edge.b].push(e);
        }
        Ok(Self {
            names: sg.names.clone(),
            offsets,
            stars: sg.stars.clone(),
            vertices,
            edges,
            incident,
            faces,
            periodic: sg.periodic,
            ring_edge,
            inter_edge,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn g_count(&self) -> usize {
        self.stars.len()
    }

    pub fn degree(&self, g: usize) -> usize {
        self.stars[g].len()
    }

    pub fn index(&self, g: usize, k: usize, ty: VertexType) -> usize {
        self.offsets[g]
            + 3 * k
            + match ty {
                VertexType::V => 0,
                VertexType::W => 1,
                VertexType::Z => 2,
            }
    }

    pub fn theta(&self, u: usize) -> f64 {
        let fv = self.vertices[u];
        self.stars[fv.g][fv.k].theta
    }

    /// Ring edge between `w_k` and `z_{k+1}` of decoration `g`.
    pub fn ring_edge(&self, g: usize, k: usize) -> usize {
        self.ring_edge[self.offsets[g] / 3 + k]
    }

    /// Edge leaving the decoration at `v_k(g)`, if the neighbour exists.
    pub fn inter_edge(&self, g: usize, k: usize) -> Option<usize> {
        self.inter_edge[self.offsets[g] / 3 + k]
    }

    /// Edge joining `a` and `b`, if any.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.incident[a].iter().copied().find(|&e| {
            let ed = &self.edges[e];
            (ed.a == a && ed.b == b) || (ed.a == b && ed.b == a)
        })
    }

    /// Neighbour of `u` across edge `e`.
    pub fn other_end(&self, e: usize, u: usize) -> usize {
        let ed = &self.edges[e];
        if ed.a == u {
            ed.b
        } else {
            ed.a
        }
    }

    /// Deterministic vertex name `t:{gvertex}:{k}` with k counted from 1.
    pub fn name(&self, u: usize) -> String {
        let fv = self.vertices[u];
        format!("{}:{}:{}", fv.ty.letter(), self.names[fv.g], fv.k + 1)
    }

    pub fn parse_name(&self, name: &str) -> Result<usize> {
        let mut parts = name.splitn(3, ':');
        let (Some(t), Some(g), Some(k)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse(format!("vertex name `{name}` is not of the form t:g:k")));
        };
        let ty = match t {
            "v" => VertexType::V,
            "w" => VertexType::W,
            "z" => VertexType::Z,
            _ => return Err(Error::Parse(format!("unknown vertex type in `{name}`"))),
        };
        let g = self.names.iter().position(|n| n == g).ok_or_else(|| Error::UnknownVertex(g.to_string()))?;
        let k: usize = k.parse().map_err(|_| Error::Parse(format!("bad index in `{name}`")))?;
        if k == 0 || k > self.degree(g) {
            return Err(Error::Parse(format!("index out of range in `{name}`")));
        }
        Ok(self.index(g, k - 1, ty))
    }

    /// Rhombus side attached to a w- or z-type vertex (None for v-type).
    pub fn side(&self, u: usize) -> Option<Complex64> {
        let fv = self.vertices[u];
        let h = self.stars[fv.g][fv.k];
        match fv.ty {
            VertexType::W => Some(Complex64::from_polar(1.0, h.angle + h.theta)),
            VertexType::Z => Some(Complex64::from_polar(1.0, h.angle - h.theta)),
            VertexType::V => None,
        }
    }

    fn geometric_angle(&self, u: usize) -> f64 {
        let fv = self.vertices[u];
        let h = self.stars[fv.g][fv.k];
        match fv.ty {
            VertexType::W => wrap_2pi(h.angle + h.theta),
            VertexType::Z => wrap_2pi(h.angle - h.theta),
            VertexType::V => f64::NAN,
        }
    }
}

/// Edge signs: `+1` orients `a → b`, `−1` orients `b → a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KasteleynOrientation {
    pub sign: Vec<i8>,
}

fn co_oriented(forward: bool, sign: i8) -> bool {
    forward == (sign > 0)
}

impl KasteleynOrientation {
    /// Deterministic orientation with every triangle clockwise and every
    /// bounded face clockwise odd.
    pub fn compute(f: &FisherGraph) -> Result<Self> {
        Self::compute_with(f, &HashMap::new(), None)
    }

    /// Solve the face-parity constraints by peeling a spanning tree of the
    /// dual graph. Edges in `preset` keep their sign; free choices are
    /// drawn from `seed` when given.
    pub fn compute_with(f: &FisherGraph, preset: &HashMap<usize, i8>, seed: Option<u64>) -> Result<Self> {
        let m = f.edges.len();
        let mut sign: Vec<i8> = vec![1; m];
        let mut fixed = vec![false; m];
        for (e, edge) in f.edges.iter().enumerate() {
            if edge.class == EdgeClass::Triangle {
                fixed[e] = true;
            }
        }
        for (&e, &s) in preset {
            sign[e] = if s < 0 { -1 } else { 1 };
            fixed[e] = true;
        }
        let faces: Vec<usize> = (0..f.faces.len()).filter(|&i| !matches!(f.faces[i].kind, FaceKind::Triangle(_))).collect();
        let outer = faces.len();
        let mut edge_faces: Vec<Vec<usize>> = vec![Vec::new(); m];
        for (node, &fi) in faces.iter().enumerate() {
            for &(e, _) in &f.faces[fi].steps {
                edge_faces[e].push(node);
            }
        }
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); outer + 1];
        let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
        for e in 0..m {
            if fixed[e] {
                continue;
            }
            let ends = match edge_faces[e].as_slice() {
                [a] if !f.periodic => Some((*a, outer)),
                [a, b] if a != b => Some((*a, *b)),
                _ => None,
            };
            if let Some((a, b)) = ends {
                adj[a].push((b, e));
                adj[b].push((a, e));
            }
            if let Some(r) = rng.as_mut() {
                sign[e] = if r.gen_bool(0.5) { 1 } else { -1 };
            }
        }
        let root = if f.periodic { 0 } else { outer };
        let mut parent: Vec<Option<usize>> = vec![None; outer + 1];
        let mut seen = vec![false; outer + 1];
        let mut order = Vec::with_capacity(outer + 1);
        let mut queue = VecDeque::new();
        let mut roots = vec![root];
        if root != outer {
            seen[outer] = true;
        }
        roots.extend(0..outer);
        for r in roots {
            if seen[r] {
                continue;
            }
            seen[r] = true;
            queue.push_back(r);
            while let Some(u) = queue.pop_front() {
                order.push(u);
                for &(v, e) in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        parent[v] = Some(e);
                        queue.push_back(v);
                    }
                }
            }
        }
        for &node in order.iter().rev() {
            let Some(pe) = parent[node] else { continue };
            let steps = &f.faces[faces[node]].steps;
            let mut count = 0usize;
            let mut pe_forward = true;
            for &(e, fw) in steps {
                if e == pe {
                    pe_forward = fw;
                } else if co_oriented(fw, sign[e]) {
                    count += 1;
                }
            }
            let want_co = count.is_multiple_of(2);
            sign[pe] = if want_co == pe_forward { 1 } else { -1 };
        }
        let o = Self { sign };
        o.verify(f)?;
        Ok(o)
    }

    /// Number of steps of a face walk co-oriented with the walk.
    pub fn co_oriented_count(&self, f: &FisherGraph, face: usize) -> usize {
        f.faces[face].steps.iter().filter(|&&(e, fw)| co_oriented(fw, self.sign[e])).count()
    }

    /// Check every triangle is clockwise and every face clockwise odd.
    pub fn verify(&self, f: &FisherGraph) -> Result<()> {
        for (i, face) in f.faces.iter().enumerate() {
            let count = self.co_oriented_count(f, i);
            let ok = match face.kind {
                FaceKind::Triangle(_) => count == 3,
                _ => count % 2 == 1,
            };
            if !ok {
                return Err(Error::OrientationFailure { face: i, detail: format!("{:?} has {count} co-oriented edges", face.kind) });
            }
        }
        Ok(())
    }

    /// Negate every edge whose translation has an odd component along
    /// `axis`; face parities are unchanged, the spin structure is not.
    pub fn flip_winding(&self, f: &FisherGraph, axis: usize) -> Self {
        let sign = self.sign.iter().zip(&f.edges).map(|(&s, e)| if e.shift[axis].rem_euclid(2) == 1 { -s } else { s }).collect();
        Self { sign }
    }

    /// Oriented value K_{u,v}; zero when not adjacent.
    pub fn entry(&self, f: &FisherGraph, u: usize, v: usize) -> f64 {
        match f.edge_between(u, v) {
            Some(e) => {
                let ed = &f.edges[e];
                let s = self.sign[e] as f64 * ed.weight;
                if ed.a == u {
                    s
                } else {
                    -s
                }
            }
            None => 0.0,
        }
    }

    /// Non-zero entries of row `u` as `(v, K_{u,v}, shift from u to v)`.
    pub fn row(&self, f: &FisherGraph, u: usize) -> Vec<(usize, f64, [i32; 2])> {
        f.incident[u]
            .iter()
            .map(|&e| {
                let ed = &f.edges[e];
                let s = self.sign[e] as f64 * ed.weight;
                if ed.a == u {
                    (ed.b, s, ed.shift)
                } else {
                    (ed.a, -s, [-ed.shift[0], -ed.shift[1]])
                }
            })
            .collect()
    }
}

/// α-angles of the w- and z-type vertices, stored in [0, 4π) as the exact
/// geometric direction plus a multiple of 2π.
#[derive(Debug, Clone)]
pub struct AngleField {
    alpha: Vec<f64>,
    pub base: usize,
}

fn diff_mod_4pi(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(FOUR_PI);
    if d > 2.0 * PI {
        d - FOUR_PI
    } else {
        d
    }
}

struct Relation {
    from: usize,
    to: usize,
    delta: f64,
}

impl AngleField {
    /// Propagate angles from z_1 of the lexicographically smallest vertex.
    pub fn assign(f: &FisherGraph, o: &KasteleynOrientation) -> Result<Self> {
        let x0 = (0..f.g_count()).min_by(|&a, &b| f.names[a].cmp(&f.names[b])).expect("non-empty graph");
        Self::assign_from(f, o, f.index(x0, 0, VertexType::Z))
    }

    fn relations(f: &FisherGraph, o: &KasteleynOrientation) -> Result<Vec<Relation>> {
        let mut rel = Vec::new();
        for g in 0..f.g_count() {
            let d = f.degree(g);
            for k in 0..d {
                let (w, z) = (f.index(g, k, VertexType::W), f.index(g, k, VertexType::Z));
                rel.push(Relation { from: z, to: w, delta: 2.0 * f.stars[g][k].theta });
                let zn = f.index(g, (k + 1) % d, VertexType::Z);
                if (f.side(w).unwrap() - f.side(zn).unwrap()).norm() < 1e-9 {
                    let e = f.ring_edge(g, k);
                    let delta = if o.sign[e] > 0 { 0.0 } else { 2.0 * PI };
                    rel.push(Relation { from: w, to: zn, delta });
                }
            }
        }
        for (e, edge) in f.edges.iter().enumerate() {
            if edge.class != EdgeClass::Inter {
                continue;
            }
            let (va, vb) = (f.vertices[edge.a], f.vertices[edge.b]);
            let delta = if o.sign[e] > 0 { -PI } else { PI };
            for ty in [VertexType::W, VertexType::Z] {
                let from = f.index(va.g, va.k, ty);
                let to = f.index(vb.g, vb.k, ty);
                rel.push(Relation { from, to, delta });
            }
        }
        Ok(rel)
    }

    pub fn assign_from(f: &FisherGraph, o: &KasteleynOrientation, base: usize) -> Result<Self> {
        if f.vertices[base].ty != VertexType::Z {
            return Err(Error::Parse(format!("angle base `{}` is not z-type", f.name(base))));
        }
        let relations = Self::relations(f, o)?;
        let n = f.vertex_count();
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for r in &relations {
            adj[r.from].push((r.to, r.delta));
            adj[r.to].push((r.from, -r.delta));
        }
        let mut alpha = vec![f64::NAN; n];
        let starts = std::iter::once(base).chain((0..n).filter(|&u| f.vertices[u].ty != VertexType::V));
        for s in starts {
            if !alpha[s].is_nan() {
                continue;
            }
            alpha[s] = f.geometric_angle(s);
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &(v, delta) in &adj[u] {
                    if !alpha[v].is_nan() {
                        continue;
                    }
                    let predicted = (alpha[u] + delta).rem_euclid(FOUR_PI);
                    let geo = f.geometric_angle(v);
                    let lifted =
                        if diff_mod_4pi(predicted, geo).abs() <= diff_mod_4pi(predicted, geo + 2.0 * PI).abs() { geo } else { geo + 2.0 * PI };
                    let residue = diff_mod_4pi(predicted, lifted).abs();
                    if residue > 1e-8 {
                        return Err(Error::InconsistentAngles { at: f.name(v), residue });
                    }
                    alpha[v] = lifted;
                    queue.push_back(v);
                }
            }
        }
        let field = Self { alpha, base };
        let worst = field.closure_residue(f, o)?;
        if worst > 1e-9 {
            return Err(Error::InconsistentAngles { at: "closure audit".into(), residue: worst });
        }
        Ok(field)
    }

    /// Largest mod-4π mismatch over every propagation relation.
    pub fn closure_residue(&self, f: &FisherGraph, o: &KasteleynOrientation) -> Result<f64> {
        Ok(Self::relations(f, o)?.iter().map(|r| diff_mod_4pi(self.alpha[r.from] + r.delta, self.alpha[r.to]).abs()).fold(0.0, f64::max))
    }

    /// α of a w- or z-type vertex in [0, 4π).
    pub fn alpha(&self, u: usize) -> f64 {
        self.alpha[u]
    }
}

/// Kasteleyn matrix entries for a fixed orientation.
#[derive(Debug, Clone, Copy)]
pub struct KasteleynMatrix<'a> {
    pub fisher: &'a FisherGraph,
    pub orientation: &'a KasteleynOrientation,
}

impl<'a> KasteleynMatrix<'a> {
    pub fn new(fisher: &'a FisherGraph, orientation: &'a KasteleynOrientation) -> Self {
        Self { fisher, orientation }
    }

    pub fn entry(&self, u: usize, v: usize) -> f64 {
        self.orientation.entry(self.fisher, u, v)
    }

    pub fn row(&self, u: usize) -> Vec<(usize, f64, [i32; 2])> {
        self.orientation.row(self.fisher, u)
    }
}

use std::collections::{HashMap, VecDeque};
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use super::{angle_0_2pi, unit, wrap_2pi};
use crate::error::{Error, Result};

/// Smallest admissible rhombus half-angle for generated patches.
pub const DEFAULT_EPSILON: f64 = 0.05;

const GEOM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub id: String,
    pub pos: Complex64,
}

/// A bounded face, stored counterclockwise, with its recomputed circumcenter.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub id: String,
    pub cycle: Vec<usize>,
    pub center: Complex64,
}

/// An edge of G. `faces[0]` lies to the left of `ends[0] → ends[1]`,
/// `faces[1]` to the right; either may be missing on the patch boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub ends: [usize; 2],
    pub theta: f64,
    pub faces: [Option<usize>; 2],
}

/// An edge leaving a finite patch: only its direction and half-angle are kept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stub {
    pub vertex: usize,
    pub angle: f64,
    pub theta: f64,
}

/// One entry of a vertex star, sorted counterclockwise by `angle` ∈ [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfEdge {
    pub angle: f64,
    pub theta: f64,
    pub edge: Option<usize>,
    pub target: Option<usize>,
}

impl HalfEdge {
    /// Unit rhombus side on the clockwise side of the half-edge.
    pub fn z_side(&self) -> Complex64 {
        unit(self.angle - self.theta)
    }

    /// Unit rhombus side on the counterclockwise side of the half-edge.
    pub fn w_side(&self) -> Complex64 {
        unit(self.angle + self.theta)
    }
}

/// Periodic structure of a graph document: lattice basis and one
/// representative vertex per orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicInfo {
    pub basis: [Complex64; 2],
    pub cell_vertices: Vec<usize>,
}

/// A finite isoradial graph (or patch of an infinite one).
#[derive(Debug, Clone)]
pub struct IsoradialGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub faces: Vec<Face>,
    pub stars: Vec<Vec<HalfEdge>>,
    pub periodic: Option<PeriodicInfo>,
    pub epsilon: f64,
    index: HashMap<String, usize>,
    edge_lookup: HashMap<(usize, usize), usize>,
}

fn circumcenter(a: Complex64, b: Complex64, c: Complex64) -> Option<Complex64> {
    let (bx, by) = (b.re - a.re, b.im - a.im);
    let (cx, cy) = (c.re - a.re, c.im - a.im);
    let d = 2.0 * (bx * cy - by * cx);
    if d.abs() < 1e-14 {
        return None;
    }
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    Some(a + Complex64::new((cy * b2 - by * c2) / d, (bx * c2 - cx * b2) / d))
}

fn signed_area(points: &[Complex64]) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| {
            let p = points[i];
            let q = points[(i + 1) % n];
            p.re * q.im - q.re * p.im
        })
        .sum::<f64>()
        / 2.0
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

impl IsoradialGraph {
    /// Build a graph from vertex positions, face cycles and boundary stubs.
    ///
    /// Circumcenters are recomputed from positions; edges are read off the
    /// face cycles. Faces may be given in either orientation.
    pub fn new(vertices: Vec<Vertex>, faces: Vec<(String, Vec<usize>)>, stubs: Vec<Stub>, epsilon: f64) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.id.clone(), i).is_some() {
                return Err(Error::MalformedGraph(format!("duplicate vertex id `{}`", v.id)));
            }
        }
        let mut built_faces = Vec::with_capacity(faces.len());
        for (id, mut cycle) in faces {
            if cycle.len() < 3 {
                return Err(Error::MalformedGraph(format!("face `{id}` has fewer than 3 vertices")));
            }
            if let Some(&bad) = cycle.iter().find(|&&v| v >= vertices.len()) {
                return Err(Error::MalformedGraph(format!("face `{id}` references vertex {bad}")));
            }
            let pts: Vec<Complex64> = cycle.iter().map(|&v| vertices[v].pos).collect();
            if signed_area(&pts) < 0.0 {
                cycle.reverse();
            }
            let pts: Vec<Complex64> = cycle.iter().map(|&v| vertices[v].pos).collect();
            let center = circumcenter(pts[0], pts[1], pts[2]).ok_or_else(|| Error::NonIsoradial { face: id.clone(), deviation: f64::INFINITY })?;
            let deviation = pts.iter().map(|p| ((p - center).norm() - 1.0).abs()).fold(0.0, f64::max);
            if deviation > GEOM_TOL {
                return Err(Error::NonIsoradial { face: id, deviation });
            }
            let n = pts.len();
            let outside = (0..n).map(|i| -cross(pts[(i + 1) % n] - pts[i], center - pts[i])).fold(0.0, f64::max);
            if outside > GEOM_TOL {
                return Err(Error::NonIsoradial { face: id, deviation: outside });
            }
            built_faces.push(Face { id, cycle, center });
        }

        let mut edges: Vec<Edge> = Vec::new();
        let mut edge_lookup = HashMap::new();
        for (f, face) in built_faces.iter().enumerate() {
            let n = face.cycle.len();
            for i in 0..n {
                let (a, b) = (face.cycle[i], face.cycle[(i + 1) % n]);
                let key = (a.min(b), a.max(b));
                let e = *edge_lookup.entry(key).or_insert_with(|| {
                    edges.push(Edge { ends: [key.0, key.1], theta: 0.0, faces: [None, None] });
                    edges.len() - 1
                });
                let slot = if a == edges[e].ends[0] { 0 } else { 1 };
                if edges[e].faces[slot].is_some() {
                    return Err(Error::MalformedGraph(format!("edge {}-{} bounds two faces on the same side", vertices[a].id, vertices[b].id)));
                }
                edges[e].faces[slot] = Some(f);
            }
        }

        for edge in edges.iter_mut() {
            let [a, b] = edge.ends;
            let d = vertices[b].pos - vertices[a].pos;
            let half = d.norm() / 2.0;
            let edge_name = format!("{}-{}", vertices[a].id, vertices[b].id);
            if half >= 1.0 {
                return Err(Error::DegenerateRhombus { edge: edge_name, theta: 0.0, epsilon });
            }
            let theta = half.acos();
            let phi = d.arg();
            for (slot, sign) in [(0usize, 1.0), (1, -1.0)] {
                if let Some(f) = edge.faces[slot] {
                    let expected = vertices[a].pos + unit(phi + sign * theta);
                    let deviation = (built_faces[f].center - expected).norm();
                    if deviation > GEOM_TOL {
                        return Err(Error::NonIsoradial { face: built_faces[f].id.clone(), deviation });
                    }
                }
            }
            if theta < epsilon - 1e-12 || theta > FRAC_PI_2 - epsilon + 1e-12 {
                return Err(Error::DegenerateRhombus { edge: edge_name, theta, epsilon });
            }
            edge.theta = theta;
        }

        let mut stars: Vec<Vec<HalfEdge>> = vec![Vec::new(); vertices.len()];
        for (e, edge) in edges.iter().enumerate() {
            let [a, b] = edge.ends;
            let d = vertices[b].pos - vertices[a].pos;
            stars[a].push(HalfEdge { angle: angle_0_2pi(d), theta: edge.theta, edge: Some(e), target: Some(b) });
            stars[b].push(HalfEdge { angle: angle_0_2pi(-d), theta: edge.theta, edge: Some(e), target: Some(a) });
        }
        for stub in &stubs {
            if stub.vertex >= vertices.len() {
                return Err(Error::MalformedGraph(format!("stub at unknown vertex {}", stub.vertex)));
            }
            if stub.theta < epsilon - 1e-12 || stub.theta > FRAC_PI_2 - epsilon + 1e-12 {
                return Err(Error::DegenerateRhombus { edge: format!("{}-stub", vertices[stub.vertex].id), theta: stub.theta, epsilon });
            }
            stars[stub.vertex].push(HalfEdge { angle: wrap_2pi(stub.angle), theta: stub.theta, edge: None, target: None });
        }
        for (x, star) in stars.iter_mut().enumerate() {
            star.sort_by(|p, q| p.angle.total_cmp(&q.angle));
            for k in 1..star.len() {
                if star[k].angle - star[k - 1].angle < 1e-9 {
                    return Err(Error::MalformedGraph(format!("two edges leave `{}` in the same direction", vertices[x].id)));
                }
            }
        }

        Ok(Self { vertices, edges, faces: built_faces, stars, periodic: None, epsilon, index, edge_lookup })
    }

    pub fn with_periodic(mut self, periodic: PeriodicInfo) -> Self {
        self.periodic = Some(periodic);
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn vertex_id(&self, x: usize) -> &str {
        &self.vertices[x].id
    }

    pub fn position(&self, x: usize) -> Complex64 {
        self.vertices[x].pos
    }

    pub fn degree(&self, x: usize) -> usize {
        self.stars[x].len()
    }

    pub fn star(&self, x: usize) -> &[HalfEdge] {
        &self.stars[x]
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_lookup.get(&(a.min(b), a.max(b))).copied()
    }

    /// Index within the star of `x` of the half-edge carrying edge `e`.
    pub fn halfedge_index(&self, x: usize, e: usize) -> Option<usize> {
        self.stars[x].iter().position(|h| h.edge == Some(e))
    }

    /// Whether `x` carries stubs, i.e. has neighbours outside the patch.
    pub fn has_stubs(&self, x: usize) -> bool {
        self.stars[x].iter().any(|h| h.target.is_none())
    }

    /// Whether the rhombi around `x` close up to a full turn.
    pub fn is_complete(&self, x: usize) -> bool {
        let star = &self.stars[x];
        if star.is_empty() {
            return false;
        }
        let total: f64 = star.iter().map(|h| h.theta).sum();
        if (total - PI).abs() > GEOM_TOL {
            return false;
        }
        let d = star.len();
        (0..d).all(|k| (star[k].w_side() - star[(k + 1) % d].z_side()).norm() < GEOM_TOL)
    }

    /// Whether every edge at `x` is present with both adjacent faces.
    pub fn is_interior(&self, x: usize) -> bool {
        self.is_complete(x)
            && self.stars[x].iter().all(|h| match h.edge {
                Some(e) => self.edges[e].faces.iter().all(Option::is_some),
                None => false,
            })
    }

    /// Breadth-first graph distances from `x` (None when unreachable).
    pub fn distances_from(&self, x: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertices.len()];
        dist[x] = Some(0);
        let mut queue = VecDeque::from([x]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for h in &self.stars[u] {
                if let Some(v) = h.target {
                    if dist[v].is_none() {
                        dist[v] = Some(du + 1);
                        queue.push_back(v);
                    }
                }
            }
        }
        dist
    }

    /// Graph distance from each vertex to the nearest non-interior vertex.
    pub fn boundary_distances(&self) -> Vec<usize> {
        let n = self.vertices.len();
        let mut dist = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for x in 0..n {
            if !self.is_interior(x) {
                dist[x] = 0;
                queue.push_back(x);
            }
        }
        while let Some(u) = queue.pop_front() {
            for h in &self.stars[u] {
                if let Some(v) = h.target {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
        }
        dist
    }

    pub fn edge_name(&self, e: usize) -> String {
        let [a, b] = self.edges[e].ends;
        format!("{}-{}", self.vertices[a].id, self.vertices[b].id)
    }
}

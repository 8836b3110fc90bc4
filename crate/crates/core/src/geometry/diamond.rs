use std::collections::{HashMap, VecDeque};

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::graph::IsoradialGraph;
use super::unit;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Primal,
    Dual,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiamondVertex {
    pub pos: Complex64,
    pub role: Role,
    /// Face of G whose circumcenter this is; `None` for primal vertices and
    /// for centers completed outside the patch.
    pub face: Option<usize>,
}

/// The rhombus around one edge of G.
///
/// Corners are `y, t, x, u` in counterclockwise order with `y`, `x` primal
/// and `x − y = sides[0] + sides[1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rhombus {
    pub edge: usize,
    pub x: usize,
    pub y: usize,
    pub t: usize,
    pub u: usize,
    pub theta: f64,
    pub sides: [Complex64; 2],
}

/// A maximal chain of rhombi sharing a parallel side.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainTrack {
    pub direction: Complex64,
    /// Rhombi in chain order.
    pub rhombi: Vec<usize>,
    /// Diamond edges parallel to `direction` crossed by the chain.
    pub edges: Vec<usize>,
}

/// A path in the diamond graph with its unit steps.
#[derive(Debug, Clone, PartialEq)]
pub struct DiamondPath {
    pub start: usize,
    pub end: usize,
    pub vertices: Vec<usize>,
    pub steps: Vec<Complex64>,
    pub tracks: Vec<usize>,
}

impl DiamondPath {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Diamond graph of an isoradial patch. Primal vertices keep the indices of
/// the underlying graph; dual vertices follow.
#[derive(Debug, Clone)]
pub struct DiamondGraph {
    pub vertices: Vec<DiamondVertex>,
    pub rhombi: Vec<Rhombus>,
    /// Diamond edges as `[primal, dual]`.
    pub edges: Vec<[usize; 2]>,
    pub adjacency: Vec<Vec<(usize, usize)>>,
    pub edge_track: Vec<usize>,
    pub tracks: Vec<TrainTrack>,
    edge_rhombus: Vec<usize>,
}

fn position_key(z: Complex64) -> (i64, i64) {
    ((z.re * 1e7).round() as i64, (z.im * 1e7).round() as i64)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut j = i;
        while self.0[j] != r {
            let next = self.0[j];
            self.0[j] = r;
            j = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl DiamondGraph {
    /// Build the diamond graph, completing circumcenters of missing boundary
    /// faces so that every edge of G is the diagonal of a full rhombus.
    pub fn build(graph: &IsoradialGraph) -> Self {
        let mut vertices: Vec<DiamondVertex> = graph.vertices.iter().map(|v| DiamondVertex { pos: v.pos, role: Role::Primal, face: None }).collect();
        let mut dual_lookup: HashMap<(i64, i64), usize> = HashMap::new();
        let mut find_or_add = |vertices: &mut Vec<DiamondVertex>, pos: Complex64, face: Option<usize>| -> usize {
            let (kx, ky) = position_key(pos);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(&i) = dual_lookup.get(&(kx + dx, ky + dy)) {
                        if (vertices[i].pos - pos).norm() < 1e-7 {
                            if vertices[i].face.is_none() {
                                vertices[i].face = face;
                            }
                            return i;
                        }
                    }
                }
            }
            vertices.push(DiamondVertex { pos, role: Role::Dual, face });
            dual_lookup.insert((kx, ky), vertices.len() - 1);
            vertices.len() - 1
        };
        for (f, face) in graph.faces.iter().enumerate() {
            find_or_add(&mut vertices, face.center, Some(f));
        }

        let mut rhombi = Vec::with_capacity(graph.edges.len());
        let mut edges: Vec<[usize; 2]> = Vec::new();
        let mut edge_lookup: HashMap<(usize, usize), usize> = HashMap::new();
        let mut add_edge = |edges: &mut Vec<[usize; 2]>, p: usize, d: usize| -> usize {
            *edge_lookup.entry((p, d)).or_insert_with(|| {
                edges.push([p, d]);
                edges.len() - 1
            })
        };
        let mut rhombus_edges = Vec::with_capacity(graph.edges.len());
        for (e, edge) in graph.edges.iter().enumerate() {
            let [a, b] = edge.ends;
            let pa = graph.vertices[a].pos;
            let phi = (graph.vertices[b].pos - pa).arg();
            let t_pos = pa + unit(phi + edge.theta);
            let u_pos = pa + unit(phi - edge.theta);
            let t = find_or_add(&mut vertices, edge.faces[0].map_or(t_pos, |f| graph.faces[f].center), edge.faces[0]);
            let u = find_or_add(&mut vertices, edge.faces[1].map_or(u_pos, |f| graph.faces[f].center), edge.faces[1]);
            let sides = [vertices[t].pos - pa, vertices[u].pos - pa];
            let at = add_edge(&mut edges, a, t);
            let au = add_edge(&mut edges, a, u);
            let bt = add_edge(&mut edges, b, t);
            let bu = add_edge(&mut edges, b, u);
            rhombus_edges.push([at, bu, au, bt]);
            rhombi.push(Rhombus { edge: e, x: b, y: a, t, u, theta: edge.theta, sides });
        }

        let mut adjacency = vec![Vec::new(); vertices.len()];
        for (i, &[p, d]) in edges.iter().enumerate() {
            adjacency[p].push((d, i));
            adjacency[d].push((p, i));
        }

        let mut uf = UnionFind((0..edges.len()).collect());
        for re in &rhombus_edges {
            uf.union(re[0], re[1]);
            uf.union(re[2], re[3]);
        }
        let mut root_track: HashMap<usize, usize> = HashMap::new();
        let mut edge_track = vec![0; edges.len()];
        let mut tracks: Vec<TrainTrack> = Vec::new();
        for i in 0..edges.len() {
            let r = uf.find(i);
            let tid = *root_track.entry(r).or_insert_with(|| {
                let [p, d] = edges[i];
                tracks.push(TrainTrack { direction: vertices[d].pos - vertices[p].pos, rhombi: Vec::new(), edges: Vec::new() });
                tracks.len() - 1
            });
            edge_track[i] = tid;
            tracks[tid].edges.push(i);
        }

        // Order each track's rhombi by walking across its shared edges.
        let mut edge_rhombi: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
        for (r, re) in rhombus_edges.iter().enumerate() {
            for (a, b) in [(re[0], re[1]), (re[2], re[3])] {
                edge_rhombi.entry(a).or_default().push((r, b));
                edge_rhombi.entry(b).or_default().push((r, a));
            }
        }
        for track in tracks.iter_mut() {
            let start = track.edges.iter().copied().find(|e| edge_rhombi.get(e).map_or(0, Vec::len) == 1).unwrap_or(track.edges[0]);
            let mut seen_rhombi = std::collections::HashSet::new();
            let mut ordered_edges = vec![start];
            let mut current = start;
            loop {
                let next = edge_rhombi.get(&current).and_then(|list| list.iter().find(|(r, _)| !seen_rhombi.contains(r)).copied());
                match next {
                    Some((r, other)) => {
                        seen_rhombi.insert(r);
                        track.rhombi.push(r);
                        if other == start {
                            break;
                        }
                        ordered_edges.push(other);
                        current = other;
                    }
                    None => break,
                }
            }
            track.edges = ordered_edges;
        }

        let edge_rhombus = (0..graph.edges.len()).collect();
        Self { vertices, rhombi, edges, adjacency, edge_track, tracks, edge_rhombus }
    }

    pub fn rhombus_of_edge(&self, e: usize) -> &Rhombus {
        &self.rhombi[self.edge_rhombus[e]]
    }

    /// Diamond edge leaving `from` towards `from + side`, if present.
    pub fn edge_towards(&self, from: usize, side: Complex64) -> Option<usize> {
        let target = self.vertices[from].pos + side;
        self.adjacency[from].iter().find(|(n, _)| (self.vertices[*n].pos - target).norm() < 1e-7).map(|&(_, e)| e)
    }

    /// Train-track of the diamond edge leaving `from` along `side`.
    pub fn track_towards(&self, from: usize, side: Complex64) -> Option<usize> {
        self.edge_towards(from, side).map(|e| self.edge_track[e])
    }

    /// Whether removing the track's transverse edges disconnects `x` from `y`.
    pub fn separates(&self, track: usize, x: usize, y: usize) -> bool {
        let blocked: std::collections::HashSet<usize> = self.tracks[track].edges.iter().copied().collect();
        let mut seen = vec![false; self.vertices.len()];
        seen[x] = true;
        let mut queue = VecDeque::from([x]);
        while let Some(u) = queue.pop_front() {
            if u == y {
                return false;
            }
            for &(v, e) in &self.adjacency[u] {
                if !seen[v] && !blocked.contains(&e) {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        true
    }

    fn bfs_path(&self, from: usize, to: usize, order_seed: Option<u64>) -> Option<Vec<(usize, usize)>> {
        let n = self.vertices.len();
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        let mut rng = order_seed.map(ChaCha8Rng::seed_from_u64);
        while let Some(u) = queue.pop_front() {
            if u == to {
                break;
            }
            let mut nbrs = self.adjacency[u].clone();
            if let Some(r) = rng.as_mut() {
                nbrs.shuffle(r);
            }
            for (v, e) in nbrs {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = Some((u, e));
                    queue.push_back(v);
                }
            }
        }
        if !seen[to] {
            return None;
        }
        let mut hops = Vec::new();
        let mut cur = to;
        while cur != from {
            let (p, e) = parent[cur].unwrap();
            hops.push((cur, e));
            cur = p;
        }
        hops.reverse();
        Some(hops)
    }

    fn assemble_path(&self, from: usize, hops: Vec<(usize, usize)>) -> DiamondPath {
        let mut vertices = vec![from];
        let mut steps = Vec::with_capacity(hops.len());
        let mut tracks = Vec::with_capacity(hops.len());
        let mut prev = from;
        for (v, e) in hops {
            steps.push(self.vertices[v].pos - self.vertices[prev].pos);
            tracks.push(self.edge_track[e]);
            vertices.push(v);
            prev = v;
        }
        DiamondPath { start: from, end: prev, vertices, steps, tracks }
    }

    /// Shortest diamond path from `from` to `to`, checked to cross every
    /// train-track at most once.
    pub fn minimal_path(&self, from: usize, to: usize) -> Result<DiamondPath> {
        self.minimal_path_seeded(from, to, None)
    }

    /// As [`minimal_path`](Self::minimal_path) but breaking ties between
    /// shortest paths pseudo-randomly from `seed`.
    pub fn minimal_path_seeded(&self, from: usize, to: usize, seed: Option<u64>) -> Result<DiamondPath> {
        let hops = self.bfs_path(from, to, seed).ok_or_else(|| Error::NoPath { from: from.to_string(), to: to.to_string() })?;
        let path = self.assemble_path(from, hops);
        let mut seen = std::collections::HashSet::new();
        if !path.tracks.iter().all(|t| seen.insert(*t)) {
            return Err(Error::NonMinimalPath { from: from.to_string(), to: to.to_string() });
        }
        Ok(path)
    }

    /// Discrete exponential Exp_{x,y}(λ) along the minimal path from `y` to `x`.
    pub fn discrete_exp(&self, x: usize, y: usize, lambda: Complex64) -> Result<Complex64> {
        let path = self.minimal_path(y, x)?;
        exp_along(&path.steps, lambda)
    }

    /// Number of tracks separating two diamond vertices, by exhaustive
    /// flood fill. Quadratic; meant for tests.
    pub fn separating_track_count(&self, x: usize, y: usize) -> usize {
        (0..self.tracks.len()).filter(|&t| self.separates(t, x, y)).count()
    }
}

/// Product of the rhombus factors (s + λ)/(s − λ) over the given steps.
pub fn exp_along(steps: &[Complex64], lambda: Complex64) -> Result<Complex64> {
    let mut acc = Complex64::new(1.0, 0.0);
    for &s in steps {
        let den = s - lambda;
        if den.norm() < 1e-14 {
            return Err(Error::PoleHit { context: "discrete_exp", re: lambda.re, im: lambda.im });
        }
        acc *= (s + lambda) / den;
    }
    Ok(acc)
}

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::graph::{IsoradialGraph, PeriodicInfo, Stub, Vertex, DEFAULT_EPSILON};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VertexEntry {
    pub id: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FaceEntry {
    pub id: String,
    pub cycle: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StubEntry {
    pub vertex: String,
    pub angle: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PeriodicDocument {
    pub basis: [[f64; 2]; 2],
    pub cell_vertices: Vec<String>,
}

/// On-disk graph format. Circumcenters are always recomputed on load.
///
/// `stubs` is optional and lists edges leaving a finite patch, so that
/// exported lattice balls round-trip with complete vertex stars.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GraphDocument {
    pub vertices: Vec<VertexEntry>,
    pub faces: Vec<FaceEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periodic: Option<PeriodicDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stubs: Vec<StubEntry>,
}

impl GraphDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph documents always serialize")
    }

    pub fn to_graph(&self) -> Result<IsoradialGraph> {
        let vertices: Vec<Vertex> = self.vertices.iter().map(|v| Vertex { id: v.id.clone(), pos: Complex64::new(v.x, v.y) }).collect();
        let lookup: std::collections::HashMap<&str, usize> = self.vertices.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect();
        let resolve = |id: &str| lookup.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.to_string()));
        let faces = self
            .faces
            .iter()
            .map(|f| Ok((f.id.clone(), f.cycle.iter().map(|v| resolve(v)).collect::<Result<Vec<_>>>()?)))
            .collect::<Result<Vec<_>>>()?;
        let stubs =
            self.stubs.iter().map(|s| Ok(Stub { vertex: resolve(&s.vertex)?, angle: s.angle, theta: s.theta })).collect::<Result<Vec<_>>>()?;
        let mut graph = IsoradialGraph::new(vertices, faces, stubs, self.epsilon.unwrap_or(DEFAULT_EPSILON))?;
        if let Some(p) = &self.periodic {
            let cell_vertices = p.cell_vertices.iter().map(|v| resolve(v)).collect::<Result<Vec<_>>>()?;
            graph = graph.with_periodic(PeriodicInfo {
                basis: [Complex64::new(p.basis[0][0], p.basis[0][1]), Complex64::new(p.basis[1][0], p.basis[1][1])],
                cell_vertices,
            });
        }
        Ok(graph)
    }

    pub fn from_graph(graph: &IsoradialGraph) -> Self {
        let id = |x: usize| graph.vertices[x].id.clone();
        let vertices = graph.vertices.iter().map(|v| VertexEntry { id: v.id.clone(), x: v.pos.re, y: v.pos.im }).collect();
        let faces = graph.faces.iter().map(|f| FaceEntry { id: f.id.clone(), cycle: f.cycle.iter().map(|&v| id(v)).collect() }).collect();
        let mut stubs = Vec::new();
        for (x, star) in graph.stars.iter().enumerate() {
            for h in star.iter().filter(|h| h.target.is_none()) {
                stubs.push(StubEntry { vertex: id(x), angle: h.angle, theta: h.theta });
            }
        }
        let periodic = graph.periodic.as_ref().map(|p| PeriodicDocument {
            basis: [[p.basis[0].re, p.basis[0].im], [p.basis[1].re, p.basis[1].im]],
            cell_vertices: p.cell_vertices.iter().map(|&v| id(v)).collect(),
        });
        Self { vertices, faces, periodic, epsilon: Some(graph.epsilon), stubs }
    }
}

//! Small finite Fisher graphs shared by the integration tests.

#![allow(dead_code)]

use fisher_dimer::fisher::{FisherGraph, StarGraph};
use fisher_dimer::geometry::{IsoradialGraph, Lattice, RhombicGrid};

fn centre(g: &IsoradialGraph) -> usize {
    (0..g.vertex_count()).min_by(|&a, &b| g.position(a).norm().total_cmp(&g.position(b).norm())).unwrap()
}

fn neighbours(g: &IsoradialGraph, x: usize) -> Vec<usize> {
    g.star(x).iter().filter_map(|h| h.target).collect()
}

/// The face through the centre and its first two neighbours.
fn quad(g: &IsoradialGraph) -> Vec<usize> {
    let c = centre(g);
    let nb = neighbours(g, c);
    let opposite = (0..g.vertex_count()).find(|&v| v != c && g.edge_between(v, nb[0]).is_some() && g.edge_between(v, nb[1]).is_some()).unwrap();
    vec![c, nb[0], opposite, nb[1]]
}

/// Planar induced subgraphs small enough for exhaustive matching counts.
pub fn small_fisher_graphs() -> Vec<(&'static str, FisherGraph)> {
    let tri = Lattice::triangular().patch(3).unwrap().graph;
    let (c, nb) = (centre(&tri), neighbours(&tri, centre(&tri)));
    let z2 = Lattice::z2().patch(3).unwrap().graph;
    let rect = Lattice::rectangular(0.4).unwrap().patch(3).unwrap().graph;
    let quasi = RhombicGrid::quasiperiodic(3, 6).patch(4).unwrap();
    let shapes: Vec<(&'static str, &IsoradialGraph, Vec<usize>)> = vec![
        ("triangle", &tri, vec![c, nb[0], nb[1]]),
        ("two-triangles", &tri, vec![c, nb[0], nb[1], nb[2]]),
        ("square", &z2, quad(&z2)),
        ("rectangle", &rect, quad(&rect)),
        ("rhombus", &quasi, quad(&quasi)),
    ];
    shapes.into_iter().map(|(name, g, keep)| (name, FisherGraph::from_stars(&StarGraph::induced(g, &keep).unwrap()).unwrap())).collect()
}

use std::f64::consts::{FRAC_PI_2, PI};

use fisher_dimer::geometry::{exp_along, DiamondGraph, GraphDocument, IsoradialGraph, Lattice, RhombicGrid, Role, Vertex, DEFAULT_EPSILON};
use fisher_dimer::{Complex64, Error};
use proptest::prelude::*;

fn graphs() -> Vec<(&'static str, IsoradialGraph)> {
    vec![
        ("z2", Lattice::z2().patch(5).unwrap().graph),
        ("triangular", Lattice::triangular().patch(4).unwrap().graph),
        ("honeycomb", Lattice::honeycomb().patch(6).unwrap().graph),
        ("rectangular", Lattice::rectangular(0.5).unwrap().patch(5).unwrap().graph),
        ("quasiperiodic", RhombicGrid::quasiperiodic(7, 9).patch(5).unwrap()),
    ]
}

fn quasi() -> IsoradialGraph {
    RhombicGrid::quasiperiodic(3, 7).patch(4).unwrap()
}

/// Vertices of the quasiperiodic patch joined to the rest by real edges;
/// patch corners carry only stubs.
fn connected(g: &IsoradialGraph, picks: &[usize]) -> Vec<usize> {
    let live: Vec<usize> = (0..g.vertex_count()).filter(|&x| g.star(x).iter().any(|h| h.target.is_some())).collect();
    picks.iter().map(|p| live[p % live.len()]).collect()
}

#[test]
fn faces_are_inscribed_in_unit_circles() {
    for (name, g) in graphs() {
        for face in &g.faces {
            for &v in &face.cycle {
                assert!(((g.position(v) - face.center).norm() - 1.0).abs() < 1e-9, "{name} face {}", face.id);
            }
        }
    }
}

#[test]
fn edge_lengths_follow_half_angles() {
    for (name, g) in graphs() {
        for e in &g.edges {
            let len = (g.position(e.ends[1]) - g.position(e.ends[0])).norm();
            assert!((len - 2.0 * e.theta.cos()).abs() < 1e-9, "{name}");
            assert!(e.theta > 0.0 && e.theta < FRAC_PI_2);
        }
    }
}

#[test]
fn rhombi_tile_around_every_complete_vertex() {
    for (name, g) in graphs() {
        for x in (0..g.vertex_count()).filter(|&x| g.is_complete(x)) {
            let star = g.star(x);
            let total: f64 = star.iter().map(|h| h.theta).sum();
            assert!((total - PI).abs() < 1e-9, "{name} vertex {}", g.vertex_id(x));
            for k in 0..star.len() {
                let next = star[(k + 1) % star.len()];
                assert!((star[k].w_side() - next.z_side()).norm() < 1e-9, "{name}: consecutive rhombi share a side");
            }
        }
    }
}

#[test]
fn patches_are_graph_balls() {
    let patch = Lattice::z2().patch(4).unwrap();
    let d = patch.graph.distances_from(patch.center);
    assert!(d.iter().flatten().all(|&d| d <= 4));
    // |x| + |y| ≤ 4 on the square lattice; stubs keep every star whole.
    assert_eq!(patch.graph.vertex_count(), 41);
    assert!((0..41).all(|x| patch.graph.degree(x) == 4));
    assert!(patch.graph.is_interior(patch.center));
}

#[test]
fn documents_round_trip_to_the_same_lattice() {
    for lattice in [Lattice::z2(), Lattice::triangular(), Lattice::honeycomb()] {
        let g = lattice.patch(3).unwrap().graph;
        let text = GraphDocument::from_graph(&g).to_json();
        let back = GraphDocument::from_json(&text).unwrap().to_graph().unwrap();
        assert_eq!(back.vertex_count(), g.vertex_count());
        assert_eq!(back.edges.len(), g.edges.len());
        for x in 0..g.vertex_count() {
            assert!((back.position(x) - g.position(x)).norm() < 1e-12);
            assert_eq!(back.degree(x), g.degree(x), "stubs keep stars complete");
        }
        let recovered = Lattice::from_periodic_graph(&back, "copy").unwrap();
        assert_eq!(recovered.cell.len(), lattice.cell.len());
        assert_eq!(recovered.edges.len(), lattice.edges.len(), "{}", lattice.name);
    }
}

fn vertex(id: &str, x: f64, y: f64) -> Vertex {
    Vertex { id: id.into(), pos: Complex64::new(x, y) }
}

#[test]
fn malformed_inputs_are_rejected() {
    let square = |side: f64| vec![vertex("a", 0.0, 0.0), vertex("b", side, 0.0), vertex("c", side, side), vertex("d", 0.0, side)];
    let face = || vec![("f".to_string(), vec![0, 1, 2, 3])];
    assert!(IsoradialGraph::new(square(2f64.sqrt()), face(), vec![], DEFAULT_EPSILON).is_ok());
    assert!(matches!(IsoradialGraph::new(square(1.0), face(), vec![], DEFAULT_EPSILON), Err(Error::NonIsoradial { .. })));
    // A triangle with one very short side has a rhombus half-angle near π/2.
    let on_circle = |id: &str, a: f64| vertex(id, a.cos(), a.sin());
    let thin = vec![on_circle("a", 0.0), on_circle("b", 0.01), on_circle("c", PI + 0.006)];
    assert!(matches!(IsoradialGraph::new(thin, vec![("t".into(), vec![0, 1, 2])], vec![], DEFAULT_EPSILON), Err(Error::DegenerateRhombus { .. })));
    let mut dup = square(2f64.sqrt());
    dup[1].id = "a".into();
    assert!(matches!(IsoradialGraph::new(dup, face(), vec![], DEFAULT_EPSILON), Err(Error::MalformedGraph(_))));
    let short = vec![("f".to_string(), vec![0, 1])];
    assert!(matches!(IsoradialGraph::new(square(2f64.sqrt()), short, vec![], DEFAULT_EPSILON), Err(Error::MalformedGraph(_))));
    assert!(GraphDocument::from_json("{ not json").is_err());
    assert!(RhombicGrid::quasiperiodic(0, 4).patch(4).is_err());
    assert!(Lattice::rectangular(0.0).is_err());
    let g = Lattice::z2().patch(1).unwrap().graph;
    assert!(matches!(g.vertex_index("nowhere"), Err(Error::UnknownVertex(_))));
}

#[test]
fn diamond_rhombi_have_unit_sides_and_straight_tracks() {
    let g = quasi();
    let d = DiamondGraph::build(&g);
    for r in &d.rhombi {
        for s in r.sides {
            assert!((s.norm() - 1.0).abs() < 1e-12);
        }
        let diagonal = d.vertices[r.x].pos - d.vertices[r.y].pos;
        assert!((diagonal - (r.sides[0] + r.sides[1])).norm() < 1e-12);
        assert_eq!(d.vertices[r.t].role, Role::Dual);
    }
    let mut tracks_per_rhombus = vec![0; d.rhombi.len()];
    for t in &d.tracks {
        for &e in &t.edges {
            let [p, q] = d.edges[e];
            let side = d.vertices[q].pos - d.vertices[p].pos;
            assert!((side - t.direction).norm() < 1e-9 || (side + t.direction).norm() < 1e-9);
        }
        for &r in &t.rhombi {
            tracks_per_rhombus[r] += 1;
        }
    }
    assert!(tracks_per_rhombus.iter().all(|&n| n == 2));
}

#[test]
fn discrete_exponential_of_one_step() {
    let s = Complex64::from_polar(1.0, 0.3);
    let l = Complex64::new(0.2, -0.7);
    assert!((exp_along(&[s], l).unwrap() - (s + l) / (s - l)).norm() < 1e-15);
    assert!(matches!(exp_along(&[s], s), Err(Error::PoleHit { .. })));
    assert_eq!(exp_along(&[], l).unwrap(), Complex64::new(1.0, 0.0));
}

fn random_lambda() -> impl Strategy<Value = Complex64> {
    (0.1..3.0f64, 0.0..(2.0 * PI)).prop_map(|(r, a)| Complex64::from_polar(r, a))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn minimal_paths_cross_each_separating_track_once(a in 0usize..1000, b in 0usize..1000) {
        let g = quasi();
        let d = DiamondGraph::build(&g);
        let [x, y] = connected(&g, &[a, b])[..] else { unreachable!() };
        let path = d.minimal_path(x, y).unwrap();
        prop_assert_eq!(path.len(), d.separating_track_count(x, y));
        for &t in &path.tracks {
            prop_assert!(d.separates(t, x, y));
        }
    }

    #[test]
    fn discrete_exponential_is_multiplicative(a in 0usize..1000, b in 0usize..1000, c in 0usize..1000, l in random_lambda()) {
        let g = quasi();
        let d = DiamondGraph::build(&g);
        let [x, y, z] = connected(&g, &[a, b, c])[..] else { unreachable!() };
        let direct = d.discrete_exp(x, z, l);
        let via = d.discrete_exp(x, y, l).and_then(|p| Ok(p * d.discrete_exp(y, z, l)?));
        if let (Ok(direct), Ok(via)) = (direct, via) {
            prop_assert!((direct - via).norm() <= 1e-9 * direct.norm().max(1.0));
            let back = d.discrete_exp(z, x, l).unwrap();
            prop_assert!((direct * back - 1.0).norm() < 1e-9);
        }
    }

    #[test]
    fn tie_breaking_does_not_change_the_exponential(a in 0usize..1000, b in 0usize..1000, seed in 0u64..100, l in random_lambda()) {
        let g = quasi();
        let d = DiamondGraph::build(&g);
        let [x, y] = connected(&g, &[a, b])[..] else { unreachable!() };
        let p = d.minimal_path(y, x).unwrap();
        let q = d.minimal_path_seeded(y, x, Some(seed)).unwrap();
        if let (Ok(u), Ok(v)) = (exp_along(&p.steps, l), exp_along(&q.steps, l)) {
            prop_assert!((u - v).norm() <= 1e-9 * u.norm().max(1.0));
        }
    }
}

mod common;

use fisher_dimer::fisher::{EdgeClass, KasteleynMatrix, KasteleynOrientation, VertexType};
use fisher_dimer::geometry::{Lattice, RhombicGrid};
use fisher_dimer::gibbs::{check_fragment, cylinder_probability, enumerate_matchings, ising_partition, SkewMatrix};
use fisher_dimer::{CriticalModel, Error, LocalInverse};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn skew(n: usize) -> impl Strategy<Value = SkewMatrix> {
    prop::collection::vec(-2.0..2.0f64, n * n).prop_map(move |v| SkewMatrix::from_upper(n, |i, j| v[i * n + j]))
}

#[test]
fn small_pfaffians_by_hand() {
    let a = SkewMatrix::from_upper(2, |_, _| 3.5);
    assert_eq!(a.pfaffian().unwrap(), 3.5);
    let b = SkewMatrix::from_upper(0, |_, _| 0.0);
    assert_eq!(b.pfaffian().unwrap(), 1.0);
    // Pf of the 4×4 block-diagonal J ⊕ J is 1; swapping two indices flips it.
    let j = SkewMatrix::from_upper(4, |i, k| if (i, k) == (0, 1) || (i, k) == (2, 3) { 1.0 } else { 0.0 });
    assert_eq!(j.pfaffian().unwrap(), 1.0);
    let swapped = SkewMatrix::from_upper(4, |i, k| if (i, k) == (0, 2) || (i, k) == (1, 3) { 1.0 } else { 0.0 });
    assert_eq!(swapped.pfaffian().unwrap(), -1.0);
}

#[test]
fn invalid_matrices_are_rejected() {
    assert!(matches!(SkewMatrix::from_dense(2, vec![0.0, 1.0, 1.0, 0.0]), Err(Error::NotSkewSymmetric(_))));
    assert!(matches!(SkewMatrix::from_dense(2, vec![1.0, 1.0, -1.0, 0.0]), Err(Error::NotSkewSymmetric(_))));
    assert!(SkewMatrix::from_dense(2, vec![0.0, 1.0]).is_err());
    let odd = SkewMatrix::from_dense(3, vec![0.0; 9]).unwrap();
    assert!(matches!(odd.pfaffian(), Err(Error::OddOrder(3))));
}

proptest! {
    #[test]
    fn pfaffian_squared_is_determinant(n in (0usize..6).prop_map(|k| 2 * k), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = SkewMatrix::from_upper(n, |_, _| rng.gen_range(-2.0..2.0));
        let pf = a.pfaffian().unwrap();
        let det = a.determinant();
        prop_assert!((pf * pf - det).abs() <= 1e-10 * det.abs().max(1.0), "{} vs {}", pf * pf, det);
    }

    #[test]
    fn four_by_four_expansion(a in skew(4)) {
        let g = |i, j| a.get(i, j);
        let expected = g(0, 1) * g(2, 3) - g(0, 2) * g(1, 3) + g(0, 3) * g(1, 2);
        prop_assert!((a.pfaffian().unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn congruence_multiplies_by_determinant(a in skew(6), b in prop::collection::vec(-1.0..1.0f64, 36)) {
        // Pf(B A Bᵀ) = det(B) Pf(A).
        let bm = DMatrix::from_row_slice(6, 6, &b);
        let am = DMatrix::from_row_slice(6, 6, a.as_slice());
        let c = &bm * am * bm.transpose();
        let cs = SkewMatrix::from_upper(6, |i, j| c[(i, j)]);
        let lhs = cs.pfaffian().unwrap();
        let rhs = bm.determinant() * a.pfaffian().unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0));
    }
}

/// On a finite planar graph, P(e₁, …, e_k) = ∏ K_{xᵢyᵢ} · Pf((K⁻¹)ᵀ restricted to
/// the endpoints). Checked against exhaustive enumeration with a dense inverse.
#[test]
fn pfaffian_cylinders_match_enumeration_on_finite_graphs() {
    for (name, f) in common::small_fisher_graphs() {
        let n = f.vertex_count();
        let o = KasteleynOrientation::compute(&f).unwrap();
        let k = KasteleynMatrix::new(&f, &o);
        let dense = DMatrix::from_fn(n, n, |i, j| k.entry(i, j));
        let inv = dense.try_inverse().unwrap();
        let ensemble = enumerate_matchings(&f).unwrap();
        let marginals = ensemble.edge_marginals(f.edges.len());
        let joint = |a: usize, b: usize| -> f64 {
            ensemble.matchings.iter().zip(&ensemble.weights).filter(|(m, _)| m.contains(&a) && m.contains(&b)).map(|(_, w)| w).sum::<f64>()
                / ensemble.partition
        };
        let cylinder = |edges: &[usize]| -> f64 {
            let order: Vec<usize> = edges.iter().flat_map(|&e| [f.edges[e].a, f.edges[e].b]).collect();
            let a = SkewMatrix::from_upper(order.len(), |i, j| inv[(order[j], order[i])]);
            edges.iter().map(|&e| k.entry(f.edges[e].a, f.edges[e].b)).product::<f64>() * a.pfaffian().unwrap()
        };
        for e in 0..f.edges.len() {
            assert!((cylinder(&[e]) - marginals[e]).abs() < 1e-12, "{name} edge {e}");
        }
        for a in 0..f.edges.len() {
            for b in a + 1..f.edges.len() {
                let ends = [f.edges[a].a, f.edges[a].b, f.edges[b].a, f.edges[b].b];
                if ends[0] == ends[2] || ends[0] == ends[3] || ends[1] == ends[2] || ends[1] == ends[3] {
                    continue;
                }
                assert!((cylinder(&[a, b]) - joint(a, b)).abs() < 1e-12, "{name} edges {a}, {b}");
            }
        }
    }
}

#[test]
fn ising_partition_of_tiny_graphs() {
    let j = 0.7f64;
    assert!((ising_partition(2, &[(0, 1, j)]).unwrap() - 4.0 * j.cosh()).abs() < 1e-12);
    let triangle = ising_partition(3, &[(0, 1, j), (1, 2, j), (0, 2, j)]).unwrap();
    assert!((triangle - 2.0 * ((3.0 * j).exp() + 3.0 * (-j).exp())).abs() < 1e-12);
    assert_eq!(ising_partition(1, &[]).unwrap(), 2.0);
    assert!(matches!(ising_partition(30, &[]), Err(Error::TooLarge { .. })));
}

#[test]
fn enumeration_refuses_large_graphs() {
    let f = fisher_dimer::fisher::FisherGraph::decorate(&Lattice::z2().patch(3).unwrap().graph).unwrap();
    assert!(matches!(enumerate_matchings(&f), Err(Error::TooLarge { .. })));
}

fn quasi_model() -> CriticalModel {
    CriticalModel::new(RhombicGrid::quasiperiodic(11, 9).patch(6).unwrap()).unwrap()
}

fn interior_primal(model: &CriticalModel, margin: usize) -> Vec<usize> {
    let d = model.graph.boundary_distances();
    (0..model.graph.vertex_count()).filter(|&x| d[x] >= margin).collect()
}

#[test]
fn every_fisher_vertex_is_covered_exactly_once() {
    let model = quasi_model();
    let inv = LocalInverse::new(&model);
    let f = &model.fisher;
    for g in interior_primal(&model, 3).into_iter().take(6) {
        for k in 0..f.degree(g) {
            for ty in [VertexType::V, VertexType::W, VertexType::Z] {
                let u = f.index(g, k, ty);
                let total: f64 = f.incident[u].iter().map(|&e| cylinder_probability(&inv, &[(f.edges[e].a, f.edges[e].b)]).unwrap().value).sum();
                assert!((total - 1.0).abs() < 1e-10, "{}: {total}", f.name(u));
            }
        }
    }
}

#[test]
fn forced_edges_have_joint_probability_equal_to_the_marginal() {
    // If w_k z_k is covered, v_k can only be matched across the edge.
    let model = quasi_model();
    let inv = LocalInverse::new(&model);
    let f = &model.fisher;
    for g in interior_primal(&model, 3).into_iter().take(4) {
        for k in 0..f.degree(g) {
            let (v, w, z) = (f.index(g, k, VertexType::V), f.index(g, k, VertexType::W), f.index(g, k, VertexType::Z));
            let inter = f.inter_edge(g, k).unwrap();
            let other = f.other_end(inter, v);
            let single = cylinder_probability(&inv, &[(w, z)]).unwrap().value;
            let both = cylinder_probability(&inv, &[(w, z), (v, other)]).unwrap().value;
            assert!((single - both).abs() < 1e-10, "{single} vs {both}");
            assert!(f.edges[inter].class == EdgeClass::Inter);
        }
    }
}

#[test]
fn fragments_must_be_disjoint_edges() {
    let model = CriticalModel::new(Lattice::z2().patch(3).unwrap().graph).unwrap();
    let f = &model.fisher;
    let (v, w, z) = (f.index(0, 0, VertexType::V), f.index(0, 0, VertexType::W), f.index(0, 0, VertexType::Z));
    assert!(check_fragment(f, &[(v, w)]).is_ok());
    assert!(matches!(check_fragment(f, &[(v, w), (w, z)]), Err(Error::NotAMatchingFragment(_))));
    let far = f.index(1, 0, VertexType::W);
    assert!(matches!(check_fragment(f, &[(v, far)]), Err(Error::NotAMatchingFragment(_))));
    let inv = LocalInverse::new(&model);
    assert!(cylinder_probability(&inv, &[(v, w), (v, z)]).is_err());
}

//! Randomized structural properties over small graphs and sequences.

use indmorse::canon::{are_isomorphic, canonical_key};
use indmorse::complex::{build_complex, face_vertices};
use indmorse::family;
use indmorse::graph::VertexSet;
use indmorse::homology::{betti_numbers, total_betti_in, Field};
use indmorse::io::{parse_graph6, write_graph6};
use indmorse::lucas::count_valid_assignments;
use indmorse::morse::{is_acyclic, is_valid_matching, Engine};
use indmorse::Graph;
use proptest::prelude::*;

/// A graph on up to `max` vertices from a bitmask over the upper triangle.
fn arb_graph(max: usize) -> impl Strategy<Value = Graph> {
    (0..=max, any::<u64>()).prop_map(|(n, mask)| {
        let mut edges = Vec::new();
        let mut bit = 0;
        for u in 0..n {
            for v in u + 1..n {
                if mask >> (bit % 64) & 1 == 1 {
                    edges.push((u, v));
                }
                bit += 1;
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    })
}

fn arb_permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #[test]
    fn deletion_composes(g in arb_graph(8), a in 0usize..8, b in 0usize..8) {
        let one = g
            .delete_vertices(VertexSet::singleton(a))
            .delete_vertices(VertexSet::singleton(b));
        let both = g.delete_vertices(VertexSet::singleton(a).with(b));
        prop_assert_eq!(one, both);
    }

    #[test]
    fn disjoint_union_commutes_up_to_iso(g in arb_graph(5), h in arb_graph(5)) {
        let (gh, _, _) = g.disjoint_union(&h).unwrap();
        let (hg, _, _) = h.disjoint_union(&g).unwrap();
        prop_assert!(are_isomorphic(&gh, &hg));
    }

    #[test]
    fn fold_postcondition(g in arb_graph(8)) {
        if let Some((u, v)) = g.find_fold() {
            prop_assert_ne!(u, v);
            prop_assert!(g.neighbourhood(v).unwrap().is_subset_of(g.neighbourhood(u).unwrap()));
        }
    }

    #[test]
    fn complexes_are_closed_independence_systems(g in arb_graph(7)) {
        let c = build_complex(&g).unwrap();
        prop_assert!(c.contains(0), "the empty face is always present");
        for f in c.faces() {
            // downward closure: drop any one vertex
            for v in face_vertices(f).iter() {
                prop_assert!(c.contains(f & !(1 << v)));
            }
            // independence: no edge inside the face
            for (u, v) in g.edges() {
                prop_assert!(f & (1 << u) == 0 || f & (1 << v) == 0);
            }
        }
    }

    #[test]
    fn euler_characteristic_is_consistent(g in arb_graph(7)) {
        let c = build_complex(&g).unwrap();
        for field in [Field::Gf2, Field::Rational] {
            prop_assert!(betti_numbers(&c, field).euler_consistent);
        }
    }

    #[test]
    fn rational_betti_never_exceeds_gf2(g in arb_graph(7)) {
        let rational = total_betti_in(&g, Field::Rational).unwrap();
        let gf2 = total_betti_in(&g, Field::Gf2).unwrap();
        prop_assert!(rational <= gf2);
    }

    #[test]
    fn canonical_key_is_relabelling_invariant(g in arb_graph(7), perm in arb_permutation(7)) {
        let moved: Vec<(usize, usize)> =
            g.edges().iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        let relabelled = Graph::from_edges(g.capacity().max(7), &moved)
            .unwrap()
            .induced(g.vertices().iter().map(|v| perm[v]).collect());
        prop_assert_eq!(canonical_key(&g), canonical_key(&relabelled));
    }

    #[test]
    fn graph6_round_trips(g in arb_graph(8)) {
        let dense = g.to_dense().0;
        let line = write_graph6(&dense).unwrap();
        prop_assert_eq!(parse_graph6(&line).unwrap(), dense);
    }

    #[test]
    fn constraint_counts_are_rotation_and_reflection_invariant(
        s in proptest::collection::vec(0u8..3, 2..8),
        shift in 0usize..8,
    ) {
        let n = s.len();
        let mut rotated = s.clone();
        rotated.rotate_left(shift % n);
        prop_assert_eq!(
            count_valid_assignments(&s).unwrap(),
            count_valid_assignments(&rotated).unwrap()
        );
        let mut reversed = s.clone();
        reversed.reverse();
        prop_assert_eq!(
            count_valid_assignments(&s).unwrap(),
            count_valid_assignments(&reversed).unwrap()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn emitted_matchings_always_verify(g in arb_graph(7)) {
        let engine = Engine::standard();
        let cert = engine.bound_with_matching(&g).unwrap();
        let m = cert.matching.as_ref().unwrap();
        prop_assert!(is_valid_matching(m).unwrap());
        prop_assert!(is_acyclic(m).unwrap());
        prop_assert_eq!(m.critical_faces().len() as u128, cert.bound);
        let betti = total_betti_in(&g, Field::Gf2).unwrap();
        prop_assert!(betti as u128 <= cert.bound);
    }

    #[test]
    fn bounds_are_isomorphism_invariant(g in arb_graph(7), perm in arb_permutation(7)) {
        let engine = Engine::standard();
        let moved: Vec<(usize, usize)> =
            g.edges().iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        let relabelled = Graph::from_edges(g.capacity().max(7), &moved)
            .unwrap()
            .induced(g.vertices().iter().map(|v| perm[v]).collect());
        prop_assert_eq!(
            engine.bound(&g).unwrap().bound,
            engine.bound(&relabelled).unwrap().bound
        );
    }
}

#[test]
fn named_families_agree_with_their_specs() {
    for (spec, direct) in [
        ("path:6", family::path(6).unwrap()),
        ("cycle:9", family::cycle(9).unwrap()),
        ("complete:5", family::complete(5).unwrap()),
        ("k5-copies:3", family::k5_copies(3).unwrap()),
    ] {
        assert_eq!(family::from_spec(spec).unwrap(), direct);
    }
}

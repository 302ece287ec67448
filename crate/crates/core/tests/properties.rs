mod common;

use proptest::prelude::*;
use wcycles::fold::fold;
use wcycles::pullback::{fiber_product, is_reducible, pullback_loop};
use wcycles::stacking::{construct_stacking, Side};
use wcycles::word::{cyclic_reduce, is_primitive_path};
use wcycles::{EdgeId, Graph, GraphMorphism, Loop, SignedEdge, VertexId};

use common::*;

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (1u32..7).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..9).prop_map(move |ends| {
            Graph::from_parts(
                (0..n).map(VertexId),
                ends.into_iter().enumerate().map(|(i, (s, t))| (EdgeId(i as u32), VertexId(s), VertexId(t))),
            )
        })
    })
}

fn letter(rank: u32) -> impl Strategy<Value = SignedEdge> {
    (0..rank, any::<bool>()).prop_map(|(e, f)| if f { SignedEdge::forward(EdgeId(e)) } else { SignedEdge::backward(EdgeId(e)) })
}

fn word(rank: u32, max: usize) -> impl Strategy<Value = Vec<SignedEdge>> {
    prop::collection::vec(letter(rank), 1..=max)
}

/// A cyclically reduced primitive word, from any word by reducing it.
fn primitive(rank: u32, max: usize) -> impl Strategy<Value = Vec<SignedEdge>> {
    word(rank, max)
        .prop_map(|w| cyclic_reduce(&w))
        .prop_filter("nonempty primitive", |w| !w.is_empty() && rotation_primitive(w))
}

fn immersion(rank: u32) -> impl Strategy<Value = GraphMorphism> {
    (prop::collection::vec(word(rank, 8), 0..4), any::<bool>()).prop_map(move |(gens, trim)| {
        fold(&Graph::rose(rank), VertexId(0), &gens, trim).unwrap().immersion
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn core_is_idempotent_and_core(g in graph_strategy()) {
        let c = g.core();
        prop_assert!(c.is_core());
        prop_assert_eq!(c.core(), c.clone());
        if g.is_connected() {
            prop_assert!(c.is_connected());
            prop_assert_eq!(c.euler_characteristic().unwrap(), g.euler_characteristic().unwrap());
        }
    }

    #[test]
    fn rank_counts_non_tree_edges(g in graph_strategy()) {
        prop_assume!(g.is_connected());
        let tree = g.spanning_tree().unwrap();
        prop_assert_eq!(tree.len(), g.num_vertices() - 1);
        prop_assert_eq!(g.rank().unwrap(), (g.num_edges() - tree.len()) as i64);
    }

    #[test]
    fn components_partition_vertices(g in graph_strategy()) {
        let comps = g.components();
        let total: usize = comps.iter().map(|c| c.len()).sum();
        prop_assert_eq!(total, g.num_vertices());
        prop_assert_eq!(comps.len() == 1, g.is_connected());
    }

    #[test]
    fn folding_gives_immersions(rank in 1u32..4, gens in prop::collection::vec(word(3, 10), 0..5)) {
        let gens: Vec<Vec<SignedEdge>> = gens
            .into_iter()
            .map(|w| w.into_iter().filter(|s| s.edge.0 < rank).collect())
            .collect();
        let f = fold(&Graph::rose(rank), VertexId(0), &gens, true).unwrap();
        prop_assert!(f.immersion.is_immersion().unwrap());
        prop_assert!(f.immersion.domain.is_core());
        prop_assert!(f.immersion.domain.is_connected());
        // folding again changes nothing
        let again = fold(&Graph::rose(rank), VertexId(0), &gens, true).unwrap();
        prop_assert_eq!(again, f);
    }

    #[test]
    fn fiber_products_match_the_oracle(f1 in immersion(2), f2 in immersion(2)) {
        let p = fiber_product(&f1, &f2).unwrap();
        prop_assert!(p.proj_left.is_immersion().unwrap());
        prop_assert!(p.proj_right.is_immersion().unwrap());
        prop_assert_eq!(pair_cells(&p), brute_fiber_product(&f1, &f2));
        let q = fiber_product(&f2, &f1).unwrap();
        prop_assert_eq!(
            (q.total.num_vertices(), q.total.num_edges()),
            (p.total.num_vertices(), p.total.num_edges())
        );
    }

    #[test]
    fn primitivity_is_invariant(w in primitive(3, 10), k in 0usize..10) {
        let l = Loop::new(w.clone());
        prop_assert!(l.is_primitive());
        prop_assert!(l.rotated(k % w.len()).is_primitive());
        prop_assert!(l.reversed().is_primitive());
        let squared = [w.clone(), w.clone()].concat();
        prop_assert!(!is_primitive_path(&squared));
    }

    #[test]
    fn cyclic_reduction_is_idempotent(w in word(3, 12)) {
        let once = cyclic_reduce(&w);
        prop_assert_eq!(cyclic_reduce(&once), once.clone());
        prop_assert!(cyclically_reduced(&once) || once.is_empty());
    }

    #[test]
    fn constructed_stackings_are_good(w in primitive(3, 30)) {
        let g = Graph::rose(3);
        let l = Loop::new(w);
        let (s, trace) = construct_stacking(&g, &l).unwrap();
        prop_assert!(s.is_valid());
        prop_assert!(s.is_good().unwrap());
        prop_assert!(trace.depth() <= l.len());
        let neg_chi = neg_chi_of_image(&g, &l);
        prop_assert_eq!(s.count_open_arcs(Side::Above).unwrap() as i64, neg_chi);
        prop_assert_eq!(s.count_open_arcs(Side::Below).unwrap() as i64, neg_chi);
        let link = s.reducibility_link().unwrap();
        prop_assert!(link.implication_holds());
        // against the image, a shared top and bottom edge is an edge used once
        let (image, _) = s.subject.image_subgraph();
        let on_image = s.subject.with_graph(image).unwrap();
        let once = on_image.traversal_counts().values().any(|&k| k == 1);
        prop_assert_eq!(link.shared_edge, once);
    }

    #[test]
    fn pullback_degree_matches_the_oracle(rho in immersion(2), w in primitive(2, 10)) {
        let w = Loop::new(w);
        prop_assume!(rho.domain.num_edges() > 0);
        let pb = pullback_loop(&rho, &w).unwrap();
        let brute = brute_pullback_numbers(&rho, &w);
        prop_assert_eq!(pb.covering_degree(), brute.deg_sigma);
        prop_assert_eq!(pb.circles.loops.len(), brute.circles);
        prop_assert_eq!(is_reducible(&pb.circles).reducible, brute.reducible);
        for c in &pb.circles.loops {
            prop_assert_eq!(c.len() % w.len(), 0);
        }
    }
}

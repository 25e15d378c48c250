use std::collections::BTreeMap;

use proptest::prelude::*;

use fasclique::constants::practical_constants;
use fasclique::oracle::max_transversal_packing;
use fasclique::order::{is_feedback_arc_set, minimalize_fas, upper_bound_witness, LeftGraph, VertexOrder};
use fasclique::packing::{find_clique_packing, verify_packing, PackingOptions};
use fasclique::seed::RngSeed;
use fasclique::tournament::Tournament;

fn order_for(n: usize, seed: u64) -> VertexOrder {
    VertexOrder::random(n, &mut RngSeed(seed).rng())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialization_round_trips(sizes in prop::collection::vec(1usize..7, 2..5), seed in any::<u64>()) {
        let t = Tournament::sample_with_sizes(sizes, RngSeed(seed)).unwrap();
        let kpt = t.to_kpt_bytes();
        prop_assert_eq!(&Tournament::from_kpt_bytes(&kpt).unwrap(), &t);
        let text = serde_json::to_string(&t.to_json()).unwrap();
        let back = Tournament::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back.to_kpt_bytes(), kpt);
    }

    #[test]
    fn left_graph_is_a_fas(sizes in prop::collection::vec(1usize..6, 2..5), seed in any::<u64>()) {
        let t = Tournament::sample_with_sizes(sizes, RngSeed(seed)).unwrap();
        let l = LeftGraph::new(&t, &order_for(t.num_vertices(), seed ^ 1)).unwrap();
        let edges = l.directed_edges();
        prop_assert!(is_feedback_arc_set(&t, &edges).unwrap());
        let min = minimalize_fas(&t, &edges).unwrap();
        prop_assert!(is_feedback_arc_set(&t, &min).unwrap());
        prop_assert!(min.iter().all(|e| edges.contains(e)));
        // dropping any kept edge breaks the property
        for i in 0..min.len() {
            let mut fewer = min.clone();
            fewer.remove(i);
            prop_assert!(!is_feedback_arc_set(&t, &fewer).unwrap());
        }
    }

    #[test]
    fn witness_bounds_the_packing(k in 2usize..4, n in 2usize..4, seed in any::<u64>()) {
        prop_assume!(n + 1 >= k);
        let t = Tournament::sample_random(n, k, RngSeed(seed)).unwrap();
        let w = upper_bound_witness(&t).unwrap();
        let l = LeftGraph::new(&t, &w.order).unwrap();
        prop_assert!(w.validate(&l));
        prop_assert!(is_feedback_arc_set(&t, &w.fas).unwrap());
        prop_assert!(max_transversal_packing(&l).unwrap().size <= n + 1 - k);
    }

    #[test]
    fn pipeline_never_beats_the_oracle(n in 4usize..6, seed in any::<u64>()) {
        let t = Tournament::sample_random(n, 3, RngSeed(seed)).unwrap();
        let pi = order_for(3 * n, seed ^ 2);
        let l = LeftGraph::new(&t, &pi).unwrap();
        let c = practical_constants(3, n, &BTreeMap::new()).unwrap();
        let res = find_clique_packing(&t, &pi, &c, RngSeed(seed), PackingOptions::default()).unwrap();
        prop_assert!(verify_packing(&l, &res.cliques));
        prop_assert!(res.cliques.len() <= max_transversal_packing(&l).unwrap().size);
    }
}

#[test]
fn pipeline_output_is_sound_at_scale() {
    for i in 0..5 {
        let seed = RngSeed(91).derive(i, 0);
        let t = Tournament::sample_random(80, 3, seed).unwrap();
        let pi = order_for(240, i);
        let l = LeftGraph::new(&t, &pi).unwrap();
        let c = practical_constants(3, 80, &BTreeMap::new()).unwrap();
        let res = find_clique_packing(&t, &pi, &c, seed, PackingOptions::default()).unwrap();
        assert!(res.is_success());
        assert!(res.cliques.len() >= 78);
        assert!(verify_packing(&l, &res.cliques));
    }
}

mod common;

use std::collections::BTreeMap;

use conley_core::algebra::group::GroupElement;
use conley_core::algebra::ring::Regime;
use conley_core::flow::decomposition::{classify_orbits, flow_order, translate_decomposition};
use conley_core::flow::gain_graph::{GainEdge, GainGraph, PathStep};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph(rng: &mut ChaCha8Rng, g: &std::sync::Arc<conley_core::algebra::group::DeckGroup>) -> GainGraph {
    let vertices: Vec<String> = (0..4).map(|i| format!("v{i}")).collect();
    let edges = (0..rng.gen_range(3..=7))
        .map(|i| GainEdge {
            id: format!("e{i}"),
            from: vertices[rng.gen_range(0..4)].clone(),
            to: vertices[rng.gen_range(0..4)].clone(),
            label: common::element(rng, g),
        })
        .collect();
    GainGraph::new(g, vertices, edges, BTreeMap::new()).unwrap()
}

/// A random walk of up to `len` steps from `start`, each edge taken in
/// whichever direction leaves the current vertex.
fn random_walk(rng: &mut ChaCha8Rng, graph: &GainGraph, start: &str, len: usize) -> (Vec<PathStep>, String) {
    let mut at = start.to_string();
    let mut path = Vec::new();
    for _ in 0..len {
        let moves: Vec<(PathStep, String)> = graph
            .edges()
            .iter()
            .flat_map(|e| {
                let mut out = Vec::new();
                if e.from == at {
                    out.push((PathStep { edge: e.id.clone(), reverse: false }, e.to.clone()));
                }
                if e.to == at {
                    out.push((PathStep { edge: e.id.clone(), reverse: true }, e.from.clone()));
                }
                out
            })
            .collect();
        if moves.is_empty() {
            break;
        }
        let (step, next) = moves[rng.gen_range(0..moves.len())].clone();
        path.push(step);
        at = next;
    }
    (path, at)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn buckets_partition_the_records(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for g in common::groups() {
            let d = common::random_decomposition(&mut rng, &g, Regime::H3);
            for (r, a) in d.connected_pairs() {
                let buckets = classify_orbits(&d, (&r, &a));
                let mut labels: Vec<_> = buckets.iter().map(|b| b.label.clone()).collect();
                labels.dedup();
                prop_assert_eq!(labels.len(), buckets.len());
                for b in &buckets {
                    prop_assert!(!b.records.is_empty());
                    prop_assert!(b.records.iter().all(|o| o.label == b.label));
                }
                let mut from_buckets: Vec<_> = buckets.iter().flat_map(|b| b.records.clone()).collect();
                let mut direct: Vec<_> = d.records(&r, &a).into_iter().cloned().collect();
                let key = |o: &conley_core::flow::decomposition::OrbitRecord| {
                    (o.from_gen.clone(), o.to_gen.clone(), o.label.to_string(), o.coeff.clone())
                };
                from_buckets.sort_by_key(key);
                direct.sort_by_key(key);
                prop_assert_eq!(from_buckets, direct);
            }
        }
    }

    #[test]
    fn flow_order_is_admissible(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = &common::groups()[rng.gen_range(0..5)];
        let d = common::random_decomposition(&mut rng, g, Regime::H3);
        let ids: Vec<String> = d.sets().iter().map(|s| s.id.clone()).collect();
        let p = flow_order(&ids, d.orbits()).unwrap();
        for o in d.orbits() {
            prop_assert!(p.less_by_id(&o.to_set, &o.from_set));
            prop_assert!(!p.less_by_id(&o.from_set, &o.to_set));
        }
        let ext = p.linear_extension();
        prop_assert!(p.is_linear_extension(&ext));
        let rel = p.relations();
        let closed = common::closure(p.len(), &rel);
        prop_assert_eq!(closed, rel.iter().copied().collect());
    }

    #[test]
    fn lifting_respects_concatenation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for g in common::groups() {
            let graph = random_graph(&mut rng, &g);
            let (first, mid) = random_walk(&mut rng, &graph, "v0", 4);
            let (second, _) = random_walk(&mut rng, &graph, &mid, 4);
            let whole: Vec<PathStep> = first.iter().chain(&second).cloned().collect();
            let lhs = graph.lift_path(&whole).unwrap();
            let rhs = graph.lift_path(&first).unwrap().mul(&graph.lift_path(&second).unwrap()).unwrap();
            prop_assert_eq!(lhs.clone(), rhs);
            let back: Vec<PathStep> =
                whole.iter().rev().map(|s| PathStep { edge: s.edge.clone(), reverse: !s.reverse }).collect();
            prop_assert_eq!(graph.lift_path(&back).unwrap(), lhs.inverse());
            prop_assert!(graph.lift_path(&[]).unwrap().is_identity());
        }
    }

    #[test]
    fn translation_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for g in common::groups() {
            let d = common::random_decomposition(&mut rng, &g, Regime::H3);
            let h = common::element(&mut rng, &g);
            let moved = translate_decomposition(&d, &h).unwrap();
            prop_assert_eq!(moved.base_lift(), &h.mul(d.base_lift()).unwrap());
            let back = translate_decomposition(&moved, &h.inverse()).unwrap();
            prop_assert_eq!(&back, &d);
            let e = GroupElement::identity(&g);
            prop_assert_eq!(&translate_decomposition(&d, &e).unwrap(), &d);
        }
    }

    /// The oracle on a naturally labeled poset with its points renamed by a
    /// random permutation, so the labels no longer follow the order.
    #[test]
    fn poset_oracle_on_shuffled_labels(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let all = common::natural_posets(n);
        let rel = &all[rng.gen_range(0..all.len())];
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let shuffled: Vec<(usize, usize)> = rel.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
        if let Err(e) = common::poset_oracle(n, &shuffled) {
            prop_assert!(false, "{}", e);
        }
    }
}

#[test]
fn every_small_poset_matches_the_oracle() {
    for n in 0..=4 {
        for rel in common::natural_posets(n) {
            common::poset_oracle(n, &rel).unwrap();
        }
    }
}

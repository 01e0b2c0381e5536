mod common;

use std::sync::Arc;

use conley_core::algebra::group::{DeckGroup, GroupElement, GroupKind};
use conley_core::algebra::ring::{augment, Regime, Ring};
use conley_core::fixtures;
use conley_core::flow::decomposition::{translate_decomposition, MorseDecomposition};
use conley_core::novikov_pipeline::build_novikov_complex;
use conley_core::pconnection::assembly::{assemble_ndelta, nonzero_entry_certificate};
use conley_core::pconnection::transport::{transport_by_isomorphism, transport_decomposition, GroupIso};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn decomposition(rng: &mut ChaCha8Rng) -> MorseDecomposition {
    let groups = common::groups();
    let g = &groups[rng.gen_range(0..groups.len())];
    let regime = match g.kind() {
        GroupKind::InfiniteCyclic if rng.gen_bool(0.5) => Regime::H2,
        _ => Regime::H3,
    };
    common::random_decomposition(rng, g, regime)
}

/// A few automorphisms of each test group, by generator images.
fn automorphisms(g: &Arc<DeckGroup>) -> Vec<GroupIso> {
    let w = |s: &str| GroupElement::parse(g, s).unwrap();
    let images: Vec<Vec<&str>> = match g.kind() {
        GroupKind::InfiniteCyclic => vec![vec!["t^-1"], vec!["t"]],
        GroupKind::FreeAbelian { .. } => vec![vec!["y", "x"], vec!["x y", "y"], vec!["x^-1", "y"]],
        GroupKind::Free { .. } => vec![vec!["b", "a"], vec!["a b", "b"], vec!["a^-1", "b"]],
        GroupKind::KleinBottle => vec![vec!["a^-1", "b"], vec!["a", "b^-1"], vec!["a b", "b"]],
        GroupKind::Finite(_) => vec![g.generators().iter().rev().map(String::as_str).collect()],
    };
    images.into_iter().map(|im| GroupIso::new(g, g, im.into_iter().map(w).collect()).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Every entry equals the sum over its records of `coeff · b⁻¹g`,
    /// accumulated here record by record.
    #[test]
    fn entries_match_their_records(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = decomposition(&mut rng);
        let m = assemble_ndelta(&d, 16).unwrap();
        let ring = Ring::for_group(d.group(), d.regime(), 16);
        let b_inv = d.base_lift().inverse();
        let module = d.module();
        let ids: Vec<String> = module.degrees().flat_map(|k| module.generators(k).to_vec()).collect();
        for row in &ids {
            for col in &ids {
                let mut want = ring.zero();
                let mut total = BigInt::zero();
                for o in d.orbits().iter().filter(|o| &o.to_gen == row && &o.from_gen == col) {
                    want = want.add(&ring.embed(&b_inv.mul(&o.label).unwrap(), o.coeff.clone()).unwrap()).unwrap();
                    total += &o.coeff;
                }
                let got = m.entry(row, col);
                prop_assert!(got.eq_to_precision(&want), "({}, {}): {} vs {}", row, col, got, want);
                prop_assert_eq!(augment(&got), total);
            }
        }
    }

    #[test]
    fn nonzero_entries_sit_above_the_diagonal(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = decomposition(&mut rng);
        let m = assemble_ndelta(&d, 16).unwrap();
        for (r, a, row, col, _) in m.nonzero_entries() {
            prop_assert_eq!(&d.owner(&row).unwrap().id, &a);
            prop_assert_eq!(&d.owner(&col).unwrap().id, &r);
            prop_assert!(d.poset().less_by_id(&a, &r));
            prop_assert_eq!(module_degree(&d, &row) + 1, module_degree(&d, &col));
        }
    }

    #[test]
    fn witnesses_are_sound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = decomposition(&mut rng);
        let m = assemble_ndelta(&d, 16).unwrap();
        for (r, a) in d.connected_pairs() {
            let witnesses = nonzero_entry_certificate(&m, &d, (&r, &a));
            let block_nnz = m.block(&r, &a).map_or(0, |b| b.nnz());
            prop_assert_eq!(witnesses.len(), block_nnz);
            for rec in d.records(&r, &a) {
                let hits = witnesses.iter().filter(|w| w.records.contains(rec)).count();
                let entry_zero = m.entry(&rec.to_gen, &rec.from_gen).is_zero();
                prop_assert_eq!(hits, usize::from(!entry_zero));
            }
            for w in &witnesses {
                prop_assert!(!w.value.is_zero());
                prop_assert_eq!(&m.entry(&w.row, &w.col), &w.value);
                prop_assert!(w.records.iter().all(|o| o.to_gen == w.row && o.from_gen == w.col));
            }
        }
    }

    #[test]
    fn translation_leaves_the_matrix_alone(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = decomposition(&mut rng);
        let h = common::element(&mut rng, d.group());
        let moved = translate_decomposition(&d, &h).unwrap();
        prop_assert_eq!(assemble_ndelta(&d, 16).unwrap(), assemble_ndelta(&moved, 16).unwrap());
        let relabeled = d.clone().with_base_lift(h.clone()).unwrap();
        let shifted = translate_decomposition(&relabeled, &h.inverse()).unwrap();
        prop_assert!(shifted.base_lift().is_identity());
    }

    #[test]
    fn transport_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::groups().swap_remove(rng.gen_range(0..5));
        let d = common::random_decomposition(&mut rng, &g, Regime::H3);
        let m = assemble_ndelta(&d, 16).unwrap();
        for iso in automorphisms(d.group()) {
            let there = transport_by_isomorphism(&m, &iso).unwrap();
            let back = transport_by_isomorphism(&there, &iso.inverse()).unwrap();
            prop_assert!(back.eq_to_precision(&m));
            let assembled = assemble_ndelta(&transport_decomposition(&d, &iso).unwrap(), 16).unwrap();
            prop_assert!(there.eq_to_precision(&assembled));
        }
    }
}

fn module_degree(d: &MorseDecomposition, id: &str) -> i32 {
    d.module().degree_of(id).unwrap()
}

#[test]
fn torus_complexes_square_to_zero() {
    let m = assemble_ndelta(&fixtures::torus().decomposition, 32).unwrap();
    assert!(m.complex().verify_boundary_squared().passed());
    let c = build_novikov_complex(&fixtures::torus_circle(), 32).unwrap();
    assert!(c.verify_boundary_squared().passed());
}

//! Property tests for the algebraic invariants of the engine.

use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use factorcenter::gset::{
    burnside_canonicalize, gset_from_subgroup, is_gassmann, is_isomorphic, GSet,
};
use factorcenter::links::{
    c_of_word, closed_loop, evaluate_word, group_pool, random_gset, random_word, MoveWord,
};
use factorcenter::nslattice::{adjoint_dual, rational_degree_classes, PicardLattice};
use factorcenter::permgrp::{Group, Permutation};
use factorcenter::surface::{SurfaceKind, SurfaceModel};

fn perm_strategy(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_is_associative(
        p in perm_strategy(6),
        q in perm_strategy(6),
        r in perm_strategy(6),
    ) {
        prop_assert_eq!(p.then(&q).then(&r), p.then(&q.then(&r)));
    }

    #[test]
    fn inverse_cancels(p in perm_strategy(7)) {
        prop_assert!(p.then(&p.inverse()).is_identity());
        prop_assert!(p.inverse().then(&p).is_identity());
    }

    #[test]
    fn group_order_divides_degree_factorial(
        a in perm_strategy(5),
        b in perm_strategy(5),
    ) {
        let g = Group::from_generators(5, vec![a, b]).unwrap();
        prop_assert_eq!(factorial(5) % g.order(), 0);
        let classes = g.conjugacy_classes();
        let total: usize = classes.sizes().iter().sum();
        prop_assert_eq!(total, g.order());
    }

    #[test]
    fn conjugation_preserves_classes(
        a in perm_strategy(5),
        b in perm_strategy(5),
        pick in any::<u32>(),
    ) {
        let g = Group::from_generators(5, vec![a, b]).unwrap();
        let classes = g.conjugacy_classes();
        let t = pick % g.order() as u32;
        for x in 0..g.order() as u32 {
            prop_assert_eq!(classes.class_of(x), classes.class_of(g.conj(x, t)));
        }
    }

    #[test]
    fn subgroup_conjugacy_is_an_equivalence(
        a in perm_strategy(4),
        b in perm_strategy(4),
        i in any::<u32>(),
        j in any::<u32>(),
        k in any::<u32>(),
    ) {
        let g = Group::from_generators(4, vec![a, b]).unwrap();
        let subs = g.subgroups_up_to_conjugacy().unwrap();
        let pick = |x: u32| &subs[(x % subs.len() as u32) as usize];
        let (h1, h2, h3) = (pick(i), pick(j), pick(k));
        prop_assert!(g.are_conjugate(h1, h1));
        prop_assert_eq!(g.are_conjugate(h1, h2), g.are_conjugate(h2, h1));
        if g.are_conjugate(h1, h2) && g.are_conjugate(h2, h3) {
            prop_assert!(g.are_conjugate(h1, h3));
        }
        // Distinct lattice representatives are never conjugate.
        if h1 != h2 {
            prop_assert!(!g.are_conjugate(h1, h2));
        }
    }

    /// The canonical form is zero exactly when the stabilizer-class
    /// multisets agree, and isomorphism implies Gassmann equivalence.
    #[test]
    fn burnside_zero_iff_isomorphic(seed in any::<u64>(), pick in 0usize..10) {
        let pool = group_pool().unwrap();
        let g = &pool[pick % pool.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_gset(g, 6, &mut rng).unwrap();
        let b = random_gset(g, 6, &mut rng).unwrap();
        let e = burnside_canonicalize(g, &[&a], &[&b]).unwrap();
        let iso = is_isomorphic(&a, &b).unwrap();
        prop_assert_eq!(e.is_zero(), iso);
        if iso {
            prop_assert!(is_gassmann(&a, &b).unwrap());
        }
    }

    #[test]
    fn mu_is_additive_and_counts_size(seed in any::<u64>(), pick in 0usize..10) {
        let pool = group_pool().unwrap();
        let g = &pool[pick % pool.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_gset(g, 5, &mut rng).unwrap();
        let b = random_gset(g, 4, &mut rng).unwrap();
        let ea = burnside_canonicalize(g, &[&a], &[]).unwrap();
        let eb = burnside_canonicalize(g, &[&b], &[]).unwrap();
        let sum = ea.checked_add(&eb).unwrap();
        let mu_sum: Vec<i64> = ea
            .mu()
            .unwrap()
            .iter()
            .zip(eb.mu().unwrap())
            .map(|(x, y)| x + y)
            .collect();
        prop_assert_eq!(sum.mu().unwrap(), mu_sum);
        prop_assert_eq!(ea.mu().unwrap()[0], a.size() as i64);
        prop_assert_eq!(ea.mu().unwrap(), a.fixed_point_character().signed());
    }

    /// Gassmann equivalent sets have the same number of orbits, and any
    /// coset set is Gassmann equivalent only to sets with its kernel.
    #[test]
    fn gassmann_orbit_count_invariance(seed in any::<u64>(), pick in 0usize..10) {
        let pool = group_pool().unwrap();
        let g = &pool[pick % pool.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_gset(g, 6, &mut rng).unwrap();
        let b = random_gset(g, 6, &mut rng).unwrap();
        if is_gassmann(&a, &b).unwrap() {
            prop_assert_eq!(a.orbits().len(), b.orbits().len());
            let (ka, kb) = (a.kernel(), b.kernel());
            prop_assert_eq!(ka.elements(), kb.elements());
        }
    }

    /// A transitive set with normal stabilizer is isomorphic to anything
    /// Gassmann equivalent to it.
    #[test]
    fn normal_stabilizer_rigidity(pick in 0usize..10, which in any::<u32>()) {
        let pool = group_pool().unwrap();
        let g = &pool[pick % pool.len()];
        let subs = g.subgroups_up_to_conjugacy().unwrap();
        let h = &subs[(which % subs.len() as u32) as usize];
        if h.is_normal_in(g) {
            let a = gset_from_subgroup(g, h);
            for k in &subs {
                if k.order() == h.order() {
                    let b = gset_from_subgroup(g, k);
                    if is_gassmann(&a, &b).unwrap() {
                        prop_assert!(is_isomorphic(&a, &b).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn duality_swaps_degrees(r in 0usize..=6, j_pick in any::<u32>()) {
        let lattice = PicardLattice::blowup_p2(r).unwrap();
        let d = lattice.k_squared();
        if d >= 2 {
            let j = 1 + (j_pick as i64 % (d - 1));
            let list = rational_degree_classes(&lattice, j).unwrap();
            for c in &list.classes {
                let dual = adjoint_dual(&lattice, c);
                prop_assert_eq!(lattice.degree(&dual).unwrap(), d - j);
                prop_assert_eq!(
                    lattice.intersection(&dual, &dual).unwrap(),
                    (d - j) - 2
                );
                prop_assert_eq!(adjoint_dual(&lattice, &dual), c.clone());
            }
        }
    }

    /// c is additive under concatenation and antisymmetric under reversal.
    #[test]
    fn word_center_additivity(seed in any::<u64>(), pick in 0usize..10) {
        let pool = group_pool().unwrap();
        let g: &Arc<Group> = &pool[pick % pool.len()];
        let source = SurfaceModel::new(g.clone(), SurfaceKind::DP9, vec![]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w1 = random_word(&source, 2, &mut rng).unwrap();
        let mid = evaluate_word(&w1).unwrap().final_model;
        let w2 = random_word(&mid, 2, &mut rng).unwrap();
        let mut moves = w1.moves.clone();
        moves.extend(w2.moves.clone());
        let combined = MoveWord { source: source.clone(), moves };
        let total = c_of_word(&combined).unwrap();
        let sum = c_of_word(&w1)
            .unwrap()
            .checked_add(&c_of_word(&w2).unwrap())
            .unwrap();
        prop_assert_eq!(total, sum);

        // Reversal: the inverse word carries the negated center.
        let outcome = evaluate_word(&w1).unwrap();
        let reversed = MoveWord {
            source: outcome.final_model.clone(),
            moves: outcome.inverse_moves.clone(),
        };
        let c_rev = c_of_word(&reversed).unwrap();
        prop_assert_eq!(c_rev, c_of_word(&w1).unwrap().neg());

        // And the closed loop has zero center.
        prop_assert!(c_of_word(&closed_loop(&w1).unwrap()).unwrap().is_zero());
    }

    /// A trivial-action G-set splits into fixed points; removing one is
    /// inverse to re-adding it.
    #[test]
    fn fixed_point_surgery_round_trip(seed in any::<u64>(), pick in 0usize..10) {
        let pool = group_pool().unwrap();
        let g = &pool[pick % pool.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = random_gset(g, 3, &mut rng).unwrap();
        let with_pt = GSet::disjoint_union(&[base.clone(), GSet::point(g.clone())]).unwrap();
        let fixed = with_pt.globally_fixed_points();
        prop_assert!(!fixed.is_empty());
        let removed = with_pt.without_point(*fixed.last().unwrap()).unwrap();
        prop_assert!(is_isomorphic(&removed, &base).unwrap());
    }
}

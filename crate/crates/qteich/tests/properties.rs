use proptest::prelude::*;
use qteich::intertwiners::{
    b_operator, flip_intertwiner, intertwining_residual, transport_class, IntertwinerSet, ProjectiveMap,
};
use qteich::linalg::{CMat, C64};
use qteich::quantum_algebra::phi_elementary;
use qteich::representations::{
    homology_act, invariants, invariants_from_roots, local_rep_matrices, LocalRepResolved,
};
use qteich::surface_topology::{
    all_classes, apply_moves, examples, flip, sigma_form, HomologyClass, IdealTriangulation, Move,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn surface(k: usize) -> IdealTriangulation {
    match k % 5 {
        0 => examples::triangle(),
        1 => examples::square(),
        2 => examples::pentagon(),
        3 => examples::torus(),
        _ => examples::polygon(6),
    }
}

fn rep(lam: &IdealTriangulation, n: usize, seed: u64) -> LocalRepResolved {
    LocalRepResolved::random(lam, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn complex() -> impl Strategy<Value = C64> {
    (0.3f64..3.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| C64::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sigma_is_antisymmetric_with_zero_row_sums(k in 0usize..5, case in 1usize..=8) {
        for lam in [surface(k), examples::square_case(case)] {
            let s = sigma_form(&lam);
            for i in 0..lam.n() {
                prop_assert_eq!(s.entries[i].iter().sum::<i64>(), 0);
                for j in 0..lam.n() {
                    prop_assert_eq!(s.get(i, j), -s.get(j, i));
                }
            }
        }
    }

    #[test]
    fn double_flip_returns_the_triangulation(k in 0usize..5, pick in 0usize..16) {
        let lam = surface(k);
        let internal = lam.internal_edges();
        prop_assume!(!internal.is_empty());
        let e = internal[pick % internal.len()];
        let back = flip(&flip(&lam, e).unwrap(), e).unwrap();
        prop_assert!(back.same_as(&lam));
        prop_assert_eq!(sigma_form(&back), sigma_form(&lam));
    }

    #[test]
    fn relations_and_invariants(k in 0usize..5, n in 1usize..=3, seed in any::<u64>()) {
        let lam = surface(k);
        let r = rep(&lam, n, seed);
        let m = local_rep_matrices(&r);
        prop_assert!(m.relation_error() <= 1e-9);
        let inv = invariants(&m, 1e-9).unwrap();
        prop_assert!(inv.approx_eq(&invariants_from_roots(&r), 1e-9));
    }

    #[test]
    fn homology_action_preserves_invariants(n in 2usize..=4, seed in any::<u64>(), pick in any::<usize>()) {
        let lam = examples::torus();
        let r = rep(&lam, n, seed);
        let classes = all_classes(&lam, n as u32);
        let c = &classes[pick % classes.len()];
        let moved = homology_act(c, &r);
        prop_assert!(invariants_from_roots(&moved).approx_eq(&invariants_from_roots(&r), 1e-9));
        prop_assert_eq!(moved == r, c.is_zero());
    }

    #[test]
    fn class_arithmetic(n in 2u32..=6, a in prop::collection::vec(-12i64..12, 3), b in prop::collection::vec(-12i64..12, 3)) {
        let x = HomologyClass::from_ints(&a, n);
        let y = HomologyClass::from_ints(&b, n);
        prop_assert_eq!(x.add(&y), y.add(&x));
        prop_assert!(x.add(&x.neg()).is_zero());
        prop_assert_eq!(x.scale(n), HomologyClass::zero(3, n));
    }

    #[test]
    fn transported_cycles_stay_cycles(n in 2u32..=5, pick in any::<usize>(), e in 0usize..3) {
        let lam = examples::torus();
        let classes = all_classes(&lam, n);
        let c = &classes[pick % classes.len()];
        let moved = transport_class(c, &lam, &Move::Flip(e)).unwrap();
        prop_assert!(moved.is_cycle(&flip(&lam, e).unwrap()));
    }

    #[test]
    fn b_operators_have_unit_determinant(n in 2usize..=4, pick in any::<usize>()) {
        let lam = examples::torus();
        let classes = all_classes(&lam, n as u32);
        let b = b_operator(&classes[pick % classes.len()], &lam, n);
        prop_assert!((b.raw_det - C64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn flip_intertwiners_intertwine(case in 1usize..=8, n in 2usize..=3, seed in any::<u64>()) {
        let lam = examples::square_case(case);
        let r = rep(&lam, n, seed);
        let (v, l) = flip_intertwiner(&r, 0).unwrap();
        let src = phi_elementary(&lam, &Move::Flip(0), n).unwrap().evaluate_all(&local_rep_matrices(&r)).unwrap();
        prop_assert!(intertwining_residual(&l, &src, local_rep_matrices(&v).images()) <= 1e-8);
    }

    #[test]
    fn explicit_roots_flip_on_the_torus(roots in prop::collection::vec(complex(), 6), e in 0usize..3) {
        let lam = examples::torus();
        let y: Vec<[C64; 3]> = vec![[roots[0], roots[1], roots[2]], [roots[3], roots[4], roots[5]]];
        let r = LocalRepResolved::from_roots(lam.clone(), 3, &y).unwrap();
        // x_e = −1 makes the flip degenerate
        let x = invariants_from_roots(&r).x[e];
        prop_assume!((x + C64::new(1.0, 0.0)).norm() > 1e-3);
        let (v, l) = flip_intertwiner(&r, e).unwrap();
        let src = phi_elementary(&lam, &Move::Flip(e), 3).unwrap().evaluate_all(&local_rep_matrices(&r)).unwrap();
        let set = IntertwinerSet { source: r, target: v.clone(), base: ProjectiveMap::new(l) };
        for (_, el) in set.elements() {
            prop_assert!(intertwining_residual(el.matrix(), &src, local_rep_matrices(&v).images()) <= 1e-7);
        }
    }

    #[test]
    fn projective_maps_ignore_scalars(entries in prop::collection::vec(complex(), 9), s in complex()) {
        let m = CMat::from_row_slice(3, 3, &entries);
        let a = ProjectiveMap::new(m.clone());
        let b = ProjectiveMap::new(m * s);
        prop_assert!(a.distance(&b) < 1e-12);
        let back = ProjectiveMap::from_json(&a.to_json()).unwrap();
        prop_assert!(back.distance(&a) < 1e-15);
    }

    #[test]
    fn json_round_trips(k in 0usize..5, n in 1usize..=3, seed in any::<u64>()) {
        let lam = surface(k);
        let text = serde_json::to_string(&lam).unwrap();
        let back: IdealTriangulation = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &lam);
        let r = rep(&lam, n, seed);
        let j = serde_json::to_string(&r.to_json()).unwrap();
        let again = LocalRepResolved::from_json(lam.clone(), &serde_json::from_str(&j).unwrap()).unwrap();
        prop_assert_eq!(again, r);
    }

    #[test]
    fn move_sequences_round_trip_through_text(edges in prop::collection::vec(0usize..3, 0..6)) {
        let lam = examples::torus();
        let moves: Vec<Move> = edges.iter().map(|&e| Move::Flip(e)).collect();
        let text: Vec<String> = moves.iter().map(|m| m.to_string()).collect();
        let parsed: Vec<Move> = text.iter().map(|s| s.parse().unwrap()).collect();
        prop_assert_eq!(&parsed, &moves);
        prop_assert!(apply_moves(&lam, &parsed).is_ok());
    }
}

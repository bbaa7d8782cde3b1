use qteich::intertwiners::{
    compose_path, intertwining_residual, pa::torus_demo, pa_invariant, IntertwinerError, PaOptions, ProjectiveMap,
};
use qteich::quantum_algebra::phi_elementary;
use qteich::representations::{local_rep_matrices, LocalRepResolved};
use qteich::surface_topology::{apply_moves, examples, flip, flip_path, MappingClass, Move, DEFAULT_SEARCH_BUDGET};
use qteich::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn orbit_distance_to_identity(set: &qteich::intertwiners::IntertwinerSet) -> f64 {
    let id = ProjectiveMap::identity(set.base.dim());
    set.elements().iter().map(|(_, l)| l.distance(&id)).fold(f64::INFINITY, f64::min)
}

#[test]
fn flip_then_flip_back_contains_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for lam in [examples::square(), examples::pentagon(), examples::torus()] {
        for n in [2, 3] {
            let r = LocalRepResolved::random(&lam, n, &mut rng);
            let e = lam.internal_edges()[0];
            let set = compose_path(&r, &[Move::Flip(e), Move::Flip(e)], Some(&r), None).unwrap();
            assert!(orbit_distance_to_identity(&set) < 1e-8, "n={n}");
        }
    }
}

#[test]
fn found_paths_compose_to_intertwiners() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let lam = examples::pentagon();
    let target = apply_moves(&lam, &[Move::Flip(0), Move::Flip(1)]).unwrap();
    let path = flip_path(&lam, &target, DEFAULT_SEARCH_BUDGET).unwrap();
    assert_eq!(path.len(), 2);
    let r = LocalRepResolved::random(&lam, 2, &mut rng);
    let set = compose_path(&r, &path, None, None).unwrap();
    // the composite intertwines ρ∘Φ₀∘Φ₁ with the final representation
    let mut cur = lam.clone();
    let mut images = local_rep_matrices(&r).images().to_vec();
    for mv in &path {
        let phi = phi_elementary(&cur, mv, 2).unwrap();
        struct Imgs(Vec<qteich::CMat>, Vec<qteich::CMat>);
        impl qteich::quantum_algebra::GeneratorImages for Imgs {
            fn generators(&self) -> usize {
                self.0.len()
            }
            fn dim(&self) -> usize {
                self.0[0].nrows()
            }
            fn image(&self, g: usize) -> &qteich::CMat {
                &self.0[g]
            }
            fn image_inv(&self, g: usize) -> &qteich::CMat {
                &self.1[g]
            }
        }
        let inv = images.iter().map(|m| m.clone().try_inverse().unwrap()).collect();
        images = phi.evaluate_all(&Imgs(images, inv)).unwrap();
        cur = apply_moves(&cur, std::slice::from_ref(mv)).unwrap();
    }
    let res = intertwining_residual(set.base.matrix(), &images, local_rep_matrices(&set.target).images());
    assert!(res < 1e-8, "residual {res:e}");
}

#[test]
fn pentagon_needs_a_shared_triangle() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let lam = examples::polygon(6);
    let r = LocalRepResolved::random(&lam, 2, &mut rng);
    // fan diagonals 0–2 and 0–4 of the hexagon share no triangle
    assert_eq!(lam.internal_edges(), vec![6, 7, 8]);
    let err = qteich::intertwiners::verify_pentagon(&r, 6, 8);
    assert!(matches!(err, Err(IntertwinerError::NotPentagonConfiguration)));
    assert!(qteich::intertwiners::verify_pentagon(&r, 6, 7).unwrap().deviation < 1e-8);
}

#[test]
fn central_load_changes_the_certificates() {
    let (lam, mc) = torus_demo();
    let opts = PaOptions::default();
    for n in [2, 3, 4, 5] {
        let a = pa_invariant(&lam, &mc, n, None, 0, &opts).unwrap();
        let b = pa_invariant(&lam, &mc, n, Some(&a.shadow), 1, &opts).unwrap();
        assert!((a.h / b.h - qteich::quantum_algebra::q_pow(n, -2)).norm() < 1e-9);
        // the k = 1 intertwiner is not in the k = 0 orbit
        assert!(b.orbit.iter().all(|(_, l)| l.distance(&a.base) > 1e-3), "N={n}");
        let d = a.trace_distance(&b);
        if n == 3 {
            // this word does not separate the two loads at N = 3
            assert!(d < 1e-9, "N=3: {d:e}");
        } else {
            assert!(d > 1e-3, "N={n}: {d:e}");
        }
    }
}

#[test]
fn identity_mapping_class_gives_b_operators() {
    let lam = examples::torus();
    let mc = MappingClass::identity(&lam);
    let x = vec![C64::new(2.0, 0.0), C64::new(0.5, 0.0), C64::new(3.0, 0.0)];
    let inv = pa_invariant(&lam, &mc, 2, Some(&x), 0, &PaOptions::default()).unwrap();
    assert_eq!(inv.orbit.len(), 4);
    assert!(inv.base.approx_eq(&ProjectiveMap::identity(4), 1e-9));
}

#[test]
fn flipped_torus_is_a_torus() {
    let lam = examples::torus();
    for e in 0..3 {
        let f = flip(&lam, e).unwrap();
        assert_eq!(f.surface(), lam.surface());
        assert_eq!(qteich::representations::betti1(&f), 2);
    }
}
